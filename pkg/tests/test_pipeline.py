import csv
import io
import json

import pytest

from fpg.errors import CatalogError, StageError
from fpg.pipeline import (
    ConstructionReport,
    GroupCatalogEntry,
    _run_stage,
    budget_from_env,
    catalog_list,
    catalog_validate,
    emit_report,
    get_entry,
    render_csv,
    render_json,
    render_text,
    run_main_construction,
)
from fpg.presentations import FinitePresentation


def write_catalog(tmp_path, groups):
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps({"groups": groups}))
    return str(path)


def test_shipped_catalog_valid():
    entries = catalog_list()
    assert len(entries) >= 4
    assert catalog_validate() == []
    bi = get_entry("binary-icosahedral")
    assert bi.expected_order == 120 and bi.h3_claim == "Z/120"


def test_catalog_reports_bad_word(tmp_path):
    path = write_catalog(tmp_path, [{"name": "bad", "generators": ["a", "b"], "relators": ["ab("]}])
    errors = catalog_validate(path)
    assert len(errors) == 1
    assert "entry 'bad'" in errors[0] and "relators[0]" in errors[0]
    assert "position 3" in errors[0]


def test_catalog_duplicate_names(tmp_path):
    g = {"name": "z2", "generators": ["a"], "relators": ["aa"]}
    errors = catalog_validate(write_catalog(tmp_path, [g, g]))
    assert errors == ["entry 'z2': duplicate entry name"]
    with pytest.raises(CatalogError):
        catalog_list(write_catalog(tmp_path, [g, g]))


def test_catalog_checks_invariants(tmp_path):
    g = {"name": "z3", "generators": ["a"], "relators": ["aaa"], "expected": {"order": 2, "h1": "Z/2"}}
    errors = catalog_validate(write_catalog(tmp_path, [g]))
    assert any("expected.order" in e for e in errors)
    assert any("expected.h1" in e for e in errors)


def test_catalog_unknown_entry():
    with pytest.raises(CatalogError):
        get_entry("no-such-group")


def test_perfectness_gate():
    r = run_main_construction(get_entry("Z2"))
    assert r.banner == "hypotheses violated: H₁ = ℤ/2 ≠ 0"
    assert r.claims == [] and r.verdict is None
    assert r.exit_code == 2


def test_balance_gate():
    r = run_main_construction(get_entry("A5"))
    assert r.banner.startswith("hypotheses violated")
    assert r.exit_code == 2


def test_trivial_group_entry():
    r = run_main_construction(get_entry("trivial"))
    assert r.banner == "hypotheses violated: H₃ claim absent"
    assert r.stages["induced_h2_kernel"]["kernel"] == "0"
    assert r.claims == [] and r.verdict is None and r.gamma_omega is None


def test_stage_errors_are_attributed():
    r = ConstructionReport("x", "tietze", 1, {})
    with pytest.raises(StageError) as err:
        _run_stage(r, "boom", None, lambda: 1 // 0)
    assert err.value.stage == "boom"
    assert isinstance(err.value.cause, ZeroDivisionError)


def test_infinite_group_fails_in_todd_coxeter():
    e = GroupCatalogEntry("free", FinitePresentation.parse("ab", ["[a,b]", "[a,b]"]))
    with pytest.raises(StageError) as err:
        run_main_construction(e, max_cosets=100)
    assert err.value.stage == "todd_coxeter"


def test_budget_env(monkeypatch):
    monkeypatch.delenv("FPG_BUDGET_SECONDS", raising=False)
    assert budget_from_env() is None
    monkeypatch.setenv("FPG_BUDGET_SECONDS", "2.5")
    assert budget_from_env() == 2.5


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_main_construction(get_entry("trivial"), variant="huge")
    with pytest.raises(ValueError):
        run_main_construction(get_entry("trivial"), class_bound=0)


@pytest.fixture(scope="module")
def flagship():
    return run_main_construction(get_entry("binary-icosahedral"), 3)


@pytest.mark.slow
def test_flagship_report(flagship):
    r = flagship
    assert r.exit_code == 0 and r.banner is None
    st = r.stages
    assert st["todd_coxeter"]["order"] == 120
    assert st["schreier_data"]["rank_R"] == 121
    assert st["five_term"]["H1(FxQF)"] == st["five_term"]["H1(FxF)"] == "Z^4"
    assert st["semidirect_product_RF"]["H1"] == st["five_term"]["H1(FxQF)"]
    assert st["induced_h2_kernel"]["kernel"] == "Z^119"
    assert st["tietze_eliminate"]["generators"] == 4
    assert st["free_central_extension"]["relator_classes_central"]
    assert all(c.passed for c in r.claims)
    assert r.verdict == "kernel is not relatively perfect"
    assert all("op" in v for v in st.values())
    assert "not computed" in r.gamma_omega["status"]


@pytest.mark.slow
def test_flagship_renderings(flagship):
    js = render_json(flagship)
    assert js.endswith("\n")
    data = json.loads(js)
    assert "timings" not in json.dumps(data)
    assert js == json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    text = render_text(flagship)
    assert text.count("[PASS]") == len(flagship.claims)
    assert "timings" in text
    rows = list(csv.DictReader(io.StringIO(render_csv(flagship))))
    assert [int(r["k"]) for r in rows] == [1, 2, 3]
    assert [r["phi_k_plus_1"] for r in rows] == ["Z^123", "Z^119", "Z^119"]


@pytest.mark.slow
def test_flagship_json_deterministic(flagship, tmp_path):
    again = run_main_construction(get_entry("binary-icosahedral"), 3)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    emit_report(flagship, "json", str(p1))
    emit_report(again, "json", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_emit_report_rejects_unknown_format():
    r = run_main_construction(get_entry("Z2"))
    with pytest.raises(ValueError):
        emit_report(r, "xml")
    assert render_csv(r) == "k,phi_k_plus_1,stable,contains_kernel\n"
