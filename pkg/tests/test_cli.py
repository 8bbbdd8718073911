import json
import subprocess
import sys

import pytest

from fpg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_order(capsys):
    code, out, _ = run(capsys, "order", "binary-icosahedral", "--strategy", "felsch")
    assert code == 0
    assert json.loads(out)["order"] == 120


def test_order_limit(capsys):
    code, _, err = run(capsys, "order", "binary-icosahedral", "--max-cosets", "50")
    assert code == 1 and "fpg: error" in err


def test_schreier_dump(capsys, tmp_path):
    path = tmp_path / "m.txt"
    code, out, _ = run(capsys, "schreier", "binary-icosahedral", "--dump-matrices", str(path))
    assert code == 0 and json.loads(out)["basis_count"] == 121
    assert path.read_text().startswith("121 121\n")


def test_homology_commands(capsys):
    _, out, _ = run(capsys, "h1", "Z2")
    assert json.loads(out)["H1"]["text"] == "Z/2"
    _, out, _ = run(capsys, "five-term", "Z2")
    assert json.loads(out)["all_exact"]
    _, out, _ = run(capsys, "kernel", "binary-icosahedral")
    data = json.loads(out)
    assert data["kernel"]["free_rank"] == 119 and data["surjective"]
    _, out, _ = run(capsys, "h2-fiber", "binary-icosahedral")
    assert json.loads(out)["H2(FxQF)"]["free_rank"] == 123


def test_nq_and_dwyer(capsys):
    _, out, _ = run(capsys, "nq", "Z2", "--class", "2")
    assert json.loads(out)["section_ranks"] == [0, 0]
    _, out, _ = run(capsys, "nq", "binary-icosahedral", "--class", "2", "--fiber")
    assert json.loads(out)["section_ranks"] == [4, 2]
    _, out, _ = run(capsys, "dwyer", "A5", "--k", "2")
    assert json.loads(out)["H2"] == "Z/2"


def test_stallings(capsys, tmp_path):
    m = tmp_path / "map.txt"
    m.write_text("a\nb\n")
    code, out, _ = run(capsys, "stallings", "A5", "A5", "--map", str(m), "--class", "2")
    assert code == 0 and json.loads(out)["all_isomorphisms"]
    m.write_text("a\n")
    code, _, err = run(capsys, "stallings", "A5", "A5", "--map", str(m), "--class", "2")
    assert code == 1 and "expected 2 words" in err


def test_main_construction_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "main-construction", "Z2")
    assert code == 2
    assert json.loads(out)["banner"] == "hypotheses violated: H₁ = ℤ/2 ≠ 0"
    out_path = tmp_path / "t.csv"
    code, _, _ = run(capsys, "main-construction", "trivial", "--format", "csv", "--out", str(out_path))
    assert code == 2
    assert out_path.read_text().splitlines()[0] == "k,phi_k_plus_1,stable,contains_kernel"


def test_catalog_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "binary-icosahedral" in out
    code, out, _ = run(capsys, "catalog", "validate")
    assert code == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"groups": [{"name": "x", "generators": ["a"], "relators": ["a("]}]}))
    code, _, err = run(capsys, "catalog", "validate", str(bad))
    assert code == 1 and "entry 'x'" in err


@pytest.mark.slow
def test_console_script_main_construction(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "fpg.cli", "main-construction", "binary-icosahedral",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["verdict"] == "kernel is not relatively perfect"
