"""End-to-end construction report and catalog handling."""

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .coset_enum import DEFAULT_MAX_COSETS, group_order, todd_coxeter
from .errors import BudgetExceeded, CatalogError, FpgError, StageError, WordSyntaxError
from .homology import (
    five_term_check,
    h1,
    h2_fiber_product,
    induced_h2_kernel,
    schur_multiplier_finite,
)
from .nilpotent import dwyer_report, nilpotent_quotient, relator_values, stallings_compare
from .presentations import (
    FinitePresentation,
    PresentationMorphism,
    fiber_product_inclusion,
    is_balanced,
    semidirect_product_RF,
    tietze_eliminate,
)
from .schreier import expand_basis_element, schreier_data
from .words import format_word
from .zlinalg import AbelianGroupInvariants, IntMatrix

VARIANTS = ("big", "tietze")


def pretty(g: AbelianGroupInvariants) -> str:
    return str(g).replace("Z", "ℤ")


# --- catalog -------------------------------------------------------------------

@dataclass(frozen=True)
class GroupCatalogEntry:
    name: str
    presentation: FinitePresentation
    expected_order: Optional[int] = None
    expected_h1: Optional[AbelianGroupInvariants] = None
    h3_claim: Optional[str] = None

    def to_json(self) -> dict:
        out: Dict[str, Any] = {
            "name": self.name,
            "generators": list(self.presentation.generator_names),
            "relators": self.presentation.format_relators(),
        }
        expected = {}
        if self.expected_order is not None:
            expected["order"] = self.expected_order
        if self.expected_h1 is not None:
            expected["h1"] = str(self.expected_h1)
        if self.h3_claim is not None:
            expected["h3_claim"] = self.h3_claim
        out["expected"] = expected
        return out


def default_catalog_path() -> str:
    return str(resources.files("fpg") / "data" / "catalog.json")


def _parse_entry(raw: Any, index: int, errors: List[str]) -> Optional[GroupCatalogEntry]:
    if not isinstance(raw, dict):
        errors.append(f"entry {index}: not an object")
        return None
    name = raw.get("name")
    label = f"entry {name!r}" if isinstance(name, str) else f"entry {index}"
    if not isinstance(name, str) or not name:
        errors.append(f"{label}: field 'name' must be a non-empty string")
        return None
    gens = raw.get("generators")
    if not isinstance(gens, list) or not all(isinstance(g, str) and g for g in gens):
        errors.append(f"{label}: field 'generators' must be a list of names")
        return None
    if len(set(gens)) != len(gens):
        errors.append(f"{label}: field 'generators' has repeated names")
        return None
    rels = raw.get("relators", [])
    if not isinstance(rels, list) or not all(isinstance(r, str) for r in rels):
        errors.append(f"{label}: field 'relators' must be a list of words")
        return None
    ok = True
    for k, r in enumerate(rels):
        try:
            FinitePresentation.parse(gens, [r])
        except WordSyntaxError as exc:
            errors.append(f"{label}: field 'relators[{k}]': {exc}")
            ok = False
        except ValueError as exc:
            errors.append(f"{label}: field 'relators[{k}]': {exc}")
            ok = False
    if not ok:
        return None
    expected = raw.get("expected", {})
    if not isinstance(expected, dict):
        errors.append(f"{label}: field 'expected' must be an object")
        return None
    order = expected.get("order")
    if order is not None and (not isinstance(order, int) or isinstance(order, bool) or order < 1):
        errors.append(f"{label}: field 'expected.order' must be a positive integer")
        return None
    h1_inv = None
    if expected.get("h1") is not None:
        try:
            h1_inv = AbelianGroupInvariants.parse(str(expected["h1"]))
        except ValueError as exc:
            errors.append(f"{label}: field 'expected.h1': {exc}")
            return None
    claim = expected.get("h3_claim")
    if claim is not None and not isinstance(claim, str):
        errors.append(f"{label}: field 'expected.h3_claim' must be a string")
        return None
    return GroupCatalogEntry(name, FinitePresentation.parse(gens, rels), order, h1_inv, claim)


def _read_catalog(path: Optional[str]):
    path = path or default_catalog_path()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("groups"), list):
        raise CatalogError(f"catalog {path}: top level must be an object with a 'groups' list")
    errors: List[str] = []
    entries = []
    seen = set()
    for i, raw in enumerate(data["groups"]):
        e = _parse_entry(raw, i, errors)
        if e is None:
            continue
        if e.name in seen:
            errors.append(f"entry {e.name!r}: duplicate entry name")
            continue
        seen.add(e.name)
        entries.append(e)
    return entries, errors


def catalog_validate(path: Optional[str] = None, check_invariants: bool = True,
                     max_cosets: int = 100_000) -> List[str]:
    """Error messages (empty when valid). With ``check_invariants`` the
    expected ``h1`` and ``order`` fields are recomputed."""
    try:
        entries, errors = _read_catalog(path)
    except CatalogError as exc:
        return [str(exc)]
    if check_invariants:
        for e in entries:
            if e.expected_h1 is not None and h1(e.presentation) != e.expected_h1:
                errors.append(f"entry {e.name!r}: field 'expected.h1' is {e.expected_h1}, "
                              f"computed {h1(e.presentation)}")
            if e.expected_order is not None:
                try:
                    n = group_order(todd_coxeter(e.presentation, max_cosets))
                except FpgError:
                    continue
                if n != e.expected_order:
                    errors.append(f"entry {e.name!r}: field 'expected.order' is {e.expected_order}, computed {n}")
    return errors


def catalog_list(path: Optional[str] = None) -> List[GroupCatalogEntry]:
    entries, errors = _read_catalog(path)
    if errors:
        raise CatalogError("; ".join(errors))
    return entries


def get_entry(name: str, path: Optional[str] = None) -> GroupCatalogEntry:
    for e in catalog_list(path):
        if e.name == name:
            return e
    raise CatalogError(f"no catalog entry named {name!r}")


# --- report ----------------------------------------------------------------------

@dataclass
class Claim:
    id: str
    statement: str
    passed: bool

    def to_json(self) -> dict:
        return {"id": self.id, "statement": self.statement, "passed": self.passed}


@dataclass
class ConstructionReport:
    entry: str
    variant: str
    class_bound: int
    inputs: Dict[str, Any]
    stages: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    hypotheses: Dict[str, Any] = field(default_factory=dict)
    banner: Optional[str] = None
    claims: List[Claim] = field(default_factory=list)
    gamma_omega: Optional[Dict[str, Any]] = None
    verdict: Optional[str] = None
    notes: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    dwyer_rows: List[Dict[str, Any]] = field(default_factory=list)
    version: str = __version__

    @property
    def hypotheses_ok(self) -> bool:
        return self.banner is None

    @property
    def exit_code(self) -> int:
        if not self.hypotheses_ok:
            return 2
        if not all(c.passed for c in self.claims):
            return 3
        return 0

    def to_json(self) -> dict:
        """Everything except timings, so identical inputs give identical output."""
        return {
            "toolkit_version": self.version,
            "inputs": self.inputs,
            "hypotheses": self.hypotheses,
            "banner": self.banner,
            "stages": self.stages,
            "claims": [c.to_json() for c in self.claims],
            "gamma_omega": self.gamma_omega,
            "verdict": self.verdict,
            "notes": self.notes,
            "exit_code": self.exit_code,
        }


def _run_stage(report: ConstructionReport, name: str, budget: Optional[float], fn: Callable):
    start = time.perf_counter()
    try:
        out = fn()
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    elapsed = time.perf_counter() - start
    report.timings[name] = elapsed
    if budget is not None and elapsed > budget:
        raise StageError(name, BudgetExceeded(f"took {elapsed:.1f}s, budget {budget:.1f}s"))
    return out


def budget_from_env() -> Optional[float]:
    raw = os.environ.get("FPG_BUDGET_SECONDS")
    if not raw:
        return None
    try:
        value = float(raw)
    except ValueError:
        raise FpgError(f"FPG_BUDGET_SECONDS must be a number, got {raw!r}") from None
    if value <= 0:
        raise FpgError("FPG_BUDGET_SECONDS must be positive")
    return value


def run_main_construction(entry: GroupCatalogEntry, class_bound: int = 3, variant: str = "tietze",
                          budget_seconds: Optional[float] = None,
                          max_cosets: int = DEFAULT_MAX_COSETS) -> ConstructionReport:
    """Build ``F x_Q F``, its homology, the kernel of ``H_2(F x_Q F) -> H_2(F x F)``,
    the free central extension, and check the resulting claims up to ``class_bound``."""
    if variant not in VARIANTS:
        raise ValueError(f"presentation variant must be one of {VARIANTS}")
    if class_bound < 1:
        raise ValueError("class bound must be at least 1")
    p = entry.presentation
    report = ConstructionReport(entry.name, variant, class_bound, {
        "entry": entry.name,
        "generators": list(p.generator_names),
        "relators": p.format_relators(),
        "presentation_variant": variant,
        "class_bound": class_bound,
        "h3_claim": entry.h3_claim,
    })
    if class_bound > 3:
        report.notes.append(f"class bound {class_bound} above the default 3: collection cost grows steeply")
    st = report.stages
    B = budget_seconds

    table = _run_stage(report, "todd_coxeter", B, lambda: todd_coxeter(p, max_cosets))
    order = group_order(table)
    st["todd_coxeter"] = {"op": "coset_enum.todd_coxeter", "order": order}
    sd = _run_stage(report, "schreier_data", B, lambda: schreier_data(table))
    st["schreier_data"] = {"op": "schreier.schreier_data", "rank_R": sd.basis_count}
    hq = _run_stage(report, "h1", B, lambda: h1(p))
    st["h1"] = {"op": "homology.h1", "H1(Q)": str(hq)}

    balanced = is_balanced(p)
    perfect = hq.is_trivial
    report.hypotheses = {"balanced": balanced, "perfect": perfect}
    if not balanced:
        report.banner = (f"hypotheses violated: presentation not balanced "
                         f"({len(p.relators)} relators, {p.rank} generators)")
        return report
    if not perfect:
        report.banner = f"hypotheses violated: H₁ = {pretty(hq)} ≠ 0"
        return report

    h2q = _run_stage(report, "schur_multiplier", B, lambda: schur_multiplier_finite(p, sd))
    st["schur_multiplier"] = {"op": "homology.schur_multiplier_finite", "H2(Q)": str(h2q)}
    superperfect = h2q.is_trivial
    report.hypotheses["superperfect"] = superperfect
    claim_text = entry.h3_claim
    h3_nonzero = claim_text is not None and not AbelianGroupInvariants.parse(claim_text).is_trivial
    report.hypotheses["h3_claim"] = claim_text
    if not superperfect:
        report.banner = f"hypotheses violated: H₂ = {pretty(h2q)} ≠ 0"
        return report
    if not h3_nonzero:
        report.banner = "hypotheses violated: H₃ claim absent"

    ft = _run_stage(report, "five_term", B, lambda: five_term_check(sd))
    st["five_term"] = {"op": "homology.five_term_check", "H2(Q)": str(ft.h2Q),
                       "H1(FxQF)": str(ft.h1FQF), "H1(FxF)": str(ft.h1FF), "H1(Q)": str(ft.h1Q),
                       "exact": ft.exact, "well_defined": ft.well_defined}
    fib = _run_stage(report, "h2_fiber_product", B, lambda: h2_fiber_product(sd))
    st["h2_fiber_product"] = {"op": "homology.h2_fiber_product", "H2(FxQF)": str(fib.invariants)}
    ik = _run_stage(report, "induced_h2_kernel", B, lambda: induced_h2_kernel(sd))
    st["induced_h2_kernel"] = {"op": "homology.induced_h2_kernel", "H2(FxF)": str(ik.h2_direct),
                               "kernel": str(ik.invariants), "surjective": ik.surjective}

    big = _run_stage(report, "semidirect_product_RF", B, lambda: semidirect_product_RF(p, table))
    h1_big = _run_stage(report, "h1_fiber_presentation", B, lambda: h1(big))
    st["semidirect_product_RF"] = {"op": "presentations.semidirect_product_RF", "generators": big.rank,
                                   "relators": len(big.relators), "H1": str(h1_big)}
    tz = _run_stage(report, "tietze_eliminate", B, lambda: tietze_eliminate(big))
    small = tz.presentation
    kept_names = list(small.generator_names)
    basis_gens = [g for g in tz.kept_generators if g < sd.basis_count]
    st["tietze_eliminate"] = {
        "op": "presentations.tietze_eliminate", "generators": small.rank,
        "relators": len(small.relators), "minimal": tz.minimal, "kept_generators": kept_names,
        "total_relator_length": small.total_length(),
    }
    fp_names = p.generator_names
    st["generating_set"] = {
        "op": "pipeline.run_main_construction",
        "diagonal": [f"({n},{n})" for n in fp_names],
        "basis": [f"({format_word(expand_basis_element(sd, g), fp_names)},1)" for g in basis_gens],
    }

    incl = fiber_product_inclusion(p, table)
    if variant == "big":
        source, program, f_images = big, None, incl.images
    else:
        source, program = small, tz
        f_images = tuple(incl.images[g] for g in tz.kept_generators)
    f = PresentationMorphism(source, incl.target, f_images)
    stall = _run_stage(report, "stallings_compare", B,
                       lambda: stallings_compare(f, class_bound, source_program=program, budget_seconds=B))
    st["stallings_compare"] = {"op": "nilpotent.stallings_compare", "presentation": variant,
                               "certified": stall.certified,
                               "sections": [s.to_json() for s in stall.sections]}

    # the free central extension of the fiber product, on the reduced presentation
    W = _run_stage(report, "free_central_extension", B,
                   lambda: nilpotent_quotient(small, class_bound, central_relators=True,
                                              program=tz, budget_seconds=B))
    coll = W.collector
    rvals = relator_values(small, coll, W.images, tz)
    central = all(not any(coll.commutator(x, r)) for r in rvals for x in W.images)
    st["free_central_extension"] = {
        "op": "nilpotent.nilpotent_quotient", "presentation": "tietze",
        "relators": len(small.relators), "class": class_bound,
        "sections": [str(s) for s in W.sections], "relator_classes_central": central,
    }

    kernel_cols = [tz.project_relator_vector(c) for c in ik.kernel.columns()]
    K = IntMatrix.from_columns(kernel_cols, len(small.relators)) if kernel_cols else IntMatrix.zeros(len(small.relators), 0)
    dw = _run_stage(report, "dwyer_phi", B,
                    lambda: dwyer_report(small, class_bound, h2_rank=fib.invariants.free_rank,
                                         program=tz, test_lattice=K, group=entry.name,
                                         budget_seconds=B))
    st["dwyer_phi"] = {"op": "nilpotent.dwyer_phi", "presentation": "tietze", "H2": str(dw.h2),
                       "kernel": str(dw.kernel), "rows": [r.to_json() for r in dw.rows]}
    report.dwyer_rows = [r.to_json() for r in dw.rows]
    if variant == "big":
        report.notes.append("the Dwyer stage ran on the Tietze-reduced presentation: the free central "
                            "extension of the large presentation has a rank-%d abelianization" % big.rank)

    kernel_nonzero = not ik.invariants.is_trivial
    report.notes.append("relator-class centrality is checked at the computed class; residual "
                        "nilpotence of F x F is assumed, not verified")
    report.notes.append("finite normal generation of the kernel is not checked")
    if not report.hypotheses_ok:
        return report

    k = p.rank
    two_k = AbelianGroupInvariants(2 * k)
    claims = report.claims
    if entry.expected_order is not None:
        claims.append(Claim("order", f"|Q| = {entry.expected_order}", order == entry.expected_order))
    claims.append(Claim("superperfect", "balanced, perfect and superperfect", balanced and perfect and superperfect))
    claims.append(Claim("h1_fiber", f"H1(F x_Q F) = H1(F x F) = Z^{2 * k}",
                        ft.h1FQF == two_k and ft.h1FF == two_k and h1_big == two_k))
    claims.append(Claim("five_term_exact", "five-term sequence exact at every junction", ft.all_exact))
    claims.append(Claim("h2_onto", "H2(F x_Q F) -> H2(F x F) is onto", ik.surjective))
    claims.append(Claim("kernel_nonzero", f"kernel of H2(F x_Q F) -> H2(F x F) is nonzero (H3(Q) = {claim_text})",
                        kernel_nonzero))
    claims.append(Claim("kernel_central", "relator classes are central in the free central extension", central))
    claims.append(Claim("stallings", f"F x_Q F -> F x F is an isomorphism on gamma_k/gamma_k+1 for k <= {class_bound}",
                        stall.all_isomorphisms))
    claims.append(Claim("dwyer", f"the kernel lies in phi_k+1 for k <= {class_bound}", dw.all_contain))
    not_rel_perfect = kernel_nonzero and central
    claims.append(Claim("not_relatively_perfect", "kernel nonzero and central, so not relatively perfect",
                        not_rel_perfect))
    report.gamma_omega = {
        "invariants": str(ik.invariants),
        "status": "identified with the induced-H2 kernel through Stallings, the Dwyer filtration "
                  "and centrality; not computed directly",
    }
    if not_rel_perfect:
        report.verdict = "kernel is not relatively perfect"
    return report


# --- rendering ---------------------------------------------------------------------

def render_json(report: ConstructionReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_text(report: ConstructionReport) -> str:
    lines = [f"fpg {report.version}: main construction for {report.entry}",
             f"presentation variant: {report.variant}, class bound: {report.class_bound}"]
    if report.banner:
        lines.append(f"*** {report.banner} ***")
    for name, data in report.stages.items():
        fields = ", ".join(f"{k}={v}" for k, v in data.items() if k != "op")
        lines.append(f"  {name} [{data['op']}]: {fields}")
    if report.claims:
        lines.append("claims:")
        for c in report.claims:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.statement}")
    if report.gamma_omega:
        lines.append(f"gamma_omega: {report.gamma_omega['invariants']} ({report.gamma_omega['status']})")
    if report.verdict:
        lines.append(f"verdict: {report.verdict}")
    for n in report.notes:
        lines.append(f"note: {n}")
    if report.timings:
        lines.append("timings (s): " + ", ".join(f"{k}={v:.2f}" for k, v in report.timings.items()))
    return "\n".join(lines) + "\n"


def render_csv(report: ConstructionReport) -> str:
    """The Dwyer table, one row per ``k``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "phi_k_plus_1", "stable", "contains_kernel"])
    for row in report.dwyer_rows:
        w.writerow([row["k"], row["phi_k_plus_1"], str(row["stable"]).lower(),
                    str(row.get("contains_kernel", "")).lower()])
    return buf.getvalue()


def emit_report(report: ConstructionReport, fmt: str = "json", path: Optional[str] = None) -> str:
    renderers = {"json": render_json, "text": render_text, "csv": render_csv}
    if fmt not in renderers:
        raise ValueError(f"unknown format {fmt!r}")
    out = renderers[fmt](report)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    return out
