"""Command-line interface: ``fpg <command> <catalog-entry> ...``."""

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .coset_enum import DEFAULT_MAX_COSETS, group_order, todd_coxeter
from .errors import FpgError
from .homology import five_term_check, h1, h2_fiber_product, induced_h2_kernel
from .nilpotent import dwyer_report, nilpotent_quotient, stallings_compare
from .pipeline import (
    VARIANTS,
    budget_from_env,
    catalog_list,
    catalog_validate,
    emit_report,
    get_entry,
    run_main_construction,
)
from .presentations import (
    PresentationMorphism,
    semidirect_product_RF,
    tietze_eliminate,
)
from .schreier import action_on_Rab, checksum, schreier_data
from .words import parse_word


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _table(args, entry):
    return todd_coxeter(entry.presentation, getattr(args, "max_cosets", DEFAULT_MAX_COSETS))


def _fiber(entry, table):
    """Tietze-reduced presentation of ``F x_Q F`` and its H_2 rank."""
    sd = schreier_data(table)
    tz = tietze_eliminate(semidirect_product_RF(entry.presentation, table))
    return tz, h2_fiber_product(sd).invariants.free_rank


def cmd_order(args) -> int:
    e = get_entry(args.entry, args.catalog)
    t = todd_coxeter(e.presentation, args.max_cosets, args.strategy)
    _dump({"entry": e.name, "order": group_order(t), "strategy": args.strategy})
    return 0


def cmd_schreier(args) -> int:
    e = get_entry(args.entry, args.catalog)
    sd = schreier_data(_table(args, e))
    mats = action_on_Rab(sd)
    _dump({"entry": e.name, "basis_count": sd.basis_count,
           "checksums": {name: checksum(m) for name, m in zip(e.presentation.generator_names, mats)}})
    if args.dump_matrices:
        with open(args.dump_matrices, "w", encoding="utf-8") as fh:
            for m in mats:
                fh.write(m.to_text())
    return 0


def cmd_h1(args) -> int:
    e = get_entry(args.entry, args.catalog)
    _dump({"entry": e.name, "H1": h1(e.presentation).to_json()})
    return 0


def cmd_h2_fiber(args) -> int:
    e = get_entry(args.entry, args.catalog)
    sd = schreier_data(_table(args, e))
    _dump({"entry": e.name, "H2(FxQF)": h2_fiber_product(sd).invariants.to_json()})
    return 0


def cmd_five_term(args) -> int:
    e = get_entry(args.entry, args.catalog)
    rep = five_term_check(schreier_data(_table(args, e)))
    out = rep.to_json()
    out.pop("maps")
    out["entry"] = e.name
    out["all_exact"] = rep.all_exact
    _dump(out)
    return 0


def cmd_kernel(args) -> int:
    e = get_entry(args.entry, args.catalog)
    ik = induced_h2_kernel(schreier_data(_table(args, e)))
    _dump({"entry": e.name, "H2(FxQF)": str(ik.h2_fiber), "H2(FxF)": str(ik.h2_direct),
           "kernel": ik.invariants.to_json(), "surjective": ik.surjective})
    return 0


def cmd_nq(args) -> int:
    e = get_entry(args.entry, args.catalog)
    budget = budget_from_env()
    if args.fiber:
        tz, _ = _fiber(e, _table(args, e))
        q = nilpotent_quotient(tz.presentation, args.cls, program=tz, budget_seconds=budget)
    else:
        q = nilpotent_quotient(e.presentation, args.cls, budget_seconds=budget)
    out = q.to_json()
    out["entry"] = e.name
    out["group"] = "F x_Q F" if args.fiber else "Q"
    _dump(out)
    return 0


def cmd_dwyer(args) -> int:
    e = get_entry(args.entry, args.catalog)
    budget = budget_from_env()
    table = _table(args, e)
    if args.fiber:
        tz, h2_rank = _fiber(e, table)
        rep = dwyer_report(tz.presentation, args.k, h2_rank=h2_rank, program=tz,
                           group="F x_Q F", budget_seconds=budget)
    else:
        rep = dwyer_report(e.presentation, args.k, table=table, group=e.name, budget_seconds=budget)
    out = rep.to_json()
    out["entry"] = e.name
    _dump(out)
    return 0


def read_map(path: str, source_rank: int, target_names) -> List:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != source_rank:
        raise FpgError(f"map file {path}: expected {source_rank} words, found {len(lines)}")
    return [parse_word(ln, target_names) for ln in lines]


def cmd_stallings(args) -> int:
    a = get_entry(args.source, args.catalog)
    b = get_entry(args.target, args.catalog)
    images = read_map(args.map, a.presentation.rank, b.presentation.generator_names)
    f = PresentationMorphism(a.presentation, b.presentation, tuple(images))
    rep = stallings_compare(f, args.cls, budget_seconds=budget_from_env())
    out = rep.to_json()
    out["all_isomorphisms"] = rep.all_isomorphisms
    out["first_failure"] = rep.first_failure()
    _dump(out)
    return 0


def cmd_main(args) -> int:
    e = get_entry(args.entry, args.catalog)
    report = run_main_construction(e, args.cls, args.presentation, budget_seconds=budget_from_env(),
                                   max_cosets=args.max_cosets)
    text = emit_report(report, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    if report.exit_code == 3:
        # full state for diagnosis
        sys.stderr.write(emit_report(report, "text"))
        sys.stderr.write(emit_report(report, "json"))
    return report.exit_code


def cmd_catalog(args) -> int:
    if args.action == "list":
        for e in catalog_list(args.path or args.catalog):
            print(f"{e.name}\t{e.presentation}")
        return 0
    errors = catalog_validate(args.path or args.catalog)
    for msg in errors:
        print(msg, file=sys.stderr)
    if not errors:
        print("catalog valid")
    return 1 if errors else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpg", description=__doc__)
    ap.add_argument("--version", action="version", version=f"fpg {__version__}")
    ap.add_argument("--catalog", help="catalog JSON file (default: the shipped catalog)")
    sub = ap.add_subparsers(dest="command", required=True)

    def entry_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("entry")
        p.add_argument("--max-cosets", type=int, default=DEFAULT_MAX_COSETS)
        p.set_defaults(fn=fn)
        return p

    p = entry_cmd("order", cmd_order, "order of Q by coset enumeration")
    p.add_argument("--strategy", choices=("hlt", "felsch"), default="hlt")
    p = entry_cmd("schreier", cmd_schreier, "Schreier basis count and action checksums")
    p.add_argument("--dump-matrices", metavar="PATH")
    entry_cmd("h1", cmd_h1, "abelianization of Q")
    entry_cmd("h2-fiber", cmd_h2_fiber, "H2 of the fiber product")
    entry_cmd("five-term", cmd_five_term, "five-term exact sequence check")
    entry_cmd("kernel", cmd_kernel, "kernel of H2(F x_Q F) -> H2(F x F)")
    p = entry_cmd("nq", cmd_nq, "lower central quotients")
    p.add_argument("--class", dest="cls", type=int, required=True)
    p.add_argument("--fiber", action="store_true", help="use F x_Q F instead of Q")
    p = entry_cmd("dwyer", cmd_dwyer, "Dwyer filtration phi_2..phi_K+1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fiber", action="store_true", help="use F x_Q F instead of Q")

    p = sub.add_parser("stallings", help="compare lower central quotients along a map")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", required=True, help="one target word per source generator")
    p.add_argument("--class", dest="cls", type=int, required=True)
    p.set_defaults(fn=cmd_stallings)

    p = entry_cmd("main-construction", cmd_main, "full construction and claim checklist")
    p.add_argument("--class", dest="cls", type=int, default=3)
    p.add_argument("--presentation", choices=VARIANTS, default="tietze")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "text", "csv"), default="json")

    p = sub.add_parser("catalog", help="list or validate a catalog")
    p.add_argument("action", choices=("list", "validate"))
    p.add_argument("path", nargs="?")
    p.set_defaults(fn=cmd_catalog)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FpgError, ValueError, OSError) as exc:
        print(f"fpg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
