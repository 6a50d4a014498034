"""Command-line front end.

Every subcommand is a thin wrapper over the library: parse flags, call
one construction or check, serialize the result.  Output on stdout is
machine readable (JSON with sorted keys, or DOT); diagnostics go to
stderr.  Exit status: 0 success, 1 validation hard-failure, 2 usage
error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from .cells import gen, sexpr, parse_cell, CellError
from .kernel import dim, normalize, cells_equal, check_cell
from .polygraph import Polygraph, validate_functor
from .walking import Tower, generators_E
from .constructions import truncate_intelligent
from .invertibility import (omegaE_cell_witness, check_set, classify,
                            witness_to_json)
from .marked import MarkedTower, comparison_report, closure_check

__all__ = ["main"]


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _load_poly(path: str | None, tower: Tower | None = None):
    if path is not None:
        with open(path) as fh:
            return Polygraph.from_json(fh.read())
    return (tower or Tower()).colimit


def _report_dict(rep):
    return {"ok": rep.ok,
            "hard": [[str(x) for x in row] for row in rep.hard],
            "unknown": [[str(x) for x in row] for row in rep.soft]}


# ---------------------------------------------------------------------------
# tower


def _tower_dot(tower: Tower, max_k: int) -> str:
    lines = ["digraph tower {", "  rankdir=TB;"]
    for k in range(max_k + 1):
        for name in generators_E(tower, k):
            lines.append(f'  "{name}" [dim={k}];')
    for k in range(2, max_k + 1):
        for name in generators_E(tower, k):
            side, parent = name.split(".", 1)
            lines.append(f'  "{parent}" -> "{name}" [label="{side}"];')
    lines.append("}")
    return "\n".join(lines)


def cmd_tower(args) -> int:
    tower = Tower()
    if args.action == "counts":
        for k in range(args.max_k + 1):
            print(f"{k} {len(generators_E(tower, k))}")
        return 0
    if args.action == "export":
        if args.format == "dot":
            print(_tower_dot(tower, args.max_k))
        else:
            print(tower.stage(args.max_k).polygraph.to_json())
        return 0
    # build: materialize and validate every stage up to max_k
    rows, bad = [], False
    for k in range(args.max_k + 1):
        stage = tower.stage(k)
        stage.polygraph.validate()
        row = {"k": k, "counts": stage.polygraph.counts(),
               "fresh": sorted(stage.fresh)}
        for leg in ("iota", "alpha", "beta"):
            f = getattr(stage, leg)
            if f is not None:
                rep = validate_functor(f)
                row[leg] = _report_dict(rep)
                bad = bad or not rep.ok
        rows.append(row)
    _emit({"stages": rows})
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# cells


def cmd_normalize(args) -> int:
    poly = _load_poly(args.polygraph)
    c = parse_cell(args.cell)
    check_cell(poly, c)
    print(sexpr(normalize(poly, c)))
    return 0


def cmd_eq(args) -> int:
    poly = _load_poly(args.polygraph)
    left, right = parse_cell(args.left), parse_cell(args.right)
    check_cell(poly, left)
    check_cell(poly, right)
    v = cells_equal(poly, left, right)
    print(v.kind)
    return 0 if v.kind == "equal" else 1


# ---------------------------------------------------------------------------
# witnesses


def cmd_witness(args) -> int:
    tower = Tower()
    c = parse_cell(args.cell)
    w = omegaE_cell_witness(tower, c)
    if args.action == "build":
        print(witness_to_json(tower.colimit, w, depth=args.depth))
        return 0
    rep = check_set([w], depth=args.depth)
    _emit({"cell": sexpr(c), "depth": args.depth,
           "checked": len(rep.entries),
           "equal": sum(1 for e in rep.entries if e[2].kind == "equal"),
           "unknown": len(rep.unknown), "unequal": len(rep.hard)})
    return 0 if rep.ok else 1


def cmd_classify(args) -> int:
    tower = Tower()
    c = parse_cell(args.cell)
    w = omegaE_cell_witness(tower, c)
    f = classify(tower, tower.colimit, c, w, args.max_k)
    rep = validate_functor(f)
    _emit({"cell": sexpr(c), "k": args.max_k,
           "assign": {name: sexpr(img) for name, img in f.assign.items()},
           "report": _report_dict(rep)})
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# functors / truncation


def cmd_functor(args) -> int:
    tower = Tower()
    rows, bad = [], False
    for k in range(1, args.max_k + 1):
        stage = tower.stage(k)
        for leg in ("iota", "alpha", "beta"):
            rep = validate_functor(getattr(stage, leg))
            rows.append({"k": k, "functor": leg, **_report_dict(rep)})
            bad = bad or not rep.ok
    _emit({"functors": rows})
    return 1 if bad else 0


def cmd_truncate(args) -> int:
    if args.polygraph is not None:
        poly = _load_poly(args.polygraph)
        print(truncate_intelligent(poly, args.n).to_json())
        return 0
    col = Tower().colimit
    print(truncate_intelligent(
        col.truncation(args.n + 1), args.n).to_json())
    return 0


# ---------------------------------------------------------------------------
# marked


def cmd_marked(args) -> int:
    mt = MarkedTower()
    if args.action == "build":
        rows = []
        for k in range(args.max_k + 1):
            stage = mt.stage(k)
            rows.append({"k": k, "counts": stage.polygraph.counts(),
                         "seeds": sorted(stage.marking.seeds)})
        _emit({"stages": rows})
        return 0
    rows, bad = [], False
    for k in range(args.max_k + 1):
        stage = mt.stage(k)
        for leg in ("iota", "alpha", "beta"):
            f = getattr(stage, leg)
            if f is None:
                continue
            rep = f.validate()
            rows.append({"k": k, "functor": f.name, **_report_dict(rep)})
            bad = bad or not rep.ok
        tested, failures = closure_check(
            stage.marking, random.Random(args.seed + k), count=50)
        rows.append({"k": k, "closure_tested": tested,
                     "closure_failures": failures})
        bad = bad or failures > 0
    _emit({"checks": rows})
    return 1 if bad else 0


def cmd_compare(args) -> int:
    mt = MarkedTower()
    problems = comparison_report(mt, args.max_k)
    if problems:
        for p in problems:
            print(f"comparison failure: {p}", file=sys.stderr)
        return 1
    print(f"isomorphism verified through stage {args.max_k}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="omegak",
        description="walking-equivalence tower, witness calculus, and "
                    "marked comparison")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tower", help="build, count, or export the tower")
    t.add_argument("action", choices=["build", "counts", "export"])
    t.add_argument("--max-k", type=int, default=4)
    t.add_argument("--format", choices=["json", "dot"], default="json")
    t.set_defaults(fn=cmd_tower)

    n = sub.add_parser("normalize", help="layered normal form of a cell")
    n.add_argument("cell")
    n.add_argument("--polygraph", default=None)
    n.set_defaults(fn=cmd_normalize)

    e = sub.add_parser("eq", help="decide equality of two cells")
    e.add_argument("left")
    e.add_argument("right")
    e.add_argument("--polygraph", default=None)
    e.set_defaults(fn=cmd_eq)

    w = sub.add_parser("witness",
                       help="bi-invertibility witness for a tower cell")
    w.add_argument("action", choices=["build", "check"])
    w.add_argument("cell")
    w.add_argument("--depth", type=int, default=1)
    w.set_defaults(fn=cmd_witness)

    c = sub.add_parser("classify",
                       help="classifying functor of a witnessed cell")
    c.add_argument("cell")
    c.add_argument("--max-k", type=int, default=2)
    c.set_defaults(fn=cmd_classify)

    f = sub.add_parser("functor", help="validate the tower functors")
    f.add_argument("action", choices=["validate"])
    f.add_argument("--max-k", type=int, default=4)
    f.set_defaults(fn=cmd_functor)

    tr = sub.add_parser("truncate",
                        help="presentation with relations at dimension n")
    tr.add_argument("n", type=int)
    tr.add_argument("--polygraph", default=None)
    tr.set_defaults(fn=cmd_truncate)

    m = sub.add_parser("marked", help="build or check the marked tower")
    m.add_argument("action", choices=["build", "check"])
    m.add_argument("--max-k", type=int, default=4)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(fn=cmd_marked)

    cp = sub.add_parser("compare", help="stagewise comparison diagrams")
    cp.add_argument("diagram", choices=["eta-mu"])
    cp.add_argument("--max-k", type=int, default=4)
    cp.set_defaults(fn=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CellError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
