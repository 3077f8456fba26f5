"""Command-line front end.

Exit codes: 0 success, 1 precondition violation, 2 guard or budget exceeded,
3 internal invariant violation (a bug: some computed object contradicts a
proven bound).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .core import (
    Family,
    GuardExceeded,
    InternalInvariantViolation,
    PreconditionError,
    complete_k_family,
    load_family,
    stable_subfamily,
)
from .defect import ecd
from .kneser import Coloring, chromatic_number, edges, greedy_min_element_coloring
from .tucker import MAX_Z2_N, MAX_ZP_FACES, audit_tucker_z2, audit_zptucker, zp_face_count
from .verify import (
    CSV_COLUMNS,
    FamilyGenerator,
    conjecture_check,
    counterexample_scan,
    lemma_compose_witness,
    thm1_check,
    thm2_check,
)

SCHEMA = 1
EXIT_OK, EXIT_PRECONDITION, EXIT_GUARD, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PRECONDITION)


def _family_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--family", metavar="FILE", help='JSON file {"n": N, "sets": [[...], ...]}')
    src.add_argument("--complete", nargs=2, type=int, metavar=("N", "K"), help="all K-subsets of [N]")
    src.add_argument("--random", type=int, metavar="SEED", help="seeded random family (see --n, --members)")
    p.add_argument("--n", type=int, default=6, help="ground size for --random")
    p.add_argument("--members", type=int, default=6, help="maximum member count for --random")
    p.add_argument("--max-n", type=int, default=64, help="refuse families with a larger ground set")


def _format_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds in JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kneserdefect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ecd", help="equitable colorability defect with certificate")
    _family_args(p)
    p.add_argument("--r", type=int, required=True)

    p = sub.add_parser("chi", help="chromatic number of KG^r on the stable part")
    _family_args(p)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--variant", choices=("almost", "cyclic"), default="almost")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--greedy", action="store_true", help="also report the minimum-element coloring")
    p.add_argument("--edges", action="store_true", help="also list every edge")
    p.add_argument("--edge-bound", type=int, default=100_000)

    p = sub.add_parser("stable", help="stable subfamily")
    _family_args(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--variant", choices=("almost", "cyclic"), default="almost")

    for name, param in (("thm1", "--r"), ("thm2", "--p")):
        p = sub.add_parser(name, help=f"check the {name} lower bound")
        _family_args(p)
        _format_arg(p)
        p.add_argument("--s", type=int, required=True)
        p.add_argument(param, type=int, required=True)

    p = sub.add_parser("conjecture", help="check the conjectured bound")
    _family_args(p)
    _format_arg(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--variant", choices=("almost", "cyclic"), default="almost")
    p.add_argument("--exploratory", action="store_true", help="allow s < r")

    p = sub.add_parser("scan", help="scan generated families for bound violations")
    _format_arg(p)
    p.add_argument("--check", choices=("thm1", "thm2", "conjecture"), default="conjecture")
    p.add_argument("--generator", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--max-members", type=int, default=3)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--variant", choices=("almost", "cyclic"), default="almost")
    p.add_argument("--exploratory", action="store_true")
    p.add_argument("--budget", type=int, default=None, help="maximum number of families to check")
    p.add_argument("--time-budget", type=float, default=None, help="seconds before the scan stops")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("tucker-audit", help="audit the Z_2 labeling")
    _family_args(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--coloring", metavar="FILE", help="coloring JSON; default is an optimal one")

    p = sub.add_parser("zptucker-audit", help="audit the Z_p labeling")
    _family_args(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--coloring", metavar="FILE")

    p = sub.add_parser("lemma-witness", help="run the coloring-composition construction")
    _family_args(p)
    p.add_argument("--r1", type=int, default=2)
    p.add_argument("--r2", type=int, default=2)
    p.add_argument("--s2", type=int, default=2)
    p.add_argument("--coloring", metavar="FILE")
    return parser


def read_family(args) -> Family:
    if args.family:
        F = load_family(args.family)
    elif args.complete:
        F = complete_k_family(*args.complete)
    else:
        F = next(iter(FamilyGenerator("random", args.n, args.members, count=1, seed=args.random)))
    if F.n > args.max_n:
        raise GuardExceeded(f"n={F.n} exceeds --max-n {args.max_n}")
    if not len(F):
        raise PreconditionError("the input family is empty")
    return F


def _label(args) -> str | None:
    return f"k={args.complete[1]}" if args.complete else None


def _coloring_for(F: Family, s: int, r: int, path: str | None) -> Coloring:
    Fs = stable_subfamily(F, s)
    if path:
        with open(path) as fh:
            return Coloring.from_json(Fs, json.load(fh))
    if not len(Fs):
        return Coloring(Fs, (), 1)
    return chromatic_number(Fs, r)[1]


def _emit(obj: dict, out) -> None:
    out.write(json.dumps({"schema": SCHEMA, **obj}, sort_keys=True) + "\n")


def _emit_reports(reports, args, out) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for rep in reports:
            w.writerow(rep.csv_row())
        out.write(buf.getvalue())
        return
    for rep in reports:
        data = rep.to_json()
        if not args.timings:
            data.pop("seconds")
        _emit(data, out)


def _run(args, out) -> int:
    cmd = args.command
    if cmd == "scan":
        gen = FamilyGenerator(args.generator, args.n, args.max_members, args.count, args.seed, args.n_min)
        res = counterexample_scan(gen, args.s, args.r, args.variant, args.budget, args.check, args.jobs,
                                  args.exploratory, args.time_budget)
        _emit_reports(res.failures, args, out)
        if args.format == "json":
            _emit({"summary": {"checked": res.checked, "complete": res.complete, "total": res.total,
                               "failures": len(res.failures)}}, out)
        return EXIT_OK if res.complete else EXIT_GUARD

    F = read_family(args)
    if cmd == "ecd":
        d, cert = ecd(F, args.r)
        _emit({"n": F.n, "r": args.r, **cert.to_json()}, out)
    elif cmd == "stable":
        _emit(stable_subfamily(F, args.s, args.variant).to_json(), out)
    elif cmd == "chi":
        Fs = stable_subfamily(F, args.s, args.variant)
        if not len(Fs):
            _emit({"chi": 0, "degenerate": True, "n": F.n, "s": args.s, "r": args.r}, out)
            return EXIT_OK
        chi, col = chromatic_number(Fs, args.r, args.node_limit)
        data = {"chi": chi, "coloring": col.to_json(), "n": F.n, "s": args.s, "r": args.r,
                "variant": args.variant, "vertices": len(Fs)}
        if args.greedy:
            data["greedy"] = greedy_min_element_coloring(Fs).to_json()
        if args.edges:
            data["edges"] = [[Fs.as_sets()[i] for i in e] for e in edges(Fs, args.r, args.edge_bound)]
        _emit(data, out)
    elif cmd == "thm1":
        _emit_reports([thm1_check(F, args.s, args.r, _label(args))], args, out)
    elif cmd == "thm2":
        _emit_reports([thm2_check(F, args.s, args.p, _label(args))], args, out)
    elif cmd == "conjecture":
        rep = conjecture_check(F, args.s, args.r, args.variant, _label(args), args.exploratory)
        _emit_reports([rep], args, out)
    elif cmd == "tucker-audit":
        # fail on the face guard before paying for an optimal coloring
        if F.n > MAX_Z2_N:
            raise GuardExceeded(f"Z_2 audit needs n <= {MAX_Z2_N}")
        col = _coloring_for(F, args.s, 2, args.coloring)
        _emit(audit_tucker_z2(F, col, args.s).to_json(), out)
    elif cmd == "zptucker-audit":
        if args.p >= 2 and zp_face_count(F.n, args.p) > MAX_ZP_FACES:
            raise GuardExceeded(f"{zp_face_count(F.n, args.p)} faces exceed the guard of {MAX_ZP_FACES}")
        col = _coloring_for(F, args.s, args.p, args.coloring)
        _emit(audit_zptucker(F, col, args.s, args.p).to_json(), out)
    elif cmd == "lemma-witness":
        s, r = args.r1 * args.s2, args.r1 * args.r2
        col = _coloring_for(F, s, r, args.coloring)
        _emit(lemma_compose_witness(F, args.r1, args.r2, args.s2, col).to_json(), out)
    return EXIT_OK


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args, out)
    except InternalInvariantViolation as exc:
        print(f"internal invariant violation (please report): {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (PreconditionError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main() -> None:
    raise SystemExit(run())
