"""Command-line interface.

Exit codes: 0 on success, 1 for invalid input or usage, 2 when a resource
cap would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import caps, fileformat, growth, orbits, partitions, reducts, structures
from . import permgroup as pg
from .caps import CapExceeded, InvalidStructure, OrbitForgeError

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rational(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _sizes(text) -> dict:
    out = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep or not value.strip().isdigit():
            raise argparse.ArgumentTypeError(f"bad size entry {item!r}; expected name=count")
        out[name.strip()] = int(value)
    return out


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidStructure([f"cannot read {path}: {exc.strerror}"]) from None
    except json.JSONDecodeError as exc:
        raise InvalidStructure([f"{path} is not valid JSON: {exc}"]) from None


def _load(path):
    return fileformat.structure_from_dict(_read_json(path))


def _dump_json(data, out):
    out.write(json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------- handlers


def cmd_pk(args, out):
    value = partitions.p_k_bruteforce(args.k, args.n) if args.brute else partitions.p_k(args.k, args.n)
    out.write(f"{value}\n")


def cmd_sk(args, out):
    out.write(f"{partitions.s_k(args.k, args.n)}\n")


def cmd_bounds(args, out):
    if args.which == "lower":
        out.write(f"# p_{args.k}(n) >= n^(({args.k - 1}/{args.k} - {args.eps}) n)\n")
        out.write("n,holds\n")
        for n in range(1, args.n_max + 1):
            holds = partitions.check_lower_bound(args.k, args.eps, n)
            out.write(f"{n},{str(holds).lower()}\n")
        onset = partitions.lower_bound_onset(args.k, args.eps, args.n_max)
        out.write(f"# onset: {onset if onset is not None else 'none'}\n")
    else:
        if not Fraction(args.k - 1, args.k) < args.d < 1:
            raise ValueError(f"need {args.k - 1}/{args.k} < d < 1")
        out.write(f"# C(n-1,i) < (1/{args.k}) (n(n-1)...(n-i))^{args.d} for all i < {args.k}\n")
        out.write("n,holds\n")
        for n in range(1, args.n_max + 1):
            holds = partitions.check_upper_bound_termwise(args.k, args.d, n)
            out.write(f"{n},{str(holds).lower()}\n")
        onset = partitions.termwise_onset(args.k, args.d, args.n_max)
        found = partitions.find_upper_c(args.k, args.d, args.n_max)
        out.write(f"# onset: {onset if onset is not None else 'none'}\n")
        out.write(f"# c: {found.c} (p_{args.k}(n) < c n^(dn) for 1 <= n <= {args.n_max})\n")


def cmd_count(args, out):
    s = _load(args.input)
    f = orbits.count_injective_orbits if args.kind == "injective" else orbits.count_orbits
    out.write(f"{f(s, args.n)}\n")


def cmd_sequence(args, out):
    s = _load(args.input)
    seq = orbits.orbit_sequence(s, args.n_max, args.kind)
    if args.format == "csv":
        out.write(seq.to_csv())
    elif args.format == "json":
        out.write(seq.to_json() + "\n")
    else:
        out.write(seq.to_table())


def _emit_reducts(items, args, out):
    if args.count_only:
        out.write(f"{len(items)}\n")
    else:
        _dump_json([fileformat.structure_to_dict(r) for r in items], out)


def cmd_reducts(args, out):
    s = _load(args.input)
    if not isinstance(s, (structures.UnaryStructure, structures.ReductOfUnary)):
        raise InvalidStructure(["reducts takes a unary or reduct_of_unary file; "
                                "use cover-reducts for covers"])
    _emit_reducts(reducts.enumerate_unary_reducts(s), args, out)


def cmd_cover_reducts(args, out):
    s = _load(args.input)
    if not isinstance(s, (structures.FiberedStructure, structures.CoveringReduct)):
        raise InvalidStructure(["cover-reducts takes a trivial_cover or covering_reduct file"])
    _emit_reducts(reducts.enumerate_covering_reducts(s), args, out)


def cmd_truncate(args, out):
    s = _load(args.input)
    try:
        trunc = structures.truncate(s, args.sizes)
    except ValueError as exc:
        raise InvalidStructure([str(exc)]) from None
    if args.emit_group:
        _dump_json(trunc.to_json(), out)
    else:
        out.write(f"degree {trunc.group.degree}\norder {trunc.group.order()}\n")


def cmd_group(args, out):
    g = fileformat.group_from_dict(_read_json(args.input))
    out.write(f"degree {g.degree}\norder {g.order()}\n")
    if args.n is not None:
        if args.kind == "injective":
            value = pg.orbit_count_injective(g, args.n)
        elif args.kind == "all":
            value = pg.orbit_count_tuples(g, args.n)
        else:
            value = pg.orbit_count_subsets(g, args.n)
        out.write(f"orbits {value}\n")


def cmd_crosscheck(args, out):
    s = _load(args.input)
    report = orbits.crosscheck(s, args.n, args.margin)
    _dump_json(report.to_dict(), out)


def cmd_classify(args, out):
    if args.sequence_file:
        try:
            with open(args.sequence_file, encoding="utf-8") as fh:
                seq = orbits.OrbitCountSequence.from_csv(fh.read())
        except OSError as exc:
            raise InvalidStructure([f"cannot read {args.sequence_file}: {exc.strerror}"]) from None
    else:
        if not args.input or not args.n_max:
            raise UsageError("classify needs --sequence-file, or --input with --n-max")
        seq = orbits.orbit_sequence(_load(args.input), args.n_max)
    report = growth.classify(seq)
    if args.json:
        _dump_json(report.to_dict(), out)
        return
    out.write(f"label: {report.label} (heuristic)\n")
    out.write(f"exp witness c: {report.exp_witness if report.exp_witness is not None else 'none'}\n")
    if report.ndn_witness is None:
        out.write("n^(dn) witness: none\n")
    else:
        c, d = report.ndn_witness
        out.write(f"n^(dn) witness: c={c} d={d}\n")
    for e in report.estimates:
        out.write(f"d_{e.n} in {e.display()}\n")


def cmd_split_orbits(args, out):
    s = _load(args.input)
    if not isinstance(s, (structures.UnaryStructure, structures.ReductOfUnary)):
        raise InvalidStructure(["split-orbits takes a unary or reduct_of_unary file"])
    text = fileformat.dumps(structures.split_finite_orbits(s))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_validate(args, out):
    s = _load(args.input)
    out.write(f"valid {fileformat.structure_to_dict(s)['kind']}\n")


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbitforge", description="Orbit growth of unary structures and their covers.")
    p.add_argument("--order-cap", type=int, help="max elements materialized per group (default 10^6)")
    p.add_argument("--work-cap", type=int, help="max tuples enumerated per orbit count (default 2*10^6)")
    p.add_argument("--caps", help="extra caps as key=value pairs, e.g. orbit_n_cap=10")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    q = sub.add_parser("pk", help="partitions with blocks of size <= k")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--brute", action="store_true", help="count by enumerating all partitions")
    q.set_defaults(func=cmd_pk)

    q = sub.add_parser("sk", help="partitions of a kn-set into k-blocks")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_sk)

    q = sub.add_parser("bounds", help="exact verdict tables for the growth bounds of p_k")
    bsub = q.add_subparsers(dest="which", parser_class=_Parser)
    bsub.required = True
    b = bsub.add_parser("lower")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--eps", type=_rational, required=True)
    b.add_argument("--n-max", type=int, required=True)
    b.set_defaults(func=cmd_bounds)
    b = bsub.add_parser("upper")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--d", type=_rational, required=True)
    b.add_argument("--n-max", type=int, required=True)
    b.set_defaults(func=cmd_bounds)

    q = sub.add_parser("count", help="orbits on n-tuples")
    q.add_argument("--input", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--kind", choices=("injective", "all"), default="injective")
    q.set_defaults(func=cmd_count)

    q = sub.add_parser("sequence", help="orbit counts for n = 1..n_max")
    q.add_argument("--input", required=True)
    q.add_argument("--n-max", type=int, required=True)
    q.add_argument("--kind", choices=("injective", "all"), default="injective")
    q.add_argument("--format", choices=("table", "csv", "json"), default="table")
    q.set_defaults(func=cmd_sequence)

    q = sub.add_parser("reducts", help="reducts of a unary structure")
    q.add_argument("--input", required=True)
    q.add_argument("--count-only", action="store_true")
    q.set_defaults(func=cmd_reducts)

    q = sub.add_parser("cover-reducts", help="covering reducts of a trivial cover")
    q.add_argument("--input", required=True)
    q.add_argument("--count-only", action="store_true")
    q.set_defaults(func=cmd_cover_reducts)

    q = sub.add_parser("truncate", help="finite permutation group realizing a structure")
    q.add_argument("--input", required=True)
    q.add_argument("--sizes", type=_sizes, required=True, help="base sizes, e.g. O1=4,O2=4")
    q.add_argument("--emit-group", action="store_true", help="print the group as JSON")
    q.set_defaults(func=cmd_truncate)

    q = sub.add_parser("group", help="order and orbit counts of a permutation group file")
    q.add_argument("--input", required=True)
    q.add_argument("--n", type=int)
    q.add_argument("--kind", choices=("injective", "all", "subsets"), default="injective")
    q.set_defaults(func=cmd_group)

    q = sub.add_parser("crosscheck", help="symbolic count against truncations")
    q.add_argument("--input", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--margin", type=int, default=1)
    q.set_defaults(func=cmd_crosscheck)

    q = sub.add_parser("classify", help="heuristic growth label with exact bound verdicts")
    q.add_argument("--input")
    q.add_argument("--n-max", type=int)
    q.add_argument("--sequence-file", help="CSV with columns n,count")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("split-orbits", help="replace finite orbits by infinite ones")
    q.add_argument("--input", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_split_orbits)

    q = sub.add_parser("validate", help="check a structure file")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_validate)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        settings = {}
        if args.caps:
            settings = vars(caps.parse_caps(args.caps, caps.current()))
        if args.order_cap is not None:
            settings["order_cap"] = args.order_cap
        if args.work_cap is not None:
            settings["work_cap"] = args.work_cap
        with caps.override(**settings):
            args.func(args, out)
        return EXIT_OK
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_INVALID
    except CapExceeded as exc:
        err.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except InvalidStructure as exc:
        for v in exc.violations:
            err.write(f"invalid: {v}\n")
        return EXIT_INVALID
    except (OrbitForgeError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


def main():
    sys.exit(run())
