"""Command line entry point: ``vprcomp <subcommand> ...``.

Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit status is
0 on success, 1 on invalid data, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager
from itertools import combinations, permutations

from . import __version__
from .contingency import all_contingencies, mcnemar
from .errors import NoDefinedScores, SamePair, UnknownTechnique, VprCompError
from .metrics import bounds, complementarity, mape_k, mape_pair, score_set
from .outcomes import (
    DatasetCollection,
    dumps_csv,
    ingest_outcomes,
    load_collection,
    validate_collection,
    write_collection,
)
from .report import CRITERIA, FORMATS, emit_report, format_tenths, percent_tenths, rank_partners
from .synth import generate_collection, load_specs


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


@contextmanager
def _output(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _num(v) -> str:
    return "NA" if v is None else repr(float(v))


def _load(args) -> DatasetCollection:
    return ingest_outcomes(args.input, args.format)


def _ordered_pairs(c: DatasetCollection, techniques, primary, secondary):
    for a, b in permutations(techniques, 2):
        if primary is not None and a != primary:
            continue
        if secondary is not None and b != secondary:
            continue
        yield a, b


def _check_names(c: DatasetCollection, *names):
    known = c.techniques
    for n in names:
        if n is not None and n not in known:
            raise UnknownTechnique(f"technique {n!r} not present in the collection")
    real = [n for n in names if n is not None]
    if len(real) == 2 and real[0] == real[1]:
        raise SamePair(f"primary and secondary are both {real[0]!r}")


# ------------------------------------------------------------------ commands


def cmd_validate(args) -> int:
    c = load_collection(args.input, args.format)
    violations = validate_collection(c, check_table1=args.check_table1)
    for v in violations:
        _err(f"violation {v}")
    print(f"{len(violations)} violations")
    return 1 if violations else 0


def cmd_contingency(args) -> int:
    c = _load(args)
    _check_names(c, args.primary, args.secondary)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["dataset", "primary", "secondary", "X", "W", "T", "Z", "Y", "chi2", "significant"])
        for m in c:
            tables = all_contingencies(m)
            for pair in _ordered_pairs(c, m.techniques, args.primary, args.secondary):
                t = tables[pair]
                r = mcnemar(t)
                w.writerow([m.dataset, t.primary, t.secondary, t.X, t.W, t.T, t.Z, t.Y, repr(r.statistic),
                            int(r.significant_at_05)])
    return 0


def cmd_complement(args) -> int:
    c = _load(args)
    _check_names(c, args.primary, args.secondary)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["dataset", "primary", "secondary", "T", "M", "cba", "defined"])
        for m in c:
            tables = all_contingencies(m)
            for pair in _ordered_pairs(c, m.techniques, args.primary, args.secondary):
                s = complementarity(tables[pair])
                w.writerow([m.dataset, s.primary, s.secondary, s.rescued, s.failures_of_primary, _num(s.value),
                            int(s.defined)])
    return 0


def cmd_bounds(args) -> int:
    c = _load(args)
    _check_names(c, args.primary, args.secondary)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["primary", "secondary", "lower", "median", "upper", "n_datasets"])
        for a, b in _ordered_pairs(c, c.techniques, args.primary, args.secondary):
            try:
                bs = bounds(score_set(c, a, b))
            except NoDefinedScores as exc:
                _err(f"skip[{exc.code}]: {exc}")
                continue
            w.writerow([a, b, _num(bs.lower), _num(bs.median), _num(bs.upper), bs.n_datasets])
    return 0


def cmd_mape(args) -> int:
    c = _load(args)
    if args.k:
        combos = [tuple(args.k)]
        _check_names(c, *set(args.k))
    else:
        _check_names(c, args.primary, args.secondary)
        wanted = [n for n in (args.primary, args.secondary) if n is not None]
        combos = [pair for pair in combinations(c.techniques, 2) if all(n in pair for n in wanted)]
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["dataset", "techniques", "covered", "Y", "mape", "percent"])
        for combo in combos:
            for m in c.having(*combo):
                if len(combo) == 2 and not args.k:
                    e = mape_pair(all_contingencies(m)[combo])
                else:
                    e = mape_k(m, combo)
                w.writerow([m.dataset, "+".join(e.techniques), e.covered, e.total, repr(e.value),
                            format_tenths(percent_tenths(e.covered, e.total))])
    return 0


def cmd_rank(args) -> int:
    c = _load(args)
    rk = rank_partners(c, args.primary, args.criterion)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["rank", "primary", "secondary", "lower", "median", "upper", "n_datasets"])
        for i, (s, b) in enumerate(rk.ranked, 1):
            w.writerow([i, rk.primary, s, _num(b.lower), _num(b.median), _num(b.upper), b.n_datasets])
    return 0


def cmd_report(args) -> int:
    c = _load(args)
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    bad = [f for f in formats if f not in FORMATS]
    if bad or not formats:
        raise _UsageError(f"--formats must be a comma list drawn from {','.join(FORMATS)}")
    for entry in emit_report(c, args.out, formats, args.criterion):
        print(entry["path"])
    return 0


def cmd_synth(args) -> int:
    c = generate_collection(load_specs(args.spec, args.seed))
    if args.out is None or args.out == "-":
        sys.stdout.write(dumps_csv(c))
    else:
        write_collection(c, args.out)
        print(args.out)
    return 0


class _UsageError(Exception):
    pass


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vprcomp",
        description="Pairwise complementarity analysis of place-recognition outcome records.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def data_cmd(name, help, fn, out=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--input", "-i", required=True, help="outcome file (CSV or JSON)")
        sp.add_argument("--format", choices=("csv", "json"), help="input format (default: from extension)")
        if out:
            sp.add_argument("--out", "-o", help="output file (default: stdout)")
        sp.set_defaults(func=fn)
        return sp

    sp = data_cmd("validate", "check structural integrity", cmd_validate, out=False)
    sp.add_argument("--check-table1", action="store_true",
                    help="cross-check query counts of known benchmark datasets")

    for name, help, fn in (
        ("contingency", "quadrant counts and McNemar statistic per pair", cmd_contingency),
        ("complement", "complementarity score per pair and dataset", cmd_complement),
        ("bounds", "min / median / max complementarity per pair", cmd_bounds),
    ):
        sp = data_cmd(name, help, fn)
        sp.add_argument("--primary")
        sp.add_argument("--secondary")

    sp = data_cmd("mape", "maximum achievable performance estimate", cmd_mape)
    sp.add_argument("--primary")
    sp.add_argument("--secondary")
    sp.add_argument("--k", nargs="+", metavar="TECH", help="two or more techniques combined by union")

    sp = data_cmd("rank", "rank secondaries for a primary", cmd_rank)
    sp.add_argument("--primary", required=True)
    sp.add_argument("--criterion", choices=CRITERIA, default="median")

    sp = sub.add_parser("report", help="write all reports to a directory")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--out", "-o", required=True, help="output directory")
    sp.add_argument("--formats", default=",".join(FORMATS), help="comma list of csv,json,markdown")
    sp.add_argument("--criterion", choices=CRITERIA, default="median")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("synth", help="generate a seeded synthetic outcome file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--spec", required=True, help="JSON spec file")
    sp.add_argument("--out", "-o", help="output .csv or .json path (default: CSV on stdout)")
    sp.set_defaults(func=cmd_synth)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "k", None) is not None:
        if args.primary is not None or args.secondary is not None:
            _err("usage error: --k cannot be combined with --primary/--secondary")
            return 2
        if len(args.k) < 2:
            _err("usage error: --k needs at least two technique names")
            return 2
    try:
        return args.func(args)
    except _UsageError as exc:
        _err(f"usage error: {exc}")
        return 2
    except VprCompError as exc:
        _err(f"error[{exc.code}]: {' '.join(str(exc).split())}")
        return exc.exit_status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
