"""Command-line entry point.

Exit codes: 0 success or accept, 1 reject or failed property, 2 usage error.
"""

import argparse
from fractions import Fraction
import sys

from . import oracles, serialize
from .construction import DFS, FULL, run_construction, verify_certificate
from .core import scan_min_form
from .errors import ConfigError, DivergentTerm, Exhausted, FormatError, MadCantorError
from .params import check_parameters
from .sums import growth_csv_rows, growth_table

SEARCH_FLAGS = {"dfs": DFS, "full": FULL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _q_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _rational(text):
    try:
        return serialize.parse_rational(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser():
    parser = _Parser(prog="madcantor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="run the construction and write a certificate")
    p.add_argument("--config", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--mode", choices=sorted(SEARCH_FLAGS), default="dfs")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("verify", help="check a certificate")
    p.add_argument("--cert", required=True)

    p = sub.add_parser("scan", help="certified minimum of the form over a height range")
    p.add_argument("--matrix", required=True)
    p.add_argument("--budget", type=int, required=True, help="largest prod_plus(q) scanned")
    p.add_argument("--precision", type=_rational, default=Fraction(1, 1 << 40))
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("sums", help="growth table of reciprocal sums as CSV")
    p.add_argument("--matrix", required=True)
    p.add_argument("--q-list", type=_q_list, required=True)
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="randomized counting-lemma suites as CSV")
    p.add_argument("--suite", choices=sorted(oracles.SUITES), required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("params", help="certified parameter-condition report")
    p.add_argument("--config", required=True)
    p.add_argument("--horizon", type=int, required=True)
    return parser


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _construct(args):
    config = serialize.load_config(args.config)
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    try:
        cert = run_construction(config, args.depth, SEARCH_FLAGS[args.mode])
    except Exhausted as exc:
        print(f"exhausted: {exc} (generation {exc.generation})", file=sys.stderr)
        return 1
    serialize.save_certificate(cert, args.out)
    bound = cert.finite_range_bound
    print(f"depth {cert.K}: chain {list(cert.chain)}")
    print(f"finite_range_bound {serialize.format_rational(bound) if bound is not None else 'vacuous'}")
    return 0


def _verify(args):
    cert = serialize.load_certificate(args.cert)
    verdict = verify_certificate(cert)
    if verdict:
        print("accept")
        return 0
    print(f"reject: {verdict.reason}")
    if verdict.offending is not None:
        print(f"offending {verdict.offending}")
    return 1


def _scan(args):
    A, gamma = serialize.load_matrix(args.matrix)
    bound, q = scan_min_form(A, gamma, args.budget, args.precision, workers=args.threads)
    if bound is None:
        print("empty range")
        return 0
    print(f"min_lower_bound {serialize.format_rational(bound)}")
    print(f"argmin {' '.join(map(str, q))}")
    return 0


def _sums(args):
    A, _ = serialize.load_matrix(args.matrix)
    if any(Q < 2 for Q in args.q_list):
        raise UsageError("Q values must be at least 2")
    try:
        rows = growth_table(A, args.q_list)
    except DivergentTerm as exc:
        print(f"divergent: {exc}", file=sys.stderr)
        return 1
    fh = _open_out(args.out)
    try:
        oracles.write_csv(growth_csv_rows(rows), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _oracle(args):
    rows = oracles.SUITES[args.suite](args.trials, seed=args.seed)
    fh = _open_out(args.out)
    try:
        oracles.write_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    failures = sum(not r["passed"] for r in rows)
    print(f"{args.suite}: {len(rows) - failures}/{len(rows)} passed", file=sys.stderr)
    return 1 if failures else 0


def _params(args):
    config = serialize.load_config(args.config)
    report = check_parameters(config, args.horizon)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


COMMANDS = {
    "construct": _construct,
    "verify": _verify,
    "scan": _scan,
    "sums": _sums,
    "oracle": _oracle,
    "params": _params,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MadCantorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
