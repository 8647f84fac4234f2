"""Command-line entry point ``hh-opverify``.

    hh-opverify run --suite chain --eta convex --fn square --dims 1,2,4 --trials 500
    hh-opverify matrix check A.txt

Exit codes: 0 all expectations met, 2 unexpected violations, 3 expected
violations not found, 64 usage error, 65 unreadable matrix file.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .campaign import (
    EXIT_USAGE,
    SUITES,
    SuiteConfig,
    UsageError,
    emit_report,
    run_suite,
)
from .eta import ETA_REGISTRY
from .functions import REGISTRY_NAMES
from .linalg import HermitianityError, eigh, is_psd
from .matrix_io import MatrixFormatError, load_matrix

EXIT_DATA = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hh-opverify", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a seeded verification campaign")
    r.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    r.add_argument("--eta", default="convex", help=f"one of: {', '.join(sorted(ETA_REGISTRY))}")
    r.add_argument("--fn", default="square", help=f"one of: {', '.join(REGISTRY_NAMES)}")
    r.add_argument("--dims", type=_dims, default=(1, 2, 3, 4))
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--a", type=float, default=0.0, help="left end for scalar-oracles")
    r.add_argument("--b", type=float, default=1.0, help="right end for scalar-oracles")
    r.add_argument("--threads", type=int, default=None,
                   help="worker threads (capped by HH_OPVERIFY_THREADS)")
    r.add_argument("--format", choices=("text", "jsonl"), default="text")
    r.add_argument("--out", default=None, help="write the report here instead of stdout")

    m = sub.add_parser("matrix", help="matrix file utilities")
    msub = m.add_subparsers(dest="matrix_command", required=True, parser_class=_Parser)
    chk = msub.add_parser("check", help="validate a matrix file and print its spectrum")
    chk.add_argument("file")
    return p


def _run(args) -> int:
    cfg = SuiteConfig(
        suite=args.suite, eta=args.eta, function=args.fn, dims=args.dims,
        trials=args.trials, seed=args.seed, tol=args.tol, a=args.a, b=args.b,
        threads=args.threads,
    )
    try:
        report = run_suite(cfg)
    except UsageError as exc:
        print(f"hh-opverify: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = emit_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return report.exit_code


def _matrix_check(args) -> int:
    try:
        A = load_matrix(args.file)
    except (OSError, MatrixFormatError, HermitianityError) as exc:
        print(f"hh-opverify: {args.file}: {exc}", file=sys.stderr)
        return EXIT_DATA
    w = eigh(A).eigenvalues
    print(f"dim {A.dim}")
    print("eigenvalues " + " ".join(format(float(v), ".17g") for v in w))
    print(f"operator_norm {float(np.max(np.abs(w))):.17g}")
    print(f"psd {'yes' if is_psd(A).holds else 'no'}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    return _matrix_check(args)


if __name__ == "__main__":
    sys.exit(main())
