"""Command-line interface.

Subcommands: factor, solve, invert, gen, selftest, bench. Exit codes: 0
success, 2 not positive definite, 3 input/output or format problems, 4
internal consistency failure. The environment variable BTINV_TOL overrides
the default residual tolerance used by the verification checks.
"""

import argparse
import sys

import numpy as np

from .bench import fit_slopes, run_benchmark, write_csv
from .dense import run_dense, verify_state
from .errors import (
    InternalConsistencyError,
    MatrixFormatError,
    NotPositiveDefiniteError,
)
from .factorization import assemble, gh_apply, gohberg_heinig, invert, solve
from .fast import run_block_toeplitz
from .generate import generate
from .io import (
    format_vector,
    parse_matrix,
    parse_vector,
    write_complex_matrix,
    write_matrix,
    write_vector,
)
from .linalg import BlockToeplitzMatrix

__all__ = ["main"]


class _UsageError(Exception):
    """Bad argument combination; reported as an input problem (exit 3)."""


def _materialized(M):
    return M.array if hasattr(M, "array") else M.materialize().array


def _run_engine(M, check=False):
    if isinstance(M, BlockToeplitzMatrix):
        return run_block_toeplitz(M, check=check)
    # full retention only when verification needs the whole triangle
    return run_dense(M, check=check, keep="all" if check else "factors")


def _describe(M):
    if isinstance(M, BlockToeplitzMatrix):
        return f"block-Toeplitz, n1={M.n1} n2={M.n2} (order {M.n})"
    return f"dense Hermitian, order {M.n}"


def _floats(values):
    return " ".join(repr(float(x)) for x in values)


def cmd_factor(args):
    M = parse_matrix(args.input)
    state = _run_engine(M, check=args.check)
    f = assemble(state, M)
    print(f"input: {_describe(M)}")
    print(f"op_count: {state.op_count}")
    if isinstance(M, BlockToeplitzMatrix):
        print(f"boundary_fetches: {state.boundary_count}")
    print(f"DP: {_floats(f.dp)}")
    print(f"DQ: {_floats(f.dq)}")
    print(f"diagonality_residual_p: {f.diag_residual_p!r}")
    print(f"diagonality_residual_q: {f.diag_residual_q!r}")
    if args.check:
        print(f"identity_checks: {state.identity_checks} (0 violations)")
        if not isinstance(M, BlockToeplitzMatrix):
            res = verify_state(state, M)
            for name, value in sorted(res.items()):
                print(f"{name}: {value!r}")
        recon = invert(f)
        gap = np.abs(_materialized(M) @ recon - np.eye(M.n)).max()
        print(f"inverse_residual: {float(gap)!r}")
    if args.dump:
        _dump_factors(f, args.dump)
        print(f"factors written to {args.dump}")
    return 0


def _dump_factors(f, path):
    lines = ["FACTORS 1", f"n {f.n}", "RP"]
    lines += ["  ".join(f"{z.real!r} {z.imag!r}" for z in row) for row in f.rp]
    lines.append("DP")
    lines.append(_floats(f.dp))
    lines.append("RQ")
    lines += ["  ".join(f"{z.real!r} {z.imag!r}" for z in row) for row in f.rq]
    lines.append("DQ")
    lines.append(_floats(f.dq))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_solve(args):
    M = parse_matrix(args.input)
    b = parse_vector(args.rhs)
    if len(b) != M.n:
        raise _UsageError(
            f"right-hand side has length {len(b)}, matrix order is {M.n}"
        )
    f = assemble(_run_engine(M), M)
    x = solve(f, b)
    scale = float(np.abs(b).max()) or 1.0
    residual = float(np.abs(_materialized(M) @ x - b).max()) / scale
    if args.out:
        write_vector(x, args.out)
        print(f"solution written to {args.out}")
        print(f"residual: {residual!r}")
    else:
        sys.stdout.write(f"# residual {residual!r}\n")
        sys.stdout.write(format_vector(x))
    return 0


def cmd_invert(args):
    M = parse_matrix(args.input)
    if args.method == "gh":
        if not isinstance(M, BlockToeplitzMatrix):
            raise _UsageError(
                "--method gh needs a block-Toeplitz (BTHM) input"
            )
        state = run_block_toeplitz(M)
        g = gohberg_heinig(state, M)
        inv = gh_apply(g, np.eye(M.n, dtype=complex))
    else:
        inv = invert(assemble(_run_engine(M), M))
    write_complex_matrix(inv, args.out)
    residual = float(np.abs(_materialized(M) @ inv - np.eye(M.n)).max())
    print(f"inverse written to {args.out}")
    print(f"residual: {residual!r}")
    return 0


def cmd_gen(args):
    if args.kind == "dense":
        if args.n is None:
            raise _UsageError("--kind dense needs --n")
        M = generate("dense", args.n, 1, args.seed)
    else:
        if args.n1 is None or args.n2 is None:
            raise _UsageError("--kind bt needs --n1 and --n2")
        M = generate("bt", args.n1, args.n2, args.seed)
    write_matrix(M, args.out)
    print(f"{_describe(M)} written to {args.out}")
    return 0


def cmd_selftest(args):
    from .selftest import run_all

    results = run_all(max_n=args.max_n)
    failures = 0
    for name, ok, detail in results:
        mark = "ok " if ok else "FAIL"
        print(f"{mark} {name}: {detail}")
        failures += not ok
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def cmd_bench(args):
    records = run_benchmark(args.n1, args.n2, seed=args.seed)
    header = f"{'n1':>4} {'n2':>4} {'n':>6} {'op_count':>12} {'predicted':>14} {'time_s':>10} {'residual':>10}"
    print(header)
    for r in records:
        print(
            f"{r.n1:>4} {r.n2:>4} {r.n:>6} {r.op_count:>12} "
            f"{r.predicted_opcount:>14.1f} {r.wall_time_s:>10.4f} {r.residual:>10.2e}"
        )
    for label, slope in fit_slopes(records):
        print(f"{label}: {slope:.3f}")
    if args.csv:
        write_csv(records, args.csv)
        print(f"csv written to {args.csv}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="btinv",
        description=(
            "Reflection-coefficient factorization, solving and inversion for "
            "Hermitian positive-definite matrices, with a fast structured "
            "engine for block-Toeplitz inputs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="factor a matrix and print a summary")
    p.add_argument("--input", required=True, help="DHM or BTHM file")
    p.add_argument("--dump", help="write the full factors to this file")
    p.add_argument("--check", action="store_true",
                   help="verify internal identities while running")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("solve", help="solve M x = b")
    p.add_argument("--input", required=True, help="DHM or BTHM file")
    p.add_argument("--rhs", required=True, help="VEC file")
    p.add_argument("--out", help="output VEC file (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("invert", help="write the explicit inverse (DCM)")
    p.add_argument("--input", required=True, help="DHM or BTHM file")
    p.add_argument("--out", required=True, help="output DCM file")
    p.add_argument("--method", choices=("triangular", "gh"),
                   default="triangular",
                   help="triangular factorization or structured "
                        "(Gohberg-Heinig) inverse; gh needs BTHM input")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("gen", help="generate a random test instance")
    p.add_argument("--kind", choices=("dense", "bt"), required=True)
    p.add_argument("--n", type=int, help="order (dense)")
    p.add_argument("--n1", type=int, help="block size (bt)")
    p.add_argument("--n2", type=int, help="block count (bt)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="run the built-in invariant suite")
    p.add_argument("--max-n", type=int, default=64, dest="max_n",
                   help="cap on the problem order (default 64)")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="benchmark the structured engine")
    p.add_argument("--n1", type=_int_list, required=True,
                   help="comma-separated block sizes, e.g. 2,4")
    p.add_argument("--n2", type=_int_list, required=True,
                   help="comma-separated block counts, e.g. 4,8,16")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write records to this CSV file")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotPositiveDefiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MatrixFormatError, OSError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InternalConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
