"""Benchmark harness for the structured engine.

Runs the factorization over a grid of block shapes, records the instrumented
operation count next to the closed-form cost model and a solve residual, and
fits log-log scaling slopes. Output is CSV; no plotting.
"""

import csv
import time
from dataclasses import dataclass

import numpy as np

from .factorization import assemble, solve
from .fast import predicted_opcount, run_block_toeplitz
from .generate import generate_block_toeplitz

__all__ = ["BenchRecord", "run_benchmark", "write_csv", "fit_slopes"]

# the instrumented counter charges 4 multiply-accumulates per unit of window
# length, so the cost model is evaluated with c1 = 4 to share the unit
MODEL_C1 = 4.0


@dataclass
class BenchRecord:
    n1: int
    n2: int
    n: int
    op_count: int
    wall_time_s: float
    predicted_opcount: float
    residual: float


def _solve_residual(M, f, seed):
    a = M.materialize().array
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(3):
        b = rng.standard_normal(M.n) + 1j * rng.standard_normal(M.n)
        x = solve(f, b)
        worst = max(worst, float(np.abs(a @ x - b).max() / np.abs(b).max()))
    return worst


def run_benchmark(n1_values, n2_values, seed=0):
    """One factorization per (n1, n2) grid cell, deterministic per seed."""
    records = []
    for n1 in sorted(set(n1_values)):
        for n2 in sorted(set(n2_values)):
            M = generate_block_toeplitz(n1, n2, seed)
            start = time.perf_counter()
            state = run_block_toeplitz(M)
            f = assemble(state, M)
            elapsed = time.perf_counter() - start
            records.append(
                BenchRecord(
                    n1=n1,
                    n2=n2,
                    n=M.n,
                    op_count=state.op_count,
                    wall_time_s=elapsed,
                    predicted_opcount=predicted_opcount(n1, n2, MODEL_C1),
                    residual=_solve_residual(M, f, seed + 1),
                )
            )
    return records


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["n1", "n2", "n", "op_count", "wall_time_s",
             "predicted_opcount", "residual"]
        )
        for r in records:
            writer.writerow(
                [r.n1, r.n2, r.n, r.op_count, repr(r.wall_time_s),
                 repr(r.predicted_opcount), repr(r.residual)]
            )


def fit_slopes(records):
    """Least-squares log-log slopes of op_count: vs n2 per n1, vs n1 per n2.

    Returns (label, slope) pairs; needs at least two grid values along the
    fitted axis. Expect ~2 in the block count and ~3 in the block size.
    """
    slopes = []
    for axis, other in (("n2", "n1"), ("n1", "n2")):
        groups = {}
        for r in records:
            groups.setdefault(getattr(r, other), []).append(
                (getattr(r, axis), r.op_count)
            )
        for fixed, pts in sorted(groups.items()):
            xs = sorted({x for x, _ in pts})
            if len(xs) < 2:
                continue
            pts.sort()
            slope = np.polyfit(
                np.log([x for x, _ in pts]), np.log([c for _, c in pts]), 1
            )[0]
            slopes.append((f"op_count ~ {axis}^s at {other}={fixed}", float(slope)))
    return slopes
