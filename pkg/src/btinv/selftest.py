"""Built-in invariant suite, runnable at desk scale via the CLI.

Each check returns (name, passed, detail). The suite covers: structured vs
dense engine equivalence, the conjugate-numerator identity, bi-orthogonality,
factor diagonality, agreement of the two triangular inverse routes, the
structured (Gohberg-Heinig) inverse against the triangular one, the
prediction-entity residuals, and the operation-count scaling law.
"""

import numpy as np

from .dense import run_dense, verify_state
from .errors import InternalConsistencyError, NotPositiveDefiniteError
from .factorization import assemble, gh_apply, gohberg_heinig, invert, solve, wwr_entities
from .fast import predicted_opcount, query, run_block_toeplitz
from .generate import generate_block_toeplitz, generate_dense
from .linalg import cholesky_inverse

__all__ = ["run_all"]

EQUIV_RTOL = 1e-10
ORTH_TOL = 1e-9
DIAG_TOL = 1e-9
SIDE_TOL = 1e-9
ORACLE_TOL = 1e-8
GH_TOL = 1e-8


def _grid(max_n, pairs):
    return [(a, b) for a, b in pairs if a * b <= max_n]


def _rel_diff(x, ref):
    x = np.asarray(x)
    ref = np.asarray(ref)
    return float((np.abs(x - ref) / (1.0 + np.abs(ref))).max())


def _equivalence_gap(M):
    """Worst relative deviation between structured and dense engine entries."""
    dense_state = run_dense(M.materialize())
    fast_state = run_block_toeplitz(M)
    worst = 0.0
    for k in range(M.n):
        for l in range(k, M.n):
            res = query(fast_state, k, l)
            worst = max(worst, _rel_diff(res.p.to_dense(), dense_state.p[(k, l)].to_dense()))
            worst = max(worst, _rel_diff(res.q.to_dense(), dense_state.q[(k, l)].to_dense()))
            worst = max(worst, _rel_diff(res.v, dense_state.v[(k, l)]))
            worst = max(worst, _rel_diff(res.v_prime, dense_state.v_prime[(k, l)]))
            if k < l:
                worst = max(worst, _rel_diff(res.a, dense_state.a[(k, l)]))
                worst = max(worst, _rel_diff(res.a_prime, dense_state.a_prime[(k, l)]))
    return worst


def _check_equivalence(max_n):
    pairs = _grid(max_n, [(1, 2), (1, 5), (2, 2), (2, 4), (3, 3), (4, 2)])
    worst = 0.0
    for n1, n2 in pairs:
        for seed in (0, 1):
            worst = max(worst, _equivalence_gap(generate_block_toeplitz(n1, n2, seed)))
    ok = worst <= EQUIV_RTOL
    return "structured engine matches dense engine", ok, (
        f"max relative gap {worst:.3e} over {len(pairs)} shapes x 2 seeds "
        f"(bound {EQUIV_RTOL:.0e})"
    )


def _check_conjugate_identity(max_n):
    checks = 0
    try:
        for n in (4, 8, min(24, max_n)):
            if n < 1:
                continue
            state = run_dense(generate_dense(n, seed=n), check=True)
            checks += state.identity_checks
        for n1, n2 in _grid(max_n, [(2, 3), (3, 4)]):
            state = run_block_toeplitz(
                generate_block_toeplitz(n1, n2, seed=7), check=True
            )
            checks += state.identity_checks
    except InternalConsistencyError as exc:
        return "conjugate numerator identity", False, str(exc)
    return "conjugate numerator identity", True, f"{checks} step checks, 0 violations"


def _check_orthogonality(max_n):
    worst = 0.0
    for n in (3, 8, 16, 32):
        if n > max_n:
            break
        M = generate_dense(n, seed=n + 100)
        res = verify_state(run_dense(M), M)
        worst = max(worst, *res.values())
    ok = worst <= ORTH_TOL
    return "bi-orthogonality and pivot definitions", ok, (
        f"max residual {worst:.3e} (bound {ORTH_TOL:.0e})"
    )


def _check_diagonality(max_n):
    worst = 0.0
    for n in (2, 9, min(32, max_n)):
        if n < 1:
            continue
        M = generate_dense(n, seed=n + 3)
        f = assemble(run_dense(M), M)
        worst = max(worst, f.diag_residual_p, f.diag_residual_q)
    ok = worst <= DIAG_TOL
    return "triangular factors diagonalize the matrix", ok, (
        f"max defect {worst:.3e} (bound {DIAG_TOL:.0e})"
    )


def _check_two_sided(max_n):
    worst_pair = 0.0
    worst_oracle = 0.0
    for n in (2, 5, min(24, max_n)):
        if n < 1:
            continue
        M = generate_dense(n, seed=n + 11)
        f = assemble(run_dense(M), M)
        xp = invert(f, side="p")
        xq = invert(f, side="q")
        worst_pair = max(worst_pair, float(np.abs(xp - xq).max()))
        worst_oracle = max(worst_oracle, float(np.abs(xp - cholesky_inverse(M)).max()))
    ok = worst_pair <= SIDE_TOL and worst_oracle <= ORACLE_TOL
    return "two inverse factorizations agree", ok, (
        f"side gap {worst_pair:.3e} (bound {SIDE_TOL:.0e}), oracle gap "
        f"{worst_oracle:.3e} (bound {ORACLE_TOL:.0e})"
    )


def _check_gh(max_n):
    worst = 0.0
    cases = 0
    for n1, n2 in _grid(max_n, [(1, 4), (2, 4), (3, 3)]):
        M = generate_block_toeplitz(n1, n2, seed=19)
        state = run_block_toeplitz(M)
        f = assemble(state, M)
        g = gohberg_heinig(state, M)
        rng = np.random.default_rng(23)
        b = (rng.standard_normal((M.n, 5)) + 1j * rng.standard_normal((M.n, 5)))
        worst = max(worst, float(np.abs(gh_apply(g, b) - solve(f, b)).max()))
        worst = max(worst, g.construction_residual)
        cases += 1
    ok = worst <= GH_TOL
    return "structured inverse agrees with triangular solve", ok, (
        f"max gap {worst:.3e} over {cases} shapes (bound {GH_TOL:.0e})"
    )


def _check_wwr(max_n):
    worst = 0.0
    for n1, n2 in _grid(max_n, [(1, 6), (2, 4)]):
        M = generate_block_toeplitz(n1, n2, seed=29)
        state = run_block_toeplitz(M)
        try:
            w = wwr_entities(gohberg_heinig(state, M))
        except (InternalConsistencyError, NotPositiveDefiniteError) as exc:
            return "prediction entities", False, str(exc)
        worst = max(worst, w.residual_forward, w.residual_backward)
    ok = worst <= GH_TOL
    return "prediction entities", ok, (
        f"max residual {worst:.3e}, error covariances positive definite "
        f"(bound {GH_TOL:.0e})"
    )


def _check_opcount(max_n):
    sizes = [n2 for n2 in (4, 8, 16) if 2 * n2 <= max_n]
    if len(sizes) < 2:
        return "operation-count scaling", True, "skipped (max-n too small)"
    ops = []
    for n2 in sizes:
        M = generate_block_toeplitz(2, n2, seed=31)
        ops.append(run_block_toeplitz(M).op_count)
    slope = np.polyfit(np.log(sizes), np.log(ops), 1)[0]
    ok = 1.6 <= slope <= 2.4
    detail = f"block-count slope {slope:.3f} (want ~2)"
    if 4 * 8 <= max_n:
        ops1 = run_block_toeplitz(generate_block_toeplitz(2, 8, seed=31)).op_count
        ops2 = run_block_toeplitz(generate_block_toeplitz(4, 8, seed=31)).op_count
        slope1 = np.log(ops2 / ops1) / np.log(2)
        ok = ok and 2.5 <= slope1 <= 3.5
        detail += f", block-size slope {slope1:.3f} (want ~3)"
    pred_ratio = predicted_opcount(2, 16) / predicted_opcount(2, 8)
    detail += f", model ratio n2 8->16: {pred_ratio:.2f}"
    return "operation-count scaling", ok, detail


def run_all(max_n=64):
    """Run every check capped at problem order max_n; returns result tuples."""
    checks = (
        _check_equivalence,
        _check_conjugate_identity,
        _check_orthogonality,
        _check_diagonality,
        _check_two_sided,
        _check_gh,
        _check_wwr,
        _check_opcount,
    )
    return [chk(max_n) for chk in checks]
