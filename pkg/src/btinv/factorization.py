"""Inverse factorizations built from a completed recursion state.

Two routes to M^{-1}:

* Triangular: unit-triangular factors RP (columns p[k, n-1], lower) and RQ
  (columns q[0, l], upper) with positive diagonal pivots DP, DQ satisfying
  M^{-1} = conj(RP) diag(1/DP) RP^T = conj(RQ) diag(1/DQ) RQ^T.
* Gohberg-Heinig: for block-Toeplitz M only, M^{-1} expressed through the
  first n1 final columns (blocks P_0..P_{n2-1}) and the last n1 top-row
  columns (blocks Q_0..Q_{n2-1}, numbered bottom-up), applied as block
  convolutions without ever materializing the two block-triangular factors.

The Whittle-Wiggins-Robinson entities (matrix prediction-coefficient
polynomials and prediction-error covariances) are derived from the
Gohberg-Heinig data by unit-triangular solves.
"""

import numpy as np

from .errors import InternalConsistencyError
from .fast import FastState, query
from .linalg import (
    backward_substitution,
    cholesky_factor,
    forward_substitution,
    hermitian_part,
    residual_tolerance,
)

__all__ = [
    "InverseFactorization",
    "assemble",
    "solve",
    "invert",
    "GohbergHeinigInverse",
    "gohberg_heinig",
    "gh_apply",
    "WWREntities",
    "wwr_entities",
]


class InverseFactorization:
    """Triangular factor pair of M^{-1} with diagonality diagnostics."""

    __slots__ = ("n", "rp", "rq", "dp", "dq", "diag_residual_p", "diag_residual_q")

    def __init__(self, n, rp, rq, dp, dq, diag_residual_p, diag_residual_q):
        self.n = n
        self.rp = rp
        self.rq = rq
        self.dp = dp
        self.dq = dq
        self.diag_residual_p = diag_residual_p
        self.diag_residual_q = diag_residual_q


def _final_vectors(state, n):
    """Yield (k, p[k, n-1], v_prime[k, n-1]) for k = 0..n-1 from either engine."""
    if isinstance(state, FastState):
        for k in range(n):
            res = query(state, k, n - 1)
            yield k, res.p, res.v_prime
    else:
        for k in range(n):
            yield k, state.p[(k, n - 1)], state.v_prime[(k, n - 1)]


def _top_row_vectors(state, n):
    """Yield (l, q[0, l], v[0, l]); the (0, l) keys are canonical in both engines."""
    for l in range(n):
        yield l, state.q[(0, l)], state.v[(0, l)]


def assemble(state, M, *, tol=None):
    """Build the triangular factorization from a completed recursion state.

    Verifies the diagonalizing property before returning: RP^T M conj(RP)
    must be the diagonal matrix DP within tolerance (and likewise for RQ/DQ),
    otherwise InternalConsistencyError is raised. The factors are exactly
    unit triangular by construction.
    """
    n = M.n
    if tol is None:
        tol = residual_tolerance(M.norm_max, n)
    rp = np.zeros((n, n), dtype=complex)
    dp = np.empty(n)
    for k, vec, pivot in _final_vectors(state, n):
        rp[vec.lo : vec.hi + 1, k] = vec.data
        dp[k] = pivot
    rq = np.zeros((n, n), dtype=complex)
    dq = np.empty(n)
    for l, vec, pivot in _top_row_vectors(state, n):
        rq[vec.lo : vec.hi + 1, l] = vec.data
        dq[l] = pivot

    a = M.array if hasattr(M, "array") else M.materialize().array
    res_p = _diagonality_defect(rp, a, dp)
    res_q = _diagonality_defect(rq, a, dq)
    worst = max(res_p, res_q)
    if worst > tol:
        raise InternalConsistencyError(
            f"factor does not diagonalize the matrix: defect {worst:.3e} "
            f"exceeds tolerance {tol:.3e}"
        )
    return InverseFactorization(n, rp, rq, dp, dq, res_p, res_q)


def _diagonality_defect(f, a, d):
    """max |F^T A conj(F) - diag(d)|."""
    g = f.T @ a @ np.conj(f)
    g[np.diag_indices_from(g)] -= d
    return float(np.abs(g).max())


def solve(f, b):
    """x = M^{-1} b as three passes: transpose-multiply, scale, conj-multiply."""
    b = np.asarray(b, dtype=complex)
    y = f.rp.T @ b
    y = (y.T / f.dp).T
    return np.conj(f.rp) @ y


def invert(f, side="p"):
    """Explicit inverse conj(F) diag(1/D) F^T from either factor side."""
    if side == "p":
        fac, d = f.rp, f.dp
    elif side == "q":
        fac, d = f.rq, f.dq
    else:
        raise ValueError(f"side must be 'p' or 'q', got {side!r}")
    return np.conj(fac) @ (fac.T / d[:, None])


class GohbergHeinigInverse:
    """Structured inverse representation of a Hermitian block-Toeplitz matrix.

    p_blocks[i] and q_blocks[i] are the n1 x n1 row blocks of the two
    generating column bundles (q_blocks numbered bottom-up, so q_blocks[0] is
    the last block row); v and v_prime are the corresponding positive pivot
    diagonals. construction_residual records how well the generators satisfy
    their defining equations against the source matrix, which is retained for
    later residual checks.
    """

    __slots__ = (
        "n1",
        "n2",
        "p_blocks",
        "q_blocks",
        "v",
        "v_prime",
        "matrix",
        "construction_residual",
    )

    def __init__(self, n1, n2, p_blocks, q_blocks, v, v_prime, matrix, residual):
        self.n1 = n1
        self.n2 = n2
        self.p_blocks = p_blocks
        self.q_blocks = q_blocks
        self.v = v
        self.v_prime = v_prime
        self.matrix = matrix
        self.construction_residual = residual


def gohberg_heinig(state, M, *, tol=None):
    """Extract the structured-inverse generators from a completed state.

    Needs only the canonical entries: columns p[k, n-1] for k < n1 and
    q[0, l] for the last n1 values of l. Verifies the two construction
    identities  M conj(P) diag(1/v') P_0^T = [I; 0; ...; 0]  and
    M conj(Q) diag(1/v) Q_0^T = [0; ...; 0; I]  within tolerance.
    """
    n1, n2, n = M.n1, M.n2, M.n
    if tol is None:
        tol = residual_tolerance(M.norm_max, n)

    p_bundle = np.zeros((n, n1), dtype=complex)
    v_prime = np.empty(n1)
    for k in range(n1):
        vec = state.p[(k, n - 1)]
        p_bundle[vec.lo : vec.hi + 1, k] = vec.data
        v_prime[k] = state.v_prime[(k, n - 1)]
    q_bundle = np.zeros((n, n1), dtype=complex)
    v = np.empty(n1)
    for j in range(n1):
        l = n - n1 + j
        vec = state.q[(0, l)]
        q_bundle[vec.lo : vec.hi + 1, j] = vec.data
        v[j] = state.v[(0, l)]

    p_blocks = [p_bundle[i * n1 : (i + 1) * n1] for i in range(n2)]
    # bottom-up numbering: q_blocks[0] is the bottom block row
    q_blocks = [q_bundle[n - (i + 1) * n1 : n - i * n1] for i in range(n2)]

    diag_p = p_blocks[0].diagonal()
    diag_q = q_blocks[0].diagonal()
    if not (np.all(diag_p == 1.0) and np.all(diag_q == 1.0)):
        raise InternalConsistencyError(
            "corner blocks lost their exact unit diagonals"
        )

    a = M.materialize().array
    lead = a @ (np.conj(p_bundle) / v_prime[None, :]) @ p_blocks[0].T
    lead[:n1] -= np.eye(n1)
    trail = a @ (np.conj(q_bundle) / v[None, :]) @ q_blocks[0].T
    trail[n - n1 :] -= np.eye(n1)
    residual = max(float(np.abs(lead).max()), float(np.abs(trail).max()))
    if residual > tol:
        raise InternalConsistencyError(
            f"structured-inverse construction identities violated: residual "
            f"{residual:.3e} exceeds tolerance {tol:.3e}"
        )
    return GohbergHeinigInverse(
        n1, n2, p_blocks, q_blocks, v, v_prime, M, residual
    )


def gh_apply(g, b):
    """Apply the structured inverse: x = M^{-1} b via four block convolutions.

    b may be a vector of length n or an (n, m) matrix of right-hand sides.
    Cost O(n1^2 * n2^2 * m); the block-triangular factors are never formed.
    """
    n1, n2 = g.n1, g.n2
    n = n1 * n2
    b = np.asarray(b, dtype=complex)
    vec_in = b.ndim == 1
    cols = b.reshape(n2, n1, -1)
    m = cols.shape[2]

    # forward factor: block (I, J) = P_{J-I}^T above the diagonal
    c = np.zeros((n2, n1, m), dtype=complex)
    for i in range(n2):
        for t in range(n2 - i):
            c[i] += g.p_blocks[t].T @ cols[i + t]
    c /= g.v_prime[None, :, None]
    y = np.zeros((n2, n1, m), dtype=complex)
    for j in range(n2):
        for t in range(j + 1):
            y[j] += np.conj(g.p_blocks[t]) @ c[j - t]

    # backward factor: block (I, J) = Q_{n2-(J-I)}^T strictly above the diagonal
    d = np.zeros((n2, n1, m), dtype=complex)
    for i in range(n2):
        for t in range(1, n2 - i):
            d[i] += g.q_blocks[n2 - t].T @ cols[i + t]
    d /= g.v[None, :, None]
    z = np.zeros((n2, n1, m), dtype=complex)
    for j in range(n2):
        for t in range(1, j + 1):
            z[j] += np.conj(g.q_blocks[n2 - t]) @ d[j - t]

    out = (y - z).reshape(n, m)
    return out[:, 0] if vec_in else out


class WWREntities:
    """Matrix prediction entities derived from the structured inverse.

    forward_coeffs[i] and backward_coeffs[i] (i = 1..n2-1) are the block
    coefficients of the forward/backward matrix prediction polynomials;
    forward_error and backward_error are the Hermitian positive-definite
    prediction-error covariances. residual_forward/backward report how well
    the defining block equations hold against the source matrix.
    """

    __slots__ = (
        "forward_coeffs",
        "backward_coeffs",
        "forward_error",
        "backward_error",
        "residual_forward",
        "residual_backward",
    )

    def __init__(self, fc, bc, fe, be, rf, rb):
        self.forward_coeffs = fc
        self.backward_coeffs = bc
        self.forward_error = fe
        self.backward_error = be
        self.residual_forward = rf
        self.residual_backward = rb


def wwr_entities(g, *, tol=None):
    """Convert the structured inverse into prediction-polynomial form.

    forward_coeffs[i] = (P_0^T)^{-1} P_i^T, backward_coeffs[i] =
    (Q_0^T)^{-1} Q_i^T, computed by unit-triangular forward/back
    substitution only (P_0 and Q_0 are never inverted as general matrices).
    Verifies [I, A_1, .., A_{n2-1}] M = [Fe, 0, .., 0] and
    [B_{n2-1}, .., B_1, I] M = [0, .., 0, Be] within tolerance.
    """
    n1, n2 = g.n1, g.n2
    n = n1 * n2
    M = g.matrix
    if tol is None:
        tol = residual_tolerance(M.norm_max, n)

    p0t = g.p_blocks[0].T  # unit upper triangular
    q0t = g.q_blocks[0].T  # unit lower triangular
    forward = [backward_substitution(p0t, g.p_blocks[i].T) for i in range(1, n2)]
    backward = [forward_substitution(q0t, g.q_blocks[i].T) for i in range(1, n2)]

    fe_t = backward_substitution(
        np.conj(g.p_blocks[0]).T, backward_substitution(p0t, np.diag(g.v_prime)).T
    )
    forward_error = hermitian_part(fe_t.T)
    be_t = forward_substitution(
        np.conj(g.q_blocks[0]).T, forward_substitution(q0t, np.diag(g.v)).T
    )
    backward_error = hermitian_part(be_t.T)

    a = M.materialize().array
    row_f = np.hstack([np.eye(n1, dtype=complex)] + forward) @ a
    row_f[:, :n1] -= forward_error
    rf = float(np.abs(row_f).max())
    row_b = np.hstack(list(reversed(backward)) + [np.eye(n1, dtype=complex)]) @ a
    row_b[:, n - n1 :] -= backward_error
    rb = float(np.abs(row_b).max())
    if max(rf, rb) > tol:
        raise InternalConsistencyError(
            f"prediction-entity defining equations violated: residuals "
            f"{rf:.3e}/{rb:.3e} exceed tolerance {tol:.3e}"
        )
    # both error covariances must be positive definite; the oracle checks it
    cholesky_factor(forward_error)
    cholesky_factor(backward_error)
    return WWREntities(forward, backward, forward_error, backward_error, rf, rb)
