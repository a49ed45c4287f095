"""Generalized reflection-coefficient recursion on a dense Hermitian matrix.

For a Hermitian positive-definite M the recursion builds two families of
support-windowed polynomial vectors p[k,l] (window [k,l], leading entry
exactly 1 at k) and q[k,l] (trailing entry exactly 1 at l), bi-orthogonal
under the pairing <u, w> = u^T M w*. Each off-diagonal pair (k,l) carries a
forward/backward reflection coefficient a[k,l], a_prime[k,l] and positive
pivots v[k,l], v_prime[k,l]. The sweep runs diagonal by diagonal: every step
at (k,l) reads only entries from diagonal l-k-1.
"""

import logging

import numpy as np

from .errors import InternalConsistencyError, NotPositiveDefiniteError
from .linalg import SupportVector, windowed_dot

logger = logging.getLogger(__name__)

__all__ = ["RecursionState", "init_state", "step", "run_dense", "verify_state"]

# Updated pivot must keep at least this fraction of the previous one, i.e.
# real(1 - a*a') > PIVOT_DECAY_FLOOR, otherwise the matrix is declared not
# positive definite. Relative to v_hat by construction (v_new = v_hat * decay).
PIVOT_DECAY_FLOOR = 1e-13

# The coefficient product must be real for Hermitian input; larger imaginary
# parts mean a corrupted state, not a property of the input.
PRODUCT_IMAG_TOL = 1e-10

# Verification mode: |forward numerator - conj(backward numerator)| must stay
# below this, relative to 1 + |forward numerator|.
CONJUGATE_IDENTITY_RTOL = 1e-10


class RecursionState:
    """Recursion arrays keyed by index pairs (k, l), plus instrumentation.

    op_count accumulates 4*(l-k) per step: the two numerator dot products and
    the two vector updates each touch a window of length l-k. The count is a
    deterministic cost model and does not change when the conjugate-identity
    shortcut skips physically computing the second dot.
    """

    __slots__ = (
        "n",
        "p",
        "q",
        "a",
        "a_prime",
        "v",
        "v_prime",
        "op_count",
        "identity_checks",
        "keep",
    )

    def __init__(self, n):
        self.n = n
        self.p = {}
        self.q = {}
        self.a = {}
        self.a_prime = {}
        self.v = {}
        self.v_prime = {}
        self.op_count = 0
        self.identity_checks = 0
        self.keep = "all"


def init_state(M):
    """Diagonal seed: p[k,k] = q[k,k] = e_k, v[k,k] = v_prime[k,k] = M[k,k]."""
    n = M.n
    state = RecursionState(n)
    for k in range(n):
        r = M.entry(k, k).real
        if r <= 0.0:
            raise NotPositiveDefiniteError(
                f"diagonal entry {r!r} is not positive", where=(k, k)
            )
        e = SupportVector.basis(n, k)
        state.p[(k, k)] = e
        state.q[(k, k)] = e
        state.v[(k, k)] = r
        state.v_prime[(k, k)] = r
    return state


def step(state, M, k, l, q_hat, v_hat, *, check=False, col_l=None, col_k=None):
    """One recursion step: fill (k, l) from (k, l-1) and the supplied q_hat.

    q_hat plays the role of q[k+1, l] and v_hat of v[k+1, l]; the caller may
    pass a shifted canonical vector instead of a stored one (block-Toeplitz
    boundary). With check=True the backward numerator is computed by its own
    dot product and compared against the conjugate of the forward one;
    otherwise it is obtained by conjugation and the second dot is skipped.
    """
    try:
        p_prev = state.p[(k, l - 1)]
        vp_prev = state.v_prime[(k, l - 1)]
    except KeyError as exc:
        raise InternalConsistencyError(
            f"step ({k},{l}) requires predecessor ({k},{l - 1}) which was "
            "never computed; schedule is inconsistent"
        ) from exc
    if (k, l) in state.p:
        raise InternalConsistencyError(f"step ({k},{l}) was already computed")

    if col_l is None:
        col_l = M.column(l)
    num = windowed_dot(p_prev, col_l)

    if check:
        if col_k is None:
            col_k = M.column(k)
        num_back = windowed_dot(q_hat, col_k)
        if abs(num - np.conj(num_back)) > CONJUGATE_IDENTITY_RTOL * (1.0 + abs(num)):
            raise InternalConsistencyError(
                f"conjugate numerator identity violated at ({k},{l}): "
                f"forward {num}, backward {num_back}"
            )
        state.identity_checks += 1
    else:
        num_back = np.conj(num)

    a = num / v_hat
    a_prime = num_back / vp_prev
    prod = a * a_prime
    if abs(prod.imag) > PRODUCT_IMAG_TOL:
        raise InternalConsistencyError(
            f"coefficient product at ({k},{l}) has imaginary part "
            f"{prod.imag!r}, expected real"
        )
    if prod.real < 0.0:
        # harmless at rounding scale; a real violation would mean the two
        # numerator routes disagree in sign
        logger.warning(
            "coefficient product at (%d,%d) is negative: %r", k, l, prod.real
        )
    decay = 1.0 - prod.real
    if decay <= PIVOT_DECAY_FLOOR:
        raise NotPositiveDefiniteError(
            f"pivot update factor {decay!r} at step ({k},{l}); "
            "matrix is not positive definite",
            where=(k, l),
        )

    d = l - k
    # p[k,l] = p[k,l-1] - a * q_hat on window [k,l]; entry k stays exactly 1
    p_new = np.empty(d + 1, dtype=complex)
    p_new[:d] = p_prev.data
    p_new[d] = 0.0
    p_new[1:] -= a * q_hat.data
    # q[k,l] = q_hat - a_prime * p[k,l-1]; entry l stays exactly 1
    q_new = np.empty(d + 1, dtype=complex)
    q_new[0] = 0.0
    q_new[1:] = q_hat.data
    q_new[:d] -= a_prime * p_prev.data

    state.p[(k, l)] = SupportVector(p_prev.n, k, l, p_new)
    state.q[(k, l)] = SupportVector(p_prev.n, k, l, q_new)
    state.a[(k, l)] = complex(a)
    state.a_prime[(k, l)] = complex(a_prime)
    state.v[(k, l)] = float(v_hat * decay)
    state.v_prime[(k, l)] = float(vp_prev * decay)
    state.op_count += 4 * d


def _prune_diagonal(state, d):
    """Streaming mode: drop diagonal d except factor entries (k=0 or l=n-1)."""
    last = state.n - 1
    for k in range(state.n - d):
        l = k + d
        if k == 0 or l == last:
            continue
        key = (k, l)
        del state.p[key], state.q[key]
        state.v.pop(key, None)
        state.v_prime.pop(key, None)
        state.a.pop(key, None)
        state.a_prime.pop(key, None)


def run_dense(M, *, check=False, keep="all"):
    """Run the full recursion on M, diagonals d = 1 .. n-1 ascending.

    keep="all" stores every (k, l); keep="factors" retains only the entries
    the triangular factorization needs (p[.,n-1], q[0,.] and their pivots),
    pruning each diagonal once the next one is complete. Floating-point
    results are identical in both modes; only retention differs.
    """
    if keep not in ("all", "factors"):
        raise ValueError(f"unknown keep mode {keep!r}")
    state = init_state(M)
    state.keep = keep
    n = M.n
    for d in range(1, n):
        for k in range(n - d):
            l = k + d
            step(
                state,
                M,
                k,
                l,
                state.q[(k + 1, l)],
                state.v[(k + 1, l)],
                check=check,
            )
        if keep == "factors":
            _prune_diagonal(state, d - 1)
    return state


def verify_state(state, M, *, columns=None):
    """Recompute the defining products for every stored pair and report.

    Returns a dict of maximal residuals: orthogonality of p against columns
    k+1..l and of q against columns k..l-1, and the defect between the
    recurrence-computed pivots and their defining dot products. Structural
    invariants (windows, exact unit leading/trailing entries) raise
    InternalConsistencyError directly. Requires a state with keep="all" to be
    meaningful; pruned entries are simply not checked.
    """
    if columns is None:
        columns = {}

    def col(j):
        if j not in columns:
            columns[j] = M.column(j)
        return columns[j]

    res = {"orth_p": 0.0, "orth_q": 0.0, "v_defect": 0.0, "v_prime_defect": 0.0}
    for (k, l), pv in state.p.items():
        qv = state.q[(k, l)]
        if pv.lo != k or pv.hi != l or qv.lo != k or qv.hi != l:
            raise InternalConsistencyError(f"support window wrong at ({k},{l})")
        if pv.data[0] != 1.0 or qv.data[-1] != 1.0:
            raise InternalConsistencyError(
                f"leading/trailing coefficient not exactly 1 at ({k},{l})"
            )
        for j in range(k + 1, l + 1):
            r = abs(windowed_dot(pv, col(j)))
            if r > res["orth_p"]:
                res["orth_p"] = r
        for j in range(k, l):
            r = abs(windowed_dot(qv, col(j)))
            if r > res["orth_q"]:
                res["orth_q"] = r
        dv = abs(windowed_dot(qv, col(l)) - state.v[(k, l)])
        if dv > res["v_defect"]:
            res["v_defect"] = dv
        dvp = abs(windowed_dot(pv, col(k)) - state.v_prime[(k, l)])
        if dvp > res["v_prime_defect"]:
            res["v_prime_defect"] = dvp
    return res
