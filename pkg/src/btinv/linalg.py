"""Core linear-algebra types and kernels.

Provides the two validated Hermitian matrix types (dense and block-Toeplitz),
support-windowed complex vectors, the windowed transpose dot product used by
the reflection recursion, and an independent Cholesky oracle (factor, solve,
inverse) that shares no code path with the recursion engines.
"""

import os

import numpy as np

from .errors import MatrixFormatError, NotPositiveDefiniteError

__all__ = [
    "SupportVector",
    "DenseHermitianMatrix",
    "BlockToeplitzMatrix",
    "column",
    "windowed_dot",
    "shift",
    "hermitian_part",
    "residual_tolerance",
    "cholesky_factor",
    "forward_substitution",
    "backward_substitution",
    "cholesky_solve",
    "cholesky_inverse",
]


def residual_tolerance(norm_max, n):
    """Default entrywise residual tolerance for an order-n problem.

    Scales with the matrix magnitude so the same policy works across
    scalings. The environment variable BTINV_TOL, when set, overrides the
    computed value with an absolute one.
    """
    env = os.environ.get("BTINV_TOL")
    if env is not None:
        return float(env)
    return 1e-12 + 1e-10 * float(norm_max) * n


def hermitian_part(a):
    """Exactly Hermitian part (a + a^H)/2.

    Conjugation, addition of exact conjugate pairs and halving are all exact
    in IEEE arithmetic, so the result passes the bitwise symmetry check of
    DenseHermitianMatrix even when ``a`` is Hermitian only up to rounding.
    """
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2


class SupportVector:
    """Complex vector of length ``n`` that is zero outside ``[lo, hi]``.

    Only the window ``data[0..hi-lo]`` is stored. Instances are treated as
    immutable; ``shift`` returns a new view-like instance sharing the same
    data buffer with the window moved, never a copy.
    """

    __slots__ = ("n", "lo", "hi", "data")

    def __init__(self, n, lo, hi, data):
        data = np.asarray(data, dtype=complex)
        if not (0 <= lo <= hi < n):
            raise ValueError(f"window [{lo}, {hi}] out of range for length {n}")
        if data.shape != (hi - lo + 1,):
            raise ValueError("window data length does not match [lo, hi]")
        self.n = n
        self.lo = lo
        self.hi = hi
        self.data = data

    @classmethod
    def basis(cls, n, k):
        """Standard basis vector e_k."""
        return cls(n, k, k, np.ones(1, dtype=complex))

    @classmethod
    def full(cls, values):
        """Wrap a length-n array with the trivial window [0, n-1]."""
        values = np.asarray(values, dtype=complex)
        return cls(len(values), 0, len(values) - 1, values)

    def entry(self, i):
        if self.lo <= i <= self.hi:
            return complex(self.data[i - self.lo])
        return 0j

    def to_dense(self):
        out = np.zeros(self.n, dtype=complex)
        out[self.lo : self.hi + 1] = self.data
        return out

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SupportVector(n={self.n}, window=[{self.lo},{self.hi}])"


def shift(v, s):
    """Apply the s-th power of the subdiagonal shift: entry i moves to i+s.

    s = 0 returns ``v`` itself (the identity). The shifted support must stay
    inside the vector: errors if nonzero entries would be pushed past the end.
    No data is copied; the window metadata moves.
    """
    if s == 0:
        return v
    if s < 0:
        raise ValueError("shift amount must be nonnegative")
    if v.hi + s >= v.n:
        raise ValueError(
            f"shift by {s} pushes support [{v.lo},{v.hi}] past length {v.n}"
        )
    return SupportVector(v.n, v.lo + s, v.hi + s, v.data)


def windowed_dot(v, w):
    """Transpose dot product sum_i v_i * w_i over the window intersection.

    No conjugation is applied; callers conjugate explicitly where a Hermitian
    product is intended. Cost is O(overlap), not O(n).
    """
    if v.n != w.n:
        raise ValueError(f"length mismatch: {v.n} vs {w.n}")
    lo = v.lo if v.lo > w.lo else w.lo
    hi = v.hi if v.hi < w.hi else w.hi
    if hi < lo:
        return 0j
    return np.dot(v.data[lo - v.lo : hi - v.lo + 1], w.data[lo - w.lo : hi - w.lo + 1])


def _validate_hermitian_block(a, what):
    """Bitwise conjugate-symmetry and positivity checks shared by both types."""
    if not np.isfinite(a.view(float)).all():
        raise MatrixFormatError(f"{what} contains non-finite entries")
    ah = a.conj().T
    if not np.array_equal(a, ah):
        i, j = np.argwhere(a != ah)[0]
        raise MatrixFormatError(
            f"{what} is not exactly Hermitian: entry ({i},{j})={a[i, j]} "
            f"vs conj entry ({j},{i})={a[j, i]}"
        )
    # exact symmetry already forces a real diagonal
    bad = np.flatnonzero(a.diagonal().real <= 0.0)
    if bad.size:
        k = int(bad[0])
        raise NotPositiveDefiniteError(
            f"{what} diagonal entry {k} is {a[k, k].real!r}, must be positive",
            where=k,
        )


class DenseHermitianMatrix:
    """Dense Hermitian matrix with exact construction-time validation.

    The constructor rejects (never repairs) inexact conjugate symmetry,
    non-finite entries, and nonpositive diagonals. The entry array is frozen
    after validation, so instances are safe to share.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise MatrixFormatError(f"expected a square matrix, got shape {a.shape}")
        _validate_hermitian_block(a, "matrix")
        a.setflags(write=False)
        self.n = a.shape[0]
        self.array = a
        self._columns = None  # contiguous column store, built lazily
        self._norm_max = None

    @property
    def norm_max(self):
        if self._norm_max is None:
            self._norm_max = float(np.abs(self.array).max())
        return self._norm_max

    def entry(self, i, j):
        return complex(self.array[i, j])

    def column(self, l):
        if self._columns is None:
            cols = np.ascontiguousarray(self.array.T)
            cols.setflags(write=False)
            self._columns = cols
        return SupportVector(self.n, 0, self.n - 1, self._columns[l])

    def __repr__(self):
        return f"DenseHermitianMatrix(n={self.n})"


class BlockToeplitzMatrix:
    """Hermitian block-Toeplitz matrix stored as its first block row.

    ``blocks[t]`` is the n1 x n1 block C_t; the full matrix has block (I, J)
    equal to C_{J-I} for J >= I and C_{I-J}^H below the diagonal. Only
    C_0 .. C_{n2-1} are stored; entries, columns and materialization all read
    the same block slots, so they agree bit for bit.
    """

    def __init__(self, blocks):
        blocks = [np.array(b, dtype=complex) for b in blocks]
        if not blocks:
            raise MatrixFormatError("need at least one block")
        n1 = blocks[0].shape[0] if blocks[0].ndim == 2 else 0
        for t, b in enumerate(blocks):
            if b.ndim != 2 or b.shape != (n1, n1) or n1 == 0:
                raise MatrixFormatError(
                    f"block {t} has shape {b.shape}, expected ({n1}, {n1})"
                )
            if not np.isfinite(b.view(float)).all():
                raise MatrixFormatError(f"block {t} contains non-finite entries")
        _validate_hermitian_block(blocks[0], "block C_0")
        for b in blocks:
            b.setflags(write=False)
        self.blocks = blocks
        self.n1 = n1
        self.n2 = len(blocks)
        self.n = n1 * len(blocks)
        self._norm_max = None

    @property
    def norm_max(self):
        if self._norm_max is None:
            self._norm_max = max(float(np.abs(b).max()) for b in self.blocks)
        return self._norm_max

    def entry(self, i, j):
        I, r = divmod(i, self.n1)
        J, c = divmod(j, self.n1)
        if J >= I:
            return complex(self.blocks[J - I][r, c])
        return complex(np.conj(self.blocks[I - J][c, r]))

    def column(self, l):
        """Column l of the full matrix, built from blocks in O(n)."""
        J, c = divmod(l, self.n1)
        out = np.empty(self.n, dtype=complex)
        for I in range(self.n2):
            seg = slice(I * self.n1, (I + 1) * self.n1)
            if J >= I:
                out[seg] = self.blocks[J - I][:, c]
            else:
                out[seg] = np.conj(self.blocks[I - J][c, :])
        return SupportVector(self.n, 0, self.n - 1, out)

    def materialize(self):
        """Explicit DenseHermitianMatrix with bit-identical entries."""
        n1 = self.n1
        full = np.empty((self.n, self.n), dtype=complex)
        for I in range(self.n2):
            for J in range(self.n2):
                tile = (
                    self.blocks[J - I]
                    if J >= I
                    else self.blocks[I - J].conj().T
                )
                full[I * n1 : (I + 1) * n1, J * n1 : (J + 1) * n1] = tile
        return DenseHermitianMatrix(full)

    def __repr__(self):
        return f"BlockToeplitzMatrix(n1={self.n1}, n2={self.n2})"


def column(M, l):
    """Column l of a dense or block-Toeplitz matrix as a SupportVector."""
    return M.column(l)


def _as_array(M):
    a = getattr(M, "array", M)
    return np.asarray(a, dtype=complex)


def cholesky_factor(M):
    """Lower-triangular L with L L^H = M, by an explicit column sweep.

    This is the independent oracle route: it never touches the reflection
    recursion. A nonpositive pivot raises NotPositiveDefiniteError with the
    pivot index (pivot <= 0 exactly, no tolerance).
    """
    a = _as_array(M)
    n = a.shape[0]
    L = np.zeros((n, n), dtype=complex)
    for j in range(n):
        col = a[j:, j] - L[j:, :j] @ L[j, :j].conj()
        pivot = col[0].real
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(
                f"pivot {j} is {pivot!r}, matrix is not positive definite",
                where=j,
            )
        L[j:, j] = col / np.sqrt(pivot)
    return L


def forward_substitution(L, b):
    """Solve L y = b for lower-triangular L; b may be a vector or matrix."""
    n = L.shape[0]
    y = np.array(b, dtype=complex)
    for i in range(n):
        if i:
            y[i] -= L[i, :i] @ y[:i]
        y[i] /= L[i, i]
    return y


def backward_substitution(U, b):
    """Solve U x = b for upper-triangular U; b may be a vector or matrix."""
    n = U.shape[0]
    x = np.array(b, dtype=complex)
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[i] -= U[i, i + 1 :] @ x[i + 1 :]
        x[i] /= U[i, i]
    return x


def cholesky_solve(M, b):
    """Solve M x = b through the oracle factor (forward then back pass)."""
    L = cholesky_factor(M)
    return backward_substitution(L.conj().T, forward_substitution(L, b))


def cholesky_inverse(M):
    """Explicit inverse through the oracle factor."""
    a = _as_array(M)
    return cholesky_solve(a, np.eye(a.shape[0], dtype=complex))
