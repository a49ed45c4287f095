"""Deterministic random instance generators.

Both generators are seeded and bit-reproducible, and both guarantee by
construction what the matrix constructors demand: exact conjugate symmetry
and positive definiteness.
"""

import numpy as np

from .linalg import BlockToeplitzMatrix, DenseHermitianMatrix, hermitian_part

__all__ = ["generate_dense", "generate_block_toeplitz", "generate"]

RIDGE = 0.01


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def generate_dense(n, seed):
    """Random dense instance G G^H + n*0.01*I.

    The Gram matrix is positive semidefinite; the scaled identity ridge makes
    it positive definite with a condition number bounded independently of the
    seed. hermitian_part removes the rounding asymmetry a BLAS product may
    introduce without changing any value by more than one rounding.
    """
    rng = np.random.default_rng(seed)
    g = _complex_normal(rng, (n, n))
    a = hermitian_part(g @ g.conj().T)
    a[np.diag_indices(n)] += n * RIDGE
    return DenseHermitianMatrix(a)


def generate_block_toeplitz(n1, n2, seed):
    """Random block-Toeplitz instance from an empirical autocovariance.

    Draws a stationary complex sequence x_0..x_{m-1} in C^{n1} with m = 8*n2
    and forms the biased lag covariances C_t = (1/m) sum_s x_s x_{s+t}^H.
    The block-Toeplitz matrix built from biased estimates is positive
    semidefinite; a ridge on C_0 makes it definite.
    """
    rng = np.random.default_rng(seed)
    m = 8 * n2
    x = _complex_normal(rng, (m, n1))
    blocks = []
    for t in range(n2):
        c = (x[: m - t].T @ np.conj(x[t:])) / m
        blocks.append(c)
    blocks[0] = hermitian_part(blocks[0])
    blocks[0][np.diag_indices(n1)] += RIDGE
    return BlockToeplitzMatrix(blocks)


def generate(kind, n1, n2, seed):
    """Dispatch used by the CLI: kind 'dense' (order n1) or 'bt' (n1 x n2)."""
    if kind == "dense":
        return generate_dense(n1, seed)
    if kind == "bt":
        return generate_block_toeplitz(n1, n2, seed)
    raise ValueError(f"unknown kind {kind!r}")
