"""Reflection-coefficient factorization for Hermitian positive-definite
matrices, with a fast structured engine for block-Toeplitz inputs.

The dense engine runs a two-sided Levinson-type recursion producing
bi-orthogonal polynomial families, reflection coefficients and positive
pivots for every index pair. For Hermitian block-Toeplitz matrices the
structured engine computes only the canonical pattern of that array and
recovers everything else by index shifts, reducing the work from O(n^3) to
O(n1^3 * n2^2) for n = n1*n2. Completed states assemble into unit-triangular
inverse factorizations, a Gohberg-Heinig structured inverse, and the
classical multichannel prediction entities.
"""

from .errors import (
    InternalConsistencyError,
    MatrixFormatError,
    NotPositiveDefiniteError,
)
from .linalg import (
    BlockToeplitzMatrix,
    DenseHermitianMatrix,
    SupportVector,
    cholesky_factor,
    cholesky_inverse,
    cholesky_solve,
    column,
    shift,
    windowed_dot,
)
from .dense import RecursionState, init_state, run_dense, step, verify_state
from .fast import (
    CanonicalIndex,
    FastState,
    canonical,
    predicted_opcount,
    query,
    run_block_toeplitz,
)
from .factorization import (
    GohbergHeinigInverse,
    InverseFactorization,
    WWREntities,
    assemble,
    gh_apply,
    gohberg_heinig,
    invert,
    solve,
    wwr_entities,
)
from .generate import generate, generate_block_toeplitz, generate_dense

__version__ = "0.1.0"

__all__ = [
    "BlockToeplitzMatrix",
    "CanonicalIndex",
    "DenseHermitianMatrix",
    "FastState",
    "GohbergHeinigInverse",
    "InternalConsistencyError",
    "InverseFactorization",
    "MatrixFormatError",
    "NotPositiveDefiniteError",
    "RecursionState",
    "SupportVector",
    "WWREntities",
    "assemble",
    "canonical",
    "cholesky_factor",
    "cholesky_inverse",
    "cholesky_solve",
    "column",
    "generate",
    "generate_block_toeplitz",
    "generate_dense",
    "gh_apply",
    "gohberg_heinig",
    "init_state",
    "invert",
    "predicted_opcount",
    "query",
    "run_block_toeplitz",
    "run_dense",
    "shift",
    "solve",
    "step",
    "verify_state",
    "windowed_dot",
]
