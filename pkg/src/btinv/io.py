"""Text file formats for matrices and vectors.

All formats are line-oriented ASCII: a tag+version header, integer dimension
lines, then whitespace-separated "re im" pairs in row-major order. '#' starts
a comment anywhere; blank lines are ignored. Floats are written with repr()
so write -> parse round-trips are bit-exact.

    DHM 1    dense Hermitian matrix: "n <int>", then n rows of n pairs
    BTHM 1   Hermitian block-Toeplitz: "n1 <int>", "n2 <int>", then blocks
             C_0..C_{n2-1}, one block per paragraph, n1 rows of n1 pairs each
    VEC 1    complex vector: "n <int>", then one pair per line
    DCM 1    general dense complex matrix (inverse output): like DHM without
             the symmetry requirement
"""

import math

import numpy as np

from .errors import MatrixFormatError
from .linalg import BlockToeplitzMatrix, DenseHermitianMatrix

__all__ = [
    "parse_matrix",
    "write_matrix",
    "parse_vector",
    "write_vector",
    "parse_complex_matrix",
    "write_complex_matrix",
    "format_vector",
    "format_complex_matrix",
]


class _TokenStream:
    """Whitespace tokens annotated with 1-based line numbers."""

    def __init__(self, text):
        self.tokens = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            for tok in body.split():
                self.tokens.append((tok, lineno))
        self.pos = 0
        self.last_line = self.tokens[-1][1] if self.tokens else 1

    def next(self, what):
        if self.pos >= len(self.tokens):
            raise MatrixFormatError(f"expected {what}, found end of file",
                                    line=self.last_line)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def expect_keyword(self, word):
        tok, line = self.next(f"'{word}'")
        if tok != word:
            raise MatrixFormatError(f"expected '{word}', found {tok!r}", line=line)

    def next_int(self, what):
        tok, line = self.next(what)
        try:
            value = int(tok)
        except ValueError:
            raise MatrixFormatError(f"expected integer {what}, found {tok!r}",
                                    line=line) from None
        if value < 1:
            raise MatrixFormatError(f"{what} must be >= 1, got {value}", line=line)
        return value

    def next_float(self, what):
        tok, line = self.next(what)
        try:
            value = float(tok)
        except ValueError:
            raise MatrixFormatError(f"expected number for {what}, found {tok!r}",
                                    line=line) from None
        if not math.isfinite(value):
            raise MatrixFormatError(f"non-finite value {tok!r} in {what}", line=line)
        return value, line

    def finish(self):
        extra = self.peek()
        if extra is not None:
            raise MatrixFormatError(f"unexpected trailing data {extra[0]!r}",
                                    line=extra[1])


def _read_header(ts, tag):
    got, line = ts.next("format tag")
    if got != tag:
        raise MatrixFormatError(f"expected {tag} header, found {got!r}", line=line)
    ver, line = ts.next("format version")
    if ver != "1":
        raise MatrixFormatError(f"unsupported {tag} version {ver!r}", line=line)


def _read_pairs(ts, count, what):
    """count complex entries; returns (values, line-per-entry)."""
    values = np.empty(count, dtype=complex)
    lines = np.empty(count, dtype=int)
    for i in range(count):
        re, line = ts.next_float(what)
        im, _ = ts.next_float(what)
        values[i] = complex(re, im)
        lines[i] = line
    return values, lines


def _check_hermitian_tokens(arr, lines, what):
    """Pre-check symmetry with source-line diagnostics before construction."""
    mism = np.argwhere(arr != arr.conj().T)
    if mism.size:
        i, j = mism[0]
        raise MatrixFormatError(
            f"{what} not Hermitian: entry ({i},{j}) = {arr[i, j]} is not the "
            f"conjugate of entry ({j},{i}) = {arr[j, i]}",
            line=int(lines[i, j]),
        )


def parse_matrix(path):
    """Parse a DHM or BTHM file into the corresponding matrix type."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    ts = _TokenStream(text)
    head = ts.peek()
    if head is None:
        raise MatrixFormatError("empty file", line=1)
    if head[0] == "DHM":
        return _parse_dense(ts)
    if head[0] == "BTHM":
        return _parse_block_toeplitz(ts)
    raise MatrixFormatError(
        f"unrecognized header tag {head[0]!r} (expected DHM or BTHM)",
        line=head[1],
    )


def _parse_dense(ts):
    _read_header(ts, "DHM")
    ts.expect_keyword("n")
    n = ts.next_int("n")
    flat, lines = _read_pairs(ts, n * n, "matrix entry")
    ts.finish()
    arr = flat.reshape(n, n)
    _check_hermitian_tokens(arr, lines.reshape(n, n), "matrix")
    return DenseHermitianMatrix(arr)


def _parse_block_toeplitz(ts):
    _read_header(ts, "BTHM")
    ts.expect_keyword("n1")
    n1 = ts.next_int("n1")
    ts.expect_keyword("n2")
    n2 = ts.next_int("n2")
    flat, lines = _read_pairs(ts, n2 * n1 * n1, "block entry")
    ts.finish()
    blocks = flat.reshape(n2, n1, n1)
    _check_hermitian_tokens(blocks[0], lines[: n1 * n1].reshape(n1, n1), "block C_0")
    return BlockToeplitzMatrix(list(blocks))


def _pair(z):
    return f"{z.real!r} {z.imag!r}"


def _matrix_lines(arr):
    return ["  ".join(_pair(z) for z in row) for row in arr]


def write_matrix(M, path):
    """Serialize a matrix in its natural format (DHM or BTHM)."""
    if isinstance(M, DenseHermitianMatrix):
        lines = ["DHM 1", f"n {M.n}"]
        lines += _matrix_lines(M.array)
    elif isinstance(M, BlockToeplitzMatrix):
        lines = ["BTHM 1", f"n1 {M.n1}", f"n2 {M.n2}"]
        for block in M.blocks:
            lines.append("")
            lines += _matrix_lines(block)
    else:
        raise TypeError(f"cannot serialize {type(M).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_vector(path):
    """Parse a VEC file into a complex ndarray."""
    with open(path, "r", encoding="utf-8") as fh:
        ts = _TokenStream(fh.read())
    _read_header(ts, "VEC")
    ts.expect_keyword("n")
    n = ts.next_int("n")
    values, _ = _read_pairs(ts, n, "vector entry")
    ts.finish()
    return values


def format_vector(vec):
    vec = np.asarray(vec, dtype=complex)
    lines = ["VEC 1", f"n {len(vec)}"]
    lines += [_pair(z) for z in vec]
    return "\n".join(lines) + "\n"


def write_vector(vec, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_vector(vec))


def parse_complex_matrix(path):
    """Parse a DCM file (general complex square matrix) into an ndarray."""
    with open(path, "r", encoding="utf-8") as fh:
        ts = _TokenStream(fh.read())
    _read_header(ts, "DCM")
    ts.expect_keyword("n")
    n = ts.next_int("n")
    flat, _ = _read_pairs(ts, n * n, "matrix entry")
    ts.finish()
    return flat.reshape(n, n)


def format_complex_matrix(arr):
    arr = np.asarray(arr, dtype=complex)
    lines = ["DCM 1", f"n {arr.shape[0]}"]
    lines += _matrix_lines(arr)
    return "\n".join(lines) + "\n"


def write_complex_matrix(arr, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_complex_matrix(arr))
