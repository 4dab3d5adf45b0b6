"""Bit-level linear algebra over GF(2).

Vectors are unsigned integers holding up to 64 binary digits.  Bit ``l - 1``
holds digit ``l``, so digit 1 (the most significant fractional digit of a
coordinate, or the lowest bit of an index) sits in bit 0.  A matrix is stored
column-major: column ``c`` is the word image of the unit vector ``e_c``.

Scalar helpers work on Python ints; the ``batch_*`` kernels work on numpy
``uint64`` arrays and are what the net generator uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ROWS = 64


def parity(x: int) -> int:
    return int.bit_count(x) & 1


def mask(rows: int) -> int:
    return (1 << rows) - 1


@dataclass(frozen=True)
class BitMatrix:
    """An ``rows x ncols`` matrix over GF(2), one word per column."""

    cols: tuple[int, ...]
    rows: int

    def __post_init__(self):
        if not 1 <= self.rows <= MAX_ROWS:
            raise ValueError(f"row count must be in [1, {MAX_ROWS}], got {self.rows}")
        if len(self.cols) < 1:
            raise ValueError("a BitMatrix needs at least one column")
        cols = tuple(int(c) for c in self.cols)
        for c in cols:
            if c < 0 or c >> self.rows:
                raise ValueError(f"column {c:#x} does not fit in {self.rows} rows")
        object.__setattr__(self, "cols", cols)

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(1 << c for c in range(n)), n)

    @classmethod
    def from_rows(cls, rows: list[list[int]]) -> BitMatrix:
        """Build from a dense 0/1 row list (row 0 = digit 1)."""
        nrows, ncols = len(rows), len(rows[0])
        cols = tuple(
            sum((rows[i][c] & 1) << i for i in range(nrows)) for c in range(ncols)
        )
        return cls(cols, nrows)

    def entry(self, i: int, c: int) -> int:
        return (self.cols[c] >> i) & 1

    def to_rows(self) -> list[list[int]]:
        return [[self.entry(i, c) for c in range(self.ncols)] for i in range(self.rows)]

    def padded(self, rows: int) -> BitMatrix:
        """The same columns viewed with ``rows`` rows (zero padding)."""
        return BitMatrix(self.cols, rows)


def matvec(M: BitMatrix, v: int) -> int:
    """``M v`` over GF(2): XOR of the columns selected by the bits of ``v``."""
    if v >> M.ncols:
        raise ValueError(f"vector {v:#x} has bits beyond column count {M.ncols}")
    out = 0
    c = 0
    while v:
        if v & 1:
            out ^= M.cols[c]
        v >>= 1
        c += 1
    return out


def vecmat(k: int, M: BitMatrix) -> int:
    """Row vector times matrix: bit ``c`` of the result is ``parity(k & col_c)``."""
    out = 0
    for c, col in enumerate(M.cols):
        out |= parity(k & col) << c
    return out


def matmul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """``A B`` over GF(2); ``B`` must have ``A.ncols`` rows."""
    if B.rows != A.ncols:
        raise ValueError(f"inner dimensions differ: {A.rows}x{A.ncols} times {B.rows}x{B.ncols}")
    return BitMatrix(tuple(matvec(A, col) for col in B.cols), A.rows)


def lower_unitriangular_from_words(words, rows: int, ncols: int) -> BitMatrix:
    """Turn ``ncols`` random words into a lower unitriangular ``rows x ncols`` matrix.

    Column ``c`` keeps the bits of ``words[c]`` strictly below the diagonal,
    forces the diagonal bit, and clears everything above it.
    """
    cols = tuple(
        ((int(w) & ~mask(c + 1)) | (1 << c)) & mask(rows) for c, w in enumerate(words[:ncols])
    )
    return BitMatrix(cols, rows)


def random_lower_unitriangular(rows: int, ncols: int, rng) -> BitMatrix:
    """Random lower-unitriangular matrix with iid Bernoulli(1/2) subdiagonal entries.

    ``rng`` is anything exposing ``random_raw(size)`` returning uint64 words,
    e.g. a numpy ``BitGenerator``.
    """
    if rows < ncols:
        raise ValueError(f"need rows >= ncols, got {rows} < {ncols}")
    return lower_unitriangular_from_words(rng.random_raw(ncols), rows, ncols)


def rank(M: BitMatrix) -> int:
    """Rank by Gaussian elimination on the columns."""
    basis: list[int] = []  # kept reduced: distinct leading bits
    for col in M.cols:
        x = col
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
            basis.sort(reverse=True)
    return len(basis)


def top_block(M: BitMatrix, n: int) -> BitMatrix:
    """Leading ``n x n`` block."""
    return BitMatrix(tuple(c & mask(n) for c in M.cols[:n]), n)


# ---------------------------------------------------------------------------
# vectorised kernels on uint64 arrays
# ---------------------------------------------------------------------------

_BYTE_REVERSE = np.array(
    [int(f"{b:08b}"[::-1], 2) for b in range(256)], dtype=np.uint8
)


def reverse64(words: np.ndarray) -> np.ndarray:
    """Reverse the bit order of every 64-bit word."""
    w = np.ascontiguousarray(words, dtype=np.uint64)
    b = _BYTE_REVERSE[w.view(np.uint8)].view(np.uint64)
    return b.byteswap()


def batch_parity(words: np.ndarray) -> np.ndarray:
    """Parity of each uint64 word, as uint8."""
    w = np.asarray(words, dtype=np.uint64)
    return (np.bitwise_count(w) & np.uint8(1)).astype(np.uint8)


def batch_matmul(A: np.ndarray, B: np.ndarray, inner: int) -> np.ndarray:
    """Column-word products for a stack of matrices.

    ``A`` has shape ``(..., inner)`` (columns of the left factors) and ``B``
    shape ``(..., ncols)`` whose words use only their low ``inner`` bits.
    Returns ``A_j B_j`` column words with the shape of ``B``.
    """
    A = np.asarray(A, dtype=np.uint64)
    B = np.asarray(B, dtype=np.uint64)
    out = np.zeros(B.shape, dtype=np.uint64)
    one = np.uint64(1)
    for b in range(inner):
        sel = ((B >> np.uint64(b)) & one).astype(bool)
        out ^= np.where(sel, A[..., b : b + 1], np.uint64(0))
    return out


def batch_lower_unitriangular(words: np.ndarray, rows: int) -> np.ndarray:
    """Vectorised :func:`lower_unitriangular_from_words` over the last axis."""
    w = np.asarray(words, dtype=np.uint64)
    ncols = w.shape[-1]
    c = np.arange(ncols, dtype=np.uint64)
    below = ~((np.uint64(2) << c) - np.uint64(1))  # bits strictly above position c
    diag = np.uint64(1) << c
    out = (w & below) | diag
    if rows < MAX_ROWS:
        out &= np.uint64(mask(rows))
    return out
