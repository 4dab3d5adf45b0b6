"""Randomized base-2 digital nets.

Generating matrices are kept as ``(s, m)`` arrays of uint64 column words in
digit order (see :mod:`medianqmc.gf2`).  Point coordinates are exported as
64-bit fixed-point codes, ``x = code * 2**-64``, which is the bit reversal of
the digit-order word.
"""

from __future__ import annotations

import csv
import functools
import gzip
import io
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, TextIO

import numpy as np

from . import gf2
from .rng import ReplicateStreams, draw_words

E_DEFAULT = 64
MAX_LOG2_POINTS = 32
DIRNUMS_ENV = "MEDIANQMC_DIRNUMS"
_BUNDLED = "new-joe-kuo-6.21201.gz"


class DirectionNumberError(ValueError):
    """Malformed or invalid direction-number input."""


@dataclass(frozen=True)
class DirectionNumberEntry:
    dim_index: int
    degree: int
    a: int
    initial_m: tuple[int, ...]

    def __post_init__(self):
        if self.dim_index < 1 or self.degree < 1 or self.a < 0:
            raise DirectionNumberError(f"bad header fields in {self}")
        if len(self.initial_m) != self.degree:
            raise DirectionNumberError(
                f"dimension {self.dim_index}: expected {self.degree} m values, got {len(self.initial_m)}"
            )
        if self.a >> max(self.degree - 1, 0):
            raise DirectionNumberError(f"dimension {self.dim_index}: a={self.a} too wide for degree {self.degree}")
        for i, mi in enumerate(self.initial_m):
            if mi % 2 == 0 or not 0 < mi < 2 ** (i + 1):
                raise DirectionNumberError(
                    f"dimension {self.dim_index}: m_{i + 1}={mi} must be odd and < {2 ** (i + 1)}"
                )


def parse_direction_numbers(stream: TextIO | Iterable[str]) -> list[DirectionNumberEntry]:
    """Parse the Joe-Kuo ``d s a m_1 ... m_s`` table (one header line)."""
    entries: list[DirectionNumberEntry] = []
    lines = iter(stream)
    if next(lines, None) is None:
        raise DirectionNumberError("empty direction-number stream")
    for lineno, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            fields = [int(tok) for tok in line.split()]
        except ValueError:
            raise DirectionNumberError(f"line {lineno}: non-integer field in {line.strip()!r}") from None
        if len(fields) < 4:
            raise DirectionNumberError(f"line {lineno}: expected 'd s a m_1 ... m_s', got {line.strip()!r}")
        d, deg, a, *ms = fields
        try:
            entries.append(DirectionNumberEntry(d, deg, a, tuple(ms)))
        except DirectionNumberError as exc:
            raise DirectionNumberError(f"line {lineno}: {exc}") from None
    entries.sort(key=lambda e: e.dim_index)
    for expect, e in enumerate(entries, start=2):
        if e.dim_index != expect:
            raise DirectionNumberError(f"dimension indices not contiguous from 2: found {e.dim_index}, expected {expect}")
    return entries


def _open_text(path: str) -> TextIO:
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="ascii")
    return open(path, encoding="ascii")


@functools.lru_cache(maxsize=4)
def load_direction_numbers(path: str | None = None) -> tuple[DirectionNumberEntry, ...]:
    """Load the table from ``path``, ``$MEDIANQMC_DIRNUMS`` or the bundled copy."""
    path = path or os.environ.get(DIRNUMS_ENV)
    if path:
        with _open_text(path) as fh:
            return tuple(parse_direction_numbers(fh))
    raw = resources.files("medianqmc").joinpath("data").joinpath(_BUNDLED).read_bytes()
    with io.TextIOWrapper(gzip.GzipFile(fileobj=io.BytesIO(raw)), encoding="ascii") as fh:
        return tuple(parse_direction_numbers(fh))


def sobol_m_values(entry: DirectionNumberEntry | None, m: int) -> list[int]:
    """The integers ``m_1..m_m`` of the direction-number recurrence.

    ``entry=None`` stands for dimension 1, where every ``m_k`` is 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if entry is None:
        return [1] * m
    s, a = entry.degree, entry.a
    mv = list(entry.initial_m[:m])
    for k in range(s, m):
        new = mv[k - s] ^ (mv[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= mv[k - i] << i
        mv.append(new)
    return mv


def _digit_word(mk: int, k: int) -> int:
    # v_k = m_k / 2^k has digit l equal to bit (k - l) of m_k
    return int(f"{mk:0{k}b}"[::-1], 2)


def sobol_columns(entry: DirectionNumberEntry | None, m: int) -> list[int]:
    return [_digit_word(mk, k) for k, mk in enumerate(sobol_m_values(entry, m), start=1)]


def sobol_matrix(entry: DirectionNumberEntry | None, m: int) -> gf2.BitMatrix:
    """The ``m x m`` Sobol' generating matrix for one dimension."""
    return gf2.BitMatrix(tuple(sobol_columns(entry, m)), m)


@dataclass(frozen=True)
class GeneratingMatrixSet:
    """Base generating matrices, ``cols[j, c]`` = column ``c`` of dimension ``j + 1``."""

    cols: np.ndarray
    m: int

    def __post_init__(self):
        cols = np.asarray(self.cols, dtype=np.uint64)
        if cols.ndim != 2 or cols.shape[1] != self.m:
            raise ValueError(f"expected shape (s, {self.m}), got {cols.shape}")
        if self.m < 64 and np.any(cols >> np.uint64(self.m)):
            raise ValueError(f"base columns must fit in {self.m} rows")
        cols.setflags(write=False)
        object.__setattr__(self, "cols", cols)

    @property
    def s(self) -> int:
        return self.cols.shape[0]

    def matrix(self, j: int) -> gf2.BitMatrix:
        return gf2.BitMatrix(tuple(int(c) for c in self.cols[j]), self.m)

    def leading(self, s: int, m: int) -> np.ndarray:
        """Columns for the first ``s`` dimensions and ``m`` columns (``m x m`` blocks)."""
        if s > self.s:
            raise ValueError(f"base matrices cover {self.s} dimensions, {s} requested")
        if m > self.m:
            raise ValueError(f"base matrices have {self.m} columns, {m} requested")
        cols = self.cols[:s, :m]
        if m < self.m:
            # only valid when the leading columns fit in m rows (true for Sobol')
            if np.any(cols >> np.uint64(m)):
                raise ValueError("leading columns do not form an m x m block")
        return cols

    @classmethod
    def identity(cls, s: int, m: int) -> GeneratingMatrixSet:
        col = np.uint64(1) << np.arange(m, dtype=np.uint64)
        return cls(np.tile(col, (s, 1)), m)

    @classmethod
    def from_direction_numbers(
        cls, entries: Iterable[DirectionNumberEntry], s: int, m: int
    ) -> GeneratingMatrixSet:
        entries = list(entries)
        if s - 1 > len(entries):
            raise ValueError(f"direction numbers cover {len(entries) + 1} dimensions, {s} requested")
        rows = [sobol_columns(None, m)] + [sobol_columns(e, m) for e in entries[: s - 1]]
        return cls(np.array(rows, dtype=np.uint64), m)


@functools.lru_cache(maxsize=8)
def sobol_base(s: int, m: int, path: str | None = None) -> GeneratingMatrixSet:
    return GeneratingMatrixSet.from_direction_numbers(load_direction_numbers(path), s, m)


@dataclass(frozen=True)
class RandomizationScheme:
    """``RLS``, ``CRD`` or ``ShiftOnly``.

    ``base=None`` for RLS/ShiftOnly means the bundled Sobol' table.
    """

    tag: str
    base: GeneratingMatrixSet | None = field(default=None, compare=False)

    TAGS = ("RLS", "CRD", "ShiftOnly")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise ValueError(f"unknown scheme {self.tag!r}; expected one of {self.TAGS}")

    @classmethod
    def rls(cls, base=None):
        return cls("RLS", base)

    @classmethod
    def crd(cls):
        return cls("CRD")

    @classmethod
    def shift_only(cls, base=None):
        return cls("ShiftOnly", base)

    def base_columns(self, s: int, m: int) -> np.ndarray:
        if self.tag == "CRD":
            raise ValueError("CRD has no base matrices")
        base = self.base if self.base is not None else sobol_base(s, MAX_LOG2_POINTS)
        return base.leading(s, m)


@dataclass(frozen=True)
class RandomizedNet:
    """One randomized net: ``C[j]`` are ``E x m`` column words, ``D[j]`` the shifts."""

    C: np.ndarray
    D: np.ndarray
    m: int
    E: int = E_DEFAULT

    @property
    def s(self) -> int:
        return self.C.shape[0]

    @property
    def n(self) -> int:
        return 1 << self.m

    def matrix(self, j: int) -> gf2.BitMatrix:
        return gf2.BitMatrix(tuple(int(c) for c in self.C[j]), self.E)

    def shift(self, j: int) -> int:
        return int(self.D[j])


def randomize(
    scheme: RandomizationScheme,
    s: int,
    m: int,
    streams: ReplicateStreams,
    E: int = E_DEFAULT,
    zero_shift: bool = False,
) -> RandomizedNet:
    """Draw one randomized net of ``2**m`` points in ``s`` dimensions.

    ``E < 64`` and ``zero_shift`` exist for small exhaustive tests.
    """
    if not 1 <= m <= MAX_LOG2_POINTS:
        raise ValueError(f"m must be in [1, {MAX_LOG2_POINTS}], got {m}")
    if not m <= E <= gf2.MAX_ROWS:
        raise ValueError(f"need m <= E <= 64, got m={m}, E={E}")
    if s < 1:
        raise ValueError("s must be >= 1")
    emask = np.uint64(gf2.mask(E))
    if scheme.tag == "CRD":
        C = draw_words(streams.matrix, s, m) & emask
    elif scheme.tag == "RLS":
        M = gf2.batch_lower_unitriangular(draw_words(streams.matrix, s, m), E)
        C = gf2.batch_matmul(M, scheme.base_columns(s, m), m)
    else:
        C = np.array(scheme.base_columns(s, m), dtype=np.uint64)
    if zero_shift:
        D = np.zeros(s, dtype=np.uint64)
    else:
        D = draw_words(streams.shift, s, 1)[:, 0] & emask
    return RandomizedNet(C, D, m, E)


@dataclass(frozen=True)
class PointBlock:
    """``codes[i, j]`` is the fixed-point code of coordinate ``j`` of point ``i``."""

    codes: np.ndarray

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def s(self) -> int:
        return self.codes.shape[1]

    @property
    def x(self) -> np.ndarray:
        return codes_to_float(self.codes)


def codes_to_float(codes: np.ndarray) -> np.ndarray:
    """Truncate fixed-point codes to doubles; the result stays in ``[0, 1)``."""
    return (np.asarray(codes, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def float_to_codes(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`codes_to_float` on multiples of ``2**-53`` in ``[0, 1)``; other doubles are truncated."""
    return (np.floor(np.asarray(x, dtype=np.float64) * 2.0**53).astype(np.uint64)) << np.uint64(11)


def _fixed_point(net: RandomizedNet) -> tuple[np.ndarray, np.ndarray]:
    return gf2.reverse64(net.C), gf2.reverse64(net.D)


def generate_points(net: RandomizedNet) -> PointBlock:
    """All ``2**m`` points in index order ``i = 0 .. 2**m - 1``."""
    cols, shift = _fixed_point(net)
    codes = shift[None, :].copy()
    for c in range(net.m):
        codes = np.concatenate([codes, codes ^ cols[:, c]])
    return PointBlock(codes)


def point_chunks(net: RandomizedNet, chunk_log2: int = 14) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, codes)`` blocks of consecutive indices, in index order."""
    cols, shift = _fixed_point(net)
    low = min(chunk_log2, net.m)
    block = shift[None, :].copy()
    for c in range(low):
        block = np.concatenate([block, block ^ cols[:, c]])
    size = 1 << low
    for b in range(1 << (net.m - low)):
        hi = np.zeros(net.s, dtype=np.uint64)
        bits, c = b, low
        while bits:
            if bits & 1:
                hi ^= cols[:, c]
            bits >>= 1
            c += 1
        yield b * size, block ^ hi


def generate_points_gray(net: RandomizedNet) -> tuple[np.ndarray, np.ndarray]:
    """Incremental Gray-code traversal.

    Returns ``(indices, codes)`` where ``codes[t]`` is point ``indices[t]`` and
    ``indices[t] = t ^ (t >> 1)``; consecutive points differ by one column.
    """
    cols, shift = _fixed_point(net)
    n = net.n
    t = np.arange(n, dtype=np.uint64)
    indices = t ^ (t >> np.uint64(1))
    steps = np.zeros((n, net.s), dtype=np.uint64)
    steps[0] = shift
    if n > 1:
        # column flipped between t-1 and t is the count of trailing zeros of t
        tz = np.bitwise_count((t[1:] & (~t[1:] + np.uint64(1))) - np.uint64(1)).astype(np.intp)
        steps[1:] = cols.T[tz]
    codes = np.bitwise_xor.accumulate(steps, axis=0)
    return indices, codes


def export_points_csv(block: PointBlock, fh: TextIO) -> None:
    """Write ``i, j, code_hex, x_float`` rows, one per coordinate."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["i", "j", "code_hex", "x_float"])
    x = block.x
    for i in range(block.n):
        for j in range(block.s):
            w.writerow([i, j + 1, f"{int(block.codes[i, j]):016x}", repr(float(x[i, j]))])


_HEX = re.compile(r"^[0-9a-f]{16}$")


def read_points_csv(fh: TextIO) -> PointBlock:
    rows = list(csv.DictReader(fh))
    n = 1 + max(int(r["i"]) for r in rows)
    s = max(int(r["j"]) for r in rows)
    codes = np.zeros((n, s), dtype=np.uint64)
    for r in rows:
        if not _HEX.match(r["code_hex"]):
            raise ValueError(f"bad code {r['code_hex']!r}")
        codes[int(r["i"]), int(r["j"]) - 1] = int(r["code_hex"], 16)
    return PointBlock(codes)
