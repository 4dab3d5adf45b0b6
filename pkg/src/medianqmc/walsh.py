"""Walsh functions and the error decomposition of randomized digital nets.

A univariate Walsh index ``k`` is an integer whose bit ``l - 1`` selects
digit ``l`` of the coordinate.  Coordinates arrive as 64-bit fixed-point
codes, so digits are read after a bit reversal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import gf2
from .netgen import RandomizedNet, float_to_codes, generate_points

MAX_GRID_POINTS = 2**22


def _rev64(x: int) -> int:
    return int(f"{x:064b}"[::-1], 2)


def wal(k: int, code: int) -> int:
    """``wal_k`` at the coordinate with fixed-point code ``code``; returns +1 or -1."""
    return -1 if gf2.parity(k & _rev64(code)) else 1


@dataclass(frozen=True)
class WalshIndex:
    """An ``s``-vector of univariate indices ``k_j < 2**64``."""

    k: tuple[int, ...]

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if not k:
            raise ValueError("a Walsh index needs at least one coordinate")
        for v in k:
            if not 0 <= v < 2**64:
                raise ValueError(f"coordinate index {v} outside [0, 2**64)")
        object.__setattr__(self, "k", k)

    @property
    def s(self) -> int:
        return len(self.k)

    @property
    def support(self) -> frozenset[int]:
        """1-based coordinates with ``k_j != 0``."""
        return frozenset(j + 1 for j, v in enumerate(self.k) if v)

    def is_zero(self) -> bool:
        return not any(self.k)

    def kappa(self, j: int) -> frozenset[int]:
        """Bit positions (1-based) of ``k_j``; ``j`` is 1-based."""
        v = self.k[j - 1]
        return frozenset(l + 1 for l in range(v.bit_length()) if (v >> l) & 1)

    @classmethod
    def of(cls, *k: int) -> WalshIndex:
        return cls(tuple(k))


def wal_multi(idx: WalshIndex, row: Sequence[int]) -> int:
    """Tensor-product Walsh function at one point given by its codes."""
    sign = 1
    for k, code in zip(idx.k, row):
        sign *= wal(k, int(code))
    return sign


def wal_values(idx: WalshIndex, codes: np.ndarray) -> np.ndarray:
    """``wal_idx`` at every row of a ``(n, s)`` code array, as float +-1."""
    codes = np.asarray(codes, dtype=np.uint64)
    par = np.zeros(codes.shape[0], dtype=np.uint8)
    for j, k in enumerate(idx.k):
        if k:
            par ^= gf2.batch_parity(codes[:, j] & np.uint64(_rev64(k)))
    return 1.0 - 2.0 * par


@dataclass(frozen=True)
class FiniteSpectrum:
    """``f = sum_k c_k wal_k`` over finitely many distinct indices."""

    terms: tuple[tuple[WalshIndex, float], ...]

    def __post_init__(self):
        terms = tuple((idx, float(c)) for idx, c in self.terms)
        if not terms:
            raise ValueError("empty spectrum")
        dims = {idx.s for idx, _ in terms}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions in spectrum: {sorted(dims)}")
        if len({idx for idx, _ in terms}) != len(terms):
            raise ValueError("repeated Walsh index in spectrum")
        object.__setattr__(self, "terms", terms)

    @property
    def s(self) -> int:
        return self.terms[0][0].s

    @property
    def mean(self) -> float:
        return sum(c for idx, c in self.terms if idx.is_zero())

    def evaluate_codes(self, codes: np.ndarray) -> np.ndarray:
        out = np.zeros(np.asarray(codes).shape[0])
        for idx, c in self.terms:
            out += c * wal_values(idx, codes)
        return out

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate_codes(float_to_codes(np.atleast_2d(x)))


def walsh_coeff_dyadic(
    f: Callable[[np.ndarray], np.ndarray], idx: WalshIndex, p: int, max_points: int = MAX_GRID_POINTS
) -> float:
    """Average of ``f * wal_idx`` over the midpoints of the ``2**(s p)`` dyadic cells.

    Exact for ``f`` constant on cells of side ``2**-p``; for smooth ``f`` the
    midpoint rule carries an ``O(2**-p)`` bias.
    """
    s = idx.s
    if any(k >> p for k in idx.k):
        raise ValueError(f"index {idx.k} has digits beyond resolution p={p}")
    if 2 ** (s * p) > max_points:
        raise ValueError(f"grid of 2**{s * p} cells exceeds cap {max_points}")
    axis = (np.arange(2**p) + 0.5) / 2**p
    grid = np.stack(np.meshgrid(*([axis] * s), indexing="ij"), axis=-1).reshape(-1, s)
    vals = np.asarray(f(grid), dtype=float) * wal_values(idx, float_to_codes(grid))
    return math.fsum(vals) / grid.shape[0]


def z_indicator(idx: WalshIndex, net: RandomizedNet) -> int:
    """1 when ``sum_j k_j^T C_j = 0``, i.e. the net does not integrate ``wal_idx`` exactly."""
    if idx.is_zero():
        raise ValueError("Z is defined for nonzero indices only")
    if idx.s != net.s:
        raise ValueError(f"index has {idx.s} coordinates, net has {net.s}")
    acc = 0
    for j, k in enumerate(idx.k):
        if k:
            acc ^= gf2.vecmat(k, net.matrix(j))
    return int(acc == 0)


def s_sign(idx: WalshIndex, shifts: Sequence[int] | np.ndarray) -> int:
    """``(-1) ** sum_j k_j^T D_j`` with digit-order shift words."""
    total = 0
    for k, d in zip(idx.k, shifts):
        total ^= gf2.parity(k & int(d))
    return -1 if total else 1


def verify_error_decomposition(spectrum: FiniteSpectrum, net: RandomizedNet) -> float:
    """``|(mean over the net - f_hat(0)) - sum_{k != 0} Z(k) S(k) f_hat(k)|``."""
    codes = generate_points(net).codes
    lhs = math.fsum(spectrum.evaluate_codes(codes)) / net.n - spectrum.mean
    rhs = math.fsum(
        z_indicator(idx, net) * s_sign(idx, net.D) * c for idx, c in spectrum.terms if not idx.is_zero()
    )
    return abs(lhs - rhs)


def nonzero_indices(s: int, bits: int) -> Iterable[WalshIndex]:
    """Every nonzero index with ``s`` coordinates of at most ``bits`` digits."""
    for k in itertools.product(range(2**bits), repeat=s):
        if any(k):
            yield WalshIndex(k)
