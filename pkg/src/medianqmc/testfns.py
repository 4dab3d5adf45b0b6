"""Product test integrands ``prod_j (1 + c_alpha j**-gamma (x_j e**x_j - 1))``.

Each factor has unit mean, so every member integrates to 1, and the ANOVA
components are products of ``x e**x - 1`` over the active coordinates.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

_GL_ORDER = 40


@functools.lru_cache(maxsize=None)
def _squared_derivative_integral(alpha: int) -> float:
    """``int_0^1 (x + 1 + alpha)**2 e**(2x) dx`` by Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    x = 0.5 * (nodes + 1.0)
    vals = (x + 1.0 + alpha) ** 2 * np.exp(2.0 * x)
    return 0.5 * math.fsum(weights * vals)


def c_alpha(alpha: int) -> float:
    """Normalizing constant making the ``(alpha, 1)`` variation norm equal 1."""
    if alpha not in (0, 1):
        raise ValueError(f"c_alpha is defined for alpha in {{0, 1}}, got {alpha}")
    return _squared_derivative_integral(alpha) ** -0.5


@dataclass(frozen=True)
class ProductTestFunction:
    s: int
    gamma: float
    alpha: int
    c: float = field(init=False)

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        object.__setattr__(self, "c", c_alpha(self.alpha))

    @property
    def weights(self) -> np.ndarray:
        """Per-coordinate relative variations ``j**-gamma``."""
        return np.arange(1, self.s + 1, dtype=float) ** -float(self.gamma)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.s:
            raise ValueError(f"expected {self.s} coordinates, got {x.shape[1]}")
        factors = 1.0 + (self.c * self.weights) * (x * np.exp(x) - 1.0)
        return np.multiply.reduce(factors, axis=1)

    def exact_mean(self) -> float:
        return 1.0

    def _check_subset(self, u: Iterable[int]) -> frozenset[int]:
        u = frozenset(u)
        if any(not 1 <= j <= self.s for j in u):
            raise ValueError(f"subset {sorted(u)} not inside 1..{self.s}")
        return u

    def relative_variation(self, u: Iterable[int]) -> float:
        """``prod_{j in u} j**-gamma``; the empty set gets 0."""
        u = self._check_subset(u)
        if not u:
            return 0.0
        return math.prod(float(j) ** -self.gamma for j in u)

    def anova_norm(self, u: Iterable[int]) -> float:
        """Closed-form ``||f||_{u, alpha, 1}`` of the ANOVA component on ``u``."""
        u = self._check_subset(u)
        if not u:
            raise ValueError("the ANOVA norm is defined for nonempty u")
        scale = self.c ** len(u) * math.prod(float(j) ** -self.gamma for j in u)
        return scale * _squared_derivative_integral(self.alpha) ** (len(u) / 2)

    def anova_component(self, u: Iterable[int], x: np.ndarray) -> np.ndarray:
        """``f_u`` evaluated at rows of ``x`` (all ``s`` coordinates supplied)."""
        u = self._check_subset(u)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.ones(x.shape[0])
        for j in sorted(u):
            out *= self.c * float(j) ** -self.gamma * (x[:, j - 1] * np.exp(x[:, j - 1]) - 1.0)
        return out
