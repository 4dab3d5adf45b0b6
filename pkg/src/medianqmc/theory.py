"""Walsh-index combinatorics and error-bound arithmetic for the median estimator.

A digit set ``kappa`` is stored as an integer whose bit ``l - 1`` marks the
element ``l``; this is the same integer as the univariate Walsh index.
Weights ``gamma_u`` come either as an explicit subset map or as products of
per-coordinate weights, and every subset sum has a closed product form for
the latter.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .walsh import WalshIndex

DEFAULT_DELTA = 1.0 / 16
MAX_EXPLICIT_DIM = 20
MAX_ENUM_BITS = 20
_EPS = 1e-9


# ---------------------------------------------------------------------------
# digit sets
# ---------------------------------------------------------------------------


def elements(kappa: int) -> list[int]:
    """Elements of ``kappa`` in decreasing order."""
    if kappa < 0:
        raise ValueError("digit sets are nonnegative integers")
    return [l + 1 for l in range(kappa.bit_length() - 1, -1, -1) if (kappa >> l) & 1]


def from_elements(items: Iterable[int]) -> int:
    out = 0
    for l in items:
        if l < 1:
            raise ValueError(f"digit positions start at 1, got {l}")
        out |= 1 << (l - 1)
    return out


def top_q(kappa: int, q: int) -> int:
    """The ``q``-th largest element, or 0 when ``kappa`` has fewer than ``q``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    el = elements(kappa)
    return el[q - 1] if len(el) >= q else 0


def top_set(kappa: int, q: int) -> int:
    """The ``q`` largest elements (all of them if fewer)."""
    if q < 0:
        raise ValueError("q must be >= 0")
    return from_elements(elements(kappa)[:q])


def norm(kappa: int) -> int:
    return sum(elements(kappa))


def norm_d(kappa: int, d: int) -> int:
    """Sum of the ``d`` largest elements."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return sum(elements(kappa)[:d])


# ---------------------------------------------------------------------------
# parameters and constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothnessParams:
    """``alpha``, ``lam`` (Hoelder exponent), free exponents ``theta``, ``theta_prime``, and order ``d``."""

    alpha: int = 0
    lam: float = 1.0
    theta: float = 0.5
    theta_prime: float = 0.5
    d: int = 1

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, np.integer)) and self.alpha >= 0):
            raise ValueError(f"alpha must be a nonnegative integer, got {self.alpha}")
        if not 0 < self.lam <= 1:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam}")
        if not 0 < self.theta < 1:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if not 0 < self.theta_prime < 1:
            raise ValueError(f"theta_prime must lie in (0, 1), got {self.theta_prime}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")

    @property
    def smoothness(self) -> float:
        """``alpha + lambda``."""
        return self.alpha + self.lam

    @property
    def rate_exponent(self) -> float:
        """``alpha + lambda + 1/2``."""
        return self.alpha + self.lam + 0.5

    @property
    def small_d(self) -> bool:
        return self.d < self.smoothness

    @property
    def beta(self) -> float:
        """``alpha + lambda - d``; positive only on the small-``d`` branch."""
        return self.smoothness - self.d


def const_AB(alpha: int, lam: float) -> tuple[float, float]:
    q = 2.0 ** (1.0 / (alpha + lam)) - 1.0
    A = 1.0 / (math.factorial(alpha) * q**alpha)
    B = math.fsum(1.0 / (math.factorial(a) * q**a) for a in range(1, alpha + 1))
    return A, B


def const_C(alpha: int, lam: float, theta: float) -> float:
    rho_inv = 4.0 ** (1.0 - theta) - 1.0
    first = 4.0**-alpha / (math.factorial(alpha) * (4.0 ** ((alpha + lam) * (1.0 - theta)) - 1.0) * rho_inv**alpha)
    rest = math.fsum(4.0 ** (1 - a) / (math.factorial(a) * rho_inv**a) for a in range(alpha + 1))
    return first + rest


def const_D(alpha: int, lam: float, d: int, theta_prime: float) -> float:
    beta = alpha + lam - d
    if beta <= 0:
        raise ValueError(f"D needs d < alpha + lambda, got d={d}, alpha+lambda={alpha + lam}")
    if not 0 < theta_prime < 1:
        raise ValueError(f"theta_prime must lie in (0, 1), got {theta_prime}")
    qp = 2.0 ** ((1.0 - theta_prime) / beta) - 1.0
    q = 2.0 ** (1.0 / beta) - 1.0
    inner = math.fsum(1.0 / (math.factorial(a) * q**a) for a in range(1, alpha - d + 1))
    first = inner / (math.factorial(d) * qp**d)
    second = math.fsum(1.0 / (math.factorial(a) * qp**a) for a in range(1, d + 1))
    return first + second


# ---------------------------------------------------------------------------
# K_u(T), B-sets and the cardinality bounds
# ---------------------------------------------------------------------------


def coordinate_cost(kappa: int, params: SmoothnessParams) -> float:
    """Contribution of one active coordinate to the ``K_u(T)`` criterion.

    A digit set with at least ``alpha + 1`` elements is first cut to its top
    ``alpha + 1``; the cost is then ``(lambda - 1) * (smallest kept element)``
    plus the element sum, with the first term absent for shorter sets.
    """
    if kappa == 0:
        raise ValueError("inactive coordinate has no cost")
    el = elements(kappa)
    a1 = params.alpha + 1
    if len(el) >= a1:
        kept = el[:a1]
        return (params.lam - 1.0) * kept[-1] + sum(kept)
    return float(sum(el))


def _as_kappas(idx: WalshIndex | Sequence[int]) -> list[int]:
    k = idx.k if isinstance(idx, WalshIndex) else tuple(int(v) for v in idx)
    return [v for v in k if v]


def in_K_u_T(idx: WalshIndex | Sequence[int], params: SmoothnessParams, T: float) -> bool:
    """Membership of a nonzero index in ``K_u(T)`` with ``u`` its support."""
    kappas = _as_kappas(idx)
    if not kappas:
        raise ValueError("K_u(T) membership is defined for nonzero indices")
    return math.fsum(coordinate_cost(k, params) for k in kappas) <= T + _EPS


def in_K_prime(idx: WalshIndex | Sequence[int], d: int, T_prime: float) -> bool:
    """``sum_j ||kappa_j||_(d) > T'``."""
    kappas = _as_kappas(idx)
    if not kappas:
        raise ValueError("K'_u membership is defined for nonzero indices")
    return sum(norm_d(k, d) for k in kappas) > T_prime + _EPS


def exact_bit_budget(u_size: int, params: SmoothnessParams, T: float) -> int:
    """Smallest digit budget past which no index can join ``K_u(T)``.

    Every coordinate costs at least ``lambda`` (``alpha = 0``) or 1
    (``alpha >= 1``), and a coordinate whose largest element is ``l`` costs at
    least ``lambda * l`` or ``l``, respectively.
    """
    if u_size < 1:
        raise ValueError("u must be nonempty")
    if params.alpha == 0:
        top = (T - (u_size - 1) * params.lam) / params.lam
    else:
        top = T - (u_size - 1)
    return max(int(math.floor(top + _EPS)), 0)


def _check_budget(bits: int) -> None:
    if bits > MAX_ENUM_BITS:
        raise ValueError(f"bit budget {bits} exceeds the enumeration cap {MAX_ENUM_BITS}")


def _cost_histogram(params: SmoothnessParams, bits: int, key=None) -> Counter:
    _check_budget(bits)
    hist: Counter = Counter()
    for k in range(1, 1 << bits):
        c = round(coordinate_cost(k, params), 9)
        hist[(c, key(k)) if key else c] += 1
    return hist


def enumerate_K_u_T(u_size: int, params: SmoothnessParams, T: float, bit_budget: int | None = None) -> int:
    """``|K_u(T)|`` restricted to indices whose coordinates use at most ``bit_budget`` digits.

    With ``bit_budget=None`` the exact budget is used, so the count is the
    full cardinality.  The criterion is separable, so counts are combined by
    convolving per-coordinate cost histograms.
    """
    if u_size < 1:
        raise ValueError("u must be nonempty")
    if T < 0:
        return 0
    bits = exact_bit_budget(u_size, params, T) if bit_budget is None else bit_budget
    if bits == 0:
        return 0
    hist = _cost_histogram(params, bits)
    acc: dict[float, int] = {0.0: 1}
    for _ in range(u_size):
        nxt: Counter = Counter()
        for c0, n0 in acc.items():
            for c1, n1 in hist.items():
                c = round(c0 + c1, 9)
                if c <= T + _EPS:
                    nxt[c] += n0 * n1
        acc = nxt
    return sum(acc.values())


def enumerate_K_cap_K_prime(
    u_size: int, params: SmoothnessParams, T: float, T_prime: float, bit_budget: int | None = None
) -> int:
    """``|K_u(T) ∩ K'_u(T')|`` within a digit budget (exact budget by default)."""
    if u_size < 1:
        raise ValueError("u must be nonempty")
    if T < 0:
        return 0
    bits = exact_bit_budget(u_size, params, T) if bit_budget is None else bit_budget
    if bits == 0:
        return 0
    hist = _cost_histogram(params, bits, key=lambda k: norm_d(k, params.d))
    acc: dict[tuple[float, int], int] = {(0.0, 0): 1}
    for _ in range(u_size):
        nxt: Counter = Counter()
        for (c0, d0), n0 in acc.items():
            for (c1, d1), n1 in hist.items():
                c = round(c0 + c1, 9)
                if c <= T + _EPS:
                    nxt[(c, d0 + d1)] += n0 * n1
        acc = nxt
    return sum(n for (_, dsum), n in acc.items() if dsum > T_prime + _EPS)


def k_set_bound(u_size: int, params: SmoothnessParams, T: float) -> float:
    """``2**(T/(alpha+lambda)) * (A max(T/(alpha+lambda), 1) + B)**|u|``."""
    A, B = const_AB(params.alpha, params.lam)
    x = T / params.smoothness
    return 2.0**x * (A * max(x, 1.0) + B) ** u_size


def k_cap_bound(u_size: int, params: SmoothnessParams, T: float, T_prime: float) -> float:
    """Cardinality bound on ``K_u(T) ∩ K'_u(T')`` for ``T`` in ``[T', (alpha+lambda) T'/d]``."""
    if not params.small_d:
        raise ValueError("this bound needs d < alpha + lambda")
    if T_prime < 0:
        raise ValueError("T' must be nonnegative")
    hi = params.smoothness * T_prime / params.d
    if not T_prime - _EPS <= T <= hi + _EPS:
        raise ValueError(f"T={T} outside [{T_prime}, {hi}]")
    A, B = const_AB(params.alpha, params.lam)
    D = const_D(params.alpha, params.lam, params.d, params.theta_prime)
    beta = params.beta
    x = (T - T_prime) / beta
    return 2.0**x * (A * max(x, 1.0) + B) ** u_size + 2.0 ** ((T - params.theta_prime * T_prime) / beta) * D**u_size


def b_set_size(kappas: Sequence[int], v: Iterable[int]) -> int:
    """``prod_{j in v} 2**(l_j - 1)`` with ``l_j`` the smallest element of ``kappas[j]``.

    ``v`` holds positions into ``kappas``.
    """
    out = 1
    for j in v:
        k = kappas[j]
        if k == 0:
            raise ValueError(f"coordinate {j} in v has an empty digit set")
        out <<= (k & -k).bit_length() - 1
    return out


def b_set_members(kappas: Sequence[int], v: Iterable[int], alpha: int, bits: int) -> list[tuple[int, ...]]:
    """Brute-force ``B(k_u, v)``: extensions whose top ``alpha+1`` elements on ``v`` are ``kappas``.

    Coordinates outside ``v`` are kept as they are.
    """
    _check_budget(bits)
    v = set(v)
    for j in v:
        if bin(kappas[j]).count("1") != alpha + 1:
            raise ValueError(f"coordinate {j} in v must have exactly alpha+1 = {alpha + 1} elements")
    choices = []
    for j, k in enumerate(kappas):
        if j in v:
            choices.append([k2 for k2 in range(1, 1 << bits) if top_set(k2, alpha + 1) == k])
        else:
            choices.append([k])
    return list(itertools.product(*choices))


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductWeights:
    """``gamma_u = prod_{j in u} gamma_j``; ``t_tilde_u`` bounded by ``sum_{j in u} t_tilde_j``."""

    gamma: tuple[float, ...]
    t_tilde: tuple[float, ...] | None = None

    def __post_init__(self):
        g = tuple(float(x) for x in self.gamma)
        if not g or any(x < 0 for x in g):
            raise ValueError("product weights must be a nonempty sequence of nonnegative reals")
        object.__setattr__(self, "gamma", g)
        if self.t_tilde is not None:
            t = tuple(float(x) for x in self.t_tilde)
            if len(t) != len(g) or any(x < 0 for x in t):
                raise ValueError("t_tilde must be nonnegative and match gamma in length")
            object.__setattr__(self, "t_tilde", t)

    @property
    def s(self) -> int:
        return len(self.gamma)

    def gamma_u(self, u: Iterable[int]) -> float:
        u = frozenset(u)
        return 0.0 if not u else math.prod(self.gamma[j - 1] for j in u)

    def t_tilde_u(self, u: Iterable[int]) -> float:
        if self.t_tilde is None:
            return 0.0
        return math.fsum(self.t_tilde[j - 1] for j in u)

    def subset_sum(self, power: float, factor: float = 1.0, t_coeff: float = 0.0) -> float:
        """``sum_{u != {}} gamma_u**power * factor**|u| * 2**(t_coeff * t_tilde_u)``."""
        t = self.t_tilde or (0.0,) * self.s
        logs = [math.log1p(g**power * factor * 2.0 ** (t_coeff * tj)) for g, tj in zip(self.gamma, t)]
        return math.expm1(math.fsum(logs))

    def expand(self) -> ExplicitWeights:
        if self.s > MAX_EXPLICIT_DIM:
            raise ValueError(f"cannot expand {self.s} coordinates")
        coords = range(1, self.s + 1)
        gam = {}
        tt = {}
        for size in range(1, self.s + 1):
            for u in itertools.combinations(coords, size):
                fu = frozenset(u)
                gam[fu] = self.gamma_u(fu)
                tt[fu] = self.t_tilde_u(fu)
        return ExplicitWeights(self.s, gam, tt)


@dataclass(frozen=True)
class ExplicitWeights:
    """``gamma_u`` (and optionally ``t_tilde_u``) for every nonempty ``u``; missing sets weigh 0."""

    s: int
    gamma: Mapping[frozenset, float]
    t_tilde: Mapping[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.s > MAX_EXPLICIT_DIM:
            raise ValueError(f"explicit weights limited to s <= {MAX_EXPLICIT_DIM}, got {self.s}")
        for u, g in self.gamma.items():
            if not u or any(not 1 <= j <= self.s for j in u):
                raise ValueError(f"bad subset {sorted(u)} for s={self.s}")
            if g < 0:
                raise ValueError("weights must be nonnegative")

    def gamma_u(self, u: Iterable[int]) -> float:
        return float(self.gamma.get(frozenset(u), 0.0))

    def t_tilde_u(self, u: Iterable[int]) -> float:
        return float(self.t_tilde.get(frozenset(u), 0.0))

    def subset_sum(self, power: float, factor: float = 1.0, t_coeff: float = 0.0) -> float:
        return math.fsum(
            g**power * factor ** len(u) * 2.0 ** (t_coeff * self.t_tilde_u(u))
            for u, g in self.gamma.items()
            if g > 0
        )


Weights = ProductWeights | ExplicitWeights


# ---------------------------------------------------------------------------
# Gamma functions, thresholds, certificates
# ---------------------------------------------------------------------------


def gamma_capital(m: int, params: SmoothnessParams, weights: Weights) -> float:
    """``1 + sum_u gamma_u**(1/(alpha+lambda+1/2)) (A m + B)**|u|``."""
    A, B = const_AB(params.alpha, params.lam)
    return 1.0 + weights.subset_sum(1.0 / params.rate_exponent, A * m + B)


def gamma_capital_2(m: int, params: SmoothnessParams, weights: Weights) -> float:
    """Small-``d`` counterpart of :func:`gamma_capital` with the extra ``D`` term."""
    if not params.small_d:
        raise ValueError("needs d < alpha + lambda")
    A, B = const_AB(params.alpha, params.lam)
    D = const_D(params.alpha, params.lam, params.d, params.theta_prime)
    p = 1.0 / params.rate_exponent
    growth = 2.0 ** ((1.0 - params.theta_prime) * params.d * m / params.beta)
    return 1.0 + weights.subset_sum(p, A * m + B) + growth * weights.subset_sum(p, D)


def threshold_T(
    u: Iterable[int],
    m: int,
    params: SmoothnessParams,
    weights: Weights,
    delta: float = DEFAULT_DELTA,
    variant: str = "CRD",
    t_tilde_u: float | None = None,
) -> float:
    """The per-``u`` threshold ``T_{u,m}`` (``variant`` is ``CRD`` or ``SmallD``)."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    u = frozenset(u)
    g = weights.gamma_u(u)
    if g <= 0:
        raise ValueError(f"threshold needs gamma_u > 0 for u={sorted(u)}")
    ap = params.smoothness
    if variant == "CRD":
        gam = gamma_capital(m, params, weights)
        return ap * m - ap * (math.log2(gam) - math.log2(delta) - math.log2(g) / params.rate_exponent)
    if variant == "SmallD":
        tt = weights.t_tilde_u(u) if t_tilde_u is None else t_tilde_u
        gam = gamma_capital_2(m, params, weights)
        return ap * (m - tt) - params.beta * (math.log2(gam) - math.log2(delta) - math.log2(g) / params.rate_exponent)
    raise ValueError(f"unknown threshold variant {variant!r}")


THEOREMS = ("T1_CRD", "T2_LargeD", "T3_SmallD")
_TAGS = {"T1_CRD": "CRD", "T2_LargeD": "LargeD", "T3_SmallD": "SmallD"}


@dataclass(frozen=True)
class BoundCertificate:
    """``Pr(|estimate - mu|**2 > threshold) <= failure_prob``."""

    threshold: float
    failure_prob: float
    theorem: str
    m: int
    r: int

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not 0 < self.failure_prob <= 1:
            raise ValueError("failure probability must lie in (0, 1]")


def certificate(
    theorem: str,
    m: int,
    r: int,
    params: SmoothnessParams,
    weights: Weights,
    f_norm: float = 1.0,
    scheme: str | None = None,
) -> BoundCertificate:
    """Squared-error threshold exceeded with probability at most ``2**-r``.

    ``T2_LargeD`` and ``T3_SmallD`` read ``t_tilde_u`` from the weights; they
    do not apply to the completely random design.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    if m < 1 or r < 1:
        raise ValueError("m and r must be >= 1")
    if f_norm <= 0:
        raise ValueError("f_norm must be positive")
    if scheme == "CRD" and theorem != "T1_CRD":
        raise ValueError("the completely random design is covered by T1_CRD only")
    th, ap, pe = params.theta, params.smoothness, params.rate_exponent
    C = const_C(params.alpha, params.lam, th)
    decay = 2.0 ** (-(2 * th * ap + 1) * m)
    if theorem == "T1_CRD":
        lead = 16.0 ** (2 * th * ap + 1) * weights.subset_sum((1 + 2 * (1 - th) * ap) / pe, C)
        value = lead * gamma_capital(m, params, weights) ** (2 * th * ap) * decay
    elif theorem == "T2_LargeD":
        if params.small_d:
            raise ValueError(f"T2_LargeD needs d >= alpha + lambda, got d={params.d}")
        lead = 16.0 * weights.subset_sum(2.0, C, t_coeff=2 * th * ap + 1)
        value = lead * decay
    else:
        if not params.small_d:
            raise ValueError(f"T3_SmallD needs d < alpha + lambda, got d={params.d}")
        beta = params.beta
        power = (1 + 2 * th * params.d + 2 * (1 - th) * ap) / pe
        lead = 16.0 ** (2 * th * beta + 1) * weights.subset_sum(power, C, t_coeff=2 * th * ap + 1)
        value = lead * gamma_capital_2(m, params, weights) ** (2 * th * beta) * decay
    return BoundCertificate(value * f_norm**2, 2.0**-r, _TAGS[theorem], m, r)


def best_theta(
    theorem: str,
    m: int,
    r: int,
    params: SmoothnessParams,
    weights: Weights,
    f_norm: float = 1.0,
    grid: Sequence[float] | None = None,
) -> tuple[float, BoundCertificate]:
    """Smallest certificate over a grid of ``theta`` values (a search, not an optimum)."""
    grid = grid if grid is not None else [i / 100 for i in range(1, 100)]
    best = None
    for th in grid:
        p = SmoothnessParams(params.alpha, params.lam, th, params.theta_prime, params.d)
        cert = certificate(theorem, m, r, p, weights, f_norm)
        if best is None or cert.threshold < best[1].threshold:
            best = (th, cert)
    if best is None:
        raise ValueError("empty theta grid")
    return best


# ---------------------------------------------------------------------------
# t-values and tractability
# ---------------------------------------------------------------------------


def t_tilde_rls(u_size: int, t_u: int) -> int:
    """``t_u + |u| - 1``."""
    if u_size < 1 or t_u < 0:
        raise ValueError("need |u| >= 1 and t_u >= 0")
    return t_u + u_size - 1


def niederreiter_t_bound(u: Iterable[int]) -> float:
    """``sum_{j in u} log2 j + log2 log2 (j + 2) + 2``."""
    return math.fsum(math.log2(j) + math.log2(math.log2(j + 2)) + 2.0 for j in u)


@dataclass(frozen=True)
class TractabilityReport:
    phi: float
    partial_sums: tuple[float, ...]
    verdict: str
    tail_exponent: float
    power_law_value: float | None = None
    power_law_passes: bool | None = None
    plain_sum: float | None = None


VERDICTS = ("converges-numerically", "diverges", "inconclusive")


def _tail_exponent(terms: np.ndarray) -> float:
    """Least-squares slope of ``log term`` against ``log j`` over the last half."""
    j = np.arange(1, len(terms) + 1, dtype=float)
    lo = len(terms) // 2
    tj, tv = j[lo:], terms[lo:]
    keep = tv > 0
    if keep.sum() < 3:
        return -math.inf
    return float(np.polyfit(np.log(tj[keep]), np.log(tv[keep]), 1)[0])


def tractability_check(
    gamma_j: Sequence[float],
    t_tilde_j: Sequence[float],
    params: SmoothnessParams,
    p: float | None = None,
    q: float | None = None,
    margin: float = 0.05,
) -> TractabilityReport:
    """Summability of ``sum_j (gamma_j**(1/(alpha+lambda+1/2)) 2**t_tilde_j)**phi`` on a finite prefix.

    The verdict fits a power law to the tail terms: an exponent below
    ``-1 - margin`` reads as convergent, above ``-1 + margin`` as divergent.
    When ``(p, q)`` describe ``gamma_j ~ j**-p`` and ``2**t_tilde_j ~ j**q``,
    the closed-form criterion ``(p - (alpha+lambda+1/2) q)/(alpha+lambda-d+1/2) > 1``
    is reported too.
    """
    if not params.small_d:
        raise ValueError(f"phi needs d < alpha + lambda, got d={params.d}")
    g = np.asarray(gamma_j, dtype=float)
    t = np.asarray(t_tilde_j, dtype=float)
    if g.shape != t.shape or g.ndim != 1 or g.size == 0:
        raise ValueError("gamma_j and t_tilde_j must be nonempty and of equal length")
    pe = params.rate_exponent
    phi = pe / (pe - params.d)
    terms = (g ** (1.0 / pe) * 2.0**t) ** phi
    partial = tuple(float(x) for x in np.cumsum(terms))
    slope = _tail_exponent(terms)
    if slope < -1.0 - margin:
        verdict = VERDICTS[0]
    elif slope > -1.0 + margin:
        verdict = VERDICTS[1]
    else:
        verdict = VERDICTS[2]
    power_law_value = power_law_passes = None
    if p is not None and q is not None:
        power_law_value = (p - pe * q) / (pe - params.d)
        power_law_passes = power_law_value > 1.0
    plain = float(math.fsum(g ** (1.0 / pe)))
    return TractabilityReport(phi, partial, verdict, slope, power_law_value, power_law_passes, plain)
