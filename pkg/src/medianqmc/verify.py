"""Tiered self-checks behind ``medianqmc verify``.

The ``small`` tier is exhaustive at tiny precision (``E <= 4``); ``full``
adds Monte Carlo checks at ``E = 64``.  Every check returns a
:class:`CheckResult`; nothing raises on a failed property.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gf2, netgen, theory, walsh
from .estimator import EstimatorConfig, median_estimate
from .netgen import RandomizationScheme, RandomizedNet
from .rng import ReplicateStreams, philox

TIERS = ("small", "full")
RESIDUAL_TOL = 2.0**-40


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def random_spectrum(rng: np.random.Generator, s: int, modes: int, bits: int) -> walsh.FiniteSpectrum:
    seen = set()
    terms = []
    while len(terms) < modes:
        k = tuple(int(x) for x in rng.integers(0, 1 << bits, size=s))
        if k in seen:
            continue
        seen.add(k)
        terms.append((walsh.WalshIndex(k), float(rng.normal())))
    return walsh.FiniteSpectrum(tuple(terms))


def check_decomposition(trials: int = 200, seed: int = 1) -> CheckResult:
    """Replicate error equals ``sum Z S f_hat`` on random spectra and CRD/RLS nets."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(trials):
        s = int(rng.integers(1, 4))
        spectrum = random_spectrum(rng, s, int(rng.integers(1, 9)), 10)
        scheme = RandomizationScheme.crd() if t % 2 else RandomizationScheme.rls()
        m = int(rng.integers(1, 7))
        net = netgen.randomize(scheme, s, m, ReplicateStreams.derive(seed, t))
        worst = max(worst, walsh.verify_error_decomposition(spectrum, net))
    return CheckResult("error decomposition", worst <= RESIDUAL_TOL, f"max residual {worst:.3e} over {trials} trials")


def shift_sign_moments(E: int, s: int) -> tuple[float, float]:
    """Largest ``|E[S(k)]|`` and ``|E[S(k) S(k')]|`` over all shifts at precision ``E``."""
    indices = [walsh.WalshIndex(k) for k in itertools.product(range(1 << E), repeat=s) if any(k)]
    shifts = list(itertools.product(range(1 << E), repeat=s))
    signs = np.array([[walsh.s_sign(idx, d) for d in shifts] for idx in indices], dtype=np.int64)
    first = np.abs(signs.sum(axis=1)).max() / len(shifts)
    gram = signs @ signs.T
    np.fill_diagonal(gram, 0)
    second = np.abs(gram).max() / len(shifts)
    return float(first), float(second)


def check_shift_signs(E: int = 3) -> CheckResult:
    worst = 0.0
    for s in (1, 2):
        a, b = shift_sign_moments(E, s)
        worst = max(worst, a, b)
    return CheckResult("shift sign laws", worst == 0.0, f"max |moment| {worst} at E={E}, s<=2")


def crd_kill_fraction(E: int, m: int) -> float:
    """Exact fraction of (matrix, nonzero index) pairs with ``Z = 1`` over all ``E x m`` matrices, s = 1."""
    hits = 0
    total = 0
    for cols in itertools.product(range(1 << E), repeat=m):
        M = gf2.BitMatrix(cols, E)
        for k in range(1, 1 << E):
            hits += gf2.vecmat(k, M) == 0
            total += 1
    return hits / total


def check_crd_kill_exact(E: int = 3, m: int = 2) -> CheckResult:
    frac = crd_kill_fraction(E, m)
    return CheckResult("CRD kill probability (exact)", frac == 2.0**-m, f"fraction {frac} vs {2.0**-m}")


def crd_kill_monte_carlo(m: int, draws: int, seed: int) -> tuple[float, float]:
    """Empirical ``Pr(Z(k)=1)`` for random nonzero 64-bit ``k`` and CRD columns, with its standard error."""
    gen = philox(seed, m)
    cols = gen.random_raw(draws * m).reshape(draws, m).astype(np.uint64)
    k = gen.random_raw(draws).astype(np.uint64)
    k[k == 0] = 1
    par = gf2.batch_parity(cols & k[:, None])
    p_hat = float(np.mean(~par.any(axis=1)))
    p = 2.0**-m
    return p_hat, math.sqrt(p * (1 - p) / draws)


def check_crd_kill_mc(draws: int = 10**5, seed: int = 7) -> CheckResult:
    details = []
    ok = True
    for m in (4, 8):
        p_hat, se = crd_kill_monte_carlo(m, draws, seed)
        z = abs(p_hat - 2.0**-m) / se
        ok &= z <= 4
        details.append(f"m={m}: {p_hat:.5f} ({z:.2f} se)")
    return CheckResult("CRD kill probability (Monte Carlo)", ok, "; ".join(details))


def check_k_set_grid() -> CheckResult:
    worst = 0.0
    for alpha in (0, 1):
        for lam in (0.5, 1.0):
            p = theory.SmoothnessParams(alpha, lam)
            for u_size in (1, 2):
                for T in range(1, 7):
                    ratio = theory.enumerate_K_u_T(u_size, p, T) / theory.k_set_bound(u_size, p, T)
                    worst = max(worst, ratio)
    return CheckResult("K_u(T) count vs bound", worst <= 1.0, f"max count/bound {worst:.4f}")


def check_b_sets(bits: int = 6) -> CheckResult:
    bad = 0
    n = 0
    for alpha in (0, 1):
        sets = [k for k in range(1, 1 << bits) if bin(k).count("1") == alpha + 1]
        for k in sets:
            n += 1
            if len(theory.b_set_members([k], [0], alpha, bits)) != theory.b_set_size([k], [0]):
                bad += 1
    return CheckResult("B-set sizes", bad == 0, f"{bad} mismatches over {n} digit sets")


def check_k_cap_grid() -> CheckResult:
    p = theory.SmoothnessParams(1, 0.5, d=1)
    worst = 0.0
    for Tp in range(1, 5):
        for T in np.arange(Tp, 1.5 * Tp + 1e-9, 0.5):
            for u_size in (1, 2):
                c = theory.enumerate_K_cap_K_prime(u_size, p, float(T), Tp)
                worst = max(worst, c / theory.k_cap_bound(u_size, p, float(T), Tp))
    return CheckResult("K_u(T) ∩ K'_u(T') count vs bound", worst <= 1.0, f"max count/bound {worst:.4f}")


SOBOL_FIRST_8 = (
    (0.0, 0.0), (0.5, 0.5), (0.25, 0.75), (0.75, 0.25),
    (0.125, 0.625), (0.625, 0.125), (0.375, 0.375), (0.875, 0.875),
)
SOBOL_GRAY_FIRST_4 = ((0.0, 0.0), (0.5, 0.5), (0.75, 0.25), (0.25, 0.75))


def check_sobol_ingestion() -> CheckResult:
    net = netgen.randomize(RandomizationScheme.shift_only(), 2, 3, ReplicateStreams.derive(0, 0), zero_shift=True)
    pts = tuple(tuple(float(v) for v in row) for row in netgen.generate_points(net).x)
    _, gray = netgen.generate_points_gray(net)
    gray4 = tuple(tuple(float(v) for v in row) for row in netgen.codes_to_float(gray[:4]))
    ok = pts == SOBOL_FIRST_8 and gray4 == SOBOL_GRAY_FIRST_4
    return CheckResult("Sobol' ingestion", ok, f"index order {pts[:4]}...; gray order {gray4}")


def check_median_tail(seeds: int = 2000, m: int = 2, r: int = 5) -> CheckResult:
    """Single Walsh mode under CRD: the median errs no more often than ``Pr(Bin(2r-1, 2**-m) >= r)``."""
    idx = walsh.WalshIndex((1,))
    spectrum = walsh.FiniteSpectrum(((idx, 1.0),))
    errs = 0
    for seed in range(seeds):
        res = median_estimate(spectrum, EstimatorConfig(m, r, RandomizationScheme.crd(), 1, seed))
        errs += res.value != 0
    p = 2.0**-m
    n = 2 * r - 1
    tail = math.fsum(math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(r, n + 1))
    se = math.sqrt(tail * (1 - tail) / seeds) if tail > 0 else 0.0
    rate = errs / seeds
    return CheckResult("median error tail", rate <= tail + 4 * se + 1.0 / seeds, f"rate {rate:.5f} vs tail {tail:.5f}")


SMALL: tuple[Callable[[], CheckResult], ...] = (
    check_decomposition,
    check_shift_signs,
    check_crd_kill_exact,
    check_k_set_grid,
    check_b_sets,
    check_k_cap_grid,
    check_sobol_ingestion,
)
FULL_EXTRA: tuple[Callable[[], CheckResult], ...] = (check_crd_kill_mc, check_median_tail)


def run_suite(tier: str = "small") -> list[CheckResult]:
    if tier not in TIERS:
        raise ValueError(f"unknown tier {tier!r}; expected one of {TIERS}")
    checks = SMALL + (FULL_EXTRA if tier == "full" else ())
    out = []
    for check in checks:
        t0 = time.perf_counter()
        res = check()
        out.append(CheckResult(res.name, res.passed, res.detail, time.perf_counter() - t0))
    return out
