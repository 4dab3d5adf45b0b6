"""Replicated randomized QMC estimates: single nets, the median trick, the mean baseline."""

from __future__ import annotations

import itertools
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .netgen import E_DEFAULT, RandomizationScheme, RandomizedNet, codes_to_float, point_chunks, randomize
from .rng import ReplicateStreams

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EstimatorConfig:
    m: int
    r: int
    scheme: RandomizationScheme
    s: int
    master_seed: int
    E: int = E_DEFAULT
    workers: int = 1
    chunk_log2: int = 14

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def n_replicates(self) -> int:
        return 2 * self.r - 1


@dataclass(frozen=True)
class EstimateResult:
    value: float
    replicate_values: tuple[float, ...]
    scheme: str
    n_evals: int


def estimate_on_net(f: Integrand, net: RandomizedNet, chunk_log2: int = 14) -> float:
    """Mean of ``f`` over all points of ``net``, summed exactly in index order."""

    def values():
        for _, codes in point_chunks(net, chunk_log2):
            y = np.asarray(f(codes_to_float(codes)), dtype=float)
            if y.shape != (codes.shape[0],):
                raise ValueError(f"integrand returned shape {y.shape}, expected ({codes.shape[0]},)")
            yield from y.tolist()

    return math.fsum(values()) / net.n


def estimate_once(
    f: Integrand,
    scheme: RandomizationScheme,
    s: int,
    m: int,
    streams: ReplicateStreams,
    E: int = E_DEFAULT,
    chunk_log2: int = 14,
) -> float:
    return estimate_on_net(f, randomize(scheme, s, m, streams, E), chunk_log2)


def replicate_net(config: EstimatorConfig, replicate: int) -> RandomizedNet:
    """The net used by replicate ``replicate`` under ``config``."""
    streams = ReplicateStreams.derive(config.master_seed, replicate)
    return randomize(config.scheme, config.s, config.m, streams, config.E)


def replicate_values(f: Integrand, config: EstimatorConfig) -> tuple[float, ...]:
    """The ``2r - 1`` single-net estimates, ordered by replicate index."""

    def one(i: int) -> float:
        return estimate_on_net(f, replicate_net(config, i), config.chunk_log2)

    idx = range(config.n_replicates)
    if config.workers == 1:
        return tuple(one(i) for i in idx)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return tuple(pool.map(one, idx))


def _result(value: float, reps: tuple[float, ...], tag: str, config: EstimatorConfig) -> EstimateResult:
    return EstimateResult(value, reps, tag, len(reps) << config.m)


def median_of(reps: tuple[float, ...]) -> float:
    if len(reps) % 2 == 0:
        raise ValueError("the median trick needs an odd number of replicates")
    return statistics.median(reps)


def mean_of(reps: tuple[float, ...]) -> float:
    return math.fsum(reps) / len(reps)


def median_estimate(f: Integrand, config: EstimatorConfig) -> EstimateResult:
    reps = replicate_values(f, config)
    return _result(median_of(reps), reps, config.scheme.tag, config)


def mean_estimate(f: Integrand, config: EstimatorConfig) -> EstimateResult:
    """The STD baseline: average of the same replicates the median would use."""
    reps = replicate_values(f, config)
    return _result(mean_of(reps), reps, "STD", config)


def median_and_mean(f: Integrand, config: EstimatorConfig) -> tuple[EstimateResult, EstimateResult]:
    """Both estimators from one pass over the shared replicates."""
    reps = replicate_values(f, config)
    return (
        _result(median_of(reps), reps, config.scheme.tag, config),
        _result(mean_of(reps), reps, "STD", config),
    )


def all_shift_average(f: Integrand, net: RandomizedNet) -> float:
    """Average of the single-net estimate over every digital shift of ``net``.

    Only feasible for small ``E``; used to check unbiasedness exactly.
    """
    if net.E > 12:
        raise ValueError(f"enumerating 2**({net.E} * s) shifts is infeasible")
    total = []
    for shift in itertools.product(range(1 << net.E), repeat=net.s):
        shifted = RandomizedNet(net.C, np.array(shift, dtype=np.uint64), net.m, net.E)
        total.append(estimate_on_net(f, shifted))
    return math.fsum(total) / len(total)
