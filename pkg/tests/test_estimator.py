import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medianqmc import netgen, walsh
from medianqmc.estimator import (
    EstimatorConfig,
    all_shift_average,
    estimate_on_net,
    estimate_once,
    mean_estimate,
    median_and_mean,
    median_estimate,
    median_of,
    replicate_net,
)
from medianqmc.netgen import RandomizationScheme, RandomizedNet
from medianqmc.rng import ReplicateStreams
from medianqmc.verify import random_spectrum

SCHEMES = [RandomizationScheme.rls(), RandomizationScheme.crd(), RandomizationScheme.shift_only()]


def const(c):
    return lambda x: np.full(x.shape[0], c)


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("m", [1, 5])
def test_constant_integrand_exact(scheme, m):
    assert estimate_once(const(2.5), scheme, 3, m, ReplicateStreams.derive(0, 0)) == 2.5
    res = median_estimate(const(2.5), EstimatorConfig(m, 3, scheme, 3, 1))
    assert res.value == 2.5 and set(res.replicate_values) == {2.5}


def test_van_der_corput_average():
    net = netgen.randomize(RandomizationScheme.shift_only(netgen.GeneratingMatrixSet.identity(1, 2)), 1, 2,
                           ReplicateStreams.derive(0, 0), zero_shift=True)
    assert estimate_on_net(lambda x: x[:, 0], net) == 0.375


def test_single_walsh_mode_values():
    f = walsh.FiniteSpectrum(((walsh.WalshIndex.of(1), 1.0),))
    vals = [estimate_once(f, RandomizationScheme.crd(), 1, 2, ReplicateStreams.derive(9, t)) for t in range(2000)]
    assert set(vals) <= {-1.0, 0.0, 1.0}
    # mean zero: 2000 draws with variance 1/4 each
    assert abs(sum(vals) / len(vals)) < 4 * math.sqrt(0.25 / 2000)


def test_r_one_is_single_estimate():
    f = lambda x: np.prod(1 + 0.3 * (x - 0.5), axis=1)
    cfg = EstimatorConfig(6, 1, RandomizationScheme.rls(), 4, 17)
    single = estimate_once(f, cfg.scheme, 4, 6, ReplicateStreams.derive(17, 0))
    assert median_estimate(f, cfg).value == single
    assert mean_estimate(f, cfg).value == single


def test_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(4, 0, RandomizationScheme.rls(), 2, 0)
    with pytest.raises(ValueError):
        EstimatorConfig(0, 1, RandomizationScheme.rls(), 2, 0)
    with pytest.raises(ValueError):
        median_of((1.0, 2.0))


def test_median_and_mean_share_replicates():
    f = lambda x: np.exp(x.sum(axis=1) / 3)
    cfg = EstimatorConfig(5, 4, RandomizationScheme.rls(), 3, 2)
    med = median_estimate(f, cfg)
    mean = mean_estimate(f, cfg)
    assert med.replicate_values == mean.replicate_values
    assert len(med.replicate_values) == 7
    assert med.value == sorted(med.replicate_values)[3]
    assert mean.value == math.fsum(mean.replicate_values) / 7
    assert mean.scheme == "STD" and med.scheme == "RLS"
    assert med.n_evals == 7 * 32
    assert median_and_mean(f, cfg) == (med, mean)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=21).filter(lambda v: len(v) % 2 == 1), st.randoms())
def test_median_permutation_invariant(vals, rnd):
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    assert median_of(tuple(vals)) == median_of(tuple(shuffled)) == sorted(vals)[len(vals) // 2]


def test_deterministic_across_worker_counts():
    f = lambda x: np.cos(x).prod(axis=1)
    a = median_estimate(f, EstimatorConfig(8, 5, RandomizationScheme.rls(), 6, 123, workers=1))
    b = median_estimate(f, EstimatorConfig(8, 5, RandomizationScheme.rls(), 6, 123, workers=3))
    c = median_estimate(f, EstimatorConfig(8, 5, RandomizationScheme.rls(), 6, 123, workers=1, chunk_log2=3))
    assert a == b == c


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["RLS", "CRD"]))
def test_replicate_errors_equal_walsh_decomposition(seed, tag):
    rng = np.random.default_rng(seed)
    s = int(rng.integers(1, 4))
    spectrum = random_spectrum(rng, s, 6, 8)
    cfg = EstimatorConfig(int(rng.integers(1, 7)), 3, RandomizationScheme(tag), s, seed)
    res = median_estimate(spectrum, cfg)
    for i, v in enumerate(res.replicate_values):
        net = replicate_net(cfg, i)
        predicted = math.fsum(
            walsh.z_indicator(idx, net) * walsh.s_sign(idx, net.D) * c for idx, c in spectrum.terms if not idx.is_zero()
        )
        assert abs((v - spectrum.mean) - predicted) <= 2.0**-40


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_average_over_all_shifts_is_unbiased(seed):
    rng = np.random.default_rng(seed)
    E, s = 3, 2
    spectrum = random_spectrum(rng, s, 5, E)
    C = rng.integers(0, 1 << E, size=(s, 2)).astype(np.uint64)
    net = RandomizedNet(C, np.zeros(s, dtype=np.uint64), 2, E)
    assert abs(all_shift_average(spectrum, net) - spectrum.mean) < 1e-14


def test_median_error_binomial_tail():
    """A lone Walsh mode under CRD: the median errs only if r of 2r-1 replicates err."""
    m, r, seeds = 2, 5, 10**4
    spectrum = walsh.FiniteSpectrum(((walsh.WalshIndex.of(1), 1.0),))
    errs = 0
    for seed in range(seeds):
        reps = [estimate_once(spectrum, RandomizationScheme.crd(), 1, m, ReplicateStreams.derive(seed, i))
                for i in range(2 * r - 1)]
        errs += median_of(tuple(reps)) != 0
    p = 2.0**-m
    tail = math.fsum(math.comb(9, i) * p**i * (1 - p) ** (9 - i) for i in range(r, 10))
    assert errs / seeds <= tail + 4 * math.sqrt(tail * (1 - tail) / seeds)


def test_integrand_shape_checked():
    with pytest.raises(ValueError):
        estimate_once(lambda x: x, RandomizationScheme.rls(), 2, 3, ReplicateStreams.derive(0, 0))


def test_integrand_failure_propagates():
    def boom(x):
        raise RuntimeError("bad integrand")

    with pytest.raises(RuntimeError):
        median_estimate(boom, EstimatorConfig(3, 2, RandomizationScheme.rls(), 1, 0))
