import math

import numpy as np
import pytest

from oracles import kl
from ising_blockmodel.bounds import (
    deviation_radius,
    fano_error_probability,
    kl_pair,
    lower_bound_error_probability,
    n_lower_bound,
    n_upper_bound,
    radius_crossover,
    sample_size_bounds,
    single_swap_neighborhood_size,
    stated_neighborhood_size,
)
from ising_blockmodel.covariance import exact_delta_omega
from ising_blockmodel.errors import DomainError
from ising_blockmodel.model import ModelParams


def _swap_kl(p, alpha, beta):
    m = p // 2
    s = list(range(m))
    t = [m] + s[1:]  # exchange site 0 with site m
    return kl(p, t, s, alpha, beta)


def test_kl_examples():
    params = ModelParams(0, 1, 2)
    assert kl_pair(params, exact_delta_omega(ModelParams(0, 1, 4)), p=2) == 0.0
    params = ModelParams(0, 1, 6)
    assert kl_pair(params, exact_delta_omega(params)) == pytest.approx(_swap_kl(6, 0, 1), abs=1e-10)
    s = exact_delta_omega(ModelParams(0, 1, 10))
    assert kl_pair(ModelParams(0, 2, 10), s) == pytest.approx(2 * kl_pair(ModelParams(0, 1, 10), s))
    with pytest.raises(DomainError):
        kl_pair(ModelParams(1, 1, 6), s)


@pytest.mark.parametrize("p", [4, 6, 8])
def test_kl_matches_enumeration(p):
    rng = np.random.default_rng(p)
    for _ in range(10):
        alpha, beta = np.sort(rng.uniform(-3, 3, size=2))
        params = ModelParams(alpha, beta, p)
        assert kl_pair(params, exact_delta_omega(params)) == pytest.approx(_swap_kl(p, alpha, beta), abs=1e-10)


def test_neighborhood_sizes():
    assert single_swap_neighborhood_size(10) == 25
    assert stated_neighborhood_size(10) == 16


def test_lower_bound_probability_sign():
    # 1 - g - sqrt(g) > 0 exactly for g < (3 - sqrt 5)/2 ~ 0.382, a strict subset of (0, 3/5)
    threshold = (3 - math.sqrt(5)) / 2
    for p in range(6, 200, 7):
        for gamma in np.linspace(0.01, threshold - 1e-9, 30):
            assert lower_bound_error_probability(p, gamma) > 0
        for gamma in np.linspace(threshold + 1e-9, 0.59, 10):
            assert lower_bound_error_probability(p, gamma) < 0
    assert fano_error_probability(100, 0.1) > 0
    with pytest.raises(DomainError):
        lower_bound_error_probability(4, 0.3)
    with pytest.raises(DomainError):
        lower_bound_error_probability(10, 0.6)


def test_report_examples():
    params = ModelParams(-1, 1.5, 100)
    gap = exact_delta_omega(params).gap
    rep = sample_size_bounds(params, gamma=0.5)
    assert rep.n_lower == pytest.approx(0.5 * math.log(25) / (2.5 * gap), rel=1e-12)
    assert rep.c_alpha_beta == pytest.approx(100 * gap)
    assert rep.kl_per_sample == pytest.approx(0.98 * 2.5 * gap)
    assert 0 <= rep.n_lower <= rep.n_upper
    assert rep.r_np > 0
    assert '"n_upper"' in rep.to_json()


def test_upper_bound_log_cancellation():
    p, c, gap = 50, 3.0, 0.4
    assert n_upper_bound(gap, p, 4 * p / math.e, c) == pytest.approx(16 * (3 + 2 / c) / gap)


def test_radius_crossover():
    p, delta, gap, c = 100, 0.05, 0.9, 90.0
    n_star = radius_crossover(p, delta, gap, c)
    first = math.sqrt((1 + 2 / c) * gap * math.log(4 * p / delta) / n_star)
    second = (6 + 4 / c) * math.log(p / delta) / n_star
    assert first == pytest.approx(second, rel=1e-12)
    assert deviation_radius(n_star, p, delta, gap, c) == pytest.approx(2 * p * first)
    with pytest.raises(DomainError):
        deviation_radius(0, p, delta, gap, c)


def test_bounds_errors():
    with pytest.raises(DomainError):
        sample_size_bounds(ModelParams(-1, 1.5, 4))
    with pytest.raises(DomainError):
        sample_size_bounds(ModelParams(-1, 1.5, 10), delta=1.5)
    with pytest.raises(DomainError):
        sample_size_bounds(ModelParams(1, 1, 10))
    with pytest.raises(DomainError):
        n_lower_bound(ModelParams(-1, 1.5, 10), 0.5, 10, 0.0)


def test_ratio_bounded_in_phase():
    ratios = []
    for alpha in np.linspace(-3, -0.7, 8):
        params = ModelParams(alpha, 1.5, 200)
        rep = sample_size_bounds(params)
        ratios.append(rep.n_upper / rep.n_lower)
    assert all(math.isfinite(r) and r > 1 for r in ratios)
