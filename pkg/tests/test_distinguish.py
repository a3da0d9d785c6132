import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsize.distinguish import (
    CLOSED_FORM,
    FINITE_N,
    CatSizeResult,
    cat_size,
    cat_sizes,
    error_probability,
    error_probability_curve,
    ghz_like_nmin,
    ghz_like_probability,
    single_particle_epsilon_sq,
    success_probability,
    theta0_for_epsilon_sq,
)
from catsize.rdm import rdm_closed_form, rdm_finite_n
from catsize.state import GaussianSpread, SuperpositionSpec

import oracles

PI = math.pi


def spec(n, theta0, sigma):
    return SuperpositionSpec.from_angles(n, theta0, sigma)


# -- success probability ---------------------------------------------------------

def test_success_probability_trivial_cases():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert success_probability(a, b) == 1.0
    assert success_probability(a, a) == 0.5
    assert error_probability(a, b) == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6))
def test_success_probability_bounds_symmetry_and_oracle(seed, dim):
    from conftest import random_density

    rng = np.random.default_rng(seed)
    a, b = random_density(rng, dim), random_density(rng, dim)
    p = success_probability(a, b)
    assert 0.5 <= p <= 1.0
    assert p == pytest.approx(success_probability(b, a), abs=1e-13)
    assert p == pytest.approx(oracles.helstrom(a, b), abs=1e-12)
    assert p == pytest.approx(success_probability(a, b, method="jacobi"), abs=1e-11)


def test_success_probability_rejects_bad_input():
    with pytest.raises(ValueError):
        success_probability(np.eye(2) / 2, np.eye(3) / 3)
    with pytest.raises(ValueError):
        success_probability(np.eye(2), np.eye(2) / 2)


# -- GHZ-like pair ---------------------------------------------------------------

@pytest.mark.parametrize("eps_sq, n", [(0.3, 5), (0.1, 1), (0.9, 3), (0.5, 7)])
def test_ghz_like_probability_matches_product_pair_oracle(eps_sq, n):
    a, b = oracles.ghz_product_pair(eps_sq, n)
    assert ghz_like_probability(eps_sq, n) == pytest.approx(oracles.helstrom(a, b), abs=1e-12)


def test_ghz_like_probability_edges():
    assert ghz_like_probability(1.0, 1) == 1.0
    assert ghz_like_probability(0.0, 50) == 0.5


@pytest.mark.parametrize("eps_sq", [0.1, 0.3, 0.5, 0.7, 0.9, 0.999, 1e-3])
@pytest.mark.parametrize("delta", [1e-2, 1e-4, 0.25, 0.49])
def test_ghz_like_nmin_equals_direct_scan(eps_sq, delta):
    n = 1
    while ghz_like_probability(eps_sq, n) < 1 - delta - 1e-12:
        n += 1
    assert ghz_like_nmin(eps_sq, delta) == n


def test_ghz_like_nmin_domain():
    assert ghz_like_nmin(1.0, 0.01) == 1
    with pytest.raises(ValueError):
        ghz_like_nmin(0.0, 0.01)
    with pytest.raises(ValueError):
        ghz_like_nmin(0.5, 0.5)
    with pytest.raises(ValueError):
        ghz_like_nmin(0.5, 0.0)


@pytest.mark.parametrize("theta0", [0.0, 0.1, 0.3, PI / 4])
def test_epsilon_angle_round_trip(theta0):
    eps = single_particle_epsilon_sq(theta0)
    assert theta0_for_epsilon_sq(eps) == pytest.approx(theta0, abs=1e-7)
    # single-particle overlap of the two branches is sin(2 theta0)
    r = rdm_closed_form(GaussianSpread(theta0, 0.0), 1)
    assert success_probability(r.rho_a, r.rho_b) == pytest.approx(ghz_like_probability(eps, 1), abs=1e-12)


# -- cat-size scan ---------------------------------------------------------------

@pytest.mark.parametrize("theta0, sigma, deltas, want", [
    (0.0, 0.005 * PI, (0.01,), {0.01: 40}),
    (0.05 * PI, 0.010 * PI, (0.01, 1e-4), {0.01: 20, 1e-4: 10}),
    (0.22 * PI, 0.030 * PI, (0.01,), {0.01: 0}),
    (0.10 * PI, 0.020 * PI, (0.01,), {0.01: 10}),
])
def test_reference_cat_sizes_finite_n(theta0, sigma, deltas, want):
    got = cat_sizes(spec(40, theta0, sigma), deltas, FINITE_N)
    assert {d: r.cat_size for d, r in got.items()} == want


def test_reference_row_with_rounded_cat_size():
    # the exact scan stops at n_min = 11 (C = 3.64); the reference value is C rounded to 4
    r = cat_size(spec(40, 0.10 * PI, 0.020 * PI), 1e-4, FINITE_N)
    assert r.n_min == 11
    assert round(r.cat_size) == 4
    assert dict(r.error_trace)[10] == pytest.approx(1.126e-4, rel=1e-3)


def test_cat_size_ghz_is_n():
    r = cat_size(spec(10, 0.0, 0.0), 0.01, FINITE_N)
    assert r.n_min == 1 and r.cat_size == 10.0 and r.relative_size == 1.0


def test_cat_size_identical_branches_is_zero():
    # theta0 = pi/4, sigma = 0: both branches are the same state
    r = cat_size(spec(30, PI / 4, 0.0), 0.01, CLOSED_FORM)
    assert r.n_min is None and r.cat_size == 0.0 and r.relative_size == 0.0
    assert len(r.probability_trace) == 100
    assert all(p == pytest.approx(0.5) for _, p in r.probability_trace)


@pytest.mark.parametrize("eps_sq", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("delta", [1e-2, 1e-4])
def test_sigma_zero_scan_matches_ghz_like_nmin(eps_sq, delta):
    theta0 = theta0_for_epsilon_sq(eps_sq)
    want = ghz_like_nmin(eps_sq, delta)
    assert cat_size(spec(100, theta0, 0.0), delta, CLOSED_FORM).n_min == want
    assert cat_size(spec(max(want, 10), theta0, 0.0), delta, FINITE_N).n_min == want


def test_cat_sizes_share_one_scan():
    res = cat_sizes(spec(40, 0.05 * PI, 0.01 * PI), [0.01, 1e-4], FINITE_N)
    lo, hi = res[0.01], res[1e-4]
    assert lo.probability_trace == hi.probability_trace[: lo.n_min]
    assert isinstance(lo, CatSizeResult) and lo.mode == FINITE_N and lo.n_max == 40


def test_cat_size_trace_invariants():
    r = cat_size(spec(40, 0.05 * PI, 0.01 * PI), 1e-4, FINITE_N)
    ns = [n for n, _ in r.probability_trace]
    assert ns == list(range(1, r.n_min + 1))
    assert r.probability_trace[-1][1] >= 1 - 1e-4
    assert all(p < 1 - 1e-4 for _, p in r.probability_trace[:-1])


def test_cat_size_argument_errors():
    s = spec(10, 0.1, 0.0)
    with pytest.raises(ValueError):
        cat_size(s, 0.01, FINITE_N, n_max=11)
    with pytest.raises(ValueError):
        cat_size(s, 0.01, "exact")
    with pytest.raises(ValueError):
        cat_sizes(s, [])
    with pytest.raises(TypeError):
        cat_size(GaussianSpread(0.1, 0.0), 0.01)
    with pytest.raises(ValueError):
        cat_size(s, 0.7)


def test_jacobi_path_agrees():
    s = spec(20, 0.05 * PI, 0.01 * PI)
    assert cat_size(s, 1e-4, FINITE_N, method="jacobi").n_min == cat_size(s, 1e-4, FINITE_N).n_min


# -- properties along n ----------------------------------------------------------

@pytest.mark.parametrize("theta0, sigma", [(0.0, 0.05), (0.1 * PI, 0.02 * PI), (PI / 8, PI / 16), (0.2 * PI, 0.0)])
def test_success_probability_nondecreasing_in_n(theta0, sigma):
    closed = [p for _, p in error_probability_curve(spec(60, theta0, sigma), range(1, 41), CLOSED_FORM)]
    finite = [p for _, p in error_probability_curve(spec(30, theta0, sigma), range(1, 31), FINITE_N)]
    for curve in (closed, finite):
        assert all(b <= a + 1e-12 for a, b in zip(curve, curve[1:]))


@pytest.mark.parametrize("theta0, ns", [(0.05 * PI, range(3, 9)), (0.15 * PI, range(20, 41))])
def test_error_decays_exponentially_without_spread(theta0, ns):
    # P_E = (1 - sqrt(1 - x^n)) / 2 ~ x^n / 4 with x = 1 - eps^2: log P_E becomes linear in n
    eps = single_particle_epsilon_sq(theta0)
    curve = dict(error_probability_curve(spec(100, theta0, 0.0), ns, CLOSED_FORM))
    slopes = [math.log(curve[n + 1]) - math.log(curve[n]) for n in list(ns)[:-1]]
    assert np.allclose(slopes, math.log1p(-eps), rtol=0.01)


@pytest.mark.parametrize("sigma", [0.1 * PI, 0.15 * PI, 0.2 * PI])
def test_error_floor_with_spread(sigma):
    curve = dict(error_probability_curve(spec(100, 0.0, sigma), [80, 100], CLOSED_FORM))
    assert curve[100] > 0.0
    assert abs(curve[100] - curve[80]) < 0.1 * curve[80]


def test_relative_size_properties_on_coarse_grid():
    thetas = [k * PI / 40 for k in range(-4, 5)]
    sigmas = [k * PI / 40 for k in range(0, 4)]

    def rel(t, s):
        return cat_size(spec(100, t, s), 1e-2, CLOSED_FORM).relative_size

    table = np.array([[rel(t, s) for t in thetas] for s in sigmas])
    centre = thetas.index(0.0)
    for row in table:
        assert row[centre] == row.max()
    assert all(b <= a for a, b in zip(table[:, centre], table[1:, centre]))
