"""Unit tests for the closed-form success-probability model."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import enumerate_collision_events, naive_success_pdra
from pdra.analytic import (
    AnalyticParams,
    asymptotic_sinr,
    collision_event_probs,
    db_to_linear,
    p_k_other_roots,
    p_no_pattern_collision,
    sinr_limited_k_cap,
    success_probability_conventional,
    success_probability_pdra,
    success_probability_random_activity,
)

ALPHA_5DB = db_to_linear(5.0)


def params(n_active=10, r_roots=2, n_ss=32, n_zc=839, alpha_th=ALPHA_5DB):
    return AnalyticParams(
        n_active=n_active, r_roots=r_roots, n_ss=n_ss, n_zc=n_zc, alpha_th=alpha_th
    )


def test_no_collision_probability():
    assert p_no_pattern_collision(1, 992) == 1.0
    assert p_no_pattern_collision(2, 1) == 0.0
    expected = (1.0 - 1.0 / 992.0) ** 9
    assert abs(p_no_pattern_collision(10, 992) - expected) < 1e-15
    assert abs(expected - 0.990963) < 1e-6


def test_derived_pool_sizes():
    p = params()
    assert p.n_ps == 496
    assert p.n_p == 992


def test_p_k_single_root():
    p = params(n_active=5, r_roots=1)
    assert p_k_other_roots(0, p) == 1.0
    assert p_k_other_roots(3, p) == 0.0


def test_p_k_hand_value():
    # N=3, R=2, N_SS=4 so N_PS=6: C(2,1)*6*5 / 11^2 = 60/121
    p = params(n_active=3, r_roots=2, n_ss=4)
    assert abs(p_k_other_roots(1, p) - 60.0 / 121.0) < 1e-15


@pytest.mark.parametrize(
    "n_active,r_roots,n_ss",
    [(50, 4, 32), (200, 8, 141), (2, 2, 4), (100, 3, 64), (1, 5, 32)],
)
def test_p_k_normalizes(n_active, r_roots, n_ss):
    p = params(n_active=n_active, r_roots=r_roots, n_ss=n_ss)
    total = sum(p_k_other_roots(k, p) for k in range(n_active))
    assert abs(total - 1.0) < 1e-12


def test_collision_events_no_others():
    ev = collision_event_probs(0, 32)
    assert (ev.p_e0, ev.p_e1) == (1.0, 0.0)


def test_collision_events_single_other_smallest_pool():
    # one other UE, N_SS=4: 5 non-identical pairs, 1 avoids both, 4 share one
    ev = collision_event_probs(1, 4)
    assert abs(ev.p_e0 - 0.2) < 1e-15
    assert abs(ev.p_e1 - 0.8) < 1e-15
    assert abs(ev.p_e0 + ev.p_e1 - 1.0) < 1e-15


@pytest.mark.parametrize("n_ss", [4, 5, 6])
@pytest.mark.parametrize("n_others", [1, 2, 3])
def test_collision_events_match_enumeration(n_ss, n_others):
    ev = collision_event_probs(n_others, n_ss)
    exact_e0, exact_e1 = enumerate_collision_events(n_others, n_ss)
    assert abs(ev.p_e0 - float(exact_e0)) < 1e-12
    assert abs(ev.p_e1 - float(exact_e1)) < 1e-12


@given(st.integers(0, 60), st.sampled_from([4, 5, 8, 32, 64]))
@settings(max_examples=80, deadline=None)
def test_collision_events_form_subprobability(n_others, n_ss):
    ev = collision_event_probs(n_others, n_ss)
    assert 0.0 <= ev.p_e0 <= 1.0
    assert 0.0 <= ev.p_e1 <= 1.0
    assert ev.p_e0 + ev.p_e1 <= 1.0 + 1e-12


def test_collision_events_stable_for_large_counts():
    ev = collision_event_probs(500, 32)
    assert 0.0 <= ev.p_e0 < 1e-20
    assert 0.0 <= ev.p_e0 + ev.p_e1 <= 1.0


def test_asymptotic_sinr_values():
    assert asymptotic_sinr(839, 0) == math.inf
    assert asymptotic_sinr(839, 1) == 209.75
    assert asymptotic_sinr(839, 66) > db_to_linear(5.0)
    assert asymptotic_sinr(839, 67) < db_to_linear(5.0)


def test_k_cap_at_5db():
    assert sinr_limited_k_cap(839, ALPHA_5DB, l=2) == 66
    assert sinr_limited_k_cap(839, ALPHA_5DB, l=1) == 265
    # representable exact tie is admissible
    assert sinr_limited_k_cap(800, 2.0, l=2) == 100
    with pytest.raises(ValueError):
        sinr_limited_k_cap(839, ALPHA_5DB, l=3)


def test_success_probability_trivial_cases():
    assert success_probability_pdra(params(n_active=1)) == 1.0
    assert success_probability_conventional(params(n_active=1)) == 1.0


def test_success_probability_tiny_threshold_single_root():
    # K-cap inactive and K=0 forced: P = P_S * (p_e0 + p_e1) over all others
    p = params(n_active=8, r_roots=1, alpha_th=1e-9)
    ev = collision_event_probs(7, 32)
    expected = p_no_pattern_collision(8, p.n_p) * (ev.p_e0 + ev.p_e1)
    assert abs(success_probability_pdra(p) - expected) < 1e-14


def test_conventional_single_root_is_collision_bound():
    p = params(n_active=12, r_roots=1, alpha_th=1e-9)
    expected = (1.0 - 1.0 / 32.0) ** 11
    assert abs(success_probability_conventional(p) - expected) < 1e-14


def test_success_probability_monotone_in_n_active():
    values = [success_probability_pdra(params(n_active=n)) for n in range(1, 60)]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("r_roots", [1, 2, 3])
@pytest.mark.parametrize("n_active", [2, 5, 10])
def test_log_domain_matches_naive_small(r_roots, n_active):
    for n_ss in (5, 8, 14):
        p = params(n_active=n_active, r_roots=r_roots, n_ss=n_ss)
        got = success_probability_pdra(p)
        want = naive_success_pdra(n_active, r_roots, n_ss, 839, ALPHA_5DB)
        assert got == pytest.approx(want, rel=1e-10)


def test_random_activity_edges():
    assert success_probability_random_activity(0.0, 10000, params()) == 1.0
    assert success_probability_random_activity(0.5, 1, params()) == 1.0


def test_random_activity_matches_full_summation():
    import numpy as np
    from scipy.stats import binom

    p = params()
    got = success_probability_random_activity(0.001, 10000, p, scheme="pdra")
    weights = binom(9999, 0.001).pmf(np.arange(10000))
    oracle = sum(
        float(w) * success_probability_pdra(params(n_active=n + 1))
        for n, w in enumerate(weights)
        if w > 0.0
    )
    assert abs(got - oracle) < 1e-10


def test_figure_orderings_analytic():
    """Pattern pool beats plain shifts; double-size plain pool loses for R > 2."""
    mix = lambda n_ss, scheme, r: success_probability_random_activity(
        0.001, 10000, params(r_roots=r, n_ss=n_ss), scheme=scheme
    )
    for r in (1, 2, 3, 4):
        assert mix(32, "pdra", r) > mix(32, "conventional", r)
    for r in (3, 4):
        assert mix(32, "pdra", r) >= mix(64, "conventional", r)


def test_validation_errors():
    with pytest.raises(ValueError):
        params(n_ss=3)
    with pytest.raises(ValueError):
        params(n_active=0)
    with pytest.raises(ValueError):
        params(alpha_th=0.0)
    with pytest.raises(ValueError):
        collision_event_probs(-1, 32)
    with pytest.raises(ValueError):
        success_probability_random_activity(1.5, 100, params())
    with pytest.raises(ValueError):
        success_probability_random_activity(0.1, 100, params(), scheme="other")
