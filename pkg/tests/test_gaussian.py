import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from careercutoff.gaussian import (
    Ability,
    PublicEvent,
    event_likelihood,
    event_probability,
    norm_cdf,
    posterior_after,
    posteriors_of_cutoff,
    signal_cdf,
    signal_density,
    signal_quantile_upper,
    signal_survival,
    success_prob,
    success_prob_partial,
    success_prob_slope,
)
from careercutoff.model import Primitives

# frozen from tests/oracles.py (scipy quad) at reference defaults
CDF_03_04 = 0.4386053766512701
POST_C1_R05 = {
    PublicEvent.RISKY_SUCCESS: 0.5803476683055901,
    PublicEvent.RISKY_FAILURE: 0.29631186802034215,
    PublicEvent.SAFE: 0.48071786429153096,
    PublicEvent.RISKY_UNIMPLEMENTED: 0.535151618640203,
}
P_12_03 = 0.7027927223127446


@st.composite
def primitives_st(draw):
    mu0 = draw(st.floats(-2, 2))
    sigma_l = draw(st.floats(0.5, 2.0))
    return Primitives(
        pi=draw(st.floats(0.05, 0.95)),
        mu0=mu0,
        mu1=mu0 + draw(st.floats(0.3, 2.0)),
        sigma_l=sigma_l,
        sigma_h=sigma_l * draw(st.floats(0.2, 1.0)),
        theta=draw(st.floats(0.3, 3.0)),
    )


def test_norm_cdf_against_mpmath():
    assert norm_cdf(1.0) == pytest.approx(float(mpmath.ncdf(1)), abs=1e-15)
    assert norm_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-15)
    assert norm_cdf(-8.0) == pytest.approx(float(mpmath.ncdf(-8)), rel=1e-12)


def test_frozen_oracle_values(ref):
    assert signal_cdf(0.3, 0.4, ref) == pytest.approx(CDF_03_04, abs=1e-12)
    for ev, v in POST_C1_R05.items():
        assert posterior_after(ev, 1.0, 0.5, ref) == pytest.approx(v, abs=1e-12)
    assert success_prob(1.2, 0.3, ref) == pytest.approx(P_12_03, abs=1e-12)


def test_midpoint_symmetry(ref):
    for rho in (0.1, 0.5, 0.9):
        assert success_prob(ref.midpoint, rho, ref) == pytest.approx(0.5, abs=1e-15)
        assert signal_cdf(ref.midpoint, rho, ref) == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(p=primitives_st(), rho=st.floats(0.02, 0.98), c=st.floats(-4, 4))
def test_events_sum_to_one_and_martingale(p, rho, c):
    for a in Ability:
        assert sum(event_likelihood(e, c, rho, a, p) for e in PublicEvent) == pytest.approx(1.0, abs=1e-12)
    mart = sum(event_probability(e, c, rho, p) * posterior_after(e, c, rho, p) for e in PublicEvent)
    assert mart == pytest.approx(rho, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(p=primitives_st(), rho=st.floats(0.02, 0.98), c=st.floats(-3, 3))
def test_success_beats_prior_beats_failure(p, rho, c):
    post = posteriors_of_cutoff(c, rho, p)
    # the gaps to rho can fall below double resolution deep in a tail,
    # the success/failure spread cannot
    assert post.r_success >= rho >= post.r_failure
    if p.sigma_h < p.sigma_l:
        assert post.r_success > post.r_failure
    assert 0.0 <= post.r_safe <= 1.0


@settings(max_examples=40, deadline=None)
@given(p=primitives_st(), rho=st.floats(0.01, 0.99))
def test_success_prob_increasing(p, rho):
    xs = np.linspace(p.midpoint - 6 * p.sigma_l, p.midpoint + 6 * p.sigma_l, 301)
    q = success_prob(xs, rho, p)
    assert np.all(np.diff(q) >= 0)
    assert np.all(success_prob_slope(xs, rho, p) >= 0)


def test_slope_and_partials_match_finite_differences(ref):
    p = ref.replace(pi=0.4, theta=1.3)
    for x in (-0.7, 0.5, 1.9):
        for rho in (0.2, 0.7):
            h = 1e-6
            fd = (success_prob(x + h, rho, p) - success_prob(x - h, rho, p)) / (2 * h)
            assert success_prob_slope(x, rho, p) == pytest.approx(fd, rel=1e-6, abs=1e-10)
            fd = (success_prob(x, rho + h, p) - success_prob(x, rho - h, p)) / (2 * h)
            assert success_prob_partial(x, rho, p, "rho") == pytest.approx(fd, rel=1e-6, abs=1e-10)
            for name in ("pi", "theta"):
                v = getattr(p, name)
                up = success_prob(x, rho, p.replace(**{name: v + h}))
                dn = success_prob(x, rho, p.replace(**{name: v - h}))
                assert success_prob_partial(x, rho, p, name) == pytest.approx((up - dn) / (2 * h), rel=1e-6, abs=1e-10)


def test_against_quadrature_oracle(ref):
    p = ref.replace(pi=0.35, theta=0.8, sigma_h=0.6)
    for c in (-1.5, 0.2, 2.7):
        assert signal_cdf(c, 0.3, p) == pytest.approx(oracles.cdf_quad(c, 0.3, p), abs=1e-10)
        for ev in PublicEvent:
            for a, high in ((Ability.H, True), (Ability.L, False)):
                assert event_likelihood(ev, c, 0.3, a, p) == pytest.approx(
                    oracles.event_lik_quad(ev.value, c, 0.3, p, high), abs=1e-10)
            assert posterior_after(ev, c, 0.3, p) == pytest.approx(oracles.posterior_quad(ev.value, c, 0.3, p), abs=1e-10)


def test_density_integrates_to_cdf_difference(ref):
    from scipy.integrate import quad

    val, _ = quad(lambda x: signal_density(x, 0.6, ref), -0.4, 1.3)
    assert val == pytest.approx(signal_cdf(1.3, 0.6, ref) - signal_cdf(-0.4, 0.6, ref), abs=1e-12)


def test_survival_precision_in_far_tail(ref):
    # 1 - cdf would round to 0 here
    s = signal_survival(12.0, 0.5, ref)
    assert 0.0 < s < 1e-20
    assert signal_cdf(12.0, 0.5, ref) == 1.0


def test_quantile_roundtrip(ref):
    for e in (0.001, 0.2, 0.5, 0.93):
        c = signal_quantile_upper(e, 0.4, ref)
        assert signal_survival(c, 0.4, ref) == pytest.approx(e, abs=1e-10)
    assert signal_quantile_upper(0.0, 0.4, ref) == math.inf
    assert signal_quantile_upper(1.0, 0.4, ref) == -math.inf


def test_sentinel_posteriors_are_limits(ref):
    # always-safe: risky events are off path; take the limit as c grows
    far = posteriors_of_cutoff(30.0, 0.4, ref)
    inf = posteriors_of_cutoff(math.inf, 0.4, ref)
    assert inf.r_success == pytest.approx(far.r_success, abs=1e-6)
    assert inf.r_failure == pytest.approx(far.r_failure, abs=1e-6)
    assert inf.r_safe == pytest.approx(0.4, abs=1e-15)
    low = posteriors_of_cutoff(-math.inf, 0.4, ref)
    assert low.r_safe == pytest.approx(posteriors_of_cutoff(-30.0, 0.4, ref).r_safe, abs=1e-6)


def test_equal_noise_flat_posteriors(ref):
    p = ref.replace(sigma_h=1.0)
    post = posteriors_of_cutoff(0.8, 0.35, p)
    for ev in PublicEvent:
        assert post.of(ev) == pytest.approx(0.35, abs=1e-15)
