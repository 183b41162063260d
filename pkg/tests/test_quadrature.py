import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from jdhedge.blackscholes import call_price
from jdhedge.hedging import ell_call_closed
from jdhedge.model import Constant, ModelParams, conditional_moment
from jdhedge.oracle import quad_phi_product
from jdhedge.quadrature import (
    QuadratureError,
    QuadratureSpec,
    conditional_price_times_value,
    conditional_value_bs,
    expect_normal,
    norm_cdf,
    normal_phi_product_expectation,
)

PARAMS = ModelParams(mu=0.15, sigma=0.25, lam=0.3, jump=Constant(0.5))


def drifted_black(s, k, mu, sigma, dt):
    """E[(X - K)^+] for X = s exp((mu - sigma^2/2) dt + sigma W_dt), written out by hand."""
    vol = sigma * math.sqrt(dt)
    d1 = (math.log(s / k) + (mu + 0.5 * sigma**2) * dt) / vol
    return s * math.exp(mu * dt) * norm.cdf(d1) - k * norm.cdf(d1 - vol)


@pytest.mark.parametrize("mean,variance", [(0.0, 1.0), (3.0, 0.01), (-2.0, 4.0)])
def test_expect_normal_basic_moments(mean, variance):
    assert expect_normal(lambda z: np.ones_like(z), mean, variance) == pytest.approx(1.0, abs=1e-14)
    assert expect_normal(lambda z: z, mean, variance) == pytest.approx(mean, abs=1e-12)
    assert expect_normal(lambda z: (z - mean) ** 2, mean, variance) == pytest.approx(variance, rel=1e-12)


def test_expect_normal_lognormal_mean():
    sigma, t = 0.25, 12.0
    got = expect_normal(lambda z: np.exp(sigma * z), 0.0, t)
    assert got == pytest.approx(math.exp(sigma**2 * t / 2), rel=1e-12)


def test_expect_normal_accepts_scalar_only_callables():
    assert expect_normal(lambda z: math.cos(z), 0.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_expect_normal_rejects_bad_inputs():
    with pytest.raises(ValueError):
        expect_normal(lambda z: z, 0.0, 0.0)
    with pytest.raises(QuadratureError):
        expect_normal(lambda z: np.where(z > 0, np.nan, 0.0), 0.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(node_count=4)
    with pytest.raises(ValueError):
        QuadratureSpec(atol=0.0)


def test_norm_cdf_tails():
    x = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(norm_cdf(x), norm.cdf(x), rtol=1e-14)
    assert norm_cdf(-8.0) == pytest.approx(6.22096057427178e-16, rel=1e-12)


def test_conditional_value_bs_simple_functions():
    assert conditional_value_bs(PARAMS, 80.0, 2.0, lambda x: np.full_like(x, 7.5)) == pytest.approx(7.5, rel=1e-14)
    got = conditional_value_bs(PARAMS, 80.0, 2.0, lambda x: x)
    assert got == pytest.approx(80.0 * math.exp(0.15 * 2.0), rel=1e-12)


@pytest.mark.parametrize("s,k,dt", [(100.0, 100.0, 12.0), (100.0, 500.0, 10.0), (120.0, 90.0, 0.5), (50.0, 60.0, 0.05)])
def test_conditional_value_bs_call_payoff(s, k, dt):
    got = conditional_value_bs(PARAMS, s, dt, lambda x: np.maximum(x - k, 0.0), kinks=(k,))
    assert got == pytest.approx(drifted_black(s, k, 0.15, 0.25, dt), rel=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gbm_moment_translation(k):
    got = conditional_value_bs(PARAMS, 90.0, 2.4, lambda x: x**k)
    assert got == pytest.approx(conditional_moment(PARAMS, 90.0, k, 2.4, with_jumps=False), rel=1e-9)


def test_price_times_value_unit_value_is_hat_s():
    got = conditional_price_times_value(PARAMS, 70.0, 90.0, 2.0, lambda x: np.ones_like(x))
    assert got == pytest.approx(conditional_moment(PARAMS, 70.0, 1, 2.0), rel=1e-12)


def test_price_times_value_identity_reduction():
    s_u, s_bs, dt = 70.0, 90.0, 2.0
    got = conditional_price_times_value(PARAMS, s_u, s_bs, dt, lambda x: x)
    eps1 = 0.5
    ref = s_u * s_bs * math.exp((2 * 0.15 + 0.3 * eps1 + 0.25**2) * dt)
    assert got == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("s_bs,k,t_i", [(100.0, 100.0, 0.0), (140.0, 500.0, 4.0), (60.0, 80.0, 8.0)])
def test_price_times_value_with_call_value_matches_closed_form(s_bs, k, t_i):
    t_ip1, T = t_i + 2.0, 12.0
    s_u = 0.8 * s_bs
    quad = conditional_price_times_value(PARAMS, s_u, s_bs, 2.0, lambda x: call_price(x, k, 0.25, T - t_ip1))
    assert quad == pytest.approx(ell_call_closed(PARAMS, s_u, s_bs, k, t_i, t_ip1, T), rel=1e-7)


def test_phi_product_degenerate_slope():
    got = normal_phi_product_expectation(0.7, 0.0, 0.3, 0.2, 1.5)
    assert got == pytest.approx(math.exp(0.7 * 0.2 + 0.49 * 1.5 / 2) * norm.cdf(0.3), rel=1e-14)


def test_phi_product_zero_exponent():
    got = normal_phi_product_expectation(0.0, 1.3, -0.4, 0.0, 2.0)
    assert got == pytest.approx(norm.cdf(-0.4 / math.sqrt(1 + 1.69 * 2.0)), rel=1e-14)


def test_phi_product_unit_case():
    got = normal_phi_product_expectation(1.0, 1.0, 0.0, 0.0, 1.0)
    oracle = expect_normal(lambda z: np.exp(z) * norm_cdf(z), 0.0, 1.0)
    assert got == pytest.approx(oracle, rel=1e-10)
    assert round(got, 3) == 1.253  # exact value 1.253441; the commonly quoted 1.2535 is off in the last digit


def test_phi_product_rejects_bad_variance():
    with pytest.raises(ValueError):
        normal_phi_product_expectation(1.0, 1.0, 0.0, 0.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(-3, 3),
    a=st.floats(-3, 3),
    b=st.floats(-3, 3),
    mean=st.floats(-2, 2),
    variance=st.floats(0.01, 4),
)
def test_phi_product_matches_quadrature(alpha, a, b, mean, variance):
    closed = normal_phi_product_expectation(alpha, a, b, mean, variance)
    gh = expect_normal(lambda z: np.exp(alpha * z) * norm_cdf(a * z + b), mean, variance)
    assert closed == pytest.approx(gh, rel=1e-9)
    assert closed == pytest.approx(quad_phi_product(alpha, a, b, mean, variance), rel=1e-9)


def test_node_doubling_is_stable():
    battery = [
        lambda z: np.exp(0.25 * z),
        lambda z: np.cos(z),
        lambda z: z**4,
        lambda z: norm_cdf(2 * z - 0.3),
    ]
    for f in battery:
        lo = expect_normal(f, 0.1, 2.0, QuadratureSpec(node_count=64))
        hi = expect_normal(f, 0.1, 2.0, QuadratureSpec(node_count=256, max_nodes=1024))
        assert abs(lo - hi) <= 1e-12 + 1e-12 * abs(hi)
