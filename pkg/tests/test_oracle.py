import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jdhedge.blackscholes import call_price
from jdhedge.hedging import ell_call_closed, piecewise_quadratic_min
from jdhedge.model import Constant, Discrete, ModelParams, conditional_moment
from jdhedge.oracle import McEstimate, grid_minimize, mc_conditional_moment, mc_price_times_value, mc_value_bs

NEG = ModelParams(mu=0.15, sigma=0.25, lam=0.3, jump=Constant(-0.5))
POS = NEG.replace(jump=Constant(0.5))


def test_estimate_invariants():
    with pytest.raises(ValueError):
        McEstimate(1.0, 0.1, 1, 0)
    with pytest.raises(ValueError):
        McEstimate(1.0, -0.1, 10, 0)
    est = McEstimate(1.0, 0.1, 10, 0)
    assert est.within(1.29) and not est.within(1.31)


def test_degenerate_randomness():
    params = ModelParams(mu=0.15, sigma=1e-12, lam=0.0, jump=Constant(0.0))
    for k in (1, 2):
        est = mc_conditional_moment(params, 80.0, k, 2.0, n=10_000, seed=1)
        assert est.mean == pytest.approx(80.0**k * math.exp(k * 0.15 * 2.0), rel=1e-9)
        assert est.std_error <= 1e-9 * est.mean


def test_second_moment_negative_jumps():
    est = mc_conditional_moment(NEG, 100.0, 2, 2.0, n=1_000_000, seed=11)
    assert est.within(conditional_moment(NEG, 100.0, 2, 2.0), 3)


def test_discrete_law_moment():
    params = NEG.replace(jump=Discrete((-0.2, 0.4), (0.5, 0.5)), lam=1.0)
    est = mc_conditional_moment(params, 50.0, 3, 1.0, n=500_000, seed=12)
    assert est.within(conditional_moment(params, 50.0, 3, 1.0), 3)


def test_determinism_and_worker_independence():
    a = mc_conditional_moment(POS, 100.0, 1, 1.0, n=600_000, seed=5)
    b = mc_conditional_moment(POS, 100.0, 1, 1.0, n=600_000, seed=5)
    c = mc_conditional_moment(POS, 100.0, 1, 1.0, n=600_000, seed=5, workers=3)
    assert a == b == c
    assert mc_conditional_moment(POS, 100.0, 1, 1.0, n=600_000, seed=6) != a


def test_input_checks():
    with pytest.raises(ValueError):
        mc_conditional_moment(POS, 100.0, 1, 1.0, n=10)
    with pytest.raises(ValueError):
        mc_conditional_moment(POS, 100.0, 1, 0.0)
    with pytest.raises(FloatingPointError):
        mc_price_times_value(POS, 100.0, 100.0, 1.0, lambda x: np.full_like(x, np.inf), n=1000)


def test_standard_error_scales_with_root_n():
    small = mc_conditional_moment(POS, 100.0, 2, 2.4, n=250_000, seed=21)
    large = mc_conditional_moment(POS, 100.0, 2, 2.4, n=1_000_000, seed=22)
    assert large.std_error / small.std_error == pytest.approx(0.5, rel=0.1)


def test_price_times_unit_value_is_hat_s():
    est = mc_price_times_value(POS, 90.0, 110.0, 2.0, lambda x: np.ones_like(x), n=1_000_000, seed=31)
    assert est.within(conditional_moment(POS, 90.0, 1, 2.0), 3)


@pytest.mark.parametrize("s_bs", [60.0, 100.0, 180.0])
def test_price_times_call_value_matches_closed_form(s_bs):
    t_i, t_ip1, T, k = 4.0, 6.0, 12.0, 110.0
    est = mc_price_times_value(
        NEG, 0.9 * s_bs, s_bs, t_ip1 - t_i, lambda x: call_price(x, k, 0.25, T - t_ip1), n=1_000_000, seed=40
    )
    assert est.within(ell_call_closed(NEG, 0.9 * s_bs, s_bs, k, t_i, t_ip1, T), 3)


def test_price_times_identity_without_jumps():
    params = POS.replace(lam=0.0)
    est = mc_price_times_value(params, 90.0, 110.0, 2.0, lambda x: x, n=1_000_000, seed=50)
    assert est.within(90.0 * 110.0 * math.exp((2 * 0.15 + 0.25**2) * 2.0), 3)


def test_value_bs_estimator():
    est = mc_value_bs(POS, 100.0, 2.0, lambda x: x, n=500_000, seed=60)
    assert est.within(100.0 * math.exp(0.15 * 2.0), 3)


def test_grid_minimize_examples():
    step = 1e-4
    x, v = grid_minimize(1.0, 1.0, 2.0, 0.0, 2.0, step)
    assert abs(x) <= step and abs(v - 2.0) <= step**2 + step
    x, v = grid_minimize(1.0, -2.0, 5.0, 0.0, 3.0, step)
    assert min(abs(x - 1.0), abs(x + 1.0)) <= step and v == pytest.approx(4.0, abs=1e-7)
    x, _ = grid_minimize(2.0, 0.0, 0.0, 3.0, 2.0, step)
    assert x == pytest.approx(3.0, abs=step)
    with pytest.raises(ValueError):
        grid_minimize(0.0, 1.0, 0.0, 0.0, 1.0, step)


@settings(max_examples=100, deadline=None)
@given(
    a=st.floats(0.1, 10.0),
    b=st.floats(-10.0, 10.0),
    c=st.floats(-10.0, 10.0),
    x0=st.floats(-5.0, 5.0),
)
def test_grid_search_agrees_with_closed_form(a, b, c, x0):
    step = 1e-3
    xs, value = piecewise_quadratic_min(a, b, c, x0)
    x, v = grid_minimize(a, b, c, x0, abs(b) / (2 * a) + 1.0, step)
    assert min(abs(x - m) for m in xs) <= step + 1e-9
    assert v >= value - 1e-9 and v - value <= a * step**2 + abs(b) * step + 1e-9
