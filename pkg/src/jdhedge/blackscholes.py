"""Zero-rate Black-Scholes values on the shadow gBm price."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureSpec, expect_normal, norm_cdf


@dataclass(frozen=True)
class CallContract:
    strike: float
    maturity: float

    def __post_init__(self):
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise ValueError("strike must be > 0")
        if not (math.isfinite(self.maturity) and self.maturity > 0):
            raise ValueError("maturity must be > 0")

    def payoff(self, x):
        return np.maximum(np.asarray(x, dtype=float) - self.strike, 0.0)


def _d_plus(s, strike, sigma, tau):
    vol = sigma * np.sqrt(tau)
    return (np.log(s / strike) + 0.5 * vol * vol) / vol


def call_price(s, strike: float, sigma: float, tau: float):
    """S Phi(d+) - K Phi(d-); the payoff itself when ``tau == 0``.

    ``s`` may be a numpy array.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0:
        out = np.maximum(np.asarray(s, dtype=float) - strike, 0.0)
    else:
        s = np.asarray(s, dtype=float)
        dp = _d_plus(s, strike, sigma, tau)
        out = s * norm_cdf(dp) - strike * norm_cdf(dp - sigma * math.sqrt(tau))
    return float(out) if np.ndim(out) == 0 else out


def call_delta(s, strike: float, sigma: float, tau: float):
    """Phi(d+), the zero-rate hedge ratio of a call."""
    if not tau > 0:
        raise ValueError("delta needs tau > 0")
    out = norm_cdf(_d_plus(np.asarray(s, dtype=float), strike, sigma, tau))
    return float(out) if np.ndim(out) == 0 else out


def vanilla_price(
    payoff: Callable,
    s: float,
    sigma: float,
    tau: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    kinks=(),
) -> float:
    """Zero-rate risk-neutral value E[payoff(s exp(-sigma^2 tau/2 + sigma sqrt(tau) Z))]."""
    if not tau > 0:
        raise ValueError("tau must be > 0")
    vol = sigma * math.sqrt(tau)
    breaks = [(math.log(k / s) + 0.5 * vol * vol) / vol for k in kinks if k > 0]
    return expect_normal(lambda z: payoff(s * np.exp(-0.5 * vol * vol + vol * z)), 0.0, 1.0, spec, breaks)


def vanilla_delta(payoff: Callable, s: float, sigma: float, tau: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    # pathwise derivative would need payoff'; a central difference is enough for a starting hedge
    h = 1e-4 * s
    return (vanilla_price(payoff, s + h, sigma, tau, spec) - vanilla_price(payoff, s - h, sigma, tau, spec)) / (2 * h)
