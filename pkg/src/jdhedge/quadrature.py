"""Normal-density expectations and the Gaussian-Phi integral identity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .model import ModelParams


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be evaluated to the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite rule settings.

    The fixed rule is doubled until two successive estimates agree to
    ``atol + rtol * |value|``; past ``max_nodes`` it falls back to adaptive
    Gauss-Kronrod on the standardised variable.
    """

    node_count: int = 128
    scheme: str = "gauss-hermite"
    atol: float = 1e-12
    rtol: float = 1e-12
    max_nodes: int = 512

    def __post_init__(self):
        if self.node_count < 8:
            raise ValueError("node_count must be >= 8")
        if not (self.atol > 0 and self.rtol >= 0):
            raise ValueError("tolerance must be > 0")
        if self.scheme != "gauss-hermite":
            raise ValueError(f"unknown scheme {self.scheme!r}")


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=None)
def _hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # scipy switches to an asymptotic method past 150 nodes; numpy's hermgauss overflows there
    x, w = special.roots_hermite(n)
    return x, w / math.sqrt(math.pi)


def norm_cdf(x):
    """Standard normal CDF via erfc (accurate in both tails)."""
    return special.ndtr(x)


def _eval(f: Callable, z: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(z), dtype=float)
        if vals.shape != z.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([float(f(float(zi))) for zi in z])
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand returned non-finite values")
    return vals


def _gauss_hermite(f: Callable, mean: float, sd: float, n: int) -> float:
    x, w = _hermite_rule(n)
    return float(np.dot(w, _eval(f, mean + math.sqrt(2.0) * sd * x)))


def _kronrod(f: Callable, mean: float, sd: float, tol: float, breakpoints=()) -> float:
    def g(u):
        return float(_eval(f, np.array([mean + sd * u]))[0]) * math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)

    pts = sorted({(b - mean) / sd for b in breakpoints if abs(b - mean) < 38 * sd})
    value, err = integrate.quad(g, -38.0, 38.0, points=pts or None, epsabs=tol, epsrel=1e-13, limit=500)
    if not math.isfinite(value):
        raise QuadratureError("adaptive fallback produced a non-finite value")
    return value


def expect_normal(
    f: Callable,
    mean: float = 0.0,
    variance: float = 1.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints=(),
) -> float:
    """E[f(Z)] for Z ~ N(mean, variance).

    ``f`` should accept a numpy array (it is called point-wise otherwise).
    ``breakpoints`` lists kinks of ``f``; they are only used by the adaptive
    fallback.
    """
    if not variance > 0:
        raise ValueError("variance must be > 0")
    sd = math.sqrt(variance)
    n = spec.node_count
    prev = _gauss_hermite(f, mean, sd, n)
    while 2 * n <= spec.max_nodes:
        n *= 2
        cur = _gauss_hermite(f, mean, sd, n)
        if abs(cur - prev) <= spec.atol + spec.rtol * abs(cur):
            return cur
        prev = cur
    return _kronrod(f, mean, sd, spec.atol, breakpoints)


def _bs_terminal(params: ModelParams, s_bs_u: float, dt: float, z):
    return s_bs_u * np.exp((params.mu - 0.5 * params.sigma**2) * dt + params.sigma * z)


def _price_breakpoints(params: ModelParams, s_bs_u: float, dt: float, kinks) -> list[float]:
    # map price-space kinks to the Brownian increment z
    drift = (params.mu - 0.5 * params.sigma**2) * dt
    return [(math.log(k / s_bs_u) - drift) / params.sigma for k in kinks if k > 0]


def conditional_value_bs(
    params: ModelParams,
    s_bs_u: float,
    dt: float,
    value_fn: Callable,
    spec: QuadratureSpec = DEFAULT_SPEC,
    kinks=(),
) -> float:
    """E[value_fn(S^BS_{u+dt}) | F_u] under the physical drift ``mu``."""
    if not s_bs_u > 0:
        raise ValueError("s_bs_u must be > 0")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    return expect_normal(
        lambda z: value_fn(_bs_terminal(params, s_bs_u, dt, z)),
        0.0,
        dt,
        spec,
        _price_breakpoints(params, s_bs_u, dt, kinks),
    )


def conditional_price_times_value(
    params: ModelParams,
    s_u: float,
    s_bs_u: float,
    dt: float,
    value_fn: Callable,
    spec: QuadratureSpec = DEFAULT_SPEC,
    kinks=(),
) -> float:
    """E[S_{u+dt} * value_fn(S^BS_{u+dt}) | F_u].

    The jump factor is independent of the Brownian increment, so it only
    contributes its mean ``exp(lambda * eps_1 * dt)``.
    """
    if not (s_u > 0 and s_bs_u > 0):
        raise ValueError("prices must be > 0")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    sigma = params.sigma
    pref = s_u * math.exp((params.mu + params.lam * params.jump.moment(1) - 0.5 * sigma**2) * dt)
    inner = expect_normal(
        lambda z: np.exp(sigma * z) * value_fn(_bs_terminal(params, s_bs_u, dt, z)),
        0.0,
        dt,
        spec,
        _price_breakpoints(params, s_bs_u, dt, kinks),
    )
    return pref * inner


def normal_phi_product_expectation(alpha: float, a: float, b: float, mean: float, variance: float) -> float:
    """Closed form of E[exp(alpha Z) Phi(a Z + b)] for Z ~ N(mean, variance)."""
    for name, v in (("alpha", alpha), ("a", a), ("b", b), ("mean", mean), ("variance", variance)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite")
    if not variance > 0:
        raise ValueError("variance must be > 0")
    arg = (a * (mean + alpha * variance) + b) / math.sqrt(1.0 + a * a * variance)
    return math.exp(alpha * mean + 0.5 * alpha * alpha * variance) * float(norm_cdf(arg))
