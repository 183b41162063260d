"""Brute-force counterparts of the closed forms.

The samplers draw the Gaussian increment, the Poisson count and the jump marks
directly; nothing here reuses the path construction in :mod:`jdhedge.model`.
Sums are accumulated chunk by chunk in seed order, so an estimate does not
depend on how many workers produced the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .model import Constant, Discrete, ModelParams

CHUNK = 250_000


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not self.std_error >= 0:
            raise ValueError("std_error must be >= 0")

    def within(self, value: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_se * self.std_error


def _jump_factor(params: ModelParams, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """prod_{k <= count} (1 + xi_k) for each sample."""
    law = params.jump
    if isinstance(law, Constant):
        return (1.0 + law.c) ** counts
    if isinstance(law, Discrete):
        total = int(counts.sum())
        marks = rng.choice(np.asarray(law.values), size=total, p=np.asarray(law.probs))
        owner = np.repeat(np.arange(counts.size), counts)
        logs = np.zeros(counts.size)
        np.add.at(logs, owner, np.log1p(marks))
        return np.exp(logs)
    raise TypeError(f"unsupported jump law {law!r}")


def _draw(params: ModelParams, dt: float, size: int, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    z = rng.standard_normal(size)
    counts = rng.poisson(params.lam * dt, size) if params.lam > 0 else np.zeros(size, dtype=np.int64)
    growth = np.exp((params.mu - 0.5 * params.sigma**2) * dt + params.sigma * math.sqrt(dt) * z)
    return growth, _jump_factor(params, counts, rng)


def _estimate(sample_chunk: Callable[[int, np.random.SeedSequence], np.ndarray], n: int, seed: int, workers: int):
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def stats(job):
        size, seq = job
        x = sample_chunk(size, seq)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError("non-finite Monte Carlo sample")
        m = float(np.mean(x))
        return size, m, float(np.sum((x - m) ** 2))

    jobs = list(zip(sizes, seqs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(stats, jobs))
    else:
        parts = [stats(j) for j in jobs]
    # pairwise (Chan et al.) merge in chunk order
    count, mean, m2 = 0, 0.0, 0.0
    for size, m, s2 in parts:
        delta = m - mean
        total = count + size
        mean += delta * size / total
        m2 += s2 + delta * delta * count * size / total
        count = total
    var = m2 / (count - 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / count), n_samples=count, seed=seed)


def mc_conditional_moment(
    params: ModelParams, s_u: float, k: int, dt: float, n: int = 1_000_000, seed: int = 0, workers: int = 1
) -> McEstimate:
    """Monte Carlo estimate of E[S_{u+dt}^k | S_u = s_u]."""
    if n < 1000:
        raise ValueError("n must be >= 1000")
    if not dt > 0:
        raise ValueError("dt must be > 0")

    def chunk(size, seq):
        growth, jumps = _draw(params, dt, size, seq)
        return (s_u * growth * jumps) ** k

    return _estimate(chunk, n, seed, workers)


def mc_price_times_value(
    params: ModelParams,
    s_u: float,
    s_bs_u: float,
    dt: float,
    value_fn: Callable,
    n: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of E[S_{u+dt} * value_fn(S^BS_{u+dt}) | F_u]."""
    if n < 1000:
        raise ValueError("n must be >= 1000")

    def chunk(size, seq):
        growth, jumps = _draw(params, dt, size, seq)
        return s_u * growth * jumps * np.asarray(value_fn(s_bs_u * growth), dtype=float)

    return _estimate(chunk, n, seed, workers)


def mc_value_bs(
    params: ModelParams, s_bs_u: float, dt: float, value_fn: Callable, n: int = 1_000_000, seed: int = 0
) -> McEstimate:
    """Monte Carlo estimate of E[value_fn(S^BS_{u+dt}) | F_u]."""

    def chunk(size, seq):
        growth, _ = _draw(params, dt, size, seq)
        return np.asarray(value_fn(s_bs_u * growth), dtype=float)

    return _estimate(chunk, n, seed, 1)


def grid_minimize(a: float, b: float, c: float, x0: float, half_range: float, step: float) -> tuple[float, float]:
    """Exhaustive scan of ``a (x-x0)^2 + b |x-x0| + c`` on a uniform grid around ``x0``."""
    if not (a > 0 and step > 0):
        raise ValueError("need a > 0 and step > 0")
    m = int(math.ceil(half_range / step))
    d = np.arange(-m, m + 1) * step
    f = a * d * d + b * np.abs(d) + c
    k = int(np.argmin(f))
    return float(x0 + d[k]), float(f[k])


def quad_phi_product(alpha: float, a: float, b: float, mean: float, variance: float) -> float:
    """Adaptive quadrature of E[exp(alpha Z) Phi(a Z + b)], Z ~ N(mean, variance)."""
    sd = math.sqrt(variance)
    centre = mean + alpha * variance  # peak of exp(alpha z) * density

    def integrand(z):
        return math.exp(alpha * z - 0.5 * ((z - mean) / sd) ** 2) * special.ndtr(a * z + b) / (sd * math.sqrt(2 * math.pi))

    lo, hi = centre - 40 * sd, centre + 40 * sd
    value, _ = integrate.quad(integrand, lo, hi, points=[centre], epsabs=0.0, epsrel=1e-13, limit=400)
    return value
