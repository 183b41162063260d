"""Jump-diffusion model: parameters, jump laws, exact path simulation, conditional moments.

Time is measured in months throughout; mu, sigma and lambda are per month
(sigma per square-root month). The riskless rate is fixed at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Constant:
    """Degenerate jump law: every relative jump equals ``c``."""

    c: float

    def __post_init__(self):
        _check_finite(c=self.c)
        if self.c <= -1.0:
            raise ValueError(f"jump size must be > -1, got {self.c}")

    def moment(self, j: int) -> float:
        if j < 1:
            raise ValueError("moment order must be >= 1")
        return self.c**j

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.c, dtype=float)


@dataclass(frozen=True)
class Discrete:
    """Finitely supported jump law with ``values[i]`` drawn w.p. ``probs[i]``."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.values) == 0 or len(self.values) != len(self.probs):
            raise ValueError("values and probs must be non-empty and of equal length")
        _check_finite(**{f"values[{i}]": v for i, v in enumerate(self.values)})
        if min(self.values) <= -1.0:
            raise ValueError("every jump size must be > -1")
        if min(self.probs) < 0.0:
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    def moment(self, j: int) -> float:
        if j < 1:
            raise ValueError("moment order must be >= 1")
        return math.fsum(p * v**j for v, p in zip(self.values, self.probs))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(len(self.values), size=size, p=np.asarray(self.probs))
        return np.asarray(self.values, dtype=float)[idx]


JumpLaw = Union[Constant, Discrete]


def jump_moment(law: JumpLaw, j: int) -> float:
    """E[xi^j] for the given jump law."""
    return law.moment(j)


@dataclass(frozen=True)
class ModelParams:
    mu: float
    sigma: float
    lam: float
    jump: JumpLaw
    s0: float = 100.0

    def __post_init__(self):
        _check_finite(mu=self.mu, sigma=self.sigma, lam=self.lam, s0=self.s0)
        if self.sigma <= 0.0:
            raise ValueError("sigma must be > 0")
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")
        if self.s0 <= 0.0:
            raise ValueError("s0 must be > 0")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class RebalanceGrid:
    """Trading dates ``0 = t_0 < ... < t_N = T``."""

    times: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if len(times) < 2:
            raise ValueError("grid needs at least two dates")
        if times[0] != 0.0:
            raise ValueError("grid must start at 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("grid dates must be strictly increasing")
        _check_finite(T=times[-1])

    @classmethod
    def uniform(cls, horizon: float, n_intervals: int) -> "RebalanceGrid":
        if n_intervals < 1:
            raise ValueError("n_intervals must be >= 1")
        if not horizon > 0:
            raise ValueError("horizon must be > 0")
        return cls(tuple(horizon * k / n_intervals for k in range(n_intervals + 1)))

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1

    @property
    def horizon(self) -> float:
        return self.times[-1]

    def dt(self, i: int) -> float:
        """Length of ``[t_i, t_{i+1}]``."""
        return self.times[i + 1] - self.times[i]


@dataclass(frozen=True, eq=False)
class SamplePath:
    """One coupled realisation of (W, N, S, S^BS) on a fine grid.

    ``rebalance_idx[i]`` is the fine-grid index of rebalance date ``t_i``.
    ``n_count`` is the cumulative Poisson count ``N_t`` at each grid point.
    """

    t: np.ndarray
    w: np.ndarray
    n_count: np.ndarray
    s: np.ndarray
    s_bs: np.ndarray
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    rebalance_idx: np.ndarray
    seed: int
    params: ModelParams = field(repr=False)

    @property
    def jump_events(self) -> list[tuple[float, float]]:
        return list(zip(self.jump_times.tolist(), self.jump_sizes.tolist()))

    def at_rebalance(self, i: int) -> tuple[float, float]:
        """(S, S^BS) at rebalance date ``t_i``."""
        k = int(self.rebalance_idx[i])
        return float(self.s[k]), float(self.s_bs[k])

    def jumps_in(self, t_lo: float, t_hi: float) -> int:
        """Number of jumps with ``t_lo < time < t_hi``."""
        return int(np.count_nonzero((self.jump_times > t_lo) & (self.jump_times < t_hi)))

    def identical_to(self, other: "SamplePath") -> bool:
        names = ("t", "w", "n_count", "s", "s_bs", "jump_times", "jump_sizes", "rebalance_idx")
        return self.seed == other.seed and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in names
        )


def _fine_grid(grid: RebalanceGrid, refinement: int) -> tuple[np.ndarray, np.ndarray]:
    pieces = []
    for i in range(grid.n_intervals):
        a, b = grid.times[i], grid.times[i + 1]
        pieces.append(a + (b - a) * np.arange(refinement) / refinement)
    pieces.append(np.array([grid.horizon]))
    t = np.concatenate(pieces)
    return t, np.arange(grid.n_intervals + 1) * refinement


def simulate_path(params: ModelParams, grid: RebalanceGrid, refinement: int = 20, seed: int = 0) -> SamplePath:
    """Exact simulation of the jump-diffusion and its jump-free shadow.

    Brownian increments are Gaussian per sub-step, jump counts are Poisson per
    sub-step and every jump time is placed strictly inside its sub-step, so no
    grid point (in particular no rebalance date) carries a jump.
    """
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    t, rebalance_idx = _fine_grid(grid, refinement)
    h = np.diff(t)

    w_rng, n_rng, mark_rng, place_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4)
    )
    dw = w_rng.standard_normal(h.size) * np.sqrt(h)
    w = np.concatenate(([0.0], np.cumsum(dw)))

    counts = n_rng.poisson(params.lam * h) if params.lam > 0 else np.zeros(h.size, dtype=np.int64)
    total = int(counts.sum())
    marks = params.jump.sample(mark_rng, total)
    step_of_jump = np.repeat(np.arange(h.size), counts)
    u = place_rng.random(total)
    u = np.where(u == 0.0, 0.5, u)  # keep placements strictly interior
    jump_times = t[step_of_jump] + u * h[step_of_jump]
    order = np.argsort(jump_times, kind="stable")
    jump_times, marks, step_of_jump = jump_times[order], marks[order], step_of_jump[order]

    log_factor = np.zeros(h.size)
    np.add.at(log_factor, step_of_jump, np.log1p(marks))
    jump_product = np.exp(np.concatenate(([0.0], np.cumsum(log_factor))))
    n_count = np.concatenate(([0], np.cumsum(counts)))

    s_bs = params.s0 * np.exp((params.mu - 0.5 * params.sigma**2) * t + params.sigma * w)
    s = s_bs * jump_product if total else s_bs.copy()
    return SamplePath(
        t=t,
        w=w,
        n_count=n_count,
        s=s,
        s_bs=s_bs,
        jump_times=jump_times,
        jump_sizes=marks,
        rebalance_idx=rebalance_idx,
        seed=seed,
        params=params,
    )


def moment_exponent(params: ModelParams, k: int, with_jumps: bool = True) -> float:
    """Growth rate of the k-th conditional moment per unit time."""
    rate = k * params.mu + 0.5 * k * (k - 1) * params.sigma**2
    if with_jumps:
        rate += params.lam * math.fsum(math.comb(k, j) * params.jump.moment(j) for j in range(1, k + 1))
    return rate


def conditional_moment(
    params: ModelParams, s_u: float, k: int, dt: float, with_jumps: bool = True
) -> float:
    """E[S_{u+dt}^k | F_u] (or the shadow gBm moment when ``with_jumps`` is False)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not s_u > 0:
        raise ValueError("s_u must be > 0")
    if not dt >= 0:
        raise ValueError("dt must be >= 0")
    if dt == 0:
        return s_u**k
    return s_u**k * math.exp(moment_exponent(params, k, with_jumps) * dt)
