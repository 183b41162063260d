"""Discrete hedging of the Black-Scholes strategy under proportional costs.

Two rules are implemented:

* CMH (conditional mean hedging) matches E[V^N_{t_{i+1}} | F_{t_i}] with the
  conditional mean of the Black-Scholes value.
* CLH (conditional least-square hedging) minimises
  E[(V^N_{t_{i+1}} - V^pi_{t_{i+1}})^2 | F_{t_i}].

A decision taken at ``t_i`` fixes the holding on ``[t_{i+1}, t_{i+2})``; its
cost ``kappa * S_{t_{i+1}} * |dpi|`` is paid at ``t_{i+1}``. The value function
at ``t_{i+1}`` must be non-degenerate, so decisions stop at ``t_{N-2}`` and the
last interval is held to maturity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .blackscholes import CallContract, call_delta, call_price, vanilla_delta, vanilla_price
from .model import ModelParams, RebalanceGrid, SamplePath, conditional_moment
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    conditional_price_times_value,
    conditional_value_bs,
    norm_cdf,
)


class Method(str, enum.Enum):
    CMH = "cmh"
    CLH = "clh"


class Position(str, enum.Enum):
    LONG = "long"
    SHORT = "short"


class InfeasiblePolicy(str, enum.Enum):
    REPORT = "report"
    FALLBACK = "fallback"


class InfeasibleCMHError(RuntimeError):
    """A CMH step has no solution (theta_N < theta_pi)."""


@dataclass(frozen=True)
class GenericPayoff:
    """European payoff ``fn(S_T)``; ``kinks`` are the non-smooth points of ``fn``."""

    fn: Callable
    maturity: float
    kinks: tuple[float, ...] = ()

    def payoff(self, x):
        return self.fn(np.asarray(x, dtype=float))


Payoff = Union[CallContract, GenericPayoff]


@dataclass(frozen=True)
class HedgeConfig:
    kappa: float
    method: Method = Method.CLH
    payoff: Payoff = field(default_factory=lambda: CallContract(100.0, 12.0))
    infeasible: InfeasiblePolicy = InfeasiblePolicy.REPORT
    quadrature: QuadratureSpec = DEFAULT_SPEC

    def __post_init__(self):
        _check_kappa(self.kappa)
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "infeasible", InfeasiblePolicy(self.infeasible))


def _check_kappa(kappa: float) -> None:
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0,1)")


@dataclass(frozen=True)
class PortfolioState:
    v: float
    pi: float
    index: int

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.pi)):
            raise ValueError("portfolio state must be finite")
        if self.index < 0:
            raise ValueError("index must be >= 0")


@dataclass(frozen=True)
class StepDiagnostics:
    hat_s: float
    hat_s2: float
    hat_v: float
    hat_sv: float
    theta_n: float
    theta_pi: float
    ell_n: float
    ell_pi: float
    u: float


# Decisions ------------------------------------------------------------------


@dataclass(frozen=True)
class NoTrade:
    kind = "no-trade"

    def new_pi(self, pi: float) -> float:
        return pi


@dataclass(frozen=True)
class Long:
    delta_pi: float
    kind = "long"

    def new_pi(self, pi: float) -> float:
        return pi + self.delta_pi


@dataclass(frozen=True)
class Short:
    delta_pi: float
    kind = "short"

    def new_pi(self, pi: float) -> float:
        return pi - self.delta_pi


@dataclass(frozen=True)
class InfeasibleCMH:
    deficit: float
    kind = "infeasible"

    def new_pi(self, pi: float) -> float:
        raise InfeasibleCMHError(f"CMH step infeasible, deficit {self.deficit!r}")


HedgeDecision = Union[NoTrade, Long, Short, InfeasibleCMH]


# Closed forms ---------------------------------------------------------------


def piecewise_quadratic_min(a: float, b: float, c: float, x0: float) -> tuple[tuple[float, ...], float]:
    """Minimise ``a (x-x0)^2 + b |x-x0| + c`` with ``a > 0``.

    For ``b < 0`` the two minimisers are ``x0 -+ b/(2a)`` and the minimum is
    ``c - b^2/(4a)``. (The value is sometimes quoted as 0; that only holds when
    ``c = b^2/(4a)``.)
    """
    if not a > 0:
        raise ValueError("a must be > 0")
    if b >= 0:
        return (x0,), c
    half = -b / (2.0 * a)
    return (x0 + half, x0 - half), c - b * b / (4.0 * a)


def _call_terms(params: ModelParams, s_bs_ti: float, strike: float, t_i: float, t_ip1: float, T: float):
    if not 0 <= t_i < t_ip1 < T:
        raise ValueError("need 0 <= t_i < t_ip1 < T")
    if not (s_bs_ti > 0 and strike > 0):
        raise ValueError("prices must be > 0")
    sigma = params.sigma
    dt = t_ip1 - t_i
    tau = T - t_ip1
    a = sigma * dt / math.sqrt(tau)
    c = math.sqrt(dt / tau)
    b_plus = (math.log(s_bs_ti / strike) + (params.mu - 0.5 * sigma**2) * dt + 0.5 * sigma**2 * tau) / (
        sigma * math.sqrt(tau)
    )
    b_minus = b_plus - sigma * math.sqrt(tau)
    return dt, a, b_plus, b_minus, math.sqrt(1.0 + c * c)


def ell_call_closed(
    params: ModelParams, s_ti: float, s_bs_ti: float, strike: float, t_i: float, t_ip1: float, T: float
) -> float:
    """E[S_{t_{i+1}} * C(t_{i+1}, S^BS_{t_{i+1}}) | F_{t_i}] for a zero-rate call C."""
    if not s_ti > 0:
        raise ValueError("prices must be > 0")
    dt, a, b_plus, b_minus, root = _call_terms(params, s_bs_ti, strike, t_i, t_ip1, T)
    sigma = params.sigma
    pref = s_ti * math.exp((params.mu + params.lam * params.jump.moment(1)) * dt)
    return pref * (
        s_bs_ti * math.exp((params.mu + sigma**2) * dt) * float(norm_cdf((2 * a + b_plus) / root))
        - strike * float(norm_cdf((a + b_minus) / root))
    )


def hat_v_call_closed(params: ModelParams, s_bs_ti: float, strike: float, t_i: float, t_ip1: float, T: float) -> float:
    """E[C(t_{i+1}, S^BS_{t_{i+1}}) | F_{t_i}] under the physical drift."""
    dt, a, b_plus, b_minus, root = _call_terms(params, s_bs_ti, strike, t_i, t_ip1, T)
    return s_bs_ti * math.exp(params.mu * dt) * float(norm_cdf((a + b_plus) / root)) - strike * float(
        norm_cdf(b_minus / root)
    )


# Value function of the hedged claim -------------------------------------------


def value_function(payoff: Payoff, sigma: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Callable:
    """Zero-rate Black-Scholes value ``x -> g(t, x)`` of the claim."""
    tau = payoff.maturity - t
    if isinstance(payoff, CallContract):
        return lambda x: call_price(x, payoff.strike, sigma, max(tau, 0.0))
    if tau <= 0:
        return payoff.payoff

    def g(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([vanilla_price(payoff.payoff, xi, sigma, tau, spec, payoff.kinks) for xi in x])
        return out

    return g


def initial_state(payoff: Payoff, sigma: float, s0: float, spec: QuadratureSpec = DEFAULT_SPEC) -> PortfolioState:
    """Black-Scholes price and delta at time 0; no entry cost is charged."""
    T = payoff.maturity
    if isinstance(payoff, CallContract):
        return PortfolioState(v=call_price(s0, payoff.strike, sigma, T), pi=call_delta(s0, payoff.strike, sigma, T), index=0)
    return PortfolioState(
        v=vanilla_price(payoff.payoff, s0, sigma, T, spec, payoff.kinks),
        pi=vanilla_delta(payoff.payoff, s0, sigma, T, spec),
        index=0,
    )


# One step -----------------------------------------------------------------


def step_diagnostics(
    state: PortfolioState,
    params: ModelParams,
    s_ti: float,
    s_bs_ti: float,
    grid: RebalanceGrid,
    config: HedgeConfig,
) -> StepDiagnostics:
    """All conditional quantities needed at ``t_i`` by either method."""
    i = state.index
    if i > grid.n_intervals - 2:
        raise ValueError(f"no decision is taken at index {i} (last decision index is {grid.n_intervals - 2})")
    t_i, t_ip1 = grid.times[i], grid.times[i + 1]
    dt = t_ip1 - t_i
    T = config.payoff.maturity
    hat_s = conditional_moment(params, s_ti, 1, dt)
    hat_s2 = conditional_moment(params, s_ti, 2, dt)
    payoff = config.payoff
    if isinstance(payoff, CallContract):
        hat_v = hat_v_call_closed(params, s_bs_ti, payoff.strike, t_i, t_ip1, T)
        hat_sv = ell_call_closed(params, s_ti, s_bs_ti, payoff.strike, t_i, t_ip1, T)
    else:
        g = value_function(payoff, params.sigma, t_ip1, config.quadrature)
        spec = config.quadrature
        hat_v = conditional_value_bs(params, s_bs_ti, dt, g, spec)
        hat_sv = conditional_price_times_value(params, s_ti, s_bs_ti, dt, g, spec)
    v, pi = state.v, state.pi
    ell_n = (v - pi * s_ti) * hat_s + pi * hat_s2
    return StepDiagnostics(
        hat_s=hat_s,
        hat_s2=hat_s2,
        hat_v=hat_v,
        hat_sv=hat_sv,
        theta_n=v + pi * (hat_s - s_ti),
        theta_pi=hat_v,
        ell_n=ell_n,
        ell_pi=hat_sv,
        u=ell_n - hat_sv,
    )


cmh_diagnostics = step_diagnostics
clh_diagnostics = step_diagnostics


def cmh_step(
    state: PortfolioState,
    diag: StepDiagnostics,
    position: Position | str,
    kappa: float,
    infeasible: InfeasiblePolicy | str = InfeasiblePolicy.REPORT,
) -> HedgeDecision:
    """Trade size ``|dpi| = (theta_N - theta_pi) / (kappa * hat_S)``."""
    _check_kappa(kappa)
    q = (diag.theta_n - diag.theta_pi) / (kappa * diag.hat_s)
    if q < 0:
        if InfeasiblePolicy(infeasible) is InfeasiblePolicy.FALLBACK:
            return NoTrade()
        return InfeasibleCMH(-q)
    return Long(q) if Position(position) is Position.LONG else Short(q)


def clh_step(state: PortfolioState, diag: StepDiagnostics, position: Position | str, kappa: float) -> HedgeDecision:
    """No trade when ``U <= 0``, otherwise move by ``U / (kappa * hat_S2)``."""
    _check_kappa(kappa)
    if diag.u <= 0:
        return NoTrade()
    delta = diag.u / (kappa * diag.hat_s2)
    return Long(delta) if Position(position) is Position.LONG else Short(delta)


def decide(state: PortfolioState, diag: StepDiagnostics, position, config: HedgeConfig) -> HedgeDecision:
    if config.method is Method.CMH:
        return cmh_step(state, diag, position, config.kappa, config.infeasible)
    return clh_step(state, diag, position, config.kappa)


def apply_rebalance(state: PortfolioState, s_ti: float, s_tip1: float, new_pi: float, kappa: float) -> PortfolioState:
    """Book the gain on ``[t_i, t_{i+1}]`` and pay the cost of moving to ``new_pi`` at ``t_{i+1}``."""
    if not s_tip1 > 0:
        raise ValueError("s_tip1 must be > 0")
    v = state.v + state.pi * (s_tip1 - s_ti)
    if new_pi != state.pi:
        v = v - kappa * s_tip1 * abs(new_pi - state.pi)
    return PortfolioState(v=v, pi=new_pi, index=state.index + 1)


def clh_objective(a: float, b: float, c: float, x0: float, x: float) -> float:
    return a * (x - x0) ** 2 + b * abs(x - x0) + c


def clh_objective_coefficients(diag: StepDiagnostics, kappa: float) -> tuple[float, float]:
    """``(a, b)`` of the per-step CLH objective in ``dpi``; the constant is pi-free."""
    return kappa**2 * diag.hat_s2, -2.0 * kappa * diag.u


# Trajectories ---------------------------------------------------------------


def parse_policy(policy) -> Callable[[int], Position]:
    """``"long"``, ``"short"``, ``"sequence:LSL..."`` (or a bare ``"LSL"``) -> position at step i."""
    if isinstance(policy, Position):
        return lambda i: policy
    text = str(policy).strip()
    low = text.lower()
    if low in ("long", "always-long"):
        return lambda i: Position.LONG
    if low in ("short", "always-short"):
        return lambda i: Position.SHORT
    if low.startswith("sequence:"):
        text = text.split(":", 1)[1]
    seq = text.upper()
    if not seq or set(seq) - {"L", "S"}:
        raise ValueError(f"bad policy {policy!r}")

    def pick(i: int) -> Position:
        if i >= len(seq):
            raise ValueError(f"policy sequence {seq!r} too short for step {i}")
        return Position.LONG if seq[i] == "L" else Position.SHORT

    return pick


@dataclass
class HedgeStep:
    state: PortfolioState
    diagnostics: StepDiagnostics
    decision: HedgeDecision


@dataclass
class HedgeTrajectory:
    steps: list[HedgeStep]
    states: list[PortfolioState]  # one per rebalance date reached, including t_N
    halted: bool = False

    @property
    def final_state(self) -> PortfolioState:
        return self.states[-1]


def check_path(path: SamplePath, grid: RebalanceGrid, config: HedgeConfig) -> None:
    if len(path.rebalance_idx) != len(grid.times) or not np.allclose(
        path.t[path.rebalance_idx], grid.times, rtol=0, atol=1e-12
    ):
        raise ValueError("path does not contain the rebalance dates")
    if abs(config.payoff.maturity - grid.horizon) > 1e-12:
        raise ValueError("payoff maturity must equal the grid horizon")
    if grid.n_intervals < 2:
        raise ValueError("hedging needs at least two intervals (one decision)")


def run_hedge(path: SamplePath, grid: RebalanceGrid, config: HedgeConfig, policy="long") -> HedgeTrajectory:
    """Run one strategy along a simulated path.

    Under the ``report`` policy an infeasible CMH step is recorded and the
    trajectory stops there (``halted`` is set).
    """
    check_path(path, grid, config)
    params = path.params
    pick = parse_policy(policy)
    state = initial_state(config.payoff, params.sigma, float(path.s_bs[0]), config.quadrature)
    steps: list[HedgeStep] = []
    states = [state]
    for i in range(grid.n_intervals - 1):
        s_ti, s_bs_ti = path.at_rebalance(i)
        diag = step_diagnostics(state, params, s_ti, s_bs_ti, grid, config)
        decision = decide(state, diag, pick(i), config)
        steps.append(HedgeStep(state, diag, decision))
        if isinstance(decision, InfeasibleCMH):
            return HedgeTrajectory(steps, states, halted=True)
        s_tip1, _ = path.at_rebalance(i + 1)
        state = apply_rebalance(state, s_ti, s_tip1, decision.new_pi(state.pi), config.kappa)
        states.append(state)
    # hold the last position to maturity
    i = grid.n_intervals - 1
    s_ti, _ = path.at_rebalance(i)
    s_T, _ = path.at_rebalance(i + 1)
    states.append(apply_rebalance(state, s_ti, s_T, state.pi, config.kappa))
    return HedgeTrajectory(steps, states)
