"""CSV emission of simulated series and per-step decision logs."""

from __future__ import annotations

import math

import numpy as np

from .blackscholes import CallContract, call_delta, call_price, vanilla_delta, vanilla_price
from .hedging import HedgeTrajectory, InfeasibleCMH, Payoff
from .model import SamplePath

SERIES_HEADER = "t,s,s_bs,w,n_jumps,bs_price,bs_delta,pi_n,v_pi_n"
STEPS_HEADER = (
    "index,t,s,s_bs,pi,v,hat_s,hat_s2,hat_v,hat_sv,theta_n,theta_pi,ell_n,ell_pi,u,decision,delta_pi,new_pi"
)


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _bs_columns(payoff: Payoff, sigma: float, t: float, x: float) -> tuple[float, float]:
    tau = payoff.maturity - t
    if isinstance(payoff, CallContract):
        if tau <= 0:
            # delta at expiry: one-sided limit
            return max(x - payoff.strike, 0.0), 1.0 if x > payoff.strike else (0.5 if x == payoff.strike else 0.0)
        return call_price(x, payoff.strike, sigma, tau), call_delta(x, payoff.strike, sigma, tau)
    if tau <= 0:
        return float(payoff.payoff(x)), math.nan
    return vanilla_price(payoff.payoff, x, sigma, tau, kinks=payoff.kinks), vanilla_delta(payoff.payoff, x, sigma, tau)


def write_series_csv(path: SamplePath, trajectory: HedgeTrajectory | None, payoff: Payoff) -> str:
    """One row per fine-grid point; strategy columns are constant between rebalances."""
    sigma = path.params.sigma
    reb = [int(k) for k in path.rebalance_idx]
    states = trajectory.states if trajectory is not None else []
    rows = [SERIES_HEADER]
    i = 0
    for k in range(path.t.size):
        while i + 1 < len(reb) and k >= reb[i + 1]:
            i += 1
        t = float(path.t[k])
        price, delta = _bs_columns(payoff, sigma, t, float(path.s_bs[k]))
        if i < len(states):
            pi, v = states[i].pi, states[i].v
        else:
            pi = v = math.nan
        rows.append(
            ",".join(
                [
                    fmt(t),
                    fmt(path.s[k]),
                    fmt(path.s_bs[k]),
                    fmt(path.w[k]),
                    str(int(path.n_count[k])),
                    fmt(price),
                    fmt(delta),
                    fmt(pi),
                    fmt(v),
                ]
            )
        )
    return "\n".join(rows) + "\n"


def write_steps_csv(path: SamplePath, trajectory: HedgeTrajectory) -> str:
    """Per-decision log: state, every conditional diagnostic, and the decision."""
    times = path.t[path.rebalance_idx]
    rows = [STEPS_HEADER]
    for step in trajectory.steps:
        st, d, dec = step.state, step.diagnostics, step.decision
        s, s_bs = path.at_rebalance(st.index)
        if isinstance(dec, InfeasibleCMH):
            size, new_pi = dec.deficit, math.nan
        else:
            size, new_pi = getattr(dec, "delta_pi", 0.0), dec.new_pi(st.pi)
        vals = [st.index, times[st.index], s, s_bs, st.pi, st.v]
        vals += [d.hat_s, d.hat_s2, d.hat_v, d.hat_sv, d.theta_n, d.theta_pi, d.ell_n, d.ell_pi, d.u]
        cells = [str(vals[0])] + [fmt(float(x)) for x in vals[1:]] + [dec.kind, fmt(size), fmt(new_pi)]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def read_series_csv(text: str) -> dict[str, np.ndarray]:
    lines = text.strip().splitlines()
    cols = lines[0].split(",")
    data = np.array([[float(c) for c in line.split(",")] for line in lines[1:]])
    return {name: data[:, j] for j, name in enumerate(cols)}
