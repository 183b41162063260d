"""Oracle checks of every closed form, shared by ``jdhedge validate`` and the test suite.

Each check returns a :class:`CheckResult`; tolerances and seeds are fixed here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blackscholes import CallContract, call_price
from .hedging import (
    HedgeConfig,
    InfeasibleCMH,
    Long,
    Method,
    NoTrade,
    PortfolioState,
    Short,
    apply_rebalance,
    clh_objective,
    clh_objective_coefficients,
    clh_step,
    cmh_step,
    ell_call_closed,
    piecewise_quadratic_min,
    run_hedge,
    step_diagnostics,
)
from .model import Constant, ModelParams, RebalanceGrid, conditional_moment, simulate_path
from .oracle import grid_minimize, mc_conditional_moment, mc_price_times_value, quad_phi_product
from .quadrature import conditional_price_times_value, normal_phi_product_expectation
from .tree import DecisionTree, enumerate_tree

# experiment constants
MU, SIGMA, LAM, KAPPA, HORIZON, N_REBALANCES = 0.15, 0.25, 0.3, 0.1, 12.0, 5
S0, STRIKE = 100.0, 500.0
EXPERIMENT_SEED = 38
MC_SAMPLES = 1_000_000
N_SE = 3.0


def experiment_params(xi: float) -> ModelParams:
    return ModelParams(MU, SIGMA, LAM, Constant(xi), S0)


def experiment_grid() -> RebalanceGrid:
    return RebalanceGrid.uniform(HORIZON, N_REBALANCES + 1)


def experiment_config(method: Method = Method.CLH) -> HedgeConfig:
    return HedgeConfig(kappa=KAPPA, method=method, payoff=CallContract(STRIKE, HORIZON))


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34} {self.seconds:7.2f}s  {self.detail}"


def _timed(name: str, budget: float | None, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed > budget:
        ok, detail = False, f"{detail}; runtime {elapsed:.1f}s > {budget}s"
    return CheckResult(name, ok, detail, elapsed)


# 1 ----------------------------------------------------------------------------


def check_conditional_moments() -> CheckResult:
    def run():
        worst, fails = 0.0, []
        seed = 1000
        for xi in (-0.5, 0.5):
            p = experiment_params(xi)
            for k in (1, 2, 3):
                for dt in (0.5, 1.0, 2.4):
                    seed += 1
                    est = mc_conditional_moment(p, S0, k, dt, MC_SAMPLES, seed)
                    exact = conditional_moment(p, S0, k, dt)
                    z = abs(est.mean - exact) / est.std_error
                    worst = max(worst, z)
                    if z > N_SE:
                        fails.append((xi, k, dt, round(z, 2)))
        p = experiment_params(-0.5)
        drift_free = all(
            abs(conditional_moment(p, s, 1, dt) - s) <= 1e-12 * s for s in (1.0, 50.0, 100.0, 1e4) for dt in (0.5, 1.0, 2.4)
        )
        ok = not fails and drift_free
        return ok, f"max |z| = {worst:.2f} over 18 cases; hat S = S_u: {drift_free}" + (f"; fails {fails}" if fails else "")

    return _timed("1 conditional moments", 30.0, run)


# 2 ----------------------------------------------------------------------------


def check_gaussian_phi_identity(n: int = 200, seed: int = 2) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n):
            alpha, a, b = rng.uniform(-3, 3, size=3)
            mean = rng.uniform(-2, 2)
            var = rng.uniform(0.01, 4.0)
            closed = normal_phi_product_expectation(alpha, a, b, mean, var)
            adaptive = quad_phi_product(alpha, a, b, mean, var)
            worst = max(worst, abs(closed - adaptive) / abs(adaptive))
        return worst <= 1e-9, f"max rel err {worst:.2e} (tol 1e-9, {n} tuples)"

    return _timed("2 Gaussian-Phi identity", 5.0, run)


# 3 ----------------------------------------------------------------------------


def check_call_closed_form() -> CheckResult:
    def run():
        T, dt = HORIZON, 2.0
        worst = 0.0
        for xi in (-0.5, 0.5):
            p = experiment_params(xi)
            for s in (50.0, 80.0, 100.0, 150.0, 250.0):
                for k in (50.0, 100.0, 200.0, 400.0, 500.0):
                    for t_i in (0.0, 2.0, 4.0, 6.0, 8.0):
                        s_bs = 1.1 * s
                        closed = ell_call_closed(p, s, s_bs, k, t_i, t_i + dt, T)
                        tau = T - t_i - dt
                        quad = conditional_price_times_value(
                            p, s, s_bs, dt, lambda x: call_price(x, k, SIGMA, tau)
                        )
                        worst = max(worst, abs(closed - quad) / abs(quad))
        mc_fail = []
        p = experiment_params(0.5)
        for j, s in enumerate((60.0, 100.0, 200.0)):
            closed = ell_call_closed(p, s, s, STRIKE / 5, 4.0, 6.0, T)
            est = mc_price_times_value(
                p, s, s, 2.0, lambda x: call_price(x, STRIKE / 5, SIGMA, T - 6.0), MC_SAMPLES, 3000 + j
            )
            if not est.within(closed, N_SE):
                mc_fail.append(s)
        ok = worst <= 1e-7 and not mc_fail
        return ok, f"max rel err vs quadrature {worst:.2e} (tol 1e-7, 250 points); MC outside 3 SE at {mc_fail}"

    return _timed("3 call closed form", 60.0, run)


# 4 ----------------------------------------------------------------------------


def check_piecewise_quadratic(n: int = 100, seed: int = 4) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        worst_x, worst_v = 0.0, 0.0
        for _ in range(n):
            a = rng.uniform(0.2, 5.0)
            b = rng.uniform(-5.0, 5.0)
            c = rng.uniform(0.0, 10.0)
            x0 = rng.uniform(-3.0, 3.0)
            xs, val = piecewise_quadratic_min(a, b, c, x0)
            gx, gv = grid_minimize(a, b, c, x0, abs(b) / (2 * a) + 1.0, 1e-4)
            worst_x = max(worst_x, min(abs(gx - x) for x in xs))
            if b < 0:
                worst_v = max(worst_v, abs(val - (c - b * b / (4 * a))), abs(gv - val))
        ok = worst_x <= 1e-3 and worst_v <= 1e-6
        return ok, f"argmin gap {worst_x:.1e} (tol 1e-3); b<0 value gap {worst_v:.1e} (tol 1e-6)"

    return _timed("4 piecewise quadratic minimum", None, run)


# 5, 6 -------------------------------------------------------------------------


def _random_step(rng: np.random.Generator):
    xi = float(rng.choice([-0.5, 0.5]))
    p = experiment_params(xi)
    grid = experiment_grid()
    i = int(rng.integers(0, grid.n_intervals - 1))
    s_bs = float(rng.uniform(40, 400))
    s = s_bs * float(rng.choice([0.25, 0.5, 1.0, 1.5, 2.25]))
    strike = float(rng.choice([100.0, 200.0, 500.0]))
    cfg = HedgeConfig(kappa=float(rng.uniform(0.01, 0.49)), payoff=CallContract(strike, HORIZON))
    state = PortfolioState(v=float(rng.uniform(-50, 150)), pi=float(rng.uniform(-2, 2)), index=i)
    return p, grid, cfg, state, s, s_bs


def check_cmh_plug_back(n: int = 50, seed: int = 5) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        feasible, worst, mismatched, tried = 0, 0.0, 0, 0
        while feasible < n:
            tried += 1
            p, grid, cfg, state, s, s_bs = _random_step(rng)
            d = step_diagnostics(state, p, s, s_bs, grid, cfg)
            dec = cmh_step(state, d, "long" if tried % 2 else "short", cfg.kappa)
            if isinstance(dec, InfeasibleCMH) != (d.theta_n < d.theta_pi):
                mismatched += 1
            if isinstance(dec, InfeasibleCMH):
                continue
            feasible += 1
            new_pi = dec.new_pi(state.pi)
            expected_v = state.v + state.pi * (d.hat_s - s) - cfg.kappa * d.hat_s * abs(new_pi - state.pi)
            worst = max(worst, abs(expected_v - d.hat_v) / (1 + abs(d.hat_v)))
        ok = worst <= 1e-9 and mismatched == 0
        return ok, f"max rel gap {worst:.1e} (tol 1e-9) over {n} feasible of {tried}; sign mismatches {mismatched}"

    return _timed("5 CMH plug-back", None, run)


def check_clh_optimality(n: int = 50, seed: int = 6) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        problems = []
        n_pos = 0
        for j in range(n):
            p, grid, cfg, state, s, s_bs = _random_step(rng)
            d = step_diagnostics(state, p, s, s_bs, grid, cfg)
            a, b = clh_objective_coefficients(d, cfg.kappa)
            x0 = state.pi
            long_, short_ = clh_step(state, d, "long", cfg.kappa), clh_step(state, d, "short", cfg.kappa)
            for dec in (long_, short_):
                x = dec.new_pi(x0)
                fx = clh_objective(a, b, 0.0, x0, x)
                for h in (1e-3, 1e-2, 1e-1):
                    for y in (x - h, x + h):
                        if fx > clh_objective(a, b, 0.0, x0, y) + 1e-12 * abs(fx):
                            problems.append((j, "not optimal"))
            if d.u <= 0:
                if not (isinstance(long_, NoTrade) and isinstance(short_, NoTrade)):
                    problems.append((j, "trade with u<=0"))
                continue
            n_pos += 1
            half = d.u / (cfg.kappa * d.hat_s2)
            if not (isinstance(long_, Long) and isinstance(short_, Short)):
                problems.append((j, "no fan with u>0"))
                continue
            up, down = long_.new_pi(x0) - x0, x0 - short_.new_pi(x0)
            if abs(up - half) > 1e-12 * half or abs(down - half) > 1e-12 * half:
                problems.append((j, "asymmetric"))
            doubled = clh_step(state, d, "long", 2 * cfg.kappa)
            if doubled.delta_pi != long_.delta_pi / 2:
                problems.append((j, "kappa scaling"))
        ok = not problems and 0 < n_pos < n
        return ok, f"{n} steps ({n_pos} with u>0); problems {problems[:5]}"

    return _timed("6 CLH optimality", None, run)


# 7 ----------------------------------------------------------------------------


def check_degeneracy(seed: int = 7) -> CheckResult:
    def run():
        p = ModelParams(MU, SIGMA, 0.0, Constant(-0.5), S0)
        grid = experiment_grid()
        equal = all(np.array_equal(simulate_path(p, grid, 20, seed + j).s, simulate_path(p, grid, 20, seed + j).s_bs) for j in range(5))
        rng = np.random.default_rng(seed)
        cost_ok = True
        for _ in range(200):
            st = PortfolioState(v=float(rng.normal(10, 5)), pi=float(rng.normal()), index=0)
            s0, s1 = rng.uniform(50, 150, size=2)
            new_pi = st.pi if rng.random() < 0.5 else st.pi + float(rng.normal())
            out = apply_rebalance(st, float(s0), float(s1), new_pi, 0.1)
            gap = out.v - (st.v + st.pi * (s1 - s0))
            if (gap == 0.0) != (new_pi == st.pi) or gap > 0:
                cost_ok = False
        path = simulate_path(p, grid, 20, seed)
        traj = run_hedge(path, grid, experiment_config(), "long")
        for step, nxt in zip(traj.steps, traj.states[1:]):
            if isinstance(step.decision, NoTrade):
                s_a = path.at_rebalance(step.state.index)[0]
                s_b = path.at_rebalance(step.state.index + 1)[0]
                if nxt.v != step.state.v + step.state.pi * (s_b - s_a):
                    cost_ok = False
        return equal and cost_ok, f"lambda=0 S==S_BS bitwise: {equal}; zero cost iff no trade: {cost_ok}"

    return _timed("7 degeneracy", None, run)


# 8 ----------------------------------------------------------------------------


def long_branch(tree: DecisionTree):
    """Nodes along the branch that always takes the first (long or no-trade) child."""
    node = tree.root
    nodes = [node]
    while node.children:
        node = node.children[0]
        nodes.append(node)
    return nodes


def structural_summary(xi: float, seed: int = EXPERIMENT_SEED) -> dict:
    grid = experiment_grid()
    path = simulate_path(experiment_params(xi), grid, 20, seed)
    tree = enumerate_tree(path, grid, experiment_config())
    nodes = list(tree.bfs())
    branch = long_branch(tree)
    sizes, jump_steps = [], 0
    for node, child in zip(branch, branch[1:]):
        if node.diagnostics.u > 0:
            sizes.append(abs(child.pi - node.pi))
            jump_steps += path.jumps_in(grid.times[node.index], grid.times[node.index + 1]) > 0
    return {
        "single": sum(len(n.children) == 1 for n in nodes),
        "fans": sum(len(n.children) == 2 for n in nodes),
        "sizes": sizes,
        "jump_intervals": jump_steps,
        "growing": len(sizes) >= 2 and all(b > a for a, b in zip(sizes, sizes[1:])),
        "depth": tree.depth(),
        "nodes": len(nodes),
    }


def check_structure(seed: int = EXPERIMENT_SEED) -> CheckResult:
    def run():
        ok, parts = True, []
        for xi in (-0.5, 0.5):
            info = structural_summary(xi, seed)
            good = info["single"] > 0 and info["fans"] > 0 and info["growing"] and info["jump_intervals"] > 0
            good = good and info["depth"] == N_REBALANCES
            ok &= good
            parts.append(
                f"xi={xi:+}: {info['nodes']} nodes, {info['single']} single / {info['fans']} fans, "
                f"long-branch |dpi| {[round(x, 3) for x in info['sizes']]}"
            )
        return ok, "; ".join(parts)

    return _timed("8 experiment tree structure", 10.0, run)


ALL_CHECKS = (
    check_conditional_moments,
    check_gaussian_phi_identity,
    check_call_closed_form,
    check_piecewise_quadratic,
    check_cmh_plug_back,
    check_clh_optimality,
    check_degeneracy,
    check_structure,
)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
