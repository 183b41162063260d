from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jdhedge.blackscholes import CallContract
from jdhedge.hedging import HedgeConfig, Long, Method, NoTrade, Short, run_hedge
from jdhedge.model import Constant, ModelParams, RebalanceGrid, simulate_path
from jdhedge.tree import (
    DecisionTree,
    HedgeNode,
    TreeBudgetError,
    enumerate_tree,
    export_tree,
    load_structured,
)
from jdhedge.validation import EXPERIMENT_SEED, long_branch, experiment_config, experiment_grid, experiment_params

GOLDEN = Path(__file__).parent / "golden"


def experiment_tree(xi, seed=EXPERIMENT_SEED, method=Method.CLH):
    grid = experiment_grid()
    path = simulate_path(experiment_params(xi), grid, 20, seed)
    return path, enumerate_tree(path, grid, experiment_config(method))


def test_single_decision_without_trade_gives_two_nodes():
    grid = RebalanceGrid.uniform(12.0, 2)
    path = simulate_path(experiment_params(-0.5), grid, 20, 0)
    tree = enumerate_tree(path, grid, HedgeConfig(0.1, payoff=CallContract(100.0, 12.0)))
    assert tree.root.diagnostics.u <= 0
    assert tree.node_count() == 2
    assert isinstance(tree.root.children[0].decision, NoTrade)


def test_feasible_cmh_gives_full_binary_tree():
    params = ModelParams(mu=0.0, sigma=0.25, lam=0.1, jump=Constant(0.5))
    grid = RebalanceGrid.uniform(1.0, 4)
    path = simulate_path(params, grid, 20, 2)
    tree = enumerate_tree(path, grid, HedgeConfig(0.1, Method.CMH, CallContract(100.0, 1.0)))
    assert tree.node_count() == 1 + 2 + 4 + 8
    assert all(node.infeasible is None for node in tree.bfs())


def test_infeasible_cmh_prunes_branch():
    _, tree = experiment_tree(0.5, method=Method.CMH)
    marked = [n for n in tree.bfs() if n.infeasible is not None]
    assert marked and all(not n.children for n in marked)
    assert "infeasible(deficit=" in export_tree(tree, "ascii")


def test_mixed_branching_with_persistent_root():
    _, tree = experiment_tree(-0.5)
    first, second = tree.root.children, tree.root.children[0].children
    assert [type(c.decision) for c in first] == [NoTrade]
    assert [type(c.decision) for c in second] == [NoTrade]
    assert len(second[0].children) == 2
    assert {len(n.children) for n in tree.bfs()} == {0, 1, 2}


@pytest.mark.parametrize("xi", [-0.5, 0.5])
def test_tree_shape_invariants(xi):
    _, tree = experiment_tree(xi)
    n = 5
    assert tree.depth() == n
    assert tree.node_count() <= 2**n
    for node in tree.bfs():
        if not node.children:
            assert node.index == n
            continue
        if node.diagnostics.u > 0:
            long_, short = node.children
            assert isinstance(long_.decision, Long) and isinstance(short.decision, Short)
            half = node.diagnostics.u / (0.1 * node.diagnostics.hat_s2)
            assert long_.pi - node.pi == pytest.approx(half, rel=1e-12)
            assert node.pi - short.pi == pytest.approx(half, rel=1e-12)
            assert long_.v == short.v  # same trade size, same cost
        else:
            assert len(node.children) == 1 and isinstance(node.children[0].decision, NoTrade)


@pytest.mark.parametrize("xi", [-0.5, 0.5])
def test_long_branch_matches_run_hedge(xi):
    path, tree = experiment_tree(xi)
    traj = run_hedge(path, experiment_grid(), experiment_config(), "long")
    branch = long_branch(tree)
    assert len(branch) == len(traj.steps) + 1
    for node, state in zip(branch, traj.states):
        assert (node.index, node.pi, node.v) == (state.index, state.pi, state.v)
    for node, step in zip(branch[1:], traj.steps):
        assert node.decision == step.decision


def test_budget_is_enforced():
    grid = RebalanceGrid.uniform(12.0, 6)
    path = simulate_path(experiment_params(0.5), grid, 2, 0)
    with pytest.raises(TreeBudgetError):
        enumerate_tree(path, grid, experiment_config(), max_depth=4)


def test_single_node_dot_export():
    tree = DecisionTree(HedgeNode(index=0, pi=0.5, v=1.0), Method.CLH, 0, {})
    dot = export_tree(tree, "dot")
    assert dot.count("[label=") == 1 and "->" not in dot
    assert dot.startswith('digraph "hedge_tree_clh" {')


def test_ascii_orders_long_before_short():
    root = HedgeNode(index=0, pi=0.5, v=1.0)
    root.children = [
        HedgeNode(index=1, pi=0.6, v=1.0, decision=Long(0.1)),
        HedgeNode(index=1, pi=0.4, v=1.0, decision=Short(0.1)),
    ]
    text = export_tree(DecisionTree(root, Method.CLH, 0, {}), "ascii")
    lines = text.splitlines()
    assert lines[1].startswith("|-- long:") and lines[2].startswith("`-- short:")


@pytest.mark.parametrize("xi", [-0.5, 0.5])
def test_structured_round_trip(xi):
    _, tree = experiment_tree(xi)
    text = export_tree(tree, "structured")
    back = load_structured(text)
    assert back.node_count() == tree.node_count()
    assert [n.pi for n in back.bfs()] == [n.pi for n in tree.bfs()]
    assert [n.v for n in back.bfs()] == [n.v for n in tree.bfs()]
    assert export_tree(back, "structured") == text


def test_unknown_format():
    _, tree = experiment_tree(0.5)
    with pytest.raises(ValueError):
        export_tree(tree, "svg")


@pytest.mark.parametrize("tag,xi", [("neg", -0.5), ("pos", 0.5)])
@pytest.mark.parametrize("fmt,ext", [("ascii", "txt"), ("dot", "dot"), ("structured", "json")])
def test_tree_golden(tag, xi, fmt, ext):
    golden = GOLDEN / f"tree_{tag}_seed{EXPERIMENT_SEED}.{ext}"
    assert golden.exists(), "golden file missing; run scripts/make_golden.py"
    _, tree = experiment_tree(xi)
    assert export_tree(tree, fmt) == golden.read_text()


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), xi=st.sampled_from([-0.5, 0.5]), fmt=st.sampled_from(["ascii", "dot", "structured"]))
def test_exports_are_deterministic(seed, xi, fmt):
    _, a = experiment_tree(xi, seed)
    _, b = experiment_tree(xi, seed)
    assert export_tree(a, fmt) == export_tree(b, fmt)
