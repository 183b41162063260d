"""Enumeration of every long/short/no-trade branch and text exports of the result."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional

from .blackscholes import CallContract
from .hedging import (
    HedgeConfig,
    HedgeDecision,
    InfeasibleCMH,
    Long,
    Method,
    NoTrade,
    PortfolioState,
    Position,
    Short,
    StepDiagnostics,
    apply_rebalance,
    check_path,
    decide,
    initial_state,
    step_diagnostics,
)
from .model import RebalanceGrid, SamplePath

DEFAULT_MAX_DEPTH = 12


class TreeBudgetError(RuntimeError):
    pass


@dataclass(eq=False)
class HedgeNode:
    """Portfolio state at rebalance date ``t_index``.

    ``decision`` is the edge that led here (None at the root); ``diagnostics``
    were computed at this node and are None at leaves. ``infeasible`` is set on
    CMH nodes where the step has no solution; such nodes have no children under
    the report policy.
    """

    index: int
    pi: float
    v: float
    decision: Optional[HedgeDecision] = None
    diagnostics: Optional[StepDiagnostics] = None
    children: list["HedgeNode"] = field(default_factory=list)
    infeasible: Optional[InfeasibleCMH] = None

    @property
    def state(self) -> PortfolioState:
        return PortfolioState(v=self.v, pi=self.pi, index=self.index)


@dataclass(eq=False)
class DecisionTree:
    root: HedgeNode
    method: Method
    seed: Optional[int]
    config: dict

    def bfs(self) -> Iterator[HedgeNode]:
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            yield node
            queue.extend(node.children)

    def node_count(self) -> int:
        return sum(1 for _ in self.bfs())

    def depth(self) -> int:
        def d(n: HedgeNode) -> int:
            return 1 + max((d(c) for c in n.children), default=-1)

        return d(self.root)


def config_snapshot(config: HedgeConfig) -> dict:
    snap = {"kappa": config.kappa, "method": config.method.value, "infeasible": config.infeasible.value}
    if isinstance(config.payoff, CallContract):
        snap["strike"] = config.payoff.strike
    snap["maturity"] = config.payoff.maturity
    return snap


def enumerate_tree(
    path: SamplePath, grid: RebalanceGrid, config: HedgeConfig, max_depth: int = DEFAULT_MAX_DEPTH
) -> DecisionTree:
    """Expand both positions at every branching node, breadth first.

    Each branch carries its own copy of the portfolio state; leaves sit at
    index ``N-1``.
    """
    check_path(path, grid, config)
    n_decisions = grid.n_intervals - 1
    if n_decisions > max_depth:
        raise TreeBudgetError(f"{n_decisions} decision levels exceed the budget of {max_depth}")
    params = path.params
    start = initial_state(config.payoff, params.sigma, float(path.s_bs[0]), config.quadrature)
    root = HedgeNode(index=0, pi=start.pi, v=start.v)
    queue = deque([root])
    while queue:
        node = queue.popleft()
        i = node.index
        if i >= n_decisions:
            continue
        s_ti, s_bs_ti = path.at_rebalance(i)
        s_tip1, _ = path.at_rebalance(i + 1)
        state = node.state
        node.diagnostics = step_diagnostics(state, params, s_ti, s_bs_ti, grid, config)
        for position in (Position.LONG, Position.SHORT):
            decision = decide(state, node.diagnostics, position, config)
            if isinstance(decision, InfeasibleCMH):
                node.infeasible = decision
                break
            nxt = apply_rebalance(state, s_ti, s_tip1, decision.new_pi(state.pi), config.kappa)
            child = HedgeNode(index=nxt.index, pi=nxt.pi, v=nxt.v, decision=decision)
            node.children.append(child)
            queue.append(child)
            if isinstance(decision, NoTrade):
                break
    return DecisionTree(root=root, method=config.method, seed=path.seed, config=config_snapshot(config))


# Exports ------------------------------------------------------------------


def _edge_label(decision: Optional[HedgeDecision]) -> str:
    return "" if decision is None else decision.kind


def _node_text(node: HedgeNode) -> str:
    text = f"t{node.index} pi={node.pi:.6f} v={node.v:.6f}"
    if node.infeasible is not None:
        text += f" infeasible(deficit={node.infeasible.deficit:.6f})"
    return text


def export_ascii(tree: DecisionTree) -> str:
    lines = [_node_text(tree.root)]

    def walk(node: HedgeNode, prefix: str) -> None:
        for k, child in enumerate(node.children):
            last = k == len(node.children) - 1
            lines.append(f"{prefix}{'`-- ' if last else '|-- '}{_edge_label(child.decision)}: {_node_text(child)}")
            walk(child, prefix + ("    " if last else "|   "))

    walk(tree.root, "")
    return "\n".join(lines) + "\n"


def export_dot(tree: DecisionTree) -> str:
    ids = {id(n): k for k, n in enumerate(tree.bfs())}
    lines = [f'digraph "hedge_tree_{tree.method.value}" {{']
    for node in tree.bfs():
        label = _node_text(node).replace(" ", "\\n", 2)
        lines.append(f'  n{ids[id(node)]} [label="{label}"];')
    for node in tree.bfs():
        for child in node.children:
            lines.append(f'  n{ids[id(node)]} -> n{ids[id(child)]} [label="{_edge_label(child.decision)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _decision_record(decision: Optional[HedgeDecision]):
    if decision is None:
        return None
    rec = {"kind": decision.kind}
    rec.update(asdict(decision))
    return rec


def _node_record(node: HedgeNode) -> dict:
    return {
        "index": node.index,
        "pi": node.pi,
        "v": node.v,
        "decision": _decision_record(node.decision),
        "diagnostics": None if node.diagnostics is None else asdict(node.diagnostics),
        "infeasible": None if node.infeasible is None else node.infeasible.deficit,
        "children": [_node_record(c) for c in node.children],
    }


def export_structured(tree: DecisionTree) -> str:
    doc = {"method": tree.method.value, "seed": tree.seed, "config": tree.config, "root": _node_record(tree.root)}
    return json.dumps(doc, indent=1) + "\n"


_DECISIONS = {"no-trade": NoTrade, "long": Long, "short": Short}


def _node_from_record(rec: dict) -> HedgeNode:
    dec = rec["decision"]
    if dec is not None:
        kind = dec.pop("kind")
        dec = _DECISIONS[kind](**dec)
    diag = rec["diagnostics"]
    return HedgeNode(
        index=rec["index"],
        pi=rec["pi"],
        v=rec["v"],
        decision=dec,
        diagnostics=None if diag is None else StepDiagnostics(**diag),
        children=[_node_from_record(c) for c in rec["children"]],
        infeasible=None if rec["infeasible"] is None else InfeasibleCMH(rec["infeasible"]),
    )


def load_structured(text: str) -> DecisionTree:
    """Inverse of :func:`export_structured`."""
    doc = json.loads(text)
    return DecisionTree(
        root=_node_from_record(doc["root"]), method=Method(doc["method"]), seed=doc["seed"], config=doc["config"]
    )


EXPORTERS = {"ascii": export_ascii, "dot": export_dot, "structured": export_structured}


def export_tree(tree: DecisionTree, fmt: str = "ascii") -> str:
    try:
        return EXPORTERS[fmt](tree)
    except KeyError:
        raise ValueError(f"unknown tree format {fmt!r}") from None
