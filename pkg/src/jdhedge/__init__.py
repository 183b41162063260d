"""Discrete rebalancing of a call hedge when the underlying jumps and every trade pays a proportional fee."""

from .blackscholes import CallContract, call_delta, call_price, vanilla_price
from .hedging import (
    GenericPayoff,
    HedgeConfig,
    InfeasibleCMH,
    InfeasiblePolicy,
    Long,
    Method,
    NoTrade,
    PortfolioState,
    Position,
    Short,
    StepDiagnostics,
    apply_rebalance,
    clh_step,
    cmh_step,
    ell_call_closed,
    piecewise_quadratic_min,
    run_hedge,
    step_diagnostics,
)
from .model import Constant, Discrete, ModelParams, RebalanceGrid, SamplePath, conditional_moment, simulate_path
from .quadrature import QuadratureSpec, expect_normal, normal_phi_product_expectation
from .tree import DecisionTree, HedgeNode, enumerate_tree, export_tree

__version__ = "0.1.0"
