"""Acceptance suite: one test per criterion, each at its stated tolerance and time budget.

Every result line is echoed in the pytest terminal summary; running this file
directly prints the same table.
"""

from pathlib import Path

import pytest

from jdhedge import validation
from jdhedge.hedging import run_hedge
from jdhedge.model import simulate_path
from jdhedge.series import write_series_csv
from jdhedge.tree import enumerate_tree, export_tree

GOLDEN = Path(__file__).parent / "golden"
RESULTS: list = []


def _run(check):
    res = check()
    RESULTS.append(res)
    print(res.line())
    return res


def test_1_conditional_moments():
    assert _run(validation.check_conditional_moments).passed


def test_2_gaussian_phi_identity():
    assert _run(validation.check_gaussian_phi_identity).passed


def test_3_call_closed_form():
    assert _run(validation.check_call_closed_form).passed


def test_4_piecewise_quadratic():
    assert _run(validation.check_piecewise_quadratic).passed


def test_5_cmh_plug_back():
    assert _run(validation.check_cmh_plug_back).passed


def test_6_clh_optimality():
    assert _run(validation.check_clh_optimality).passed


def test_7_degeneracy():
    assert _run(validation.check_degeneracy).passed


def test_8_tree_structure():
    assert _run(validation.check_structure).passed


@pytest.mark.parametrize("xi,tag", [(-0.5, "neg"), (0.5, "pos")])
def test_8_golden_trees(xi, tag):
    grid = validation.experiment_grid()
    path = simulate_path(validation.experiment_params(xi), grid, 20, validation.EXPERIMENT_SEED)
    tree = enumerate_tree(path, grid, validation.experiment_config())
    for fmt, ext in (("ascii", "txt"), ("dot", "dot"), ("structured", "json")):
        golden = GOLDEN / f"tree_{tag}_seed{validation.EXPERIMENT_SEED}.{ext}"
        assert golden.exists(), f"{golden.name} missing; run scripts/make_golden.py"
        assert export_tree(tree, fmt) == golden.read_text()


def test_8_golden_series():
    golden = GOLDEN / "series_pos_seed42.csv"
    assert golden.exists(), f"{golden.name} missing; run scripts/make_golden.py"
    grid, cfg = validation.experiment_grid(), validation.experiment_config()
    path = simulate_path(validation.experiment_params(0.5), grid, 20, 42)
    assert write_series_csv(path, run_hedge(path, grid, cfg), cfg.payoff) == golden.read_text()


if __name__ == "__main__":
    for res in validation.run_all():
        print(res.line())
