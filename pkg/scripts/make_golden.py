"""Regenerate the regression files in tests/golden/.

Run only after `pytest -m "not slow"` and `jdhedge validate` both pass; the
files lock the current numbers, they do not certify them.
"""

from pathlib import Path

from jdhedge.hedging import run_hedge
from jdhedge.model import simulate_path
from jdhedge.series import write_series_csv, write_steps_csv
from jdhedge.tree import enumerate_tree, export_tree
from jdhedge.validation import EXPERIMENT_SEED, experiment_config, experiment_grid, experiment_params

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"
HEDGE_SEED = 42


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    grid, cfg = experiment_grid(), experiment_config()

    path = simulate_path(experiment_params(0.5), grid, 20, HEDGE_SEED)
    traj = run_hedge(path, grid, cfg, "long")
    (GOLDEN / "series_pos_seed42.csv").write_text(write_series_csv(path, traj, cfg.payoff))
    (GOLDEN / "steps_pos_seed42.csv").write_text(write_steps_csv(path, traj))

    for tag, xi in (("neg", -0.5), ("pos", 0.5)):
        path = simulate_path(experiment_params(xi), grid, 20, EXPERIMENT_SEED)
        tree = enumerate_tree(path, grid, cfg)
        for fmt, ext in (("ascii", "txt"), ("dot", "dot"), ("structured", "json")):
            (GOLDEN / f"tree_{tag}_seed{EXPERIMENT_SEED}.{ext}").write_text(export_tree(tree, fmt))
    print(f"wrote {len(list(GOLDEN.iterdir()))} files to {GOLDEN}")


if __name__ == "__main__":
    main()
