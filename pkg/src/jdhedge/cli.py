"""Command line entry point: ``jdhedge {simulate,hedge,tree,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import validation
from .config import TREE_FORMATS, ConfigError, RunConfig, dump_config, load_config
from .hedging import InfeasibleCMHError, run_hedge
from .model import simulate_path
from .series import write_series_csv, write_steps_csv
from .tree import TreeBudgetError, enumerate_tree, export_tree


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jdhedge", description="Jump-diffusion CMH/CLH hedging experiments")
    sub = parser.add_subparsers(dest="command", metavar="{simulate,hedge,tree,validate}")

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="key = value configuration file")
        p.add_argument("--seed", type=int)
        p.add_argument("--method", choices=("cmh", "clh"))
        p.add_argument("--policy", help="long | short | sequence:<LS...>")
        p.add_argument("--infeasible", choices=("report", "fallback"))

    p = sub.add_parser("simulate", help="write the simulated series CSV")
    common(p)
    p.add_argument("--out-series")
    p = sub.add_parser("hedge", help="write the series CSV and the per-step decision log")
    common(p)
    p.add_argument("--out-series")
    p.add_argument("--out-log", help="decision log path (default: <out-series stem>.steps.csv)")
    p = sub.add_parser("tree", help="write the enumerated decision tree")
    common(p)
    p.add_argument("--out-tree")
    p.add_argument("--tree-format", choices=TREE_FORMATS)
    p = sub.add_parser("validate", help="run the oracle suite and print a pass/fail table")
    common(p, config_required=False)
    return parser


def _load(args) -> RunConfig:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg = load_config(text)
    overrides = {}
    for name in ("seed", "method", "policy", "infeasible", "out_series", "out_tree", "tree_format"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        # round-trip through the loader so overrides get the same checks
        cfg = load_config(_apply_overrides(cfg, overrides))
    return cfg


def _apply_overrides(cfg: RunConfig, overrides: dict) -> str:
    lines = [line for line in dump_config(cfg).splitlines() if line.split(" = ")[0] not in overrides]
    lines += [f"{k} = {v}" for k, v in overrides.items()]
    return "\n".join(lines) + "\n"


def _emit(text: str, target: str | None) -> None:
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)


def _simulate(cfg: RunConfig, with_log: bool, out_log: str | None) -> int:
    grid = cfg.grid
    path = simulate_path(cfg.model, grid, cfg.refinement, cfg.seed)
    traj = run_hedge(path, grid, cfg.hedge, cfg.policy)
    if traj.halted:
        print(f"warning: CMH infeasible at step {traj.steps[-1].state.index}; trajectory stops there", file=sys.stderr)
    _emit(write_series_csv(path, traj, cfg.contract), cfg.out_series)
    if with_log:
        if out_log is None and cfg.out_series:
            p = Path(cfg.out_series)
            out_log = str(p.with_name(p.stem + ".steps.csv"))
        if out_log:
            Path(out_log).write_text(write_steps_csv(path, traj))
        else:
            sys.stdout.write("\n" + write_steps_csv(path, traj))
    return 0


def _tree(cfg: RunConfig) -> int:
    grid = cfg.grid
    path = simulate_path(cfg.model, grid, cfg.refinement, cfg.seed)
    tree = enumerate_tree(path, grid, cfg.hedge)
    _emit(export_tree(tree, cfg.tree_format), cfg.out_tree)
    return 0


def _validate() -> int:
    results = []
    for check in validation.ALL_CHECKS:
        res = check()
        results.append(res)
        print(res.line(), flush=True)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        cfg = _load(args) if args.config else None
        if args.command == "validate":
            return _validate()
        if args.command == "simulate":
            return _simulate(cfg, False, None)
        if args.command == "hedge":
            return _simulate(cfg, True, args.out_log)
        return _tree(cfg)
    except (ConfigError, ValueError, TreeBudgetError, InfeasibleCMHError) as exc:
        print(f"jdhedge: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
