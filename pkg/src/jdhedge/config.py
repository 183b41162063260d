"""Flat ``key = value`` run configuration.

Keys (one per line, ``#`` starts a comment)::

    mu, sigma, lambda        model coefficients, per month
    jump                     constant:<c>  or  discrete:<v>:<p>,<v>:<p>,...
    s0, strike, T            spot, call strike, horizon in months
    n_rebalances             number of rebalancing decisions (grid has n_rebalances + 1 intervals)
    refinement               sub-steps per interval for the series output
    kappa                    proportional cost, in (0,1)
    method                   cmh | clh
    policy                   long | short | sequence:<LS...>
    infeasible               report | fallback
    seed                     integer
    out_series, out_tree     output paths (stdout when absent)
    tree_format              ascii | dot | structured
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .blackscholes import CallContract
from .hedging import HedgeConfig, InfeasiblePolicy, Method, parse_policy
from .model import Constant, Discrete, JumpLaw, ModelParams, RebalanceGrid


class ConfigError(ValueError):
    pass


REQUIRED = ("mu", "sigma", "lambda", "jump", "T", "n_rebalances", "kappa")
DEFAULTS = {
    "s0": "100",
    "strike": "100",
    "refinement": "20",
    "method": "clh",
    "policy": "long",
    "infeasible": "report",
    "seed": "0",
    "out_series": "",
    "out_tree": "",
    "tree_format": "ascii",
}
KEYS = REQUIRED + tuple(DEFAULTS)
TREE_FORMATS = ("ascii", "dot", "structured")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    horizon: float
    n_rebalances: int
    refinement: int
    kappa: float
    method: Method
    policy: str
    infeasible: InfeasiblePolicy
    strike: float
    seed: int
    out_series: Optional[str] = None
    out_tree: Optional[str] = None
    tree_format: str = "ascii"

    @property
    def grid(self) -> RebalanceGrid:
        return RebalanceGrid.uniform(self.horizon, self.n_rebalances + 1)

    @property
    def contract(self) -> CallContract:
        return CallContract(self.strike, self.horizon)

    @property
    def hedge(self) -> HedgeConfig:
        return HedgeConfig(kappa=self.kappa, method=self.method, payoff=self.contract, infeasible=self.infeasible)


def parse_jump(text: str) -> JumpLaw:
    kind, _, body = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "constant":
        return Constant(float(body))
    if kind == "discrete":
        values, probs = [], []
        for item in body.split(","):
            v, p = item.rsplit(":", 1)
            values.append(float(v))
            probs.append(float(p))
        return Discrete(tuple(values), tuple(probs))
    raise ValueError(f"unknown jump law {text!r}")


def format_jump(law: JumpLaw) -> str:
    if isinstance(law, Constant):
        return f"constant:{law.c!r}"
    return "discrete:" + ",".join(f"{v!r}:{p!r}" for v, p in zip(law.values, law.probs))


def _field(name: str, conv, raw: str):
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def load_config(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"{key}: missing required key")
    for key, value in DEFAULTS.items():
        raw.setdefault(key, value)

    mu = _field("mu", float, raw["mu"])
    sigma = _field("sigma", float, raw["sigma"])
    lam = _field("lambda", float, raw["lambda"])
    s0 = _field("s0", float, raw["s0"])
    jump = _field("jump", parse_jump, raw["jump"])
    if not sigma > 0:
        raise ConfigError("sigma: must be > 0")
    if not lam >= 0:
        raise ConfigError("lambda: must be >= 0")
    if not s0 > 0:
        raise ConfigError("s0: must be > 0")
    try:
        model = ModelParams(mu, sigma, lam, jump, s0)
    except ValueError as exc:  # non-finite values; message names the field
        raise ConfigError(str(exc)) from None

    horizon = _field("T", float, raw["T"])
    if not horizon > 0:
        raise ConfigError("T: must be > 0")
    n_rebalances = _field("n_rebalances", int, raw["n_rebalances"])
    if n_rebalances < 1:
        raise ConfigError("n_rebalances: must be >= 1")
    refinement = _field("refinement", int, raw["refinement"])
    if refinement < 1:
        raise ConfigError("refinement: must be >= 1")
    kappa = _field("kappa", float, raw["kappa"])
    if not 0 < kappa < 1:
        raise ConfigError("kappa: kappa must lie in (0,1)")
    method = _field("method", Method, raw["method"].lower())
    policy = raw["policy"]
    _field("policy", parse_policy, policy)
    infeasible = _field("infeasible", InfeasiblePolicy, raw["infeasible"].lower())
    strike = _field("strike", float, raw["strike"])
    if not strike > 0:
        raise ConfigError("strike: must be > 0")
    seed = _field("seed", int, raw["seed"])
    tree_format = raw["tree_format"]
    if tree_format not in TREE_FORMATS:
        raise ConfigError(f"tree_format: must be one of {', '.join(TREE_FORMATS)}")
    return RunConfig(
        model=model,
        horizon=horizon,
        n_rebalances=n_rebalances,
        refinement=refinement,
        kappa=kappa,
        method=method,
        policy=policy,
        infeasible=infeasible,
        strike=strike,
        seed=seed,
        out_series=raw["out_series"] or None,
        out_tree=raw["out_tree"] or None,
        tree_format=tree_format,
    )


def dump_config(cfg: RunConfig) -> str:
    """Serialise so that ``load_config(dump_config(cfg)) == cfg``."""
    m = cfg.model
    rows = [
        ("mu", repr(m.mu)),
        ("sigma", repr(m.sigma)),
        ("lambda", repr(m.lam)),
        ("jump", format_jump(m.jump)),
        ("s0", repr(m.s0)),
        ("strike", repr(cfg.strike)),
        ("T", repr(cfg.horizon)),
        ("n_rebalances", str(cfg.n_rebalances)),
        ("refinement", str(cfg.refinement)),
        ("kappa", repr(cfg.kappa)),
        ("method", cfg.method.value),
        ("policy", cfg.policy),
        ("infeasible", cfg.infeasible.value),
        ("seed", str(cfg.seed)),
        ("out_series", cfg.out_series or ""),
        ("out_tree", cfg.out_tree or ""),
        ("tree_format", cfg.tree_format),
    ]
    return "".join(f"{k} = {v}\n" for k, v in rows if v != "")
