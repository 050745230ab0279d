"""Experiment configuration: a JSON document with nested sections.

Every key is optional; missing keys take the parameter-table defaults.
Unknown keys are rejected so typos do not silently fall back to defaults.
"""

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .auction import SingletonPolicy
from .errors import ConfigError
from .population import PopulationConfig
from .revenue import EconomicParams
from .rng import check_seed
from .sweep import DEFAULT_RATIOS, MarketSettings, ratio_grid

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class SweepSettings:
    m_grid: Optional[tuple] = None
    ratio_grid: tuple = DEFAULT_RATIOS
    trials: int = 50
    fit_degree: int = 3
    population_mode: str = "fresh"


@dataclass(frozen=True)
class OutputSettings:
    path: Optional[str] = None
    format: str = "json"


@dataclass(frozen=True)
class SimConfig:
    population: PopulationConfig = field(default_factory=PopulationConfig)
    fixed_cost: float = 10.0
    allocation_strategy: str = "balanced"
    singleton_policy: SingletonPolicy = SingletonPolicy.MIDPOINT
    sweep: SweepSettings = field(default_factory=SweepSettings)
    n_servers: int = 25
    master_seed: int = 0
    output: OutputSettings = field(default_factory=OutputSettings)

    @property
    def economics(self) -> EconomicParams:
        return EconomicParams(self.fixed_cost, self.population.q_cap)

    def market(self) -> MarketSettings:
        return MarketSettings(self.population, self.economics, self.allocation_strategy,
                              self.singleton_policy, self.sweep.population_mode)

    def m_grid(self):
        if self.sweep.m_grid is not None:
            return list(self.sweep.m_grid)
        return ratio_grid(self.population.n_users, self.sweep.ratio_grid)

    def output_path(self, command):
        if self.output.path:
            return self.output.path
        return f"{command}_N{self.population.n_users}.{self.output.format}"

    def validate(self):
        for name, section in (("population", self.population), ("economics", self.economics)):
            try:
                section.validate()
            except ConfigError as exc:
                raise ConfigError(f"{name}.{exc.field}", exc.message) from None
        self.market().validate()
        s = self.sweep
        if s.trials < 1:
            raise ConfigError("sweep.trials", f"need at least one trial, got {s.trials}")
        if s.fit_degree < 2:
            raise ConfigError("sweep.fit_degree", f"degree must be >= 2, got {s.fit_degree}")
        if s.m_grid is not None and (not s.m_grid or min(s.m_grid) < 1):
            raise ConfigError("sweep.m_grid", "must be a non-empty list of counts >= 1")
        if s.m_grid is None and (not s.ratio_grid or any(not 0 < r <= 1 for r in s.ratio_grid)):
            raise ConfigError("sweep.ratio_grid", "ratios must lie in (0, 1]")
        if self.n_servers < 1:
            raise ConfigError("simulate.n_servers", f"need at least one server, got {self.n_servers}")
        check_seed(self.master_seed, "master_seed")
        if self.output.format not in FORMATS:
            raise ConfigError("output.format", f"expected one of {FORMATS}, got {self.output.format!r}")
        return self


# --- parsing -----------------------------------------------------------------

def _number(value, name, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(name, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(name, f"must be finite, got {value!r}")
    return float(value)


def _numbers(value, name, integer=False, nullable=False):
    if value is None and nullable:
        return None
    if not isinstance(value, list):
        raise ConfigError(name, f"expected a list, got {value!r}")
    return tuple(_number(v, f"{name}[{i}]", integer) for i, v in enumerate(value))


def _string(value, name):
    if not isinstance(value, str):
        raise ConfigError(name, f"expected a string, got {value!r}")
    return value


def _section(doc, name, allowed):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, "expected an object")
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}", "unknown key")
    return sec


def config_from_dict(doc) -> SimConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected an object")
    top = ("population", "economics", "allocation", "singleton_policy", "sweep",
           "simulate", "master_seed", "output")
    unknown = sorted(set(doc) - set(top))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    d = SimConfig()

    p = _section(doc, "population", ("n_users", "q_range", "q_cap", "capacity_choices",
                                      "capacity_weights", "k"))
    dp = d.population
    population = PopulationConfig(
        n_users=_number(p.get("n_users", dp.n_users), "population.n_users", integer=True),
        q_range=_numbers(p.get("q_range", list(dp.q_range)), "population.q_range"),
        q_cap=_number(p.get("q_cap", dp.q_cap), "population.q_cap"),
        capacity_choices=_numbers(p.get("capacity_choices", list(dp.capacity_choices)),
                                  "population.capacity_choices"),
        capacity_weights=_numbers(p.get("capacity_weights"), "population.capacity_weights",
                                  nullable=True),
        k=_number(p.get("k", dp.k), "population.k"),
    )

    e = _section(doc, "economics", ("fixed_cost",))
    a = _section(doc, "allocation", ("strategy",))
    s = _section(doc, "sweep", ("m_grid", "ratio_grid", "trials", "fit_degree", "population_mode"))
    ds = d.sweep
    sweep = SweepSettings(
        m_grid=_numbers(s.get("m_grid"), "sweep.m_grid", integer=True, nullable=True),
        ratio_grid=_numbers(s.get("ratio_grid", list(ds.ratio_grid)), "sweep.ratio_grid"),
        trials=_number(s.get("trials", ds.trials), "sweep.trials", integer=True),
        fit_degree=_number(s.get("fit_degree", ds.fit_degree), "sweep.fit_degree", integer=True),
        population_mode=_string(s.get("population_mode", ds.population_mode), "sweep.population_mode"),
    )
    sim = _section(doc, "simulate", ("n_servers",))
    o = _section(doc, "output", ("path", "format"))
    path = o.get("path")
    if path is not None:
        path = _string(path, "output.path")

    policy = _string(doc.get("singleton_policy", d.singleton_policy.value), "singleton_policy")
    try:
        policy = SingletonPolicy(policy)
    except ValueError:
        raise ConfigError("singleton_policy",
                          f"expected one of {[p.value for p in SingletonPolicy]}, got {policy!r}") from None

    cfg = SimConfig(
        population=population,
        fixed_cost=_number(e.get("fixed_cost", d.fixed_cost), "economics.fixed_cost"),
        allocation_strategy=_string(a.get("strategy", d.allocation_strategy), "allocation.strategy"),
        singleton_policy=policy,
        sweep=sweep,
        n_servers=_number(sim.get("n_servers", d.n_servers), "simulate.n_servers", integer=True),
        master_seed=doc.get("master_seed", d.master_seed),
        output=OutputSettings(path, _string(o.get("format", d.output.format), "output.format")),
    )
    return cfg.validate()


def load_config(path) -> SimConfig:
    """Parse and validate a config file. Raises :class:`ConfigError` or ``OSError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)


def config_to_dict(cfg: SimConfig) -> dict:
    """Fully resolved config, in the same shape :func:`config_from_dict` reads."""
    p = cfg.population
    return {
        "population": {
            "n_users": p.n_users,
            "q_range": list(p.q_range),
            "q_cap": p.q_cap,
            "capacity_choices": list(p.capacity_choices),
            "capacity_weights": None if p.capacity_weights is None else list(p.capacity_weights),
            "k": p.k,
        },
        "economics": {"fixed_cost": cfg.fixed_cost},
        "allocation": {"strategy": cfg.allocation_strategy},
        "singleton_policy": SingletonPolicy(cfg.singleton_policy).value,
        "sweep": {
            "m_grid": None if cfg.sweep.m_grid is None else list(cfg.sweep.m_grid),
            "ratio_grid": list(cfg.sweep.ratio_grid),
            "trials": cfg.sweep.trials,
            "fit_degree": cfg.sweep.fit_degree,
            "population_mode": cfg.sweep.population_mode,
        },
        "simulate": {"n_servers": cfg.n_servers},
        "master_seed": cfg.master_seed,
        "output": {"path": cfg.output.path, "format": cfg.output.format},
    }


def apply_overrides(cfg: SimConfig, seed=None, trials=None, users=None, servers=None,
                    output=None, fmt=None, fit_degree=None) -> SimConfig:
    """Apply command-line flag values (``None`` = keep the file value)."""
    if users is not None:
        cfg = replace(cfg, population=replace(cfg.population, n_users=users))
    if trials is not None:
        cfg = replace(cfg, sweep=replace(cfg.sweep, trials=trials))
    if fit_degree is not None:
        cfg = replace(cfg, sweep=replace(cfg.sweep, fit_degree=fit_degree))
    if servers is not None:
        cfg = replace(cfg, n_servers=servers)
    if seed is not None:
        cfg = replace(cfg, master_seed=seed)
    if output is not None or fmt is not None:
        cfg = replace(cfg, output=OutputSettings(output if output is not None else cfg.output.path,
                                                 fmt if fmt is not None else cfg.output.format))
    return cfg.validate()
