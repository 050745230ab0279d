"""Monte Carlo sweep over the number of deployed servers, plus curve fit and argmax.

For every candidate server count ``M`` and trial ``t`` the sweep draws a
population and an allocation from seeds keyed by ``(M, t)``, so a point's
trials do not depend on which other points are in the grid.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .allocation import STRATEGIES, allocate
from .auction import SingletonPolicy
from .errors import ConfigError, NumericalConditioningError
from .population import PopulationConfig, generate_population
from .revenue import EconomicParams, simulate_revenue
from .rng import check_seed, derive_seed

log = logging.getLogger(__name__)

DEFAULT_RATIOS = tuple(round(0.05 * i, 2) for i in range(1, 20))
POPULATION_MODES = ("fresh", "fixed")
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class MarketSettings:
    """Everything needed to simulate one market, minus the server count."""

    population: PopulationConfig = field(default_factory=PopulationConfig)
    economics: EconomicParams = field(default_factory=EconomicParams)
    allocation_strategy: str = "balanced"
    singleton_policy: SingletonPolicy = SingletonPolicy.MIDPOINT
    population_mode: str = "fresh"

    def validate(self):
        self.population.validate()
        self.economics.validate()
        if self.economics.q_cap != self.population.q_cap:
            raise ConfigError("economics.q_cap", "must equal population.q_cap")
        if self.allocation_strategy not in STRATEGIES:
            raise ConfigError("allocation.strategy",
                              f"unknown strategy {self.allocation_strategy!r}; expected one of {STRATEGIES}")
        SingletonPolicy(self.singleton_policy)
        if self.population_mode not in POPULATION_MODES:
            raise ConfigError("sweep.population_mode",
                              f"expected one of {POPULATION_MODES}, got {self.population_mode!r}")
        return self


@dataclass(frozen=True)
class SweepPoint:
    n_servers: int
    mean: float
    stddev: float
    trials: int

    @property
    def stderr(self):
        return self.stddev / math.sqrt(self.trials)


@dataclass(frozen=True)
class PolynomialFit:
    """Least-squares polynomial in ``M``.

    ``coef`` is in ascending degree of the scaled variable
    ``x = (2M - lo - hi) / (hi - lo)``, which maps ``domain = (lo, hi)`` onto
    ``[-1, 1]``.
    """

    coef: tuple
    domain: tuple
    residual_norm: float

    @property
    def degree(self):
        return len(self.coef) - 1

    def polynomial(self) -> Polynomial:
        return Polynomial(self.coef, domain=self.domain, window=(-1.0, 1.0))

    def power_coef(self):
        """Coefficients in ascending powers of ``M`` itself (less well conditioned)."""
        return tuple(float(c) for c in self.polynomial().convert().coef)

    def __call__(self, m):
        return self.polynomial()(m)

    def to_dict(self):
        return {"coef": list(self.coef), "domain": list(self.domain),
                "degree": self.degree, "residual_norm": self.residual_norm}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["coef"]), tuple(d["domain"]), d["residual_norm"])


@dataclass(frozen=True)
class Optimum:
    n_servers: int
    ratio: float
    revenue: float
    m_continuous: float
    at_endpoint: bool


@dataclass(frozen=True)
class SweepResult:
    n_users: int
    points: tuple
    fit: Optional[PolynomialFit] = None
    optimum: Optional[Optimum] = None


def ratio_grid(n_users, ratios=DEFAULT_RATIOS):
    """Server counts ``ceil(r * N)`` for each ratio, deduplicated, at least 1."""
    # round() first so 0.15 * 100 does not ceil to 16
    ms = {max(1, math.ceil(round(r * n_users, 9))) for r in ratios}
    return sorted(ms)


def _trial_revenue(settings: MarketSettings, n_servers, trial, master_seed, cache):
    pop_cfg = settings.population
    if settings.population_mode == "fixed":
        if trial not in cache:
            cache[trial] = generate_population(pop_cfg, derive_seed(master_seed, "population", trial))
        population = cache[trial]
    else:
        population = generate_population(pop_cfg, derive_seed(master_seed, "population", n_servers, trial))
    allocation = allocate(settings.allocation_strategy, pop_cfg.n_users, n_servers,
                          derive_seed(master_seed, "allocation", n_servers, trial))
    return simulate_revenue(population, allocation, settings.economics, settings.singleton_policy)


def sweep_servers(settings: MarketSettings, m_grid, trials: int, master_seed: int) -> SweepResult:
    """Mean and sample standard deviation of total revenue at each ``M`` in ``m_grid``."""
    settings.validate()
    master_seed = check_seed(master_seed, "master_seed")
    m_grid = [int(m) for m in m_grid]
    if not m_grid:
        raise ConfigError("sweep.m_grid", "grid is empty")
    if any(m < 1 for m in m_grid):
        raise ConfigError("sweep.m_grid", "every server count must be >= 1")
    if trials < 1:
        raise ConfigError("sweep.trials", f"need at least one trial, got {trials}")

    cache = {}
    points = []
    for m in m_grid:
        w = [_trial_revenue(settings, m, t, master_seed, cache) for t in range(trials)]
        mean = math.fsum(w) / trials
        std = math.sqrt(math.fsum((x - mean) ** 2 for x in w) / (trials - 1)) if trials > 1 else 0.0
        points.append(SweepPoint(m, mean, std, trials))
    return SweepResult(settings.population.n_users, tuple(points))


def fit_polynomial(m, y, degree=3) -> PolynomialFit:
    """Least-squares polynomial of ``degree`` through ``(m, y)`` on a scaled abscissa."""
    m = np.asarray(m, dtype=float)
    y = np.asarray(y, dtype=float)
    if degree < 2:
        raise ConfigError("sweep.fit_degree", f"degree must be >= 2, got {degree}")
    if len(np.unique(m)) <= degree:
        raise ConfigError("sweep.fit_degree",
                          f"{len(np.unique(m))} distinct points cannot determine a degree-{degree} fit")
    with warnings.catch_warnings():
        # rank loss is reported below as an exception instead
        warnings.simplefilter("ignore", np.exceptions.RankWarning)
        poly, (_, rank, sv, _) = Polynomial.fit(m, y, degree, full=True)
    if rank < degree + 1 or sv[0] / sv[-1] > MAX_CONDITION:
        raise NumericalConditioningError(f"degree-{degree} fit is ill-conditioned (rank {rank})")
    residual = float(np.linalg.norm(y - poly(m)))
    return PolynomialFit(tuple(float(c) for c in poly.coef),
                         tuple(float(d) for d in poly.domain), residual)


def fit_revenue_curve(points, degree=3) -> PolynomialFit:
    return fit_polynomial([p.n_servers for p in points], [p.mean for p in points], degree)


def optimal_server_count(fit: PolynomialFit, m_range, n_users) -> Optimum:
    """Maximise the fitted curve over the closed interval ``m_range``.

    Candidates are the interval endpoints and the real stationary points
    inside it. The winner is rounded to the nearest integer server count in
    range. ``at_endpoint`` is set when the maximum sits on the boundary,
    meaning the grid probably does not bracket the true optimum.
    """
    lo, hi = float(min(m_range)), float(max(m_range))
    if n_users < 1:
        raise ConfigError("n_users", "ratio needs at least one user")
    p = fit.polynomial()
    roots = p.deriv().roots()
    tol = 1e-9 * max(1.0, hi - lo)
    stationary = [float(r.real) for r in np.atleast_1d(roots)
                  if abs(r.imag) <= tol and lo - tol <= r.real <= hi + tol]
    candidates = [(lo, True), (hi, True)] + [(min(max(r, lo), hi), False) for r in stationary]
    values = [float(p(x)) for x, _ in candidates]
    best = int(np.argmax(values))
    # endpoints come first, so a stationary point sitting on the boundary still flags it
    m_cont, at_endpoint = candidates[best]

    m_star = int(math.floor(m_cont + 0.5))
    m_star = min(max(m_star, math.ceil(lo)), math.floor(hi))
    if at_endpoint:
        log.warning("fitted revenue peaks at the grid boundary M=%s; widen the grid", m_star)
    return Optimum(m_star, m_star / n_users, float(p(m_star)), m_cont, at_endpoint)


def run_experiment(settings: MarketSettings, m_grid, trials, master_seed, degree=3) -> SweepResult:
    """Sweep, fit and locate the revenue-maximising server count."""
    result = sweep_servers(settings, m_grid, trials, master_seed)
    fit = fit_revenue_curve(result.points, degree)
    optimum = optimal_server_count(fit, (min(m_grid), max(m_grid)), result.n_users)
    return SweepResult(result.n_users, result.points, fit, optimum)
