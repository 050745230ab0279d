"""Simulator for all-pay-auction-based edge server placement."""

from .allocation import Allocation, allocate, allocate_balanced, allocate_random, allocate_round_robin
from .auction import (
    SingletonDecision,
    SingletonPolicy,
    Valuation,
    equilibrium_bid,
    equilibrium_bid_numeric,
    singleton_decision,
    valuation,
    valuation_ability,
)
from .config import SimConfig, load_config
from .errors import ConfigError, ContractViolation, DomainError, NumericalConditioningError
from .population import EndUser, Population, PopulationConfig, generate_population
from .revenue import EconomicParams, SetOutcome, run_set_auction, simulate_once, simulate_revenue, total_revenue
from .sweep import (
    MarketSettings,
    SweepResult,
    fit_polynomial,
    fit_revenue_curve,
    optimal_server_count,
    run_experiment,
    sweep_servers,
)

__version__ = "0.1.0"
