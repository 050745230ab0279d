"""Heterogeneous end-user populations.

Defaults follow the experiment's parameter table: offloads uniform in
[100, 500] KB against a 500 KB cap, capacities {10, 100, 1000} MHz chosen
uniformly, valuation coefficient k = 10.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .auction import valuation, valuation_ability
from .errors import ConfigError
from .rng import substream


@dataclass(frozen=True)
class EndUser:
    id: int
    q: float
    f_t: float
    ability: float
    valuation: float


@dataclass(frozen=True)
class PopulationConfig:
    n_users: int = 100
    q_range: tuple = (100.0, 500.0)
    q_cap: float = 500.0
    capacity_choices: tuple = (10.0, 100.0, 1000.0)
    capacity_weights: Optional[tuple] = None
    k: float = 10.0

    def validate(self):
        if isinstance(self.n_users, bool) or not isinstance(self.n_users, int) or self.n_users < 0:
            raise ConfigError("n_users", f"must be a non-negative integer, got {self.n_users!r}")
        _check_q_range(self.q_range)
        q_min, q_max = self.q_range
        if not q_max <= self.q_cap:
            raise ConfigError("q_range", f"q_max {q_max} exceeds q_cap {self.q_cap}")
        _check_weights(self.capacity_choices, self.capacity_weights)
        if any(not c > 1 for c in self.capacity_choices):
            raise ConfigError("capacity_choices", "every capacity must exceed 1 MHz")
        if not self.k > 0:
            raise ConfigError("k", f"valuation coefficient must be positive, got {self.k}")
        return self


def _check_q_range(q_range):
    if len(q_range) != 2:
        raise ConfigError("q_range", "expected [q_min, q_max]")
    q_min, q_max = q_range
    if not q_min > 0:
        raise ConfigError("q_range", f"q_min must be positive, got {q_min}")
    if not q_min <= q_max:
        raise ConfigError("q_range", f"inverted range [{q_min}, {q_max}]")


def _check_weights(choices, weights):
    if len(choices) == 0:
        raise ConfigError("capacity_choices", "must not be empty")
    if weights is None:
        return
    if len(weights) != len(choices):
        raise ConfigError("capacity_weights", "must match capacity_choices in length")
    if any(not w >= 0 for w in weights) or not sum(weights) > 0:
        raise ConfigError("capacity_weights", "weights must be non-negative with a positive sum")


class Population(Sequence):
    """Immutable column store of end users; indexing yields :class:`EndUser`.

    User ids are ``0 .. n-1`` and coincide with positions.
    """

    def __init__(self, q, f_t, ability, valuation):
        cols = [np.array(c, dtype=float) for c in (q, f_t, ability, valuation)]
        if len({c.shape for c in cols}) != 1 or cols[0].ndim != 1:
            raise ValueError("population columns must be 1-d and equally long")
        for c in cols:
            c.flags.writeable = False
        self.q, self.f_t, self.ability, self.valuation = cols

    @classmethod
    def from_users(cls, users):
        """Build from :class:`EndUser` records whose ids are ``0 .. n-1`` in order."""
        users = list(users)
        if [u.id for u in users] != list(range(len(users))):
            raise ValueError("user ids must be 0..n-1 in order")
        return cls(
            [u.q for u in users],
            [u.f_t for u in users],
            [u.ability for u in users],
            [u.valuation for u in users],
        )

    def __len__(self):
        return len(self.q)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        i = range(len(self))[i]
        return EndUser(i, float(self.q[i]), float(self.f_t[i]), float(self.ability[i]),
                       float(self.valuation[i]))

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return all(np.array_equal(getattr(self, c), getattr(other, c))
                   for c in ("q", "f_t", "ability", "valuation"))

    __hash__ = None

    def __repr__(self):
        return f"Population(n_users={len(self)})"


def sample_offload_amount(rng: np.random.Generator, q_range, size=None):
    """Offload amount(s) in KB, uniform on ``q_range``."""
    _check_q_range(q_range)
    q_min, q_max = q_range
    if q_min == q_max:
        return float(q_min) if size is None else np.full(size, float(q_min))
    return rng.uniform(q_min, q_max, size)


def sample_capacity(rng: np.random.Generator, capacity_choices, weights=None, size=None):
    """Compute capacity (MHz) drawn from ``capacity_choices`` by ``weights`` (uniform if None)."""
    _check_weights(capacity_choices, weights)
    choices = np.asarray(capacity_choices, dtype=float)
    p = None
    if weights is not None:
        p = np.asarray(weights, dtype=float)
        p = p / p.sum()
    out = rng.choice(choices, size=size, p=p)
    return float(out) if size is None else out


def generate_population(config: PopulationConfig, seed: int) -> Population:
    """Draw ``config.n_users`` users; identical ``(config, seed)`` gives an identical population."""
    config.validate()
    rng = substream(seed, "population")
    n = config.n_users
    q = sample_offload_amount(rng, config.q_range, size=n)
    f_t = sample_capacity(rng, config.capacity_choices, config.capacity_weights, size=n)
    if n == 0:
        return Population([], [], [], [])
    ability = valuation_ability(f_t, config.k)
    return Population(q, f_t, ability, valuation(ability, q, config.q_cap))
