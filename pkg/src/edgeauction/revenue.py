"""Per-server auctions and provider revenue.

A server with ``n >= 2`` users runs an all-pay auction: every user pays its
equilibrium bid, the highest bidder is served, and the server earns

    U = sum(bids) - B - log2(q_winner).

A single user is served only if the singleton negotiation succeeds
(``U = e - B - log2 q``); otherwise, and for servers with no users, ``U = -B``.
Provider revenue is the sum of ``U`` over all deployed servers.

:func:`run_set_auction` / :func:`simulate_once` work set by set on
:class:`EndUser` records and return full outcomes. :func:`simulate_revenue`
computes the same total with array operations and is what the sweep uses.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .allocation import Allocation
from .auction import SingletonPolicy, equilibrium_bid, singleton_decision, singleton_payment
from .errors import ConfigError, ContractViolation

SERVED = "served"
DECLINED = "declined-singleton"
IDLE = "idle"


@dataclass(frozen=True)
class EconomicParams:
    fixed_cost: float = 10.0
    q_cap: float = 500.0

    def validate(self):
        if not self.fixed_cost >= 0:
            raise ConfigError("fixed_cost", f"must be non-negative, got {self.fixed_cost}")
        if not self.q_cap > 0:
            raise ConfigError("q_cap", f"must be positive, got {self.q_cap}")
        return self


@dataclass(frozen=True)
class SetOutcome:
    server_id: int
    set_size: int
    user_ids: tuple
    bids: tuple
    winner_id: Optional[int]
    revenue: float
    status: str

    def to_dict(self):
        return {
            "server_id": self.server_id,
            "set_size": self.set_size,
            "user_ids": list(self.user_ids),
            "bids": list(self.bids),
            "winner_id": self.winner_id,
            "revenue": self.revenue,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["server_id"], d["set_size"], tuple(d["user_ids"]), tuple(d["bids"]),
                   d["winner_id"], d["revenue"], d["status"])


def run_set_auction(users, params: EconomicParams, policy=SingletonPolicy.MIDPOINT,
                    server_id: int = 0) -> SetOutcome:
    """Auction one server's set of users (any sequence of :class:`EndUser`)."""
    users = list(users)
    ids = tuple(u.id for u in users)
    if len(set(ids)) != len(ids):
        raise ContractViolation(f"duplicate user ids in set {server_id}")
    B = params.fixed_cost
    n = len(users)
    if n == 0:
        return SetOutcome(server_id, 0, (), (), None, -B, IDLE)
    if n == 1:
        u = users[0]
        decision = singleton_decision(u.valuation, u.q, B, policy)
        if not decision.served:
            return SetOutcome(server_id, 1, ids, (), None, -B, DECLINED)
        e = decision.entry_payment
        return SetOutcome(server_id, 1, ids, (e,), u.id, e - B - math.log2(u.q), SERVED)

    bids = tuple(float(equilibrium_bid(u.valuation, u.ability, n)) for u in users)
    # highest bid wins; ties go to the lowest user id
    w = min(range(n), key=lambda i: (-bids[i], users[i].id))
    revenue = math.fsum(bids) - B - math.log2(users[w].q)
    return SetOutcome(server_id, n, ids, bids, users[w].id, revenue, SERVED)


def total_revenue(outcomes) -> float:
    """Sum of per-server revenues (correctly rounded, so order does not matter)."""
    return math.fsum(o.revenue for o in outcomes)


def _check_match(population, allocation: Allocation):
    if allocation.n_users != len(population):
        raise ContractViolation(
            f"allocation covers {allocation.n_users} users but the population has {len(population)}")


def simulate_once(population, allocation: Allocation, params: EconomicParams,
                  policy=SingletonPolicy.MIDPOINT):
    """Run every server's auction; returns ``(outcomes, total revenue)``."""
    _check_match(population, allocation)
    outcomes = [
        run_set_auction([population[int(i)] for i in allocation.members(j)], params, policy, j)
        for j in range(allocation.n_servers)
    ]
    return outcomes, total_revenue(outcomes)


def simulate_revenue(population, allocation: Allocation, params: EconomicParams,
                     policy=SingletonPolicy.MIDPOINT) -> float:
    """Total revenue of one market, vectorised over users and sets."""
    _check_match(population, allocation)
    B = params.fixed_cost
    M = allocation.n_servers
    sizes = allocation.set_sizes
    revenue = np.full(M, -B)

    order = allocation.order
    set_of = np.repeat(np.arange(M), sizes)
    n_of = sizes[set_of]
    q = population.q[order]

    multi = n_of >= 2
    if np.any(multi):
        bids = equilibrium_bid(population.valuation[order][multi],
                               population.ability[order][multi], n_of[multi])
        sets = set_of[multi]
        ids = order[multi]
        # winner: first row per set after sorting by (set, -bid, id)
        rank = np.lexsort((ids, -bids, sets))
        first = rank[np.r_[True, sets[rank][1:] != sets[rank][:-1]]]
        win_sets = sets[first]
        bid_sums = np.bincount(sets, weights=bids, minlength=M)
        revenue[win_sets] = bid_sums[win_sets] - B - np.log2(q[multi][first])

    single = n_of == 1
    if np.any(single):
        served, e = singleton_payment(population.valuation[order][single], q[single], B, policy)
        s = set_of[single][served]
        revenue[s] = e[served] - B - np.log2(q[single][served])

    return math.fsum(revenue)
