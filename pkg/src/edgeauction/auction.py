"""Valuations and equilibrium bids for the all-pay auction inside one server set.

Each end user draws its valuation from a uniform distribution on
``[0, A]``, where the ability ``A = k * log10(f_t)`` grows with the user's
compute capacity ``f_t`` (MHz). The valuation itself is ``v = A * sqrt(q / Q)``
for an offload of ``q`` KB against the per-slot cap ``Q``.

With ``n >= 2`` users in a set, the symmetric equilibrium bid is

    b = integral_0^v t d(F(t)^(n-1)),   F(t) = t / A,

which for the uniform distribution closes to ``b = (n-1)/n * v**n / A**(n-1)``.
A lone user instead negotiates an entry payment ``e`` with the server; see
:func:`singleton_decision`.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ContractViolation, DomainError

#: Gap kept below the open upper end of the singleton payment interval.
UPPER_EPSILON = 1e-6


class SingletonPolicy(str, Enum):
    """Where in the feasible interval ``[B + log2 q, v/2)`` a lone user's payment lands."""

    LOWER = "lower"
    MIDPOINT = "midpoint"
    UPPER = "upper"


@dataclass(frozen=True)
class Valuation:
    ability: float
    value: float

    def __post_init__(self):
        if not self.ability > 0:
            raise DomainError(f"ability must be positive, got {self.ability}")
        if not 0 <= self.value <= self.ability:
            raise DomainError(f"value {self.value} outside [0, {self.ability}]")


@dataclass(frozen=True)
class SingletonDecision:
    """Outcome of the one-user negotiation.

    ``entry_payment`` and ``eu_utility`` are ``None`` when the server declines.
    """

    served: bool
    entry_payment: Optional[float] = None
    eu_utility: Optional[float] = None


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def valuation_ability(f_t, k):
    """Ability ``A = k * log10(f_t)``; ``f_t`` in MHz, vectorised over ``f_t``."""
    f_t = np.asarray(f_t, dtype=float)
    if not k > 0:
        raise DomainError(f"valuation coefficient k must be positive, got {k}")
    if np.any(~(f_t > 1)):
        raise DomainError("compute capacity must exceed 1 MHz for a positive ability")
    return _scalar_or_array(k * np.log10(f_t))


def valuation(ability, q, q_cap):
    """Valuation ``A * sqrt(q / Q)`` of offloading ``q`` KB."""
    ability = np.asarray(ability, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(~(ability > 0)):
        raise DomainError("ability must be positive")
    if np.any(~(q > 0)) or np.any(q > q_cap):
        raise DomainError(f"offload amount must lie in (0, {q_cap}]")
    return _scalar_or_array(ability * np.sqrt(q / q_cap))


def _check_bid_args(v, ability, n):
    if np.any(~(ability > 0)):
        raise DomainError("ability must be positive")
    if np.any(~(v >= 0)) or np.any(v > ability):
        raise DomainError("valuation must lie in [0, ability]")
    if np.any(n < 2):
        raise ContractViolation("equilibrium bid needs n >= 2; use singleton_decision for n = 1")


def equilibrium_bid(v, ability, n):
    """Closed-form all-pay equilibrium bid for a set of ``n >= 2`` users.

    Vectorised: ``v``, ``ability`` and ``n`` broadcast against each other.
    Evaluated as ``(n-1)/n * A * (v/A)**n`` so large sets do not overflow.
    """
    v = np.asarray(v, dtype=float)
    ability = np.asarray(ability, dtype=float)
    n = np.asarray(n)
    _check_bid_args(v, ability, n)
    return _scalar_or_array((n - 1) / n * ability * (v / ability) ** n)


def equilibrium_bid_numeric(v, ability, n, subdivisions=10_000):
    """Composite Simpson evaluation of the bid integral.

    Integrates ``t * dF^(n-1)/dt = (n-1) t^(n-1) / A^(n-1)`` over ``[0, v]``
    directly, without the closed form. Only used to check
    :func:`equilibrium_bid`. An odd ``subdivisions`` is rounded up to the
    next even number.
    """
    v = float(v)
    ability = float(ability)
    n = int(n)
    _check_bid_args(np.float64(v), np.float64(ability), np.int64(n))
    if subdivisions < 2:
        raise DomainError("Simpson's rule needs at least 2 subdivisions")
    m = subdivisions + subdivisions % 2
    if v == 0.0:
        return 0.0
    t = np.linspace(0.0, v, m + 1)
    integrand = t * (n - 1) * (t / ability) ** (n - 2) / ability
    weights = np.ones(m + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(v / m / 3.0 * np.dot(weights, integrand))


def singleton_payment(v, q, fixed_cost, policy=SingletonPolicy.MIDPOINT):
    """Vectorised core of :func:`singleton_decision`.

    Returns ``(served, payment)`` arrays; ``payment`` is NaN where the server
    declines. Service is feasible iff ``v > 2 * (B + log2 q)``, i.e. the
    interval ``[B + log2 q, v - e)`` admits some payment ``e``.
    """
    policy = SingletonPolicy(policy)
    v = np.asarray(v, dtype=float)
    q = np.asarray(q, dtype=float)
    lower = fixed_cost + np.log2(q)
    upper = v / 2.0
    served = v > 2.0 * lower
    if policy is SingletonPolicy.LOWER:
        e = lower
    elif policy is SingletonPolicy.MIDPOINT:
        e = (lower + upper) / 2.0
    else:
        e = np.maximum(lower, upper - UPPER_EPSILON)
    return served, np.where(served, e, np.nan)


def singleton_decision(v, q, fixed_cost, policy=SingletonPolicy.MIDPOINT) -> SingletonDecision:
    """Decide whether a server with a single user serves it, and at what payment.

    The server always bears ``fixed_cost``; serving also costs ``log2 q``
    (``q`` in KB). It serves only if a payment ``e`` with
    ``B + log2 q <= e < v - e`` exists, and ``policy`` picks ``e`` inside
    that interval.
    """
    if v < 0 or q <= 0 or fixed_cost < 0:
        raise DomainError("singleton decision needs v >= 0, q > 0, B >= 0")
    served, e = singleton_payment(v, q, fixed_cost, policy)
    if not served:
        return SingletonDecision(False)
    e = float(e)
    return SingletonDecision(True, e, float(v) - e)
