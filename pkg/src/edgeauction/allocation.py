"""Partitions of users into per-server auction sets."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rng import substream

STRATEGIES = ("balanced", "round_robin", "random")


@dataclass(frozen=True, eq=False)
class Allocation:
    """Users grouped by server, stored as a permutation plus set boundaries.

    Set ``j`` holds ``order[offsets[j]:offsets[j + 1]]``. Empty sets are
    allowed (idle servers).
    """

    order: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.int64)
        offsets = np.asarray(self.offsets, dtype=np.int64)
        if offsets.ndim != 1 or len(offsets) < 2:
            raise ConfigError("n_servers", "an allocation needs at least one server")
        if offsets[0] != 0 or offsets[-1] != len(order) or np.any(np.diff(offsets) < 0):
            raise ValueError("offsets must rise from 0 to len(order)")
        if not np.array_equal(np.sort(order), np.arange(len(order))):
            raise ValueError("sets must partition the user ids 0..n-1")
        order.flags.writeable = False
        offsets.flags.writeable = False
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_sets(cls, sets):
        sets = [list(s) for s in sets]
        order = [u for s in sets for u in s]
        offsets = np.concatenate([[0], np.cumsum([len(s) for s in sets])])
        return cls(np.array(order, dtype=np.int64), offsets)

    @property
    def n_servers(self) -> int:
        return len(self.offsets) - 1

    @property
    def n_users(self) -> int:
        return len(self.order)

    @property
    def set_sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def assignments(self):
        """Tuple of user-id tuples, one per server."""
        return tuple(tuple(int(u) for u in self.members(j)) for j in range(self.n_servers))

    def members(self, j) -> np.ndarray:
        return self.order[self.offsets[j]:self.offsets[j + 1]]

    def labels(self) -> np.ndarray:
        """Server index of every user, indexed by user id."""
        out = np.empty(self.n_users, dtype=np.int64)
        out[self.order] = np.repeat(np.arange(self.n_servers), self.set_sizes)
        return out

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return np.array_equal(self.order, other.order) and np.array_equal(self.offsets, other.offsets)

    __hash__ = None


def _check_counts(n_users, n_servers):
    if n_users < 0:
        raise ConfigError("n_users", f"must be non-negative, got {n_users}")
    if n_servers < 1:
        raise ConfigError("n_servers", f"need at least one server, got {n_servers}")


def _from_labels(labels, n_servers):
    # stable sort keeps ascending user ids inside each set
    order = np.argsort(labels, kind="stable")
    offsets = np.concatenate([[0], np.cumsum(np.bincount(labels, minlength=n_servers))])
    return Allocation(order, offsets)


def allocate_balanced(n_users: int, n_servers: int, seed: int) -> Allocation:
    """Shuffle users, then cut into sets whose sizes differ by at most one.

    The first ``n_users % n_servers`` sets get the extra user.
    """
    _check_counts(n_users, n_servers)
    perm = substream(seed, "allocation/balanced").permutation(n_users)
    base, extra = divmod(n_users, n_servers)
    sizes = np.full(n_servers, base)
    sizes[:extra] += 1
    return Allocation(perm, np.concatenate([[0], np.cumsum(sizes)]))


def allocate_round_robin(n_users: int, n_servers: int) -> Allocation:
    """User ``i`` goes to server ``i % n_servers``."""
    _check_counts(n_users, n_servers)
    return _from_labels(np.arange(n_users) % n_servers, n_servers)


def allocate_random(n_users: int, n_servers: int, seed: int) -> Allocation:
    """Each user picks a server independently and uniformly; servers may end up idle."""
    _check_counts(n_users, n_servers)
    labels = substream(seed, "allocation/random").integers(0, n_servers, n_users)
    return _from_labels(labels, n_servers)


def allocate(strategy: str, n_users: int, n_servers: int, seed: int) -> Allocation:
    if strategy == "balanced":
        return allocate_balanced(n_users, n_servers, seed)
    if strategy == "round_robin":
        return allocate_round_robin(n_users, n_servers)
    if strategy == "random":
        return allocate_random(n_users, n_servers, seed)
    raise ConfigError("allocation.strategy", f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
