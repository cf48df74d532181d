"""The word order permutation ring.

The six orderings of S, V and O form a 6-cycle when two orders are joined
whenever one turns into the other by swapping two adjacent constituents.
This module builds that graph, measures ring distance and total
constituent displacement between orders, and relates the two distances
with an exact Kendall tau-b test.
"""

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import UnknownOrderError

CONSTITUENTS = ("S", "V", "O")


class Order(str, enum.Enum):
    SOV = "SOV"
    SVO = "SVO"
    VSO = "VSO"
    VOS = "VOS"
    OVS = "OVS"
    OSV = "OSV"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, token):
        """Case-insensitive lookup of an order token such as ``"svo"``."""
        if isinstance(token, cls):
            return token
        try:
            return cls(str(token).strip().upper())
        except ValueError:
            raise UnknownOrderError(f"unknown order token {token!r}") from None

    @property
    def index(self):
        return _INDEX[self]

    def position(self, constituent):
        """0-based position of ``constituent`` ("S", "V" or "O")."""
        return self.value.index(constituent)

    def precedes(self, first, second):
        """True if ``first`` is placed before ``second`` (not necessarily adjacently)."""
        return self.position(first) < self.position(second)


ORDERS = tuple(Order)
_INDEX = {order: i for i, order in enumerate(ORDERS)}


def _adjacent_swaps(order):
    s = order.value
    for i in range(len(s) - 1):
        yield Order(s[:i] + s[i + 1] + s[i] + s[i + 2:])


@lru_cache(maxsize=None)
def build_ring():
    """Adjacency of the permutation ring as ``{order: frozenset(neighbors)}``.

    Edges are found by enumerating every swap of two adjacent constituents,
    so the cycle structure is computed rather than transcribed.
    """
    return {order: frozenset(_adjacent_swaps(order)) for order in ORDERS}


def neighbors(order):
    return build_ring()[Order.parse(order)]


def ring_cycle(start=Order.SOV):
    """The vertices of the ring in cycle order, starting at ``start``.

    The walk leaves ``start`` toward whichever neighbor comes first in
    :data:`ORDERS`, which for SOV yields SOV-SVO-VSO-VOS-OVS-OSV.
    """
    ring = build_ring()
    start = Order.parse(start)
    prev, current = start, min(ring[start], key=lambda o: o.index)
    cycle = [start]
    while current != start:
        cycle.append(current)
        (nxt,) = ring[current] - {prev}
        prev, current = current, nxt
    return tuple(cycle)


@lru_cache(maxsize=None)
def _bfs_distances(source):
    ring = build_ring()
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in ring[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def ring_distance(x, y):
    """Shortest-path distance between two orders on the ring (0 to 3)."""
    return _bfs_distances(Order.parse(x))[Order.parse(y)]


def distance_matrix():
    """6x6 nested list of ring distances, rows and columns in :data:`ORDERS` order."""
    return [[ring_distance(x, y) for y in ORDERS] for x in ORDERS]


def neighbor_count(d):
    """Number of orders at ring distance ``d`` from any given order.

    Parameters
    ----------
    d : int
        Ring distance, 1, 2 or 3.

    Returns
    -------
    int
        2 for d in {1, 2}; 1 for d = 3.
    """
    if isinstance(d, bool) or not isinstance(d, int) or not 1 <= d <= 3:
        raise ValueError(f"ring distance must be 1, 2 or 3, got {d!r}")
    return 1 if d == 3 else 2


@dataclass(frozen=True)
class Displacement:
    """Per-constituent position shifts between two orders."""

    s: int
    v: int
    o: int

    @property
    def total(self):
        return self.s + self.v + self.o

    def __getitem__(self, constituent):
        return {"S": self.s, "V": self.v, "O": self.o}[constituent]


def displacement(x, y):
    x, y = Order.parse(x), Order.parse(y)
    shifts = {c: abs(x.position(c) - y.position(c)) for c in CONSTITUENTS}
    return Displacement(s=shifts["S"], v=shifts["V"], o=shifts["O"])


class DistanceRow(NamedTuple):
    order: Order
    distance: int
    displacement: Displacement


def distance_table(base):
    """Ring distance and displacement from ``base`` to each of the six orders.

    Rows follow :data:`ORDERS`; the multiset of (total displacement,
    distance) pairs is the same for every base.
    """
    base = Order.parse(base)
    return [DistanceRow(o, ring_distance(base, o), displacement(base, o)) for o in ORDERS]


class KendallTau(NamedTuple):
    tau: float
    pvalue: float
    """Exact two-sided permutation p-value, P(|tau*| >= |tau|)."""
    pvalue_greater: float
    """Exact one-sided permutation p-value, P(tau* >= tau)."""


MAX_EXACT_LENGTH = 8
_TAU_EPS = 1e-12


def _tau_b(a, b):
    n = len(a)
    concordant = discordant = ties_a = ties_b = 0
    for i, j in itertools.combinations(range(n), 2):
        da = a[i] - a[j]
        db = b[i] - b[j]
        if da == 0:
            ties_a += 1
        if db == 0:
            ties_b += 1
        sign = da * db
        if sign > 0:
            concordant += 1
        elif sign < 0:
            discordant += 1
    pairs = n * (n - 1) // 2
    denom = math.sqrt((pairs - ties_a) * (pairs - ties_b))
    return (concordant - discordant) / denom


def kendall_tau_b(a: Sequence[float], b: Sequence[float]) -> KendallTau:
    """Tie-corrected Kendall rank correlation with an exact permutation test.

    The p-values come from evaluating tau-b for every one of the n!
    arrangements of ``b`` against ``a`` (arrangements of equal values are
    counted separately), so the test is exact for small samples.

    Raises
    ------
    ValueError
        On length mismatch, fewer than two observations, more than
        ``MAX_EXACT_LENGTH`` observations, or a constant sequence.
    """
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    if len(a) < 2:
        raise ValueError("need at least two observations")
    if len(a) > MAX_EXACT_LENGTH:
        raise ValueError(f"exact test limited to n <= {MAX_EXACT_LENGTH}")
    if len(set(a)) == 1 or len(set(b)) == 1:
        raise ValueError("tau is undefined for a constant sequence")

    tau = _tau_b(a, b)
    total = at_least = at_least_abs = 0
    for perm in itertools.permutations(b):
        t = _tau_b(a, perm)
        total += 1
        if t >= tau - _TAU_EPS:
            at_least += 1
        if abs(t) >= abs(tau) - _TAU_EPS:
            at_least_abs += 1
    return KendallTau(tau, at_least_abs / total, at_least / total)


def displacement_distance_correlation(base=Order.SOV):
    """Kendall tau-b between total displacement and ring distance over the six rows of :func:`distance_table`."""
    rows = distance_table(base)
    return kendall_tau_b([r.displacement.total for r in rows], [r.distance for r in rows])
