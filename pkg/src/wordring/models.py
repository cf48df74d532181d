"""Conditional models for the partner of a primary alternating order.

Every model is a :class:`ConditionalModel` wrapping a 6x6 matrix whose
entry ``[x, y]`` is p(y|x), the probability that ``y`` is chosen as the
partner of ``x``. Rows and columns follow :data:`wordring.ring.ORDERS`.
The diagonal is always zero since the two partners must differ.

The prior-proportional models (Models 2-4 and their variants) share
p(y|x) = q(y) / (1 - q(x)) for some prior q over the six orders.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import softmax

from .errors import InvariantError, ParameterError
from .ring import ORDERS, Order, neighbor_count, ring_distance

SUM_TOL = 1e-9
PROB_SLACK = 1e-12

# p(y|x) only depends on d(x, y) for the ring models
_DISTANCES = np.array([[ring_distance(x, y) for y in ORDERS] for x in ORDERS])
_OFF_DIAGONAL = ~np.eye(len(ORDERS), dtype=bool)


def _check_probability(name, value):
    value = float(value)
    if not math.isfinite(value) or not -PROB_SLACK <= value <= 1 + PROB_SLACK:
        raise ParameterError(f"{name} must be a probability in [0, 1], got {value!r}")
    return min(max(value, 0.0), 1.0) + 0.0  # no negative zero


@dataclass(frozen=True, eq=False)
class ConditionalModel:
    """Immutable p(y|x) table with its name and number of free parameters."""

    name: str
    k: int
    matrix: np.ndarray = field(repr=False)
    params: Mapping[str, float] = field(default_factory=dict)
    prior: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "params", dict(self.params))
        if self.prior is not None:
            prior = np.array(self.prior, dtype=float)
            prior.setflags(write=False)
            object.__setattr__(self, "prior", prior)

    def p(self, y, x):
        """p(y|x)."""
        return float(self.matrix[Order.parse(x).index, Order.parse(y).index])

    def row_sums(self):
        return self.matrix.sum(axis=1)

    def is_normalized(self, tol=SUM_TOL):
        return bool(
            np.all(np.abs(self.row_sums() - 1.0) <= tol)
            and np.all(np.diag(self.matrix) == 0.0)
            and np.all(self.matrix >= 0.0)
        )


# -- Model 0 and the ring models ------------------------------------------------


def model0():
    """Null model: the partner is any of the five other orders with equal probability."""
    matrix = np.where(_OFF_DIAGONAL, 1 / 5, 0.0)
    return ConditionalModel("model0", 0, matrix)


def _ring_model(name, k, distance_probs, params):
    """p(y|x) = p(d(x,y)) / k(d(x,y)) from the probabilities of d = 1, 2, 3."""
    per_distance = np.array([0.0] + [distance_probs[d - 1] / neighbor_count(d) for d in (1, 2, 3)])
    matrix = per_distance[_DISTANCES]
    return ConditionalModel(name, k, matrix, params)


def model1(pi1, pi2):
    """Ring model with free probabilities for distances 1 and 2.

    Parameters
    ----------
    pi1, pi2 : float
        Probability that the partner sits at ring distance 1 and 2. The
        remainder ``1 - pi1 - pi2`` goes to distance 3.
    """
    pi1 = _check_probability("pi1", pi1)
    pi2 = _check_probability("pi2", pi2)
    p3 = 1.0 - pi1 - pi2
    if p3 < -PROB_SLACK:
        raise ParameterError(f"pi1 + pi2 must not exceed 1, got {pi1 + pi2!r}")
    p3 = max(p3, 0.0)
    return _ring_model("model1", 2, (pi1, pi2, p3), {"pi1": pi1, "pi2": pi2})


def trunc_exp_distance_probs(a):
    """pi(d) = c * exp(-a d) for d = 1, 2, 3, normalized to sum to one."""
    return softmax(-float(a) * np.array([1.0, 2.0, 3.0]))


def model1_trunc_exp(a):
    """One-parameter ring model with right-truncated exponential distance probabilities."""
    a = float(a)
    if not math.isfinite(a):
        raise ParameterError(f"a must be finite, got {a!r}")
    return _ring_model("model1_trunc_exp", 1, tuple(trunc_exp_distance_probs(a)), {"a": a})


# -- Prior-proportional models ----------------------------------------------------


def validate_prior(q):
    """Return ``q`` as a length-6 float array after checking it is a distribution."""
    q = np.asarray(q, dtype=float)
    if q.shape != (len(ORDERS),):
        raise ParameterError(f"prior must have {len(ORDERS)} entries, got shape {q.shape}")
    if not np.all(np.isfinite(q)) or np.any(q < -PROB_SLACK) or np.any(q > 1 + PROB_SLACK):
        raise ParameterError(f"prior entries must lie in [0, 1], got {q.tolist()}")
    if abs(q.sum() - 1.0) > SUM_TOL:
        raise ParameterError(f"prior must sum to 1, got {q.sum()!r}")
    return np.clip(q, 0.0, 1.0)


def prior_model(name, k, q, params=None):
    """Conditional model p(y|x) = q(y) / (1 - q(x)) for a prior q."""
    q = validate_prior(q)
    # 1 - q(x) summed from the other entries; avoids cancellation near q(x) = 1
    rest = np.array([q[_OFF_DIAGONAL[i]].sum() for i in range(len(ORDERS))])
    if np.any(rest <= 0.0):
        certain = ORDERS[int(np.argmin(rest))]
        raise ParameterError(f"q({certain}) = 1 leaves no partner for {certain}")
    matrix = np.where(_OFF_DIAGONAL, q[None, :] / rest[:, None], 0.0)
    return ConditionalModel(name, k, matrix, params or {}, prior=q)


def two_way_products(p_sv, p_so, p_ov):
    """Unnormalized weight of each order from three independent pairwise preferences.

    Works elementwise on arrays, which the grid search relies on. The
    result is stacked along the first axis in :data:`ORDERS` order.
    """
    p_vs, p_os, p_vo = 1 - p_sv, 1 - p_so, 1 - p_ov
    return np.stack([
        p_sv * p_so * p_ov,  # SOV
        p_sv * p_so * p_vo,  # SVO
        p_vs * p_so * p_vo,  # VSO
        p_vs * p_os * p_vo,  # VOS
        p_vs * p_os * p_ov,  # OVS
        p_sv * p_os * p_ov,  # OSV
    ])


def two_way_normalizer_denominator(p_sv, p_so, p_ov):
    """Sum of the six products in closed form; its reciprocal is the normalizer c."""
    return p_sv * (p_ov + p_so - 1) + 1 - p_so * p_ov


def model2_prior(p_sv, p_so, p_ov):
    """Prior over the six orders implied by the pairwise preferences SV, SO and OV."""
    p_sv = _check_probability("p_sv", p_sv)
    p_so = _check_probability("p_so", p_so)
    p_ov = _check_probability("p_ov", p_ov)
    denom = two_way_normalizer_denominator(p_sv, p_so, p_ov)
    if not math.isfinite(denom) or denom <= 0.0:
        raise ParameterError(
            f"normalizer undefined for p_sv={p_sv}, p_so={p_so}, p_ov={p_ov}: "
            f"sum of products is {denom!r}"
        )
    return two_way_products(p_sv, p_so, p_ov) / denom


def model2(p_sv, p_so, p_ov):
    q = model2_prior(p_sv, p_so, p_ov)
    return prior_model("model2", 3, q, {"p_sv": p_sv, "p_so": p_so, "p_ov": p_ov})


def model2_reduced(p_sv, p_so):
    """Model 2 with no preference between OV and VO (p_ov fixed at 1/2)."""
    q = model2_prior(p_sv, p_so, 0.5)
    return prior_model("model2_reduced", 2, q, {"p_sv": p_sv, "p_so": p_so})


MODEL3_FREE = ORDERS[:-1]


def model3(q):
    """Six-way prior model with a free probability for every order but OSV.

    ``q`` maps each order in :data:`MODEL3_FREE` (or a 5-sequence in that
    order) to its prior probability; q(OSV) is the complement.
    """
    if isinstance(q, Mapping):
        free = {Order.parse(o): float(v) for o, v in q.items()}
        if Order.OSV in free or set(free) != set(MODEL3_FREE):
            raise ParameterError(f"model3 takes exactly the orders {[str(o) for o in MODEL3_FREE]}")
        values = [free[o] for o in MODEL3_FREE]
    else:
        values = [float(v) for v in q]
        if len(values) != len(MODEL3_FREE):
            raise ParameterError(f"model3 takes {len(MODEL3_FREE)} parameters, got {len(values)}")
    values = [_check_probability(f"q({o})", v) for o, v in zip(MODEL3_FREE, values)]
    rest = 1.0 - sum(values)
    if rest < -PROB_SLACK:
        raise ParameterError(f"free priors sum to {sum(values)!r} > 1, implying negative q(OSV)")
    full = np.array(values + [max(rest, 0.0)])
    params = {f"q_{o.value.lower()}": v for o, v in zip(MODEL3_FREE, values)}
    return prior_model("model3", 5, full, params)


@dataclass(frozen=True)
class DominantFrequencies:
    """Number of languages in which each order is the dominant one."""

    counts: Mapping[Order, int]

    def __post_init__(self):
        counts = {o: 0 for o in ORDERS}
        for order, c in self.counts.items():
            if isinstance(c, bool) or int(c) != c or c < 0:
                raise ParameterError(f"count for {order} must be a nonnegative integer, got {c!r}")
            counts[Order.parse(order)] = int(c)
        if sum(counts.values()) == 0:
            raise ParameterError("at least one dominant-order count must be positive")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self):
        return sum(self.counts.values())

    def prior(self):
        return np.array([self.counts[o] for o in ORDERS], dtype=float) / self.total


def model4(freqs):
    """Prior taken from the relative frequency of each order as a dominant order. No free parameters."""
    if not isinstance(freqs, DominantFrequencies):
        freqs = DominantFrequencies(freqs)
    return prior_model("model4", 0, freqs.prior())


# -- Fixing the normalizer at one -------------------------------------------------


@dataclass(frozen=True)
class NormalizerOneCheck:
    """Outcome of forcing the two-way normalizer to 1 and solving for p_ov."""

    p_sv: float
    p_so: float
    p_ov: float | None
    feasible: bool
    reason: str


def model2_c1_pov(p_sv, p_so):
    """Solve sum-of-products = 1 for p_ov given p_sv and p_so, and judge feasibility.

    Setting the closed-form sum of the six products to one gives
    p_ov = p_sv (1 - p_so) / (p_sv - p_so). A usable model needs
    0 <= p_ov <= 1 with all three values being probabilities; the check
    reports which condition fails.
    """
    p_sv = _check_probability("p_sv", p_sv)
    p_so = _check_probability("p_so", p_so)
    if p_sv == p_so:
        return NormalizerOneCheck(p_sv, p_so, None, False, "p_sv == p_so: p_ov is undefined")
    p_ov = p_sv * (1 - p_so) / (p_sv - p_so)
    if p_ov < -PROB_SLACK:
        return NormalizerOneCheck(p_sv, p_so, p_ov, False, "p_ov < 0")
    if p_ov > 1 + PROB_SLACK:
        return NormalizerOneCheck(p_sv, p_so, p_ov, False, "p_ov > 1")
    p_ov = min(max(p_ov, 0.0), 1.0) + 0.0
    denom = two_way_normalizer_denominator(p_sv, p_so, p_ov)
    if not math.isclose(denom, 1.0, abs_tol=SUM_TOL):
        raise InvariantError(f"solved p_ov={p_ov} gives normalizer {1 / denom!r}")
    # the prior must also leave every order a possible partner
    try:
        prior_model("model2_c1", 2, model2_prior(p_sv, p_so, p_ov))
    except ParameterError as exc:
        return NormalizerOneCheck(p_sv, p_so, p_ov, False, str(exc))
    return NormalizerOneCheck(p_sv, p_so, p_ov, True, "feasible")
