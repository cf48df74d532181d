"""Likelihood, information criteria, parameter estimation and model ranking."""

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np
from scipy.special import xlogy

from . import models
from .errors import (
    DuplicateEntryError,
    EmptyDatasetError,
    InvariantError,
    NegativeCountError,
    SelfPairError,
)
from .ring import ORDERS, Order, neighbor_count, ring_distance

# -- Data ------------------------------------------------------------------------


def canonical_pair(x, y):
    """Unordered pair as a tuple with members in :data:`ORDERS` order."""
    x, y = Order.parse(x), Order.parse(y)
    return (x, y) if x.index <= y.index else (y, x)


@dataclass(frozen=True)
class PairCountTable:
    """Number of languages m(x, y) whose primary alternating orders are {x, y}.

    Keys are canonical unordered pairs; zero counts are not stored, so two
    tables are equal exactly when every m(x, y) agrees.
    """

    counts: Mapping[tuple[Order, Order], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (x, y), c in self.counts.items():
            pair = canonical_pair(x, y)
            if pair[0] == pair[1]:
                raise SelfPairError(f"pair members must differ, got {pair[0]} twice")
            if isinstance(c, bool) or int(c) != c:
                raise NegativeCountError(f"count for {pair} must be an integer, got {c!r}")
            if c < 0:
                raise NegativeCountError(f"count for {pair} must be nonnegative, got {c}")
            if pair in clean:
                raise DuplicateEntryError(f"pair {pair[0]},{pair[1]} given twice")
            clean[pair] = int(c)
        ordered = {p: clean[p] for p in sorted(clean, key=lambda p: (p[0].index, p[1].index)) if clean[p]}
        object.__setattr__(self, "counts", ordered)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple]):
        """Build from ``(order1, order2, count)`` rows; duplicate pairs raise."""
        counts = {}
        for x, y, c in rows:
            pair = canonical_pair(x, y)
            if pair in counts:
                raise DuplicateEntryError(f"pair {pair[0]},{pair[1]} given twice")
            counts[pair] = c
        return cls(counts)

    def __hash__(self):
        return hash(tuple(self.counts.items()))

    def __add__(self, other):
        merged = dict(self.counts)
        for pair, c in other.counts.items():
            merged[pair] = merged.get(pair, 0) + c
        return PairCountTable(merged)

    def scaled(self, factor):
        return PairCountTable({p: c * factor for p, c in self.counts.items()})

    def count(self, x, y):
        return self.counts.get(canonical_pair(x, y), 0)

    def items(self):
        return self.counts.items()

    @property
    def total(self):
        """m, the number of languages."""
        return sum(self.counts.values())

    @property
    def n(self):
        """Sample size: every language contributes two predicted partners."""
        return 2 * self.total

    def matrix(self):
        """Symmetric 6x6 integer array of m(x, y) in :data:`ORDERS` order."""
        mat = np.zeros((len(ORDERS), len(ORDERS)), dtype=np.int64)
        for (x, y), c in self.counts.items():
            mat[x.index, y.index] = mat[y.index, x.index] = c
        return mat

    def slot_counts(self):
        """How often each order fills one of the n partner slots."""
        return self.matrix().sum(axis=0)

    def distance_counts(self):
        """Languages per ring distance, ``{1: .., 2: .., 3: ..}``."""
        out = {1: 0, 2: 0, 3: 0}
        for (x, y), c in self.counts.items():
            out[ring_distance(x, y)] += c
        return out


# -- Likelihood and criteria -------------------------------------------------------


def log_likelihood(model, data):
    """Sum over ordered pairs x != y of m(x, y) ln p(y|x).

    Each language contributes both directions. Returns ``-inf`` when the
    model gives zero probability to an observed pair; see
    :func:`conflicting_pairs` for which ones.
    """
    if data.total == 0:
        raise EmptyDatasetError("empty dataset")
    with np.errstate(divide="ignore"):
        return float(xlogy(data.matrix(), model.matrix).sum())


def conflicting_pairs(model, data):
    """Observed ordered pairs (x, y) to which ``model`` assigns p(y|x) = 0."""
    mat = data.matrix()
    return [
        (x, y)
        for x in ORDERS
        for y in ORDERS
        if mat[x.index, y.index] > 0 and model.matrix[x.index, y.index] == 0.0
    ]


def aic_c(loglik, k, n):
    """Akaike information criterion with small-sample correction."""
    if n <= k + 1:
        raise ValueError(f"AIC_c needs n > k + 1, got n={n}, k={k}")
    return -2.0 * loglik + 2.0 * k * n / (n - k - 1)


def bic(loglik, k, n):
    """Bayesian information criterion, natural logarithm."""
    if n < 1:
        raise ValueError(f"BIC needs n >= 1, got {n}")
    return -2.0 * loglik + k * math.log(n)


class PenaltyComparison(NamedTuple):
    aic_penalty_rate: float
    bic_penalty_rate: float
    bic_dominates: bool
    aic_penalty_per_parameter: float
    """The per-parameter penalty actually added by :func:`aic_c`, 2n/(n-k-1)."""


def penalty_comparison(k, n):
    """Compare the per-parameter parsimony penalties of AIC_c and BIC.

    ``aic_penalty_rate`` is 2/(n-k-1), bounded by 2, against ln n for BIC;
    ``bic_dominates`` is ``ln n > 2/(n-k-1)``, which always holds once
    n >= ceil(e^2) = 8. Note that :func:`aic_c` adds 2n/(n-k-1) per
    parameter, reported separately as ``aic_penalty_per_parameter``.
    """
    if isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n <= k + 1:
        raise ValueError(f"need n > k + 1, got n={n}, k={k}")
    aic_rate = 2.0 / (n - k - 1)
    bic_rate = math.log(n)
    return PenaltyComparison(aic_rate, bic_rate, bic_rate > aic_rate, 2.0 * n / (n - k - 1))


# -- Fitting -----------------------------------------------------------------------

FAMILIES = ("model0", "model1", "model2", "model3", "model4", "model1_trunc_exp", "model2_reduced")
PLUGIN_FAMILIES = ("model1", "model2", "model3", "model2_reduced")
GRID_FAMILIES = ("model1", "model2", "model2_reduced", "model1_trunc_exp")

LABELS = {
    "model0": "Model 0",
    "model1": "Model 1",
    "model2": "Model 2",
    "model3": "Model 3",
    "model4": "Model 4",
    "model1_trunc_exp": "Model 1 (truncated exponential)",
    "model2_reduced": "Model 2 (p_ov = 1/2)",
}


def _check_family(family, allowed):
    if family not in allowed:
        raise ValueError(f"unknown model family {family!r}; expected one of {', '.join(allowed)}")


def _precedence_share(data, first, second):
    slots = data.slot_counts()
    hits = sum(int(slots[o.index]) for o in ORDERS if o.precedes(first, second))
    return hits / data.n


def plugin_fit(family, data):
    """Estimate parameters by replacing each probability with its sample proportion.

    * ``model1``: share of languages whose two orders sit at ring distance 1 and 2.
    * ``model2`` / ``model2_reduced``: share of the n slots whose order puts
      S before V, S before O (and O before V for the full model).
    * ``model3``: slot count of each free order divided by n.
    """
    _check_family(family, PLUGIN_FAMILIES)
    if data.total == 0:
        raise EmptyDatasetError("empty dataset")
    if family == "model1":
        by_distance = data.distance_counts()
        return {"pi1": by_distance[1] / data.total, "pi2": by_distance[2] / data.total}
    if family == "model3":
        slots = data.slot_counts()
        return {f"q_{o.value.lower()}": slots[o.index] / data.n for o in models.MODEL3_FREE}
    params = {"p_sv": _precedence_share(data, "S", "V"), "p_so": _precedence_share(data, "S", "O")}
    if family == "model2":
        params["p_ov"] = _precedence_share(data, "O", "V")
    return params


def build_model(family, params=None, freqs=None):
    """Instantiate ``family`` from a parameter dict as returned by :func:`plugin_fit`."""
    _check_family(family, FAMILIES)
    params = params or {}
    if family == "model0":
        return models.model0()
    if family == "model1":
        return models.model1(params["pi1"], params["pi2"])
    if family == "model1_trunc_exp":
        return models.model1_trunc_exp(params["a"])
    if family == "model2":
        return models.model2(params["p_sv"], params["p_so"], params["p_ov"])
    if family == "model2_reduced":
        return models.model2_reduced(params["p_sv"], params["p_so"])
    if family == "model3":
        return models.model3([params[f"q_{o.value.lower()}"] for o in models.MODEL3_FREE])
    if freqs is None:
        raise ValueError("model4 needs dominant-order frequencies")
    return models.model4(freqs)


# -- Grid search -------------------------------------------------------------------

DEFAULT_POINT_BUDGET = 10**9
TRUNC_EXP_RANGE = (-10.0, 10.0)
IMPROVEMENT_TOL = 1e-6


@dataclass(frozen=True)
class GridSearchReport:
    family: str
    params: dict
    loglik: float
    resolution: float
    points: int
    plugin_params: dict | None
    plugin_loglik: float | None
    improved_over_plugin: bool


def _steps(span, resolution):
    # tolerate 1/resolution landing just below an integer
    return int(math.floor(span / resolution + 1e-9))


def _grid_size(family, resolution):
    if family == "model1_trunc_exp":
        lo, hi = TRUNC_EXP_RANGE
        return _steps(hi - lo, resolution) + 1
    n = _steps(1.0, resolution) + 1
    if family == "model1":
        return n * (n + 1) // 2
    return n ** (3 if family == "model2" else 2)


def _ring_loglik(directed, probs):
    """Vectorized Model 1 likelihood from directed counts per distance and pi(d) arrays."""
    total = 0.0
    for d, p in zip((1, 2, 3), probs):
        total = total + xlogy(directed[d], p / neighbor_count(d))
    return total


def _prior_loglik(slots, q):
    """Vectorized likelihood of p(y|x) = q(y)/(1-q(x)) given slot counts; q has orders on axis 0.

    Points where the prior is undefined or some order is certain get -inf.
    """
    shape = (-1,) + (1,) * (q.ndim - 1)
    s = slots.reshape(shape).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = xlogy(s, q).sum(axis=0) - xlogy(s, 1.0 - q).sum(axis=0)
    bad = ~np.all(np.isfinite(q), axis=0) | np.any(q >= 1.0, axis=0) | np.isnan(out)
    return np.where(bad, -np.inf, out)


def _two_way_q(p_sv, p_so, p_ov):
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = models.two_way_normalizer_denominator(p_sv, p_so, p_ov)
        q = models.two_way_products(p_sv, p_so, p_ov) / denom
    return np.where(denom > 0, q, np.nan)


def grid_search(family, data, resolution, budget=DEFAULT_POINT_BUDGET):
    """Brute-force maximum of the log-likelihood over a regular parameter grid.

    Grids: the simplex pi1 + pi2 <= 1 for ``model1``, the unit cube (or
    square) for ``model2`` (``model2_reduced``), and ``a`` in [-10, 10] for
    ``model1_trunc_exp``. Points where the model is undefined score -inf;
    ``points`` counts every grid point scanned. Ties go to the lexicographically smallest parameter vector.

    Raises
    ------
    ValueError
        If ``resolution`` is not positive, the family has no grid, or the
        grid would exceed ``budget`` points.
    """
    _check_family(family, GRID_FAMILIES)
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    size = _grid_size(family, resolution)
    if size > budget:
        raise ValueError(f"grid of {size} points exceeds the budget of {budget}")
    if data.total == 0:
        raise EmptyDatasetError("empty dataset")

    best_l, best_params, evaluated = -np.inf, None, 0

    def consider(values, coords):
        nonlocal best_l, best_params, evaluated
        evaluated += values.size
        i = int(np.argmax(values))
        if values[i] > best_l:
            best_l, best_params = float(values[i]), coords(i)

    if family in ("model1", "model1_trunc_exp"):
        by_distance = data.distance_counts()
        directed = {d: 2 * c for d, c in by_distance.items()}
        if family == "model1":
            n = _steps(1.0, resolution)
            for i in range(n + 1):
                pi1 = i * resolution
                pi2 = np.arange(n - i + 1) * resolution
                p3 = np.clip(1.0 - pi1 - pi2, 0.0, 1.0)
                values = _ring_loglik(directed, (np.full_like(pi2, pi1), pi2, p3))
                consider(values, lambda j, pi1=pi1, pi2=pi2: {"pi1": pi1, "pi2": float(pi2[j])})
        else:
            lo, hi = TRUNC_EXP_RANGE
            a = lo + np.arange(_steps(hi - lo, resolution) + 1) * resolution
            probs = np.exp(-np.outer(a, [1.0, 2.0, 3.0]))
            probs /= probs.sum(axis=1, keepdims=True)
            values = _ring_loglik(directed, probs.T)
            consider(values, lambda j: {"a": float(a[j])})
    else:
        slots = data.slot_counts()
        axis = np.arange(_steps(1.0, resolution) + 1) * resolution
        if family == "model2":
            p_so, p_ov = np.meshgrid(axis, axis, indexing="ij")
            for p_sv in axis:
                values = _prior_loglik(slots, _two_way_q(p_sv, p_so, p_ov)).ravel()
                consider(values, lambda j, p_sv=p_sv: {
                    "p_sv": float(p_sv),
                    "p_so": float(p_so.flat[j]),
                    "p_ov": float(p_ov.flat[j]),
                })
        else:
            p_sv, p_so = np.meshgrid(axis, axis, indexing="ij")
            values = _prior_loglik(slots, _two_way_q(p_sv, p_so, 0.5)).ravel()
            consider(values, lambda j: {"p_sv": float(p_sv.flat[j]), "p_so": float(p_so.flat[j])})

    if best_params is None:
        raise ValueError(f"no grid point yields a finite likelihood for {family}")

    # cross-check the vectorized path against the reference likelihood
    reference = log_likelihood(build_model(family, best_params), data)
    if not math.isclose(reference, best_l, rel_tol=1e-9, abs_tol=1e-9):
        raise InvariantError(f"grid likelihood {best_l} disagrees with direct evaluation {reference}")

    plugin_params = plugin_loglik = None
    improved = False
    if family in PLUGIN_FAMILIES:
        plugin_params = plugin_fit(family, data)
        plugin_loglik = log_likelihood(build_model(family, plugin_params), data)
        improved = best_l > plugin_loglik + IMPROVEMENT_TOL
    return GridSearchReport(
        family, best_params, best_l, resolution, evaluated, plugin_params, plugin_loglik, improved
    )


# -- Evaluation --------------------------------------------------------------------


@dataclass(frozen=True)
class ModelEvaluation:
    name: str
    loglik: float
    k: int
    n: int
    aic_c: float
    bic: float
    params: dict = field(default_factory=dict)
    conflict: bool = False

    @property
    def label(self):
        return LABELS.get(self.name, self.name)


def evaluate(model, data):
    """Score ``model`` on ``data``.

    AIC_c is recorded as +inf when the dataset is too small for it
    (n <= k + 1), so such a model ranks last by that criterion.
    """
    loglik = log_likelihood(model, data)
    n = data.n
    return ModelEvaluation(
        name=model.name,
        loglik=loglik,
        k=model.k,
        n=n,
        aic_c=aic_c(loglik, model.k, n) if n > model.k + 1 else math.inf,
        bic=bic(loglik, model.k, n),
        params=dict(model.params),
        conflict=bool(conflicting_pairs(model, data)),
    )


SORT_KEYS = {
    "bic": lambda e: (e.bic, e.name),
    "aicc": lambda e: (e.aic_c, e.name),
    "loglik": lambda e: (-e.loglik, e.name),
}

TRUNC_EXP_RESOLUTION = 1e-4


def fitted_models(data, freqs, include_reduced=False):
    """Models 0-4 fitted to ``data`` (plug-in estimates), optionally with the reduced variants.

    The truncated-exponential variant has no proportion to plug in, so its
    ``a`` comes from a grid search at resolution 1e-4 over [-10, 10].
    """
    out = [models.model0()]
    for family in ("model1", "model2", "model3"):
        out.append(build_model(family, plugin_fit(family, data)))
    out.append(models.model4(freqs))
    if include_reduced:
        trunc = grid_search("model1_trunc_exp", data, TRUNC_EXP_RESOLUTION)
        out.append(models.model1_trunc_exp(trunc.params["a"]))
        out.append(build_model("model2_reduced", plugin_fit("model2_reduced", data)))
    return out


def evaluate_all(data, freqs, include_reduced=False, sort="bic"):
    """Fit and score every model on ``data``, best first by ``sort`` ("bic", "aicc" or "loglik")."""
    if sort not in SORT_KEYS:
        raise ValueError(f"unknown sort key {sort!r}; expected one of {', '.join(SORT_KEYS)}")
    evaluations = [evaluate(m, data) for m in fitted_models(data, freqs, include_reduced)]
    return sorted(evaluations, key=SORT_KEYS[sort])


def best_by(evaluations, criterion):
    return min(evaluations, key=SORT_KEYS[criterion])
