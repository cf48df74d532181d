"""Acceptance criteria, one marked group per criterion.

The terminal summary prints a PASS/FAIL line per criterion (see conftest).
Run just this file with ``pytest tests/test_acceptance.py``.
"""

import itertools
import json
import math
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from wordring import cli
from wordring.inference import (
    PairCountTable,
    best_by,
    evaluate_all,
    grid_search,
    log_likelihood,
    penalty_comparison,
    plugin_fit,
)
from wordring.models import (
    DominantFrequencies,
    model0,
    model1,
    model1_trunc_exp,
    model2,
    model2_c1_pov,
    model2_reduced,
    model3,
    model4,
)
from wordring.ring import ORDERS, displacement_distance_correlation, distance_table, ring_distance

L_TOL = 0.05
SCORE_TOL = 0.1
PARAM_TOL = 0.005

UNORDERED = [(x, y) for i, x in enumerate(ORDERS) for y in ORDERS[i + 1:]]
ORDERED = [(x, y) for x in ORDERS for y in ORDERS if x != y]


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def evaluate_json(*extra):
    """Run ``wordring evaluate`` in a fresh interpreter; return the parsed rows and the wall time."""
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "wordring", "evaluate", "--format", "json", *extra],
        capture_output=True, text=True, check=True,
    )
    elapsed = time.perf_counter() - start
    return {row["model"]: row for row in json.loads(proc.stdout)["models"]}, elapsed


# -- 1 -------------------------------------------------------------------------------

C1 = criterion(1, "golden model scores on the canonical dataset")
GOLDEN = {
    "model0": (-215.7, 431.3, 431.3),
    "model1": (-152.7, 309.5, 315.2),
    "model2": (-161.5, 329.3, 337.8),
    "model3": (-147.3, 305.2, 319.2),
}


@C1
@pytest.mark.parametrize("name", GOLDEN)
def test_golden_scores(canonical, atlas, name):
    row = {e.name: e for e in evaluate_all(canonical, atlas)}[name]
    loglik, aicc, bic = GOLDEN[name]
    assert row.loglik == pytest.approx(loglik, abs=L_TOL)
    assert row.aic_c == pytest.approx(aicc, abs=SCORE_TOL)
    assert row.bic == pytest.approx(bic, abs=SCORE_TOL)


@C1
def test_golden_scores_from_command(atlas):
    rows, elapsed = evaluate_json()
    for name, (loglik, aicc, bic) in GOLDEN.items():
        assert rows[name]["loglik"] == pytest.approx(loglik, abs=L_TOL)
        assert rows[name]["aicc"] == pytest.approx(aicc, abs=SCORE_TOL)
        assert rows[name]["bic"] == pytest.approx(bic, abs=SCORE_TOL)
    assert elapsed < 1.0


@C1
def test_evaluate_runtime_in_process(capsys):
    start = time.perf_counter()
    assert cli.main(["evaluate"]) == 0
    assert time.perf_counter() - start < 1.0


# -- 2 -------------------------------------------------------------------------------

C2 = criterion(2, "fitted parameters")


@C2
def test_model1_parameters(canonical):
    p = plugin_fit("model1", canonical)
    assert p["pi1"] == pytest.approx(0.84, abs=PARAM_TOL)
    assert p["pi2"] == pytest.approx(0.16, abs=PARAM_TOL)


@C2
def test_model2_parameters(canonical):
    p = plugin_fit("model2", canonical)
    assert p["p_sv"] == pytest.approx(0.61, abs=PARAM_TOL)
    assert p["p_so"] == pytest.approx(0.81, abs=PARAM_TOL)
    assert p["p_ov"] == pytest.approx(0.26, abs=PARAM_TOL)


# -- 3 -------------------------------------------------------------------------------

C3 = criterion(3, "reduced Model 2 scores")


@C3
def test_reduced_model2(canonical, atlas):
    row = {e.name: e for e in evaluate_all(canonical, atlas, include_reduced=True)}["model2_reduced"]
    assert row.k == 2
    assert row.loglik == pytest.approx(-175.9, abs=L_TOL)
    assert row.aic_c == pytest.approx(356.0, abs=SCORE_TOL)
    assert row.bic == pytest.approx(361.7, abs=SCORE_TOL)


@C3
def test_reduced_model2_from_command():
    rows, _ = evaluate_json("--include-reduced")
    assert (rows["model2_reduced"]["loglik"], rows["model2_reduced"]["aicc"], rows["model2_reduced"]["bic"]) == (
        pytest.approx(-175.9, abs=L_TOL), pytest.approx(356.0, abs=SCORE_TOL), pytest.approx(361.7, abs=SCORE_TOL)
    )


# -- 4 -------------------------------------------------------------------------------

C4 = criterion(4, "model rankings")


@C4
def test_rankings(canonical, atlas):
    evals = evaluate_all(canonical, atlas)
    by = {e.name: e for e in evals}
    assert best_by(evals, "aicc").name == "model3"
    assert best_by(evals, "bic").name == "model1"
    for other in ("model1", "model3"):
        assert by["model2"].aic_c > by[other].aic_c
        assert by["model2"].bic > by[other].bic


def _model4_vs_model0(data, freqs):
    by = {e.name: e for e in evaluate_all(data, freqs)}
    m4, m0 = by["model4"], by["model0"]
    if m4.loglik < -215.7:
        assert m4.aic_c > m0.aic_c and m4.bic > m0.bic
    return m4.loglik


@C4
def test_model4_ordering_with_shipped_frequencies(canonical, atlas):
    # with the packaged atlas counts L is above the threshold, so the ordering check is vacuous
    assert _model4_vs_model0(canonical, atlas) == pytest.approx(-185.6, abs=L_TOL)


@C4
def test_model4_ordering_when_threshold_is_crossed(canonical):
    # a frequency vector favouring the unobserved orders drives L below the threshold
    freqs = DominantFrequencies(dict(zip(ORDERS, (1, 1, 1, 1, 40, 40))))
    assert _model4_vs_model0(canonical, freqs) < -215.7


# -- 5 -------------------------------------------------------------------------------

C5 = criterion(5, "ring analysis")


@C5
@pytest.mark.parametrize("x, y, d", [("SOV", "SVO", 1), ("VSO", "VOS", 1), ("SVO", "VSO", 1), ("SVO", "VOS", 2), ("SOV", "OVS", 2)])
def test_distances_of_observed_pairs(canonical, x, y, d):
    assert canonical.count(x, y) > 0
    assert ring_distance(x, y) == d


@C5
def test_displacement_distance_multiset():
    rows = distance_table("SOV")
    assert Counter((r.displacement.total, r.distance) for r in rows) == Counter(
        [(0, 0), (2, 1), (2, 1), (4, 2), (4, 2), (4, 3)]
    )


@C5
def test_kendall_tau():
    res = displacement_distance_correlation()
    assert res.tau == pytest.approx(0.92, abs=0.005)
    assert 0.02 <= res.pvalue <= 0.04


# -- 6 -------------------------------------------------------------------------------

C6 = criterion(6, "property suite")
SAMPLES = 100


def _random_models(rng):
    for _ in range(SAMPLES):
        pi = rng.dirichlet(np.ones(3))
        yield model1(pi[0], pi[1])
        yield model1_trunc_exp(rng.uniform(-10, 10))
        yield model2(*rng.uniform(0, 1, 3))
        yield model2_reduced(*rng.uniform(0, 1, 2))
        yield model3(rng.dirichlet(np.ones(6))[:5])
        yield model4(dict(zip(ORDERS, rng.integers(1, 1000, 6).tolist())))
    yield model0()


@C6
def test_rows_normalized_at_random_parameters():
    rng = np.random.default_rng(20240611)
    seen = Counter()
    for m in _random_models(rng):
        seen[m.name] += 1
        assert np.all(np.abs(m.row_sums() - 1.0) <= 1e-9), (m.name, m.params)
        assert np.all(np.diag(m.matrix) == 0.0)
    assert all(seen[name] == SAMPLES for name in seen if name != "model0")


@C6
def test_model1_two_fifths_is_model0():
    a, b = model1(2 / 5, 2 / 5), model0()
    for x, y in ORDERED:
        assert a.p(y, x) == pytest.approx(b.p(y, x), abs=1e-15)


@C6
def test_bic_penalty_exceeds_aicc_penalty():
    for k in range(1, 6):
        for n in range(max(8, k + 2), 10**4 + 1):
            assert penalty_comparison(k, n).bic_dominates, (k, n)


@C6
def test_model1_grid_does_not_improve(canonical):
    report = grid_search("model1", canonical, 1e-4)
    assert report.points == 50_015_001
    assert not report.improved_over_plugin


@C6
def test_model2_grid_does_not_improve(canonical):
    start = time.perf_counter()
    report = grid_search("model2", canonical, 0.005)
    assert time.perf_counter() - start < 60
    assert report.points == 201**3
    assert not report.improved_over_plugin, (
        f"grid best L={report.loglik:.4f} at {report.params} beats plug-in L={report.plugin_loglik:.4f}"
    )


# -- 7 -------------------------------------------------------------------------------

C7 = criterion(7, "brute-force likelihood oracle")


def _direct_loglik(model, table):
    """Log of the product of p(y|x) p(x|y) over every language, one factor at a time."""
    factors = []
    for (x, y), count in table.items():
        factors += [model.p(y, x), model.p(x, y)] * count
    product = math.prod(factors)
    return math.log(product) if product > 0 else -math.inf


def _synthetic_tables():
    for size in (1, 2, 3):
        for pairs in itertools.combinations(UNORDERED, size):
            for counts in itertools.product(range(1, 6), repeat=size):
                yield PairCountTable(dict(zip(pairs, counts)))


@C7
def test_brute_force_oracle(atlas):
    fixed = [
        model0(),
        model1(0.6, 0.3),
        model1_trunc_exp(1.5),
        model2(0.7, 0.2, 0.4),
        model2_reduced(0.3, 0.8),
        model3([0.3, 0.25, 0.2, 0.15, 0.1]),
        model3([0.3, 0.3, 0.2, 0.1, 0.1]),  # q(OSV) = 0
        model4(atlas),
    ]
    checked = 0
    for table in _synthetic_tables():
        for m in fixed + [model1(**plugin_fit("model1", table))]:
            direct = _direct_loglik(m, table)
            got = log_likelihood(m, table)
            if math.isinf(direct):
                assert got == direct
            else:
                assert got == pytest.approx(direct, abs=1e-9)
        checked += 1
    assert checked == 15 * 5 + 105 * 25 + 455 * 125


# -- 8 -------------------------------------------------------------------------------

C8 = criterion(8, "no feasible unit normalizer")


@C8
def test_unit_normalizer_infeasible_on_grid():
    grid = [i / 100 for i in range(101)]
    feasible = [(sv, so, res.p_ov) for sv in grid for so in grid if (res := model2_c1_pov(sv, so)).feasible]
    assert not feasible, f"{len(feasible)} feasible grid points, e.g. {feasible[:4]}"
