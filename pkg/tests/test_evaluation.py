from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from jsvulnpred.dataset import Dataset, SampleKey, SplitSpec
from jsvulnpred.errors import LengthMismatch
from jsvulnpred.evaluation import (
    ConfusionMatrix,
    ContingencyTable,
    GridResult,
    build_contingency,
    chi2_sf_1,
    confusion,
    cross_validate,
    grid_search,
    ir_measures,
    mcnemar,
    rank,
)
from jsvulnpred.evaluation.report import config_label, mcnemar_row, result_row, results_csv, text_table
from jsvulnpred.learners import HyperGrid


def test_confusion_counts():
    cm = confusion([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert cm == ConfusionMatrix(TP=2, TN=1, FP=1, FN=1)
    with pytest.raises(LengthMismatch):
        confusion([1, 0], [1])


def test_ir_measures_definitions():
    m = ir_measures(ConfusionMatrix(TP=30, TN=50, FP=10, FN=10))
    assert m.accuracy == pytest.approx(0.8)
    assert m.precision == pytest.approx(0.75) and m.recall == pytest.approx(0.75)
    assert m.f_measure == pytest.approx(0.75)


def test_undefined_precision_is_reported_as_na():
    m = ir_measures(ConfusionMatrix(TP=0, TN=9, FP=0, FN=3))
    assert m.precision is None and m.f_measure is None and m.recall == 0.0
    assert m.percent("precision") == "n/a" and m.percent("accuracy") == "75.0"
    zero = ir_measures(ConfusionMatrix(TP=0, TN=5, FP=2, FN=3))
    assert zero.precision == 0.0 and zero.f_measure == 0.0


@pytest.mark.parametrize("b, c", [(0, 0), (10, 0), (18, 0), (5, 5), (7, 2), (1, 40)])
def test_mcnemar_statistic_and_tail(b, c):
    res = mcnemar(ContingencyTable(100, b, c, 20))
    if b + c == 0:
        assert res.statistic == 0.0 and res.p_value == 1.0
        return
    stat = (b - c) ** 2 / (b + c)
    assert res.statistic == pytest.approx(stat, abs=1e-12)
    assert abs(res.p_value - math.erfc(math.sqrt(stat / 2))) < 1e-10
    assert abs(res.p_value - float(mpmath.erfc(mpmath.sqrt(mpmath.mpf(stat) / 2)))) < 1e-10
    assert res.decision == ("rejected" if res.p_value <= 0.05 else "accepted")


def test_mcnemar_decisions():
    assert mcnemar(ContingencyTable(0, 18, 0, 0)).decision == "rejected"
    assert f"{mcnemar(ContingencyTable(0, 18, 0, 0)).statistic:.3f}" == "18.000"
    assert mcnemar(ContingencyTable(0, 5, 5, 0)).decision == "accepted"
    assert mcnemar(ContingencyTable(0, 3, 1, 0), alpha=0.5).decision == "rejected"  # p = 0.317
    assert mcnemar(ContingencyTable(0, 3, 1, 0), alpha=0.3).decision == "accepted"


def test_chi2_tail_matches_high_precision():
    for s in (1e-6, 0.5, 3.841458820694124, 10.0, 60.0):
        want = float(mpmath.erfc(mpmath.sqrt(mpmath.mpf(s) / 2)))
        assert abs(chi2_sf_1(s) - want) <= 1e-12 * max(1.0, want) + 1e-300
    assert abs(chi2_sf_1(3.841458820694124) - 0.05) < 1e-12


def test_exact_mcnemar_is_two_sided_binomial():
    res = mcnemar(ContingencyTable(0, 8, 2, 0), exact=True)
    want = 2 * sum(math.comb(10, i) for i in range(3)) / 2**10
    assert res.statistic == 2.0 and res.p_value == pytest.approx(want, rel=1e-12)
    assert mcnemar(ContingencyTable(0, 5, 5, 0), exact=True).p_value == 1.0
    assert res.method == "exact"


def test_build_contingency():
    t = [1, 1, 0, 0, 1, 0]
    a = [1, 0, 0, 1, 1, 0]
    b = [1, 1, 1, 1, 0, 0]
    assert build_contingency(t, a, b) == ContingencyTable(2, 2, 1, 1)
    with pytest.raises(LengthMismatch):
        build_contingency(t, a, b[:-1])


def test_report_formatting():
    cm = ConfusionMatrix(TP=0, TN=9, FP=0, FN=3)
    row = result_row("ZeroR", cm, ir_measures(cm))
    assert row == ["ZeroR", "0", "9", "0", "3", "75.0", "n/a", "0.0", "n/a"]
    text = results_csv([row])
    assert text.splitlines()[0] == "config,TP,TN,FP,FN,accuracy,precision,recall,f_measure"
    table = text_table(["model", "F"], [["KNN", "71.2"], ["RFC", "9.0"]])
    assert table.splitlines() == ["model     F", "-----  ----", "KNN    71.2", "RFC     9.0"]
    assert mcnemar_row("A", mcnemar(ContingencyTable(0, 18, 0, 0))) == ["A", "18.000", "0.000", "rejected"]
    assert config_label("DT", {"max_depth": 3}) == 'DT {"max_depth": 3}'
    assert config_label("ZeroR", {}) == "ZeroR"


# -- grid search ---------------------------------------------------------------------


def toy_dataset(n=300, seed=0):
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.3).astype(int)
    X = rng.normal(size=(n, 3)) + 1.5 * y[:, None]
    keys = [SampleKey("p", "a.js", f"f{i}", i + 1, i + 1) for i in range(n)]
    return Dataset(keys, X, y, ["a", "b", "c"])


def test_rank_orders_by_objective_then_tiebreaks():
    rs = [
        GridResult({"k": 1}, score=0.5, other=0.9),
        GridResult({"k": 2}, score=0.7, other=0.1),
        GridResult({"k": 3}, score=0.5, other=0.9),
        GridResult({"k": 4}, error="boom"),
    ]
    assert [r.config["k"] for r in rank(rs)] == [2, 1, 3, 4]


def test_grid_search_dev_mode():
    ds = toy_dataset()
    grid = HyperGrid("KNN", {"k": [1, 5, 15]})
    results = grid_search("KNN", grid, ds, SplitSpec(seed=1))
    assert len(results) == 3 and all(r.error is None for r in results)
    assert results == rank(results)
    dev_size = sum(r for r in (results[0].cm.TP, results[0].cm.TN, results[0].cm.FP, results[0].cm.FN))
    assert dev_size == 30
    again = grid_search("KNN", grid, ds, SplitSpec(seed=1))
    assert [(r.config, r.score) for r in again] == [(r.config, r.score) for r in results]


def test_grid_search_cv_mode_and_resampling():
    ds = toy_dataset()
    grid = HyperGrid("DT", {"max_depth": [2], "resample_mode": ["over", "under"], "resample_ratio": [1.0]})
    results = grid_search("DT", grid, ds, SplitSpec(k=5, seed=2), mode="cv", objective="precision")
    assert len(results) == 2
    for r in results:
        assert r.error is None and len(r.fold_scores) == 5
        assert r.cm.total == len(ds)
        assert r.score == pytest.approx(np.mean(r.fold_scores))


def test_grid_search_records_failing_configs():
    ds = toy_dataset()
    grid = HyperGrid("DT", {"max_depth": [2], "resample_mode": ["over"], "resample_ratio": [0.01]})
    (res,) = grid_search("DT", grid, ds, SplitSpec(seed=0))
    assert res.error and res.error.startswith("RatioUnreachable")
    with pytest.raises(ValueError):
        grid_search("DT", grid, ds, SplitSpec(), objective="auc")


def test_parallel_grid_search_matches_serial():
    ds = toy_dataset(200)
    grid = HyperGrid("KNN", {"k": [1, 3]})
    a = grid_search("KNN", grid, ds, SplitSpec(seed=4))
    b = grid_search("KNN", grid, ds, SplitSpec(seed=4), workers=2)
    assert [(r.config, r.cm) for r in a] == [(r.config, r.cm) for r in b]


def test_cross_validate_accuracy():
    ds = toy_dataset()
    accs = cross_validate("ZeroR", {}, ds, k=10, seed=0)
    assert len(accs) == 10
    assert np.mean(accs) == pytest.approx(1 - ds.y.mean(), abs=0.01)
