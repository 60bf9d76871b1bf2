from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import GitScript
from jsvulnpred.dataset import (
    Dataset,
    FixRecord,
    JoinReport,
    ResamplePlan,
    SampleKey,
    SplitSpec,
    concat,
    dataset_csv,
    fold_indices,
    join,
    label_from_fix,
    labels_csv,
    largest_remainder,
    load_fixes,
    read_dataset,
    read_external_dataset,
    resample,
    split_indices,
)
from jsvulnpred.dataset.labels import affected
from jsvulnpred.dataset.resample import resample_indices, target_counts
from jsvulnpred.dataset.table import FEATURE_COLUMNS, read_feature_table, read_label_table
from jsvulnpred.errors import (
    ConfigError,
    DataError,
    DuplicateKey,
    InsufficientClassSamples,
    RatioUnreachable,
)
from jsvulnpred.history.diff import Hunk
from jsvulnpred.inventory import FunctionKey, SourceSpan
from jsvulnpred.history import PROCESS_COLUMNS
from jsvulnpred.static import STATIC_COLUMNS


def key(start, end):
    return FunctionKey("a.js", "f", SourceSpan(start, end, 0, 1))


# -- labeling ----------------------------------------------------------------


def test_affected_rules():
    fk = key(10, 20)
    assert affected(fk, [Hunk(15, 1, 15, 1)])  # changed line inside
    assert affected(fk, [Hunk(20, 3, 20, 0)])  # deletion overlapping the last line
    assert not affected(fk, [Hunk(21, 2, 21, 0)])
    assert affected(fk, [Hunk(12, 0, 13, 4)])  # insertion between lines 12 and 13
    assert not affected(fk, [Hunk(20, 0, 21, 2)])  # insertion right after the closing line
    assert not affected(fk, [Hunk(9, 0, 10, 1)])  # insertion right before the first line


VULN = """function safe(a) {
  return a + 1;
}

function render(html) {
  el.innerHTML = html;
  return el;
}
"""


def fixed_repo(tmp_path):
    g = GitScript(str(tmp_path / "proj"))
    g.write("src/app.js", VULN)
    g.write("src/other.js", "function gone() {\n  return 0;\n}\n")
    g.write("README.md", "x\n")
    g.commit("initial", "ann")
    g.write("src/app.js", VULN.replace("el.innerHTML = html;", "el.textContent = html;"))
    g.remove("src/other.js")
    fix = g.commit("fix xss", "bob")
    g.write("README.md", "y\n")
    docs = g.commit("docs only", "bob")
    g.commit("nothing", "bob")
    return g, fix, docs


def test_label_from_fix(tmp_path):
    g, fix, _ = fixed_repo(tmp_path)
    res = label_from_fix(FixRecord(g.path, fix, "GHSA-1"))
    got = {(k.file_path, k.qualified_name): y for k, y in res.labels}
    assert got == {("src/app.js", "safe"): 0, ("src/app.js", "render"): 1, ("src/other.js", "gone"): 1}
    assert res.project == f"proj@{fix[:12]}"
    assert not res.empty
    text = labels_csv([res])
    assert text.splitlines()[0] == "project,path,qualified_name,start_line,end_line,label"


def test_non_js_fix_labels_nothing_positive(tmp_path):
    g, _, docs = fixed_repo(tmp_path)
    res = label_from_fix(FixRecord(g.path, docs))
    assert res.labels and not res.vulnerable and not res.empty


def test_empty_patch_is_flagged(tmp_path):
    g, _, _ = fixed_repo(tmp_path)
    res = label_from_fix(FixRecord(g.path, g.head()))
    assert res.empty and res.labels == []
    assert "EmptyPatch" in res.diagnostics[0]


def test_load_fixes_csv_and_json(tmp_path):
    c = tmp_path / "f.csv"
    c.write_text("repo,fix_commit,advisory_id\n/r,abc,ID-1\n")
    j = tmp_path / "f.json"
    j.write_text(json.dumps([{"repo_url_or_path": "/r", "fix_commit": "abc"}]))
    assert load_fixes(str(c)) == [FixRecord("/r", "abc", "ID-1")]
    assert load_fixes(str(j)) == [FixRecord("/r", "abc", "")]
    bad = tmp_path / "b.csv"
    bad.write_text("repo,fix_commit\n/r,\n")
    with pytest.raises(DataError):
        load_fixes(str(bad))


# -- join and CSV ---------------------------------------------------------------


def table_text(columns, rows):
    head = ",".join(["path", "qualified_name", "start_line", "end_line"] + columns)
    return head + "\n" + "\n".join(",".join(map(str, r)) for r in rows) + "\n"


def test_join_reports_unmatched_rows():
    s = read_feature_table(
        table_text(STATIC_COLUMNS, [["a.js", "f", 1, 3] + [1] * 42, ["a.js", "g", 5, 9] + [2] * 42]),
        STATIC_COLUMNS,
    )
    p = read_feature_table(
        table_text(PROCESS_COLUMNS, [["a.js", "f", 1, 3] + [0.5] * 19, ["b.js", "h", 1, 2] + [0] * 19]),
        PROCESS_COLUMNS,
    )
    labels, projects = read_label_table(
        "project,path,qualified_name,start_line,end_line,label\np@1,a.js,f,1,3,1\n"
    )
    report = JoinReport()
    ds = join(s, p, labels, projects, report)
    assert len(ds) == 1 and ds.y.tolist() == [1]
    assert ds.keys[0] == SampleKey("p@1", "a.js", "f", 1, 3)
    assert report.static_only == [("a.js", "g", 5, 9)]
    assert report.process_only == [("b.js", "h", 1, 2)]
    assert ds.X.shape == (1, 61) and ds.columns == FEATURE_COLUMNS


def test_duplicate_key_rejected():
    text = table_text(PROCESS_COLUMNS, [["a.js", "f", 1, 3] + [0] * 19] * 2)
    with pytest.raises(DuplicateKey):
        read_feature_table(text, PROCESS_COLUMNS)


def small_dataset(n_pos=5, n_neg=15, seed=0):
    rng = np.random.default_rng(seed)
    n = n_pos + n_neg
    keys = [SampleKey("p", "a.js", f"f{i}", i + 1, i + 2) for i in range(n)]
    y = np.array([1] * n_pos + [0] * n_neg)
    return Dataset(keys, rng.normal(size=(n, 3)).round(3), y, ["LOC", "McCC", "NOCHG"])


def test_dataset_csv_round_trip():
    ds = small_dataset()
    back = read_dataset(dataset_csv(ds))
    assert back.keys == ds.keys and back.columns == ds.columns
    assert np.array_equal(back.X, ds.X) and np.array_equal(back.y, ds.y)
    with pytest.raises(DuplicateKey):
        concat([ds, ds])


def test_external_dataset_mapping():
    text = "Name,LOC,McCC,neg/pos\nf,10,2,pos\ng,3,1,neg\n"
    ds = read_external_dataset(text, {"key": {"name": "Name"}, "label": "neg/pos"})
    assert ds.columns == [c for c in FEATURE_COLUMNS if c in ("LOC", "McCC")]
    assert ds.y.tolist() == [1, 0]
    assert [k.name for k in ds.keys] == ["f", "g"]
    with pytest.raises(DataError):
        read_external_dataset("LOC,label\n1,maybe\n")


# -- splits and folds -------------------------------------------------------------


def test_largest_remainder_sizes():
    assert largest_remainder(12125, [0.8, 0.1, 0.1]) == [9700, 1212, 1213]
    assert largest_remainder(10, [1, 1, 1]) == [3, 3, 4]
    assert sum(largest_remainder(7, [0.5, 0.25, 0.25])) == 7


def test_stratified_split_is_partition():
    y = np.array([1] * 1496 + [0] * 10629)
    tr, dv, te = split_indices(y, SplitSpec(seed=3))
    allidx = np.concatenate([tr, dv, te])
    assert sorted(allidx.tolist()) == list(range(len(y)))
    assert (len(tr), len(dv), len(te)) == (9700, 1212, 1213)
    assert [int(y[p].sum()) for p in (tr, dv, te)] == [1197, 149, 150]
    again = split_indices(y, SplitSpec(seed=3))
    assert all(np.array_equal(a, b) for a, b in zip((tr, dv, te), again))


def test_split_spec_validation():
    with pytest.raises(ConfigError):
        SplitSpec(0.8, 0.3, 0.1)
    with pytest.raises(ConfigError):
        SplitSpec(k=1)


def test_folds_are_stratified_partition():
    y = np.array([1] * 23 + [0] * 77)
    folds = fold_indices(y, 10, seed=1)
    assert sorted(np.concatenate(folds).tolist()) == list(range(100))
    assert all(len(f) == 10 for f in folds)
    pos = [int(y[f].sum()) for f in folds]
    assert max(pos) - min(pos) <= 1
    with pytest.raises(InsufficientClassSamples):
        fold_indices(np.array([1] * 3 + [0] * 50), 10, 0)


# -- resampling -------------------------------------------------------------------


@pytest.mark.parametrize("ratio", [0.25, 0.5, 0.75, 1.0])
@pytest.mark.parametrize("mode", ["over", "under"])
def test_resampling_ratio_and_membership(mode, ratio):
    y = np.array([1] * 120 + [0] * 900)
    idx = resample_indices(y, ResamplePlan(mode, ratio), seed=7)
    out = y[idx]
    pos, neg = int(out.sum()), int((out == 0).sum())
    if mode == "over":
        assert abs(pos - ratio * neg) <= 1
        assert idx[: len(y)].tolist() == list(range(len(y)))  # originals kept in order
    else:
        assert abs(neg - pos / ratio) <= 1
        assert len(set(idx.tolist())) == len(idx) and set(idx.tolist()) <= set(range(len(y)))
        assert pos == 120


def test_unreachable_ratio():
    with pytest.raises(RatioUnreachable):
        target_counts(500, 600, ResamplePlan("over", 0.5))
    with pytest.raises(RatioUnreachable):
        target_counts(500, 600, ResamplePlan("under", 0.5))
    with pytest.raises(ConfigError):
        ResamplePlan("sideways", 0.5)


def test_pos_total_semantics():
    plan = ResamplePlan("over", 0.5, "pos/total")
    assert target_counts(10, 100, plan) == (100, 100)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 300),
    st.integers(1, 300),
    st.sampled_from([0.25, 0.5, 0.75, 1.0]),
    st.sampled_from(["over", "under"]),
    st.integers(0, 2**31),
)
def test_resampling_property(n_pos, n_neg, ratio, mode, seed):
    y = np.array([1] * n_pos + [0] * n_neg)
    plan = ResamplePlan(mode, ratio)
    try:
        idx = resample_indices(y, plan, seed)
    except RatioUnreachable:
        r = Fraction(str(ratio))
        if mode == "over":
            assert math.floor(r * n_neg) < n_pos
        else:
            assert math.floor(n_pos / r) > n_neg
        return
    out = y[idx]
    pos, neg = int(out.sum()), int((out == 0).sum())
    if mode == "over":
        assert neg == n_neg and abs(pos - ratio * neg) <= 1
        assert np.array_equal(idx[: len(y)], np.arange(len(y)))
    else:
        assert pos == n_pos and abs(neg - pos / ratio) <= 1
        assert len(np.unique(idx)) == len(idx)


def test_resample_dataset_keeps_keys():
    ds = small_dataset()
    out = resample(ds, ResamplePlan("over", 1.0), seed=0)
    assert out.positives == out.negatives == 15
    assert set(out.keys) == set(ds.keys)
