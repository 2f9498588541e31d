"""Score vectors, file loaders, and the dependence estimator."""

from __future__ import annotations

import json

import numpy as np
import pytest

from querycore import (
    ScoreError,
    cold_start_scores,
    estimate_dependence,
    frequency_scores,
    load_dependence,
    load_scores,
    make_scores,
)


def test_cold_start(s2_catalog):
    v = cold_start_scores(s2_catalog)
    assert all(v[i] == 0.25 for i in s2_catalog.item_ids)
    assert float(v.array.sum()) == 1.0


def test_make_scores_validation(s1_catalog):
    v = make_scores(s1_catalog, {"v1": 0.4, "v2": 0.3, "v3": 0.2, "v4": 0.1})
    assert v["v1"] == 0.4

    with pytest.raises(ScoreError, match="missing item"):
        make_scores(s1_catalog, {"v1": 0.4})
    with pytest.raises(ScoreError):
        make_scores(s1_catalog, {"v1": 0.4, "v2": 0.3, "v3": 0.2, "v4": -0.1})
    with pytest.raises(ScoreError, match="all-zero"):
        make_scores(s1_catalog, {"v1": 0.0, "v2": 0.0, "v3": 0.0, "v4": 0.0})
    with pytest.raises(ScoreError):
        make_scores(s1_catalog, {"v1": float("nan"), "v2": 0.3, "v3": 0.2, "v4": 0.1})
    with pytest.raises(ScoreError):
        make_scores(s1_catalog, {"v1": 0.4, "v2": 0.3, "v3": 0.2, "v4": 0.1, "vX": 1.0})


def test_scaled(s1_catalog, s1_scores):
    big = s1_scores.scaled(10.0)
    assert big["v1"] == pytest.approx(4.0)
    with pytest.raises(ScoreError):
        s1_scores.scaled(0.0)


def test_load_scores(tmp_path, s1_catalog):
    path = tmp_path / "scores.json"
    path.write_text(json.dumps({"v1": 0.4, "v2": 0.3, "v3": 0.2, "v4": 0.1}))
    v = load_scores(str(path), s1_catalog)
    assert v["v4"] == 0.1

    path.write_text(json.dumps({"v1": 1.0, "zz": 2.0}))
    with pytest.raises(ScoreError):
        load_scores(str(path), s1_catalog)


def test_frequency_scores(tmp_path, s1_catalog):
    path = tmp_path / "clicks.csv"
    path.write_text("item_id,count\nv1,3\nv2,1\nv3,0\nv4,0\n")
    v = frequency_scores(str(path), s1_catalog)
    assert v["v1"] == pytest.approx(0.75)
    assert v["v2"] == pytest.approx(0.25)
    assert v["v3"] == 0.0

    # duplicate rows accumulate
    path.write_text("item_id,count\nv1,2\nv1,1\nv2,1\nv3,0\nv4,0\n")
    v = frequency_scores(str(path), s1_catalog)
    assert v["v1"] == pytest.approx(0.75)

    # smoothing lifts zero-count items
    path.write_text("item_id,count\nv1,1\n")
    v = frequency_scores(str(path), s1_catalog, smoothing=1.0)
    assert v["v1"] == pytest.approx(2 / 5)
    assert v["v2"] == pytest.approx(1 / 5)

    # missing items default to zero counts; vector stays valid
    path.write_text("item_id,count\nv1,1\n")
    v = frequency_scores(str(path), s1_catalog)
    assert v["v1"] == 1.0
    assert v["v2"] == 0.0

    path.write_text("item_id,count\nv1,-1\n")
    with pytest.raises(ScoreError):
        frequency_scores(str(path), s1_catalog)

    path.write_text("id,count\nv1,1\n")
    with pytest.raises(ScoreError, match="header"):
        frequency_scores(str(path), s1_catalog)

    path.write_text("item_id,count\nzz,1\n")
    with pytest.raises(ScoreError):
        frequency_scores(str(path), s1_catalog)

    path.write_text("item_id,count\n")
    with pytest.raises(ScoreError):
        frequency_scores(str(path), s1_catalog)


def test_estimate_dependence_s3(s3c_catalog):
    dep = estimate_dependence(s3c_catalog, s3c_catalog.item_ids)
    assert dep.source == "statistical"
    # perfectly correlated pair
    assert dep.get("level", 3, "shower", "yes") == 1.0
    assert dep.get("level", 3, "shower", "no") == 0.0
    # independent attribute
    assert dep.get("level", 3, "c", "w1") == 0.5
    # self conditionals are indicators
    assert dep.get("level", 3, "level", 3) == 1.0
    assert dep.get("level", 3, "level", 5) == 0.0


def test_estimate_dependence_zero_denominator(s3_catalog):
    # condition on a value no unchecked item holds: entry absent, get -> 0
    dep = estimate_dependence(s3_catalog, ("v1", "v2"))  # both level=3
    assert dep.get("level", 5, "shower", "no") == 0.0


def test_load_dependence(tmp_path, s3_catalog):
    path = tmp_path / "dep.json"
    # JSON object keys are strings; numeric attribute values must still match
    path.write_text(json.dumps({"level": {"3": {"shower": {"yes": 0.9, "no": 2.0}}}}))
    dep = load_dependence(str(path), s3_catalog)
    assert dep.source == "external"
    assert dep.get("level", 3, "shower", "yes") == 0.9
    assert dep.get("level", 3, "shower", "no") == 1.0  # clamped into [0, 1]

    path.write_text(json.dumps({"bogus": {"3": {"shower": {"yes": 0.9}}}}))
    with pytest.raises(ScoreError):
        load_dependence(str(path), s3_catalog)


def test_dependence_numpy_row_subset(s3c_catalog):
    # estimator over a strict subset uses only those rows
    dep = estimate_dependence(s3c_catalog, ("v1", "v3"))  # c=w1 on both
    assert dep.get("level", 3, "c", "w1") == 1.0
    assert dep.get("level", 3, "c", "w2") == 0.0
    assert dep.get("shower", "no", "level", 5) == 1.0


def test_scores_numpy_array_alignment(s1_catalog, s1_scores):
    assert list(s1_scores.array) == [0.4, 0.3, 0.2, 0.1]
    assert isinstance(s1_scores.array, np.ndarray)
