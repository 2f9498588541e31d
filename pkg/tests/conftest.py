"""Shared fixtures: the small hand-checked catalogs used across the suite.

S1 is the running four-item example with skewed scores; S2 is the uniform
binary-color catalog; S3 has two perfectly correlated binary attributes
(and an "s3c" variant adding an independent one). All expected numbers in
the tests were computed with the brute-force reference in oracle.py before
the library existed, and are frozen here as literals.
"""

from __future__ import annotations

import pytest

from querycore import Catalog, ScoreVector, catalog_from_dict, cold_start_scores, make_scores


@pytest.fixture
def s1_catalog() -> Catalog:
    return catalog_from_dict(
        {
            "attributes": [
                {"name": "level", "kind": "discrete", "values": [3, 5], "query_style": "value_query"}
            ],
            "items": [
                {"id": "v1", "values": {"level": 3}},
                {"id": "v2", "values": {"level": 5}},
                {"id": "v3", "values": {"level": 3}},
                {"id": "v4", "values": {"level": 5}},
            ],
        }
    )


@pytest.fixture
def s1_scores(s1_catalog) -> ScoreVector:
    return make_scores(s1_catalog, {"v1": 0.4, "v2": 0.3, "v3": 0.2, "v4": 0.1})


@pytest.fixture
def s1_rows() -> dict:
    return {
        "v1": {"level": 3},
        "v2": {"level": 5},
        "v3": {"level": 3},
        "v4": {"level": 5},
    }


@pytest.fixture
def s2_catalog() -> Catalog:
    return catalog_from_dict(
        {
            "attributes": [
                {"name": "color", "kind": "discrete", "values": ["r", "b"], "query_style": "value_query"}
            ],
            "items": [
                {"id": "v1", "values": {"color": "r"}},
                {"id": "v2", "values": {"color": "r"}},
                {"id": "v3", "values": {"color": "b"}},
                {"id": "v4", "values": {"color": "b"}},
            ],
        }
    )


@pytest.fixture
def s2_scores(s2_catalog) -> ScoreVector:
    return cold_start_scores(s2_catalog)


@pytest.fixture
def price_catalog() -> Catalog:
    """Four items with one continuous attribute (prices 100..400)."""
    return catalog_from_dict(
        {
            "attributes": [
                {"name": "price", "kind": "continuous", "query_style": "threshold_query"}
            ],
            "items": [
                {"id": "v1", "values": {"price": 100.0}},
                {"id": "v2", "values": {"price": 200.0}},
                {"id": "v3", "values": {"price": 300.0}},
                {"id": "v4", "values": {"price": 400.0}},
            ],
        }
    )


def _s3_dict(extra_attr: bool) -> dict:
    attributes = [
        {"name": "level", "kind": "discrete", "values": [3, 5], "query_style": "value_query"},
        {"name": "shower", "kind": "discrete", "values": ["yes", "no"], "query_style": "value_query"},
    ]
    rows = [
        ("v1", 3, "yes", "w1"),
        ("v2", 3, "yes", "w2"),
        ("v3", 5, "no", "w1"),
        ("v4", 5, "no", "w2"),
    ]
    if extra_attr:
        attributes.append(
            {"name": "c", "kind": "discrete", "values": ["w1", "w2"], "query_style": "value_query"}
        )
    items = []
    for item_id, level, shower, c in rows:
        values = {"level": level, "shower": shower}
        if extra_attr:
            values["c"] = c
        items.append({"id": item_id, "values": values})
    return {"attributes": attributes, "items": items}


@pytest.fixture
def s3_catalog() -> Catalog:
    """level and shower perfectly correlated, uniform scores."""
    return catalog_from_dict(_s3_dict(extra_attr=False))


@pytest.fixture
def s3c_catalog() -> Catalog:
    """S3 plus an attribute c independent of both others."""
    return catalog_from_dict(_s3_dict(extra_attr=True))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdicts after the summary, pass or fail."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
