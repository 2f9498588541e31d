"""Relevance scores and the pairwise dependence model.

The engine never trains anything. Scores come from a cold start (uniform),
a score file written by some external recommender, or a frequency stand-in
built from an interaction log. All downstream formulas are ratio-based, so
scores need not sum to one; they only need to be nonnegative with at least
one strictly positive entry.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

from .catalog import DISCRETE, Catalog


class ScoreError(ValueError):
    """Raised for invalid score or dependence data."""


@dataclass(frozen=True)
class ScoreVector:
    """Per-item relevance scores, aligned to the catalog's item order.

    `scores` is the id -> value mapping; `array` is the same data as a
    float64 vector in catalog item order (what the gain math consumes).
    """

    scores: Mapping[str, float]
    array: np.ndarray

    def __getitem__(self, item_id: str) -> float:
        return self.scores[item_id]

    def scaled(self, factor: float) -> "ScoreVector":
        if not math.isfinite(factor) or factor <= 0.0:
            raise ScoreError(f"scale factor must be positive and finite, got {factor!r}")
        return ScoreVector(
            {k: v * factor for k, v in self.scores.items()}, self.array * factor
        )


def make_scores(catalog: Catalog, mapping: Mapping[str, float]) -> ScoreVector:
    """Validate an id -> score mapping against a catalog."""
    unknown = set(mapping) - set(catalog.item_ids)
    if unknown:
        raise ScoreError(f"unknown item id in scores: {sorted(unknown)[0]!r}")
    out: dict[str, float] = {}
    for item_id in catalog.item_ids:
        if item_id not in mapping:
            raise ScoreError(f"missing item {item_id!r} in scores")
        v = float(mapping[item_id])
        if math.isnan(v) or math.isinf(v):
            raise ScoreError(f"score for {item_id!r} is not finite")
        if v < 0:
            raise ScoreError(f"negative score for {item_id!r}")
        out[item_id] = v
    if not any(v > 0 for v in out.values()):
        raise ScoreError("all-zero score vector")
    array = np.array([out[i] for i in catalog.item_ids], dtype=np.float64)
    return ScoreVector(out, array)


def cold_start_scores(catalog: Catalog) -> ScoreVector:
    """Uniform scores 1/M: the engine knows nothing about the user yet."""
    m = catalog.n_items
    return make_scores(catalog, {i: 1.0 / m for i in catalog.item_ids})


def load_scores(path: str, catalog: Catalog) -> ScoreVector:
    """Load a flat id -> number JSON map and validate it."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScoreError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScoreError(f"{path}: scores file must hold a JSON object")
    return make_scores(catalog, data)


def frequency_scores(path: str, catalog: Catalog, smoothing: float = 0.0) -> ScoreVector:
    """Hot-start stand-in: normalized interaction counts plus smoothing.

    The file is CSV with an `item_id,count` header. Items absent from the
    file get only the smoothing mass. Counts for a repeated id accumulate.
    """
    if smoothing < 0:
        raise ScoreError("smoothing must be >= 0")
    counts: dict[str, float] = {i: 0.0 for i in catalog.item_ids}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["item_id", "count"]:
            raise ScoreError(f"{path}: expected header 'item_id,count'")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            item_id, raw = row[0].strip(), row[1].strip()
            if item_id not in counts:
                raise ScoreError(f"{path}: unknown item id {item_id!r}")
            c = float(raw)
            if c < 0:
                raise ScoreError(f"{path}: negative count for {item_id!r}")
            counts[item_id] += c
    total = sum(counts.values()) + smoothing * catalog.n_items
    if total <= 0:
        raise ScoreError("interaction log empty and smoothing is zero")
    return make_scores(
        catalog, {i: (counts[i] + smoothing) / total for i in catalog.item_ids}
    )


# dependence -----------------------------------------------------------------


@dataclass(frozen=True)
class DependenceModel:
    """Conditional value co-occurrence, cond[(a, w_a, b, w_b)] in [0, 1].

    Read as: given that the user's preferred value of a is w_a, the
    probability that their preferred value of b is w_b. Missing entries
    mean 0 (the conditioning event never occurs among the counted items).
    """

    cond: Mapping[tuple[str, Any, str, Any], float]
    source: str  # "statistical" or "external"

    def get(self, a: str, w_a: Any, b: str, w_b: Any) -> float:
        return self.cond.get((a, w_a, b, w_b), 0.0)


def estimate_dependence(catalog: Catalog, unchecked_items: Iterable[str]) -> DependenceModel:
    """Count-based conditionals over the still-unchecked items.

    cond(a, w_a, b, w_b) = |{v unchecked: v.a = w_a and v.b = w_b}|
                         / |{v unchecked: v.a = w_a}|
    with zero-denominator entries stored as 0. Pairs where a == b come out
    as exact indicators, which is what the self-term of the dependence gain
    needs.
    """
    ids = list(unchecked_items)
    if not ids:
        raise ScoreError("cannot estimate dependence over an empty item set")
    rows = [catalog.items[catalog.item_index[i]].values for i in ids]
    discrete = [a for a in catalog.attributes if a.kind == DISCRETE]
    cond: dict[tuple[str, Any, str, Any], float] = {}
    for a in discrete:
        for w_a in a.values:  # type: ignore[union-attr]
            base = [r for r in rows if r[a.name] == w_a]
            if not base:
                continue
            denom = float(len(base))
            for b in discrete:
                for w_b in b.values:  # type: ignore[union-attr]
                    num = sum(1 for r in base if r[b.name] == w_b)
                    if num:
                        cond[(a.name, w_a, b.name, w_b)] = num / denom
    return DependenceModel(cond, "statistical")


def load_dependence(path: str, catalog: Catalog) -> DependenceModel:
    """Load an external pairwise-weight file (nested a -> w_a -> b -> w_b map).

    Weights are clamped to [0, 1] and not renormalized; whether they ought
    to be probabilities is left to whoever produced the file.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScoreError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScoreError(f"{path}: dependence file must hold a JSON object")
    valid = {
        a.name: set(a.values)  # type: ignore[arg-type]
        for a in catalog.attributes
        if a.kind == DISCRETE
    }

    def coerce(raw: str, values: set) -> Any:
        # JSON object keys are always strings; map them back onto the
        # catalog's declared symbols when those are numeric.
        if raw in values:
            return raw
        for cast in (int, float):
            try:
                v = cast(raw)
            except ValueError:
                continue
            if v in values:
                return v
        return raw

    cond: dict[tuple[str, Any, str, Any], float] = {}
    for a, per_wa in data.items():
        if a not in valid:
            raise ScoreError(f"{path}: unknown discrete attribute {a!r}")
        for w_a, per_b in per_wa.items():
            for b, per_wb in per_b.items():
                if b not in valid:
                    raise ScoreError(f"{path}: unknown discrete attribute {b!r}")
                for w_b, weight in per_wb.items():
                    w = float(weight)
                    key = (a, coerce(w_a, valid[a]), b, coerce(w_b, valid[b]))
                    cond[key] = min(1.0, max(0.0, w))
    return DependenceModel(cond, "external")
