"""Expected-certainty-gain formulas over the unchecked sets.

Uncertainty is the total relevance mass still unchecked. Every query kind
resolves part of that mass depending on the user's answer; the expected
certainty gain of a query weights each admissible answer by its score-ratio
probability. All functions here are pure and side-effect free; a
GainContext bundles the immutable inputs plus small per-turn caches so the
policy layer can score many candidate queries without recomputing masses.

Gains live on the same scale as the scores. Item, attribute, value and
threshold gains always land in [0, R] where R is the total unchecked mass.
Dependence-adjusted gains sum contributions over every unchecked attribute
and may exceed R; they are only ever compared against each other.
"""

from __future__ import annotations

from typing import Any, Iterable, Mapping

import numpy as np

from .catalog import CONTINUOUS, DISCRETE, Catalog
from .scorer import DependenceModel, ScoreVector


class GainError(ValueError):
    """Raised when a gain is requested for an illegal query."""


class GainContext:
    """Catalog + scores + the unchecked item/attribute/value sets.

    `unchecked_items` defaults to every item, `unchecked_attrs` to every
    attribute and `unchecked_values` to every declared value of each
    discrete attribute. Masses are cached per attribute, so reuse one
    context for all the candidate queries of a turn and build a fresh one
    after the state changes.
    """

    def __init__(
        self,
        catalog: Catalog,
        scores: ScoreVector,
        unchecked_items: Iterable[str] | None = None,
        unchecked_attrs: Iterable[str] | None = None,
        unchecked_values: Mapping[str, Iterable[Any]] | None = None,
    ):
        self.catalog = catalog
        self.scores = scores

        if unchecked_items is None:
            self.mask = np.ones(catalog.n_items, dtype=bool)
            self.item_order: tuple[str, ...] = catalog.item_ids
        else:
            wanted = set(unchecked_items)
            unknown = wanted - set(catalog.item_ids)
            if unknown:
                raise GainError(f"unknown item id {sorted(unknown)[0]!r}")
            self.mask = np.zeros(catalog.n_items, dtype=bool)
            for item_id in wanted:
                self.mask[catalog.item_index[item_id]] = True
            self.item_order = tuple(i for i in catalog.item_ids if i in wanted)
        if not self.item_order:
            raise GainError("no unchecked items")

        if unchecked_attrs is None:
            self.unchecked_attrs: tuple[str, ...] = tuple(a.name for a in catalog.attributes)
        else:
            self.unchecked_attrs = tuple(
                a.name for a in catalog.attributes if a.name in set(unchecked_attrs)
            )

        values: dict[str, tuple[Any, ...]] = {}
        for a in catalog.attributes:
            if a.kind != DISCRETE:
                continue
            if unchecked_values is not None and a.name in unchecked_values:
                keep = set(unchecked_values[a.name])
                values[a.name] = tuple(w for w in a.values if w in keep)  # type: ignore[union-attr]
            else:
                values[a.name] = tuple(a.values)  # type: ignore[union-attr]
        self.unchecked_values: dict[str, tuple[Any, ...]] = values

        self._unchecked_scores = scores.array[self.mask]
        self.total: float = float(np.sum(self._unchecked_scores))
        self._masses: dict[str, np.ndarray] = {}
        self._counts: dict[str, np.ndarray] = {}

    # cached per-attribute aggregates ------------------------------------

    def masses(self, attr: str) -> np.ndarray:
        """Unchecked score mass per declared value of a discrete attribute."""
        got = self._masses.get(attr)
        if got is None:
            codes = self.catalog.codes(attr)[self.mask]
            n_vals = len(self.catalog.value_index(attr))
            got = np.bincount(codes, weights=self._unchecked_scores, minlength=n_vals)
            self._masses[attr] = got
        return got

    def counts(self, attr: str) -> np.ndarray:
        """Unchecked item count per declared value of a discrete attribute."""
        got = self._counts.get(attr)
        if got is None:
            codes = self.catalog.codes(attr)[self.mask]
            n_vals = len(self.catalog.value_index(attr))
            got = np.bincount(codes, minlength=n_vals)
            self._counts[attr] = got
        return got

    def score_of(self, item_id: str) -> float:
        return float(self.scores.array[self.catalog.item_index[item_id]])

    def item_gains(self) -> np.ndarray:
        """Item-query gains for every unchecked item, in item order."""
        s = self._unchecked_scores
        r = self.total
        if r <= 0.0:
            return np.zeros_like(s)
        p = s / r
        return r * p + s * (1.0 - p)

    def _require_unchecked_attr(self, attr: str) -> None:
        if attr not in self.catalog.attr_by_name:
            raise GainError(f"unknown attribute {attr!r}")
        if attr not in self.unchecked_attrs:
            raise GainError(f"attribute {attr!r} is already checked")


# the four base gains -------------------------------------------------------


def item_gain(ctx: GainContext, item_id: str) -> float:
    """Expected gain of asking "is it this item?".

    A Yes resolves everything (gain R); a No resolves just this item's
    score. The Yes probability is the item's share of the unchecked mass.
    """
    if item_id not in ctx.catalog.item_index:
        raise GainError(f"unknown item {item_id!r}")
    if not ctx.mask[ctx.catalog.item_index[item_id]]:
        raise GainError(f"item {item_id!r} is already checked")
    s = ctx.score_of(item_id)
    r = ctx.total
    if r <= 0.0:
        return 0.0
    p = s / r
    return r * p + s * (1.0 - p)


def attribute_gain(ctx: GainContext, attr: str) -> float:
    """Expected gain of the open question "which value of attr?".

    Each candidate value w answers with probability mass(=w)/R and
    eliminates the complementary mass(!=w).
    """
    ctx._require_unchecked_attr(attr)
    if ctx.catalog.attr_by_name[attr].kind != DISCRETE:
        raise GainError(f"attribute {attr!r} is continuous; ask a threshold instead")
    r = ctx.total
    if r <= 0.0:
        return 0.0
    m = ctx.masses(attr)
    return float(np.sum((r - m) * (m / r)))


def value_gain(ctx: GainContext, attr: str, w: Any) -> float:
    """Expected gain of the closed question "is attr = w?".

    Yes keeps the matching items and eliminates mass(!=w); No eliminates
    mass(=w). Yes probability is mass(=w)/R.
    """
    ctx._require_unchecked_attr(attr)
    if ctx.catalog.attr_by_name[attr].kind != DISCRETE:
        raise GainError(f"attribute {attr!r} is continuous; ask a threshold instead")
    if w not in ctx.unchecked_values.get(attr, ()):
        raise GainError(f"value {w!r} of {attr!r} is not unchecked")
    r = ctx.total
    if r <= 0.0:
        return 0.0
    m = float(ctx.masses(attr)[ctx.catalog.value_index(attr)[w]])
    p = m / r
    return (r - m) * p + m * (1.0 - p)


def propose_threshold(ctx: GainContext, attr: str) -> float:
    """Score-weighted mean of the attribute over unchecked items.

    The exact mass-halving split point is expensive to search for, so the
    proposal averages the candidate values weighted by relevance; with
    near-uniform scores it lands near the mass median. The result is
    rounded to 12 significant digits so that rescaling every score (which
    perturbs the quotient by an ulp or two) cannot leak rounding noise
    into transcripts.
    """
    if ctx.catalog.attr_by_name[attr].kind != CONTINUOUS:
        raise GainError(f"attribute {attr!r} is not continuous")
    vals = ctx.catalog.floats(attr)[ctx.mask]
    r = ctx.total
    if r <= 0.0:
        return float(f"{np.mean(vals):.12g}")
    return float(f"{np.sum(ctx._unchecked_scores * vals) / r:.12g}")


def threshold_gain(ctx: GainContext, attr: str, w: float) -> float:
    """Expected gain of "is your preferred attr at least w?".

    Yes (probability mass(>=w)/R) eliminates the below-threshold mass; No
    eliminates the at-or-above mass. Ties sit on the Yes side.
    """
    if ctx.catalog.attr_by_name[attr].kind != CONTINUOUS:
        raise GainError(f"attribute {attr!r} is not continuous")
    r = ctx.total
    if r <= 0.0:
        return 0.0
    vals = ctx.catalog.floats(attr)[ctx.mask]
    above = float(np.sum(ctx._unchecked_scores[vals >= w]))
    below = r - above
    p = above / r
    return below * p + above * (1.0 - p)


# dependence-adjusted gains --------------------------------------------------


def _eliminated_mass_by_value(ctx: GainContext, attr: str) -> np.ndarray:
    """mass(!= w) for every declared value w of attr."""
    return ctx.total - ctx.masses(attr)


def _dependent_attrs(ctx: GainContext) -> tuple[str, ...]:
    return tuple(
        a for a in ctx.unchecked_attrs if ctx.catalog.attr_by_name[a].kind == DISCRETE
    )


def dependence_gain(ctx: GainContext, dep: DependenceModel, attr: str) -> float:
    """Open-question gain credited with cross-attribute carry-over.

    Answering "which value of attr?" also pins down correlated attributes:
    for each candidate answer w, the resolved certainty sums, over every
    unchecked discrete attribute b and value w_b, the mass that knowing
    "b = w_b" would eliminate, weighted by cond(attr, w, b, w_b). The
    queried attribute's own term degenerates to the plain per-answer gain
    because its conditional is an indicator.
    """
    ctx._require_unchecked_attr(attr)
    if ctx.catalog.attr_by_name[attr].kind != DISCRETE:
        raise GainError(f"attribute {attr!r} is continuous; ask a threshold instead")
    r = ctx.total
    if r <= 0.0:
        return 0.0
    probs = ctx.masses(attr) / r
    values = ctx.catalog.attr_by_name[attr].values or ()
    others = _dependent_attrs(ctx)
    g = 0.0
    for w, p in zip(values, probs):
        if p == 0.0:
            # a zero-probability answer contributes exactly nothing
            continue
        resolved = 0.0
        for b in others:
            elim = _eliminated_mass_by_value(ctx, b)
            for w_b, cg in zip(ctx.catalog.attr_by_name[b].values or (), elim):
                c = dep.get(attr, w, b, w_b)
                if c:
                    resolved += float(cg) * c
        g += float(p) * resolved
    return g


def dependence_value_gain(
    ctx: GainContext, dep: DependenceModel, attr: str, w: Any
) -> float:
    """Closed-question gain credited with cross-attribute carry-over.

    The Yes branch pairs eliminated masses with the model's equality
    conditionals. The No branch flips both sides: the mass each value
    holds, paired with both-differ conditionals counted on the unchecked
    items (an external weight file has nothing to say about disagreement,
    so the No side is always count-based).
    """
    ctx._require_unchecked_attr(attr)
    if ctx.catalog.attr_by_name[attr].kind != DISCRETE:
        raise GainError(f"attribute {attr!r} is continuous; ask a threshold instead")
    if w not in ctx.unchecked_values.get(attr, ()):
        raise GainError(f"value {w!r} of {attr!r} is not unchecked")
    r = ctx.total
    if r <= 0.0:
        return 0.0
    cat = ctx.catalog
    m = float(ctx.masses(attr)[cat.value_index(attr)[w]])
    p = m / r

    attr_codes = cat.codes(attr)[ctx.mask]
    w_code = cat.value_index(attr)[w]
    differs = attr_codes != w_code
    n_differ = int(np.sum(differs))

    branch_yes = 0.0
    branch_no = 0.0
    for b in _dependent_attrs(ctx):
        masses_b = ctx.masses(b)
        elim_b = ctx.total - masses_b
        b_codes = cat.codes(b)[ctx.mask]
        for w_b, idx in cat.value_index(b).items():
            c_yes = dep.get(attr, w, b, w_b)
            if c_yes:
                branch_yes += float(elim_b[idx]) * c_yes
            if n_differ:
                both = int(np.sum(differs & (b_codes != idx)))
                branch_no += float(masses_b[idx]) * (both / n_differ)
    return p * branch_yes + (1.0 - p) * branch_no
