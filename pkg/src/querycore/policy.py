"""Turn-level action selection: the greedy engine and the two baselines.

Four query kinds exist. An item query ("is it v3?") can end the session; an
attribute query ("which level?") expects a value or Not Care; a value query
("level = 5?") and a threshold query ("price >= 250?") expect yes or no.
The greedy policies score every admissible candidate by expected certainty
gain and take the argmax; exact ties break by a fixed total order (query
kind, then attribute name or item id, then declared value position) so
transcripts are reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .catalog import CONTINUOUS, DISCRETE, ID_QUERY, THRESHOLD_QUERY, VALUE_QUERY, Catalog
from .gain import (
    GainContext,
    GainError,
    attribute_gain,
    dependence_gain,
    dependence_value_gain,
    item_gain,
    propose_threshold,
    threshold_gain,
    value_gain,
)
from .scorer import DependenceModel

POLICIES = ("core", "core-d", "ag", "me")
MODES = ("attr", "value", "catalog")

# tie-break rank per query kind: items beat attributes beat values beat thresholds
_KIND_RANK = {"item": 0, "attribute": 1, "value": 2, "threshold": 3}


@dataclass(frozen=True)
class QueryAction:
    """One concrete query the agent may ask.

    kind is "item", "attribute", "value" or "threshold"; the matching field
    (item / attr / attr+value / attr+threshold) is set. gain records the
    expected certainty gain at selection time, for transcripts and UIs; it
    takes no part in equality-sensitive comparisons, use signature() for
    those.
    """

    kind: str
    item: str | None = None
    attr: str | None = None
    value: Any = None
    threshold: float | None = None
    gain: float | None = None

    def signature(self) -> tuple:
        return (self.kind, self.item, self.attr, self.value, self.threshold)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.item is not None:
            out["item"] = self.item
        if self.attr is not None:
            out["attr"] = self.attr
        if self.kind == "value":
            out["value"] = self.value
        if self.threshold is not None:
            out["threshold"] = self.threshold
        out["gain"] = self.gain
        return out


@dataclass(frozen=True)
class PolicyConfig:
    """Which policy runs and how its action space is shaped.

    mode picks the discrete-attribute query style: "attr" asks open
    questions, "value" asks closed per-value questions, "catalog" honors
    each attribute's declared query_style. Continuous attributes always
    take threshold queries. dependence_refresh controls whether core-d
    re-estimates its conditionals each turn or freezes them at the start.
    """

    policy: str = "core"
    mode: str = "catalog"
    tie_break: str = "lexicographic"
    dependence_refresh: str = "per_turn"

    def __post_init__(self) -> None:
        normalized = self.policy.replace("_", "-")
        if normalized != self.policy:
            object.__setattr__(self, "policy", normalized)
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r} (want one of {POLICIES})")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r} (want one of {MODES})")
        if self.tie_break != "lexicographic":
            raise ValueError(f"unknown tie_break {self.tie_break!r}")
        if self.dependence_refresh not in ("per_turn", "frozen"):
            raise ValueError(f"unknown dependence_refresh {self.dependence_refresh!r}")


def effective_style(catalog: Catalog, attr: str, mode: str) -> str:
    """The query style an attribute takes under the configured mode."""
    schema = catalog.attr_by_name[attr]
    if schema.kind == CONTINUOUS:
        return THRESHOLD_QUERY
    if mode == "attr":
        return ID_QUERY
    if mode == "value":
        return VALUE_QUERY
    return schema.query_style


def _tie_key(catalog: Catalog, action: QueryAction) -> tuple:
    """Total order used on exact gain ties.

    Value queries order by position in the attribute's declared value
    tuple, not by string form: the value set is declared ordered, and the
    declaration is the one ordering every value type shares.
    """
    if action.kind == "item":
        return (_KIND_RANK["item"], action.item, 0.0)
    if action.kind == "attribute":
        return (_KIND_RANK["attribute"], action.attr, 0.0)
    if action.kind == "value":
        pos = catalog.value_index(action.attr)[action.value]
        return (_KIND_RANK["value"], action.attr, float(pos))
    return (_KIND_RANK["threshold"], action.attr, float(action.threshold))


_TIE_REL = 1e-12


class _Best:
    """Running argmax; gains within one part in 1e12 count as tied.

    The band matters for reproducibility: rescaling every score (say by
    0.1) perturbs mathematically equal gains by a few ulps because the
    scaled inputs stop being exactly representable, and a knife-edge
    comparison would leak that rounding noise into the action sequence.
    Anything inside the band resolves by _tie_key instead.
    """

    def __init__(self, catalog: Catalog) -> None:
        self.catalog = catalog
        self.gain = -math.inf
        self.action: QueryAction | None = None
        self._key: tuple | None = None

    def offer(self, gain: float, action: QueryAction) -> None:
        if self.action is None:
            self.gain = gain
            self.action = action
            return
        tol = _TIE_REL * max(abs(gain), abs(self.gain))
        if gain > self.gain + tol:
            self.gain = gain
            self.action = action
            self._key = None
            return
        if gain >= self.gain - tol:
            key = _tie_key(self.catalog, action)
            if self._key is None:
                self._key = _tie_key(self.catalog, self.action)
            if key < self._key:
                self.gain = gain
                self.action = action
                self._key = key


def select_action(
    ctx: GainContext, cfg: PolicyConfig, dep: DependenceModel | None = None
) -> QueryAction:
    """Pick the next query for the configured policy.

    The greedy policies score every unchecked item, every unchecked
    attribute in its effective style (open question, or one closed question
    per unchecked value) and one proposed threshold per continuous
    attribute. core-d swaps in dependence-adjusted gains for the
    attribute-level queries; item gains are never adjusted.
    """
    if cfg.policy == "ag":
        return ag_select(ctx)
    if cfg.policy == "me":
        return me_select(ctx, cfg.mode)
    if cfg.policy == "core-d" and dep is None:
        raise GainError("core-d needs a dependence model")

    use_dep = cfg.policy == "core-d"
    best = _Best(ctx.catalog)

    gains = ctx.item_gains()
    for item_id, g in zip(ctx.item_order, gains):
        best.offer(float(g), QueryAction("item", item=item_id, gain=float(g)))

    for attr in ctx.unchecked_attrs:
        style = effective_style(ctx.catalog, attr, cfg.mode)
        if style == ID_QUERY:
            g = dependence_gain(ctx, dep, attr) if use_dep else attribute_gain(ctx, attr)
            best.offer(g, QueryAction("attribute", attr=attr, gain=g))
        elif style == VALUE_QUERY:
            for w in ctx.unchecked_values.get(attr, ()):
                g = (
                    dependence_value_gain(ctx, dep, attr, w)
                    if use_dep
                    else value_gain(ctx, attr, w)
                )
                best.offer(g, QueryAction("value", attr=attr, value=w, gain=g))
        else:
            w = propose_threshold(ctx, attr)
            g = threshold_gain(ctx, attr, w)
            best.offer(g, QueryAction("threshold", attr=attr, threshold=w, gain=g))

    assert best.action is not None  # unchecked items always yield candidates
    return best.action


def ag_select(ctx: GainContext) -> QueryAction:
    """Baseline: always ask for the highest-scored unchecked item."""
    best_id = None
    best_score = -math.inf
    for item_id in ctx.item_order:
        s = ctx.score_of(item_id)
        if s > best_score or (s == best_score and item_id < best_id):  # type: ignore[operator]
            best_id, best_score = item_id, s
    assert best_id is not None
    return QueryAction("item", item=best_id, gain=item_gain(ctx, best_id))


def count_entropy(ctx: GainContext, attr: str) -> float:
    """Count-based entropy of an attribute over the unchecked items."""
    counts = ctx.counts(attr)
    n = counts.sum()
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / n
            h -= p * math.log(p)
    return h


def me_select(ctx: GainContext, mode: str = "value") -> QueryAction:
    """Baseline: query the maximum-count-entropy discrete attribute.

    In attr mode the pick is asked as an open question; in value mode its
    most frequent unchecked value is asked as a closed question. With no
    discrete attribute left the baseline degrades to the item greedy so
    sessions can still end.
    """
    candidates = [
        a for a in ctx.unchecked_attrs if ctx.catalog.attr_by_name[a].kind == DISCRETE
    ]
    if not candidates:
        return ag_select(ctx)
    best_attr = None
    best_h = -math.inf
    for attr in candidates:
        h = count_entropy(ctx, attr)
        if h > best_h or (h == best_h and attr < best_attr):  # type: ignore[operator]
            best_attr, best_h = attr, h
    assert best_attr is not None

    style = effective_style(ctx.catalog, best_attr, mode)
    if style == ID_QUERY:
        return QueryAction(
            "attribute", attr=best_attr, gain=attribute_gain(ctx, best_attr)
        )

    counts = ctx.counts(best_attr)
    vidx = ctx.catalog.value_index(best_attr)
    best_w = None
    best_c = -1
    # count ties keep the earliest value in declared order
    for w in ctx.unchecked_values.get(best_attr, ()):
        c = int(counts[vidx[w]])
        if c > best_c:
            best_w, best_c = w, c
    if best_w is None:
        return ag_select(ctx)
    return QueryAction(
        "value",
        attr=best_attr,
        value=best_w,
        gain=value_gain(ctx, best_attr, best_w),
    )
