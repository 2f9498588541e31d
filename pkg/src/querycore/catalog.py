"""Item/attribute data model, catalog file IO and synthetic generation.

A catalog is an immutable table of M items by N attributes. Discrete
attributes carry an explicit, ordered value set; continuous attributes hold
binary64 numbers. Each attribute declares exactly one query style, which is
how the selection policy knows whether it may be asked as an open question
("which level?"), a closed per-value question ("level = 5?") or a threshold
question ("price >= 250?").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

DISCRETE = "discrete"
CONTINUOUS = "continuous"
KINDS = (DISCRETE, CONTINUOUS)

ID_QUERY = "id_query"
VALUE_QUERY = "value_query"
THRESHOLD_QUERY = "threshold_query"
QUERY_STYLES = (ID_QUERY, VALUE_QUERY, THRESHOLD_QUERY)


class CatalogError(ValueError):
    """Raised for malformed catalog data or files."""


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute: name, kind, value space and declared query style.

    Continuous attributes have no value list and always use the threshold
    style. Discrete attributes need at least one value and use either the
    open (id_query) or the closed per-value (value_query) style; the two
    styles never operate on the same attribute.
    """

    name: str
    kind: str
    values: tuple[Any, ...] | None = None
    query_style: str = VALUE_QUERY

    def __post_init__(self) -> None:
        if not self.name:
            raise CatalogError("attribute name must be nonempty")
        if self.kind not in KINDS:
            raise CatalogError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.query_style not in QUERY_STYLES:
            raise CatalogError(
                f"attribute {self.name!r}: unknown query_style {self.query_style!r}"
            )
        if self.kind == DISCRETE:
            if not self.values:
                raise CatalogError(f"discrete attribute {self.name!r} needs >= 1 value")
            if len(set(self.values)) != len(self.values):
                raise CatalogError(f"attribute {self.name!r}: duplicate values")
            if self.query_style == THRESHOLD_QUERY:
                raise CatalogError(
                    f"discrete attribute {self.name!r} cannot use threshold_query"
                )
        else:
            if self.values is not None:
                raise CatalogError(
                    f"continuous attribute {self.name!r} must not declare values"
                )
            if self.query_style != THRESHOLD_QUERY:
                raise CatalogError(
                    f"continuous attribute {self.name!r} must use threshold_query"
                )


@dataclass(frozen=True)
class Item:
    """One item: opaque id plus one value per catalog attribute."""

    id: str
    values: Mapping[str, Any]


class Catalog:
    """Immutable items-by-attributes table.

    Construction validates every invariant (unique ids, complete rows,
    values inside the declared sets) and precomputes the per-attribute
    arrays the gain formulas run on: integer value codes for discrete
    attributes and float arrays for continuous ones.
    """

    def __init__(self, attributes: Sequence[AttributeSchema], items: Sequence[Item]):
        if len(items) < 1:
            raise CatalogError("catalog needs at least one item")
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise CatalogError("duplicate attribute name")
        ids = [it.id for it in items]
        if len(set(ids)) != len(ids):
            raise CatalogError("duplicate item id")

        self.attributes: tuple[AttributeSchema, ...] = tuple(attributes)
        self.items: tuple[Item, ...] = tuple(items)
        self.attr_by_name: dict[str, AttributeSchema] = {a.name: a for a in self.attributes}
        self.item_ids: tuple[str, ...] = tuple(ids)
        self.item_index: dict[str, int] = {i: n for n, i in enumerate(ids)}

        self._codes: dict[str, np.ndarray] = {}
        self._value_index: dict[str, dict[Any, int]] = {}
        self._floats: dict[str, np.ndarray] = {}
        for attr in self.attributes:
            col = []
            for it in self.items:
                if attr.name not in it.values:
                    raise CatalogError(f"item {it.id!r}: missing value for {attr.name!r}")
                col.append(it.values[attr.name])
            if attr.kind == DISCRETE:
                vidx = {w: i for i, w in enumerate(attr.values)}  # type: ignore[union-attr]
                for it, w in zip(self.items, col):
                    if w not in vidx:
                        raise CatalogError(
                            f"item {it.id!r}: value {w!r} outside value set of {attr.name!r}"
                        )
                self._value_index[attr.name] = vidx
                self._codes[attr.name] = np.array([vidx[w] for w in col], dtype=np.int64)
            else:
                for it, w in zip(self.items, col):
                    if not _is_number(w):
                        raise CatalogError(
                            f"item {it.id!r}: non-numeric value {w!r} for continuous "
                            f"attribute {attr.name!r}"
                        )
                self._floats[attr.name] = np.array(col, dtype=np.float64)

    # sizes -------------------------------------------------------------

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_attrs(self) -> int:
        return len(self.attributes)

    def discrete_attrs(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.kind == DISCRETE)

    def continuous_attrs(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.kind == CONTINUOUS)

    # array views used by the gain module --------------------------------

    def codes(self, attr: str) -> np.ndarray:
        """Integer value codes of a discrete attribute, in item order."""
        return self._codes[attr]

    def value_index(self, attr: str) -> dict[Any, int]:
        return self._value_index[attr]

    def floats(self, attr: str) -> np.ndarray:
        """Float values of a continuous attribute, in item order."""
        return self._floats[attr]

    def value_of(self, item_id: str, attr: str) -> Any:
        return self.items[self.item_index[item_id]].values[attr]

    def to_dict(self) -> dict:
        attrs = []
        for a in self.attributes:
            d: dict[str, Any] = {"name": a.name, "kind": a.kind, "query_style": a.query_style}
            if a.kind == DISCRETE:
                d["values"] = list(a.values)  # type: ignore[arg-type]
            attrs.append(d)
        return {
            "attributes": attrs,
            "items": [{"id": it.id, "values": dict(it.values)} for it in self.items],
        }


def items_with_value(
    catalog: Catalog, subset: Iterable[str], attr: str, op: str, w: Any
) -> tuple[str, ...]:
    """Filter an item subset by a value predicate on one attribute.

    op is one of "eq", "neq", "geq", "lt". eq/neq partition the subset, as
    do geq/lt. Comparisons are exact (symbols for discrete values, binary64
    for continuous ones); ordering predicates need numeric values.
    """
    if attr not in catalog.attr_by_name:
        raise CatalogError(f"unknown attribute {attr!r}")
    schema = catalog.attr_by_name[attr]
    if op in ("geq", "lt"):
        if schema.kind == DISCRETE and not all(_is_number(v) for v in schema.values):  # type: ignore[union-attr]
            raise CatalogError(f"attribute {attr!r} values are not orderable")
        if not _is_number(w):
            raise CatalogError(f"threshold {w!r} is not numeric")
    keep = []
    for item_id in subset:
        v = catalog.value_of(item_id, attr)
        if op == "eq":
            hit = v == w
        elif op == "neq":
            hit = v != w
        elif op == "geq":
            hit = v >= w
        elif op == "lt":
            hit = v < w
        else:
            raise CatalogError(f"unknown predicate {op!r}")
        if hit:
            keep.append(item_id)
    order = catalog.item_index
    return tuple(sorted(keep, key=lambda i: order[i]))


# file IO ----------------------------------------------------------------


def catalog_from_dict(data: Any) -> Catalog:
    if not isinstance(data, dict):
        raise CatalogError("catalog file must hold a JSON object")
    try:
        raw_attrs = data["attributes"]
        raw_items = data["items"]
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"catalog file missing key: {exc}") from exc
    attrs = []
    for a in raw_attrs:
        values = a.get("values")
        attrs.append(
            AttributeSchema(
                name=a["name"],
                kind=a["kind"],
                values=tuple(values) if values is not None else None,
                query_style=a.get(
                    "query_style",
                    THRESHOLD_QUERY if a["kind"] == CONTINUOUS else VALUE_QUERY,
                ),
            )
        )
    items = [Item(id=it["id"], values=dict(it["values"])) for it in raw_items]
    return Catalog(attrs, items)


def load_catalog(path: str) -> Catalog:
    """Load and validate a catalog JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: {exc}") from exc
    try:
        return catalog_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"{path}: malformed catalog: {exc}") from exc


def save_catalog(catalog: Catalog, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# synthetic generation -----------------------------------------------------


def generate_synthetic(
    seed: int | np.random.Generator,
    n_items: int = 30,
    n_discrete: int = 3,
    n_continuous: int = 1,
    values_per_attr: int = 4,
    n_targets: int | tuple[int, int] = (1, 3),
    *,
    perfect_split: bool = False,
) -> tuple[Catalog, frozenset[str]]:
    """Sample a catalog and a target set, deterministically per seed.

    Discrete values are drawn uniformly from {w1..wk}; continuous values
    uniformly on [0, 1). n_targets may be a fixed count or an inclusive
    (lo, hi) range sampled per call; targets are drawn without replacement.

    With perfect_split=True (needs values_per_attr=2 and n_items <= 2**
    n_discrete), items receive distinct bit codes over the binary attributes
    so that every attribute splits every reachable candidate set as evenly
    as possible. This exists for benchmark constructions, not as a default.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(n_targets, tuple):
        lo, hi = n_targets
        if not 1 <= lo <= hi:
            raise CatalogError(f"bad n_targets range {n_targets!r}")
        k_targets = int(rng.integers(lo, hi + 1))
    else:
        k_targets = int(n_targets)
    if k_targets < 1 or n_items < k_targets:
        raise CatalogError("need n_items >= n_targets >= 1")
    if values_per_attr < 2:
        raise CatalogError("need values_per_attr >= 2")
    if n_discrete < 0 or n_continuous < 0 or n_discrete + n_continuous < 0:
        raise CatalogError("attribute counts must be nonnegative")
    if perfect_split:
        if values_per_attr != 2:
            raise CatalogError("perfect_split needs binary attributes")
        if n_items > 2**n_discrete:
            raise CatalogError("perfect_split needs n_items <= 2**n_discrete")

    width = len(str(n_items))
    ids = [f"v{i + 1:0{width}d}" for i in range(n_items)]
    value_names = tuple(f"w{j + 1}" for j in range(values_per_attr))

    attrs: list[AttributeSchema] = []
    for d in range(n_discrete):
        attrs.append(AttributeSchema(f"a{d + 1}", DISCRETE, value_names, VALUE_QUERY))
    for c in range(n_continuous):
        attrs.append(AttributeSchema(f"c{c + 1}", CONTINUOUS, None, THRESHOLD_QUERY))

    if perfect_split and n_discrete > 0:
        codes = rng.choice(2**n_discrete, size=n_items, replace=False)
        discrete_cols = [
            [value_names[(int(code) >> d) & 1] for code in codes] for d in range(n_discrete)
        ]
    else:
        discrete_cols = [
            [value_names[int(j)] for j in rng.integers(0, values_per_attr, size=n_items)]
            for _ in range(n_discrete)
        ]
    continuous_cols = [rng.random(n_items) for _ in range(n_continuous)]

    items = []
    for i, item_id in enumerate(ids):
        values: dict[str, Any] = {}
        for d in range(n_discrete):
            values[f"a{d + 1}"] = discrete_cols[d][i]
        for c in range(n_continuous):
            values[f"c{c + 1}"] = float(continuous_cols[c][i])
        items.append(Item(item_id, values))

    targets = frozenset(str(t) for t in rng.choice(ids, size=k_targets, replace=False))
    return Catalog(attrs, items), targets
