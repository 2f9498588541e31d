"""Simulated users, benchmark runs, and the T@K / S@K metrics.

A simulated user holds a hidden target set and answers queries truthfully
against the catalog: an item query gets yes exactly when the item is a
target; an open attribute question gets the shared value when all targets
agree and not_care otherwise; closed value and threshold questions get yes
when some target matches. With a single target every answer keeps it, so
those sessions always end in success or exhaustion. With several targets a
yes witnessed by one target can evict another, so the candidate set can
run dry and the session end failed; that is honest behavior, not a bug.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .catalog import Catalog, generate_synthetic
from .policy import PolicyConfig, QueryAction
from .scorer import DependenceModel, ScoreVector, cold_start_scores
from .session import (
    NO,
    NOT_CARE,
    SUCCESS,
    YES,
    Answer,
    Transcript,
    run_session,
)


@dataclass(frozen=True)
class SimulatedUser:
    targets: frozenset[str]

    def __post_init__(self) -> None:
        if not self.targets:
            raise ValueError("a simulated user needs at least one target")


def simulate_answer(user: SimulatedUser, action: QueryAction, catalog: Catalog) -> Answer:
    if action.kind == "item":
        return YES if action.item in user.targets else NO
    attr = action.attr
    if action.kind == "attribute":
        shared = {catalog.value_of(t, attr) for t in user.targets}
        if len(shared) == 1:
            return Answer("value", next(iter(shared)))
        return NOT_CARE
    if action.kind == "value":
        hit = any(catalog.value_of(t, attr) == action.value for t in user.targets)
        return YES if hit else NO
    hit = any(catalog.value_of(t, attr) >= action.threshold for t in user.targets)
    return YES if hit else NO


def make_answer_source(user: SimulatedUser, catalog: Catalog) -> Callable[[QueryAction], Answer]:
    def source(action: QueryAction) -> Answer:
        return simulate_answer(user, action, catalog)

    return source


# catalog sources ------------------------------------------------------------

CatalogSource = Callable[[np.random.Generator], tuple[Catalog, frozenset[str]]]
ScoreSource = Callable[[Catalog], ScoreVector]


def _draw_targets(
    rng: np.random.Generator, catalog: Catalog, n_targets: int | tuple[int, int]
) -> frozenset[str]:
    if isinstance(n_targets, tuple):
        lo, hi = n_targets
        k = int(rng.integers(lo, hi + 1))
    else:
        k = int(n_targets)
    if not 1 <= k <= catalog.n_items:
        raise ValueError(f"cannot draw {k} targets from {catalog.n_items} items")
    picked = rng.choice(catalog.n_items, size=k, replace=False)
    return frozenset(catalog.item_ids[i] for i in picked)


def fixed_catalog_source(
    catalog: Catalog,
    targets: Iterable[str] | None = None,
    n_targets: int | tuple[int, int] = 1,
) -> CatalogSource:
    """Reuse one catalog across sessions, with fixed or freshly drawn targets."""
    fixed = frozenset(targets) if targets is not None else None
    if fixed is not None:
        unknown = fixed - set(catalog.item_ids)
        if unknown:
            raise ValueError(f"unknown target ids: {sorted(unknown)}")
        if not fixed:
            raise ValueError("target set is empty")

    def source(rng: np.random.Generator) -> tuple[Catalog, frozenset[str]]:
        if fixed is not None:
            return catalog, fixed
        return catalog, _draw_targets(rng, catalog, n_targets)

    return source


def synthetic_catalog_source(
    n_items: int = 30,
    n_discrete: int = 3,
    n_continuous: int = 1,
    values_per_attr: int = 4,
    n_targets: int | tuple[int, int] = (1, 3),
    perfect_split: bool = False,
) -> CatalogSource:
    """Generate a fresh random catalog per session."""

    def source(rng: np.random.Generator) -> tuple[Catalog, frozenset[str]]:
        return generate_synthetic(
            rng,
            n_items=n_items,
            n_discrete=n_discrete,
            n_continuous=n_continuous,
            values_per_attr=values_per_attr,
            n_targets=n_targets,
            perfect_split=perfect_split,
        )

    return source


# metrics --------------------------------------------------------------------


@dataclass
class SessionRecord:
    session_id: str
    seed: Any
    status: str
    success_turn: int | None
    forced: bool
    t: int
    s: int

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "seed": self.seed,
            "status": self.status,
            "success_turn": self.success_turn,
            "forced": self.forced,
            "t": self.t,
            "s": self.s,
        }


@dataclass
class MetricsReport:
    policy: str
    k_max: int
    n_sessions: int
    t_at_k: float
    s_at_k: float
    sessions: list[SessionRecord] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "k_max": self.k_max,
            "n_sessions": self.n_sessions,
            "t_at_k": self.t_at_k,
            "s_at_k": self.s_at_k,
            "sessions": [r.to_dict() for r in self.sessions],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def metric_for(outcome_status: str, success_turn: int | None, k_max: int) -> tuple[int, int]:
    """Turn count and success flag for one session under the cap.

    Success within the budget scores its turn; success on the forced query
    scores k_max+1; anything else scores k_max+3 turns and zero success.
    """
    if outcome_status == SUCCESS and success_turn is not None:
        return success_turn, 1
    return k_max + 3, 0


def compute_metrics(
    transcripts: Sequence[Transcript], k_max: int, policy: str = ""
) -> MetricsReport:
    records = []
    for t in transcripts:
        if t.outcome is None:
            raise ValueError(f"transcript {t.session_id} has no outcome")
        if t.outcome.k_max != k_max:
            raise ValueError(
                f"transcript {t.session_id} ran with k_max={t.outcome.k_max}, expected {k_max}"
            )
        turns, success = metric_for(t.outcome.status, t.outcome.success_turn, k_max)
        records.append(
            SessionRecord(
                session_id=t.session_id,
                seed=t.seed,
                status=t.outcome.status,
                success_turn=t.outcome.success_turn,
                forced=t.outcome.forced,
                t=turns,
                s=success,
            )
        )
    if not records:
        raise ValueError("no transcripts to aggregate")
    n = len(records)
    return MetricsReport(
        policy=policy,
        k_max=k_max,
        n_sessions=n,
        t_at_k=sum(r.t for r in records) / n,
        s_at_k=sum(r.s for r in records) / n,
        sessions=records,
    )


def render_table(reports: Sequence[MetricsReport]) -> str:
    """Plain-text comparison table for one or more benchmark reports."""
    header = ("policy", "k_max", "T@K", "S@K", "sessions")
    rows = [
        (r.policy, str(r.k_max), f"{r.t_at_k:.4f}", f"{r.s_at_k:.4f}", str(r.n_sessions))
        for r in reports
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


# benchmark ------------------------------------------------------------------


def run_benchmark(
    catalog_source: CatalogSource,
    scorer_source: ScoreSource | None,
    cfg: PolicyConfig,
    k_max: int,
    n_sessions: int,
    master_seed: int,
    *,
    jobs: int = 1,
    dependence_source: Callable[[Catalog], DependenceModel] | None = None,
    transcripts_out: list[Transcript] | None = None,
) -> MetricsReport:
    """Run n_sessions simulated sessions and aggregate T@K and S@K.

    Session i draws everything from a generator seeded with
    (master_seed, i), so results are reproducible and independent of job
    count; with jobs > 1 sessions run in a thread pool and are collected
    back in index order, making reports byte-identical across --jobs.
    """
    if n_sessions < 1:
        raise ValueError("n_sessions must be >= 1")
    score_of = scorer_source if scorer_source is not None else cold_start_scores

    def one(index: int) -> Transcript:
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, index]))
        catalog, targets = catalog_source(rng)
        scores = score_of(catalog)
        dep = dependence_source(catalog) if dependence_source is not None else None
        source = make_answer_source(SimulatedUser(targets), catalog)
        return run_session(
            catalog,
            scores,
            cfg,
            source,
            k_max,
            dependence=dep,
            session_id=f"s{index:06d}",
            seed=[master_seed, index],
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            transcripts = list(pool.map(one, range(n_sessions)))
    else:
        transcripts = [one(i) for i in range(n_sessions)]

    if transcripts_out is not None:
        transcripts_out.extend(transcripts)
    return compute_metrics(transcripts, k_max, policy=cfg.policy)
