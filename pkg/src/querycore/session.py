"""Online session state machine and the turn loop.

A session tracks what is still unchecked: the candidate items V_k, the
attributes X_k the agent may still ask about, and per discrete attribute
the values W_x^k not yet asked as closed questions. Answers only ever
shrink these sets. Querying a target item ends the session; exhausting the
turn budget triggers one forced item query (the metric protocol); a human
whose answers contradict the catalog can empty V_k, which is a terminal
failure rather than a crash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping

from .catalog import CONTINUOUS, DISCRETE, Catalog
from .gain import GainContext
from .policy import PolicyConfig, QueryAction, ag_select, select_action
from .scorer import DependenceModel, ScoreVector, estimate_dependence

ACTIVE = "active"
SUCCESS = "success"
EXHAUSTED = "exhausted"
FAILED = "failed"

INCONSISTENT_ANSWERS = "inconsistent_answers"


class AnswerError(ValueError):
    """Raised for answers that are inadmissible for the pending query."""


@dataclass(frozen=True)
class Answer:
    """A user response: yes, no, not_care, or value (with the value set)."""

    kind: str
    value: Any = None

    def __post_init__(self) -> None:
        if self.kind not in ("yes", "no", "value", "not_care"):
            raise AnswerError(f"unknown answer kind {self.kind!r}")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "value":
            out["value"] = self.value
        return out


YES = Answer("yes")
NO = Answer("no")
NOT_CARE = Answer("not_care")


@dataclass(frozen=True)
class SessionState:
    """Immutable snapshot of the unchecked sets after `turn` answers."""

    unchecked_items: tuple[str, ...]
    unchecked_attrs: tuple[str, ...]
    unchecked_values: Mapping[str, tuple[Any, ...]]
    turn: int = 0
    status: str = ACTIVE
    success_item: str | None = None


def initial_state(catalog: Catalog) -> SessionState:
    values = {
        a.name: tuple(a.values)  # type: ignore[arg-type]
        for a in catalog.attributes
        if a.kind == DISCRETE
    }
    return SessionState(
        unchecked_items=catalog.item_ids,
        unchecked_attrs=tuple(a.name for a in catalog.attributes),
        unchecked_values=values,
    )


def uncertainty(state: SessionState, scores: ScoreVector) -> float:
    """Total unchecked relevance mass; zero once a target has been found."""
    if state.status == SUCCESS:
        return 0.0
    return float(sum(scores[i] for i in state.unchecked_items))


def remaining(state: SessionState) -> int:
    if state.status == SUCCESS:
        return 0
    return len(state.unchecked_items)


_ADMISSIBLE = {
    "item": ("yes", "no"),
    "attribute": ("value", "not_care"),
    "value": ("yes", "no", "not_care"),
    "threshold": ("yes", "no", "not_care"),
}


def apply_answer(
    state: SessionState, action: QueryAction, answer: Answer, catalog: Catalog
) -> SessionState:
    """Apply one query/answer exchange and return the next state.

    Implements the update table: item yes ends the session, item no drops
    the item; an attribute answer keeps only the matching items and retires
    the attribute; a value answer filters by the value and marks it
    checked (retiring the attribute once no value is left); a threshold
    answer keeps one side and leaves the attribute askable; not_care
    retires the attribute without touching the candidates. An answer that
    empties the candidate set fails the session as inconsistent.
    """
    if state.status != ACTIVE:
        raise AnswerError("session is not active")
    if answer.kind not in _ADMISSIBLE[action.kind]:
        raise AnswerError(
            f"answer kind {answer.kind!r} is inadmissible for a {action.kind} query"
        )

    turn = state.turn + 1
    items = state.unchecked_items
    attrs = state.unchecked_attrs
    values = state.unchecked_values

    if action.kind == "item":
        if action.item not in items:
            raise AnswerError(f"item {action.item!r} is not unchecked")
        if answer.kind == "yes":
            return replace(state, turn=turn, status=SUCCESS, success_item=action.item)
        items = tuple(i for i in items if i != action.item)
        return _check_nonempty(replace(state, turn=turn, unchecked_items=items))

    attr = action.attr
    if attr not in attrs:
        raise AnswerError(f"attribute {attr!r} is not unchecked")
    schema = catalog.attr_by_name[attr]

    if answer.kind == "not_care":
        attrs = tuple(a for a in attrs if a != attr)
        return replace(state, turn=turn, unchecked_attrs=attrs)

    if action.kind == "attribute":
        w = answer.value
        if w not in (schema.values or ()):
            raise AnswerError(f"value {w!r} is not in the value set of {attr!r}")
        items = tuple(i for i in items if catalog.value_of(i, attr) == w)
        attrs = tuple(a for a in attrs if a != attr)
        return _check_nonempty(
            replace(state, turn=turn, unchecked_items=items, unchecked_attrs=attrs)
        )

    if action.kind == "value":
        w = action.value
        if w not in values.get(attr, ()):
            raise AnswerError(f"value {w!r} of {attr!r} is not unchecked")
        if answer.kind == "yes":
            items = tuple(i for i in items if catalog.value_of(i, attr) == w)
        else:
            items = tuple(i for i in items if catalog.value_of(i, attr) != w)
        left = tuple(x for x in values[attr] if x != w)
        new_values = dict(values)
        new_values[attr] = left
        if not left:
            attrs = tuple(a for a in attrs if a != attr)
        return _check_nonempty(
            replace(
                state,
                turn=turn,
                unchecked_items=items,
                unchecked_attrs=attrs,
                unchecked_values=new_values,
            )
        )

    # threshold: the attribute stays askable afterwards
    if schema.kind != CONTINUOUS:
        raise AnswerError(f"attribute {attr!r} is not continuous")
    w = action.threshold
    if w is None:
        raise AnswerError("threshold query carries no threshold")
    if answer.kind == "yes":
        items = tuple(i for i in items if catalog.value_of(i, attr) >= w)
    else:
        items = tuple(i for i in items if catalog.value_of(i, attr) < w)
    return _check_nonempty(replace(state, turn=turn, unchecked_items=items))


def _check_nonempty(state: SessionState) -> SessionState:
    if not state.unchecked_items:
        return replace(state, status=FAILED)
    return state


# transcripts ---------------------------------------------------------------


@dataclass
class Event:
    turn: int
    action: QueryAction
    answer: Answer
    remaining: int
    uncertainty: float

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "action": self.action.to_dict(),
            "answer": self.answer.to_dict(),
            "remaining": self.remaining,
            "uncertainty": self.uncertainty,
        }


@dataclass
class Outcome:
    status: str
    k_max: int
    success_turn: int | None = None
    success_item: str | None = None
    forced: bool = False
    reason: str | None = None
    recommendation: str | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "status": self.status,
            "k_max": self.k_max,
            "success_turn": self.success_turn,
            "forced": self.forced,
        }
        if self.success_item is not None:
            out["success_item"] = self.success_item
        if self.reason is not None:
            out["reason"] = self.reason
        if self.recommendation is not None:
            out["recommendation"] = self.recommendation
        return out


@dataclass
class Transcript:
    session_id: str
    seed: Any
    events: list[Event] = field(default_factory=list)
    outcome: Outcome | None = None

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "seed": self.seed,
            "events": [e.to_dict() for e in self.events],
            "outcome": self.outcome.to_dict() if self.outcome else None,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False)


def write_transcripts(path: str, transcripts: Iterable[Transcript], append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(t.to_json_line())
            fh.write("\n")


def read_transcript_dicts(path: str) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


# the turn loop --------------------------------------------------------------


class SessionEngine:
    """Drives one session: selects queries, applies answers, records events.

    The engine serves two callers. run_session feeds it simulator answers,
    including the forced item query at turn k_max+1. The HTTP service feeds
    it human answers and, when the budget runs out, converts the forced
    query into a final recommendation via abandon_forced() instead of
    asking it over the wire.
    """

    def __init__(
        self,
        catalog: Catalog,
        scores: ScoreVector,
        cfg: PolicyConfig,
        k_max: int,
        *,
        dependence: DependenceModel | None = None,
        session_id: str = "s0",
        seed: Any = None,
    ):
        if k_max < 1:
            raise ValueError("k_max must be >= 1")
        self.catalog = catalog
        self.scores = scores
        self.cfg = cfg
        self.k_max = k_max
        self.state = initial_state(catalog)
        self.events: list[Event] = []
        self.initial_uncertainty = uncertainty(self.state, scores)
        self._external_dep = dependence
        self._frozen_dep: DependenceModel | None = None
        self._pending: QueryAction | None = None
        self._pending_forced = False
        self._recommendation: str | None = None
        self.session_id = session_id
        self.seed = seed

    def _dep_for(self, ctx: GainContext) -> DependenceModel | None:
        if self.cfg.policy != "core-d":
            return None
        if self._external_dep is not None:
            return self._external_dep
        if self.cfg.dependence_refresh == "frozen":
            if self._frozen_dep is None:
                self._frozen_dep = estimate_dependence(self.catalog, ctx.item_order)
            return self._frozen_dep
        return estimate_dependence(self.catalog, ctx.item_order)

    @property
    def pending_action(self) -> QueryAction | None:
        """The query awaiting an answer, or None once the session is over."""
        if self.state.status != ACTIVE:
            return None
        if self._pending is None:
            ctx = GainContext(
                self.catalog,
                self.scores,
                self.state.unchecked_items,
                self.state.unchecked_attrs,
                self.state.unchecked_values,
            )
            if self.state.turn < self.k_max:
                self._pending = select_action(ctx, self.cfg, self._dep_for(ctx))
                self._pending_forced = False
            else:
                self._pending = ag_select(ctx)
                self._pending_forced = True
        return self._pending

    @property
    def is_forced_pending(self) -> bool:
        return self.pending_action is not None and self._pending_forced

    def submit(self, answer: Answer) -> SessionState:
        action = self.pending_action
        if action is None:
            raise AnswerError("session is already over")
        new_state = apply_answer(self.state, action, answer, self.catalog)
        if self._pending_forced and new_state.status == ACTIVE:
            new_state = replace(new_state, status=EXHAUSTED)
        self.state = new_state
        self.events.append(
            Event(
                turn=new_state.turn,
                action=action,
                answer=answer,
                remaining=remaining(new_state),
                uncertainty=uncertainty(new_state, self.scores),
            )
        )
        self._pending = None
        self._pending_forced = False
        return new_state

    def abandon_forced(self) -> str:
        """Turn the pending forced query into a final recommendation."""
        action = self.pending_action
        if action is None or not self._pending_forced:
            raise AnswerError("no forced query is pending")
        self.state = replace(self.state, status=EXHAUSTED)
        self._recommendation = action.item
        self._pending = None
        self._pending_forced = False
        return action.item  # type: ignore[return-value]

    def outcome(self) -> Outcome:
        st = self.state
        return Outcome(
            status=st.status,
            k_max=self.k_max,
            success_turn=st.turn if st.status == SUCCESS else None,
            success_item=st.success_item,
            forced=st.status == SUCCESS and st.turn > self.k_max,
            reason=INCONSISTENT_ANSWERS if st.status == FAILED else None,
            recommendation=self._recommendation,
        )

    def transcript(self) -> Transcript:
        return Transcript(self.session_id, self.seed, list(self.events), self.outcome())


def run_session(
    catalog: Catalog,
    scores: ScoreVector,
    cfg: PolicyConfig,
    answer_source: Callable[[QueryAction], Answer],
    k_max: int,
    *,
    dependence: DependenceModel | None = None,
    session_id: str = "s0",
    seed: Any = None,
    forced_final: bool = True,
) -> Transcript:
    """Run one full session against an answer source.

    The loop asks the policy's query each turn and applies the source's
    answer. If the budget runs out, the forced item query is asked as turn
    k_max+1 (unless forced_final is off, in which case the session is
    marked exhausted unasked).
    """
    engine = SessionEngine(
        catalog,
        scores,
        cfg,
        k_max,
        dependence=dependence,
        session_id=session_id,
        seed=seed,
    )
    while True:
        action = engine.pending_action
        if action is None:
            break
        if engine.is_forced_pending and not forced_final:
            engine.abandon_forced()
            break
        engine.submit(answer_source(action))
    return engine.transcript()
