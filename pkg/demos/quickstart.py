#!/usr/bin/env python3
"""Walk one session end to end on a small hotel catalog.

A simulated guest has a hidden favorite hotel. Each turn the engine picks
the question that eliminates the most expected relevance mass, the guest
answers truthfully, and the candidate set shrinks until an item query
lands. Run it, then change TARGET or the scores and watch the question
order adapt.
"""

from __future__ import annotations

import json
import pathlib

from querycore import (
    PolicyConfig,
    SimulatedUser,
    catalog_from_dict,
    cold_start_scores,
    make_answer_source,
    run_session,
)
from querycore.cli import describe_action

TARGET = "h07"


def main() -> None:
    here = pathlib.Path(__file__).parent
    catalog = catalog_from_dict(json.loads((here / "hotels.json").read_text()))
    scores = cold_start_scores(catalog)

    user = SimulatedUser(frozenset({TARGET}))
    transcript = run_session(
        catalog,
        scores,
        PolicyConfig(policy="core", mode="catalog"),
        make_answer_source(user, catalog),
        k_max=5,
    )

    print(f"hidden target: {TARGET}\n")
    for event in transcript.events:
        answer = event.answer.value if event.answer.kind == "value" else event.answer.kind
        print(
            f"turn {event.turn}: {describe_action(event.action):<28}"
            f" -> {answer:<8} ({event.remaining} candidates left)"
        )
    outcome = transcript.outcome
    if outcome.status == "success":
        tail = " on the forced final query" if outcome.forced else ""
        print(f"\nfound {outcome.success_item} at turn {outcome.success_turn}{tail}")
    else:
        print(f"\nsession ended {outcome.status}")


if __name__ == "__main__":
    main()
