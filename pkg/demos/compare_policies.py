#!/usr/bin/env python3
"""Benchmark the three selection policies on random catalogs.

Each session draws a fresh 30-item catalog and one to three hidden
targets, then lets the policy ask five questions. "core" mixes item,
value and threshold queries by expected certainty gain; "me" asks about
the attribute with the highest count entropy; "ag" just guesses items
best-first. Expect core to roughly double ag's success rate here.
"""

from __future__ import annotations

from querycore import PolicyConfig, render_table, run_benchmark, synthetic_catalog_source

SESSIONS = 2000
SEED = 7


def main() -> None:
    source = synthetic_catalog_source()  # 30 items, 3 discrete + 1 continuous attr
    reports = []
    for policy in ("core", "me", "ag"):
        cfg = PolicyConfig(policy=policy, mode="catalog")
        reports.append(run_benchmark(source, None, cfg, 5, SESSIONS, SEED, jobs=4))
    print(render_table(reports))
    print(f"\n({SESSIONS} sessions per policy, master seed {SEED}; "
          "rerunning reproduces these numbers byte for byte)")


if __name__ == "__main__":
    main()
