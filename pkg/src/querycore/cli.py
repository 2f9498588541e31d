"""Command line entry points.

Subcommands: gen (synthetic catalogs), simulate (one session against a
simulated user), bench (many sessions, aggregated metrics), report
(render saved reports), serve (HTTP service). Exit codes: 0 on success,
2 for usage errors, 1 for runtime failures such as missing or bad files.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

import numpy as np

from .catalog import Catalog, CatalogError, generate_synthetic, load_catalog, save_catalog
from .policy import MODES, POLICIES, PolicyConfig, QueryAction
from .scorer import (
    DependenceModel,
    ScoreError,
    ScoreVector,
    cold_start_scores,
    frequency_scores,
    load_dependence,
    load_scores,
)
from .session import Transcript, write_transcripts
from .simulator import (
    MetricsReport,
    fixed_catalog_source,
    render_table,
    run_benchmark,
    synthetic_catalog_source,
)


class CliError(Exception):
    """Runtime failure that should exit 1 with a message."""


def _parse_n_targets(text: str) -> int | tuple[int, int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            pair = (int(lo), int(hi))
            if pair[0] < 1 or pair[1] < pair[0]:
                raise ValueError
            return pair
        n = int(text)
        if n < 1:
            raise ValueError
        return n
    except ValueError:
        raise CliError(f"bad --n-targets {text!r}: expected N or LO:HI with 1 <= LO <= HI")


def _load_catalog(path: str) -> Catalog:
    try:
        return load_catalog(path)
    except FileNotFoundError:
        raise CliError(f"catalog file not found: {path}")
    except (CatalogError, json.JSONDecodeError) as exc:
        raise CliError(f"bad catalog file {path}: {exc}")


def _scorer_source(selector: str, smoothing: float) -> Callable[[Catalog], ScoreVector]:
    """Turn a --scores selector (cold | file:<path> | freq:<path>) into a source."""
    if selector == "cold":
        return cold_start_scores
    if selector.startswith("file:"):
        path = selector[len("file:"):]

        def from_file(catalog: Catalog) -> ScoreVector:
            try:
                return load_scores(path, catalog)
            except FileNotFoundError:
                raise CliError(f"scores file not found: {path}")
            except (ScoreError, json.JSONDecodeError) as exc:
                raise CliError(f"bad scores file {path}: {exc}")

        return from_file
    if selector.startswith("freq:"):
        path = selector[len("freq:"):]

        def from_freq(catalog: Catalog) -> ScoreVector:
            try:
                return frequency_scores(path, catalog, smoothing=smoothing)
            except FileNotFoundError:
                raise CliError(f"interactions file not found: {path}")
            except ScoreError as exc:
                raise CliError(f"bad interactions file {path}: {exc}")

        return from_freq
    raise CliError(f"bad --scores {selector!r}: expected cold, file:<path> or freq:<path>")


def _targets_from_args(args: argparse.Namespace, catalog: Catalog) -> frozenset[str] | None:
    if args.targets and args.targets_file:
        raise CliError("--targets and --targets-file are mutually exclusive")
    if args.targets:
        return frozenset(t.strip() for t in args.targets.split(",") if t.strip())
    if args.targets_file:
        try:
            with open(args.targets_file, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise CliError(f"targets file not found: {args.targets_file}")
        except json.JSONDecodeError as exc:
            raise CliError(f"bad targets file {args.targets_file}: {exc}")
        if not isinstance(data, list) or not all(isinstance(t, str) for t in data):
            raise CliError(f"targets file {args.targets_file} must hold a JSON list of item ids")
        return frozenset(data)
    return None


def _dependence_source(
    args: argparse.Namespace,
) -> Callable[[Catalog], DependenceModel] | None:
    if not getattr(args, "dependence", None):
        return None

    def source(catalog: Catalog) -> DependenceModel:
        try:
            return load_dependence(args.dependence, catalog)
        except FileNotFoundError:
            raise CliError(f"dependence file not found: {args.dependence}")
        except (ScoreError, json.JSONDecodeError) as exc:
            raise CliError(f"bad dependence file {args.dependence}: {exc}")

    return source


def describe_action(action: QueryAction) -> str:
    if action.kind == "item":
        return f"item {action.item}?"
    if action.kind == "attribute":
        return f"which {action.attr}?"
    if action.kind == "value":
        return f"{action.attr} = {action.value}?"
    return f"{action.attr} >= {action.threshold}?"


def _describe_answer(answer: dict) -> str:
    if answer["kind"] == "value":
        return str(answer["value"])
    return answer["kind"]


def _print_transcript(transcript: Transcript) -> None:
    for event in transcript.events:
        d = event.to_dict()
        print(
            "turn {turn:>2}  {q:<32} -> {a:<10} remaining={r} uncertainty={u:.4f}".format(
                turn=d["turn"],
                q=describe_action(event.action),
                a=_describe_answer(d["answer"]),
                r=d["remaining"],
                u=d["uncertainty"],
            )
        )
    outcome = transcript.outcome
    if outcome is None:
        return
    if outcome.status == "success":
        forced = " (forced final query)" if outcome.forced else ""
        print(f"outcome: success at turn {outcome.success_turn}, item {outcome.success_item}{forced}")
    elif outcome.status == "exhausted":
        print(f"outcome: exhausted after the turn budget of {outcome.k_max}")
    else:
        print(f"outcome: {outcome.status} ({outcome.reason or 'no reason'})")


# subcommands ----------------------------------------------------------------


def _cmd_gen(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
    catalog, targets = generate_synthetic(
        rng,
        n_items=args.items,
        n_discrete=args.discrete,
        n_continuous=args.continuous,
        values_per_attr=args.values,
        n_targets=_parse_n_targets(args.n_targets),
        perfect_split=args.perfect_split,
    )
    save_catalog(catalog, args.out)
    print(f"wrote {catalog.n_items} items / {catalog.n_attrs} attributes to {args.out}")
    if args.targets_out:
        with open(args.targets_out, "w", encoding="utf-8") as fh:
            json.dump(sorted(targets), fh, indent=2)
            fh.write("\n")
        print(f"wrote {len(targets)} target ids to {args.targets_out}")
    return 0


def _session_cfg(args: argparse.Namespace) -> PolicyConfig:
    return PolicyConfig(policy=args.policy, mode=args.mode)


def _cmd_simulate(args: argparse.Namespace) -> int:
    catalog = _load_catalog(args.catalog)
    targets = _targets_from_args(args, catalog)
    try:
        source = fixed_catalog_source(
            catalog, targets=targets, n_targets=_parse_n_targets(args.n_targets)
        )
    except ValueError as exc:
        raise CliError(str(exc))
    transcripts: list[Transcript] = []
    try:
        run_benchmark(
            source,
            _scorer_source(args.scores, args.smoothing),
            _session_cfg(args),
            args.kmax,
            n_sessions=1,
            master_seed=args.seed,
            dependence_source=_dependence_source(args),
            transcripts_out=transcripts,
        )
    except ValueError as exc:
        raise CliError(str(exc))
    transcript = transcripts[0]
    if not args.quiet:
        _print_transcript(transcript)
    if args.out:
        write_transcripts(args.out, transcripts)
        if not args.quiet:
            print(f"wrote transcript to {args.out}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.catalog and args.synthetic:
        raise CliError("--catalog and --synthetic are mutually exclusive")
    n_targets = _parse_n_targets(args.n_targets)
    if args.catalog:
        catalog = _load_catalog(args.catalog)
        targets = _targets_from_args(args, catalog)
        try:
            source = fixed_catalog_source(catalog, targets=targets, n_targets=n_targets)
        except ValueError as exc:
            raise CliError(str(exc))
    elif args.synthetic:
        source = synthetic_catalog_source(
            n_items=args.items,
            n_discrete=args.discrete,
            n_continuous=args.continuous,
            values_per_attr=args.values,
            n_targets=n_targets,
            perfect_split=args.perfect_split,
        )
        if args.scores != "cold":
            raise CliError("--synthetic only supports --scores cold")
    else:
        raise CliError("bench needs --catalog PATH or --synthetic")

    transcripts: list[Transcript] = []
    try:
        report = run_benchmark(
            source,
            _scorer_source(args.scores, args.smoothing),
            _session_cfg(args),
            args.kmax,
            n_sessions=args.sessions,
            master_seed=args.seed,
            jobs=args.jobs,
            dependence_source=_dependence_source(args),
            transcripts_out=transcripts if args.transcripts else None,
        )
    except ValueError as exc:
        raise CliError(str(exc))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json())
    if args.transcripts:
        write_transcripts(args.transcripts, transcripts)
    print(render_table([report]))
    return 0


def _load_report(path: str) -> MetricsReport:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"report file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"bad report file {path}: {exc}")
    try:
        return MetricsReport(
            policy=data["policy"],
            k_max=data["k_max"],
            n_sessions=data["n_sessions"],
            t_at_k=data["t_at_k"],
            s_at_k=data["s_at_k"],
            sessions=[],
        )
    except (KeyError, TypeError) as exc:
        raise CliError(f"report file {path} is missing fields: {exc}")


def _cmd_report(args: argparse.Namespace) -> int:
    reports = [_load_report(p) for p in args.inputs]
    if args.format == "json":
        rows = [
            {k: v for k, v in r.as_dict().items() if k != "sessions"} for r in reports
        ]
        print(json.dumps(rows, indent=2))
    else:
        print(render_table(reports))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(transcripts_path=args.transcripts)
    if not args.no_ui:
        import os

        if os.path.isdir(args.ui_dir):
            from starlette.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=args.ui_dir, html=True), name="ui")
            print(f"serving ui from {args.ui_dir}")
        else:
            print(f"ui dir {args.ui_dir} not found, serving api only")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# parser ---------------------------------------------------------------------


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scores", default="cold", help="cold | file:<path> | freq:<path>")
    p.add_argument("--smoothing", type=float, default=0.0, help="additive smoothing for freq: scores")
    p.add_argument("--policy", choices=POLICIES, default="core")
    p.add_argument("--mode", choices=MODES, default="catalog")
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--targets", default=None, help="comma separated target item ids")
    p.add_argument("--targets-file", default=None, help="JSON list of target item ids")
    p.add_argument("--n-targets", default="1", help="N or LO:HI targets drawn per session")
    p.add_argument("--dependence", default=None, help="external dependence model JSON (core-d)")


def _add_shape_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--items", type=int, default=30)
    p.add_argument("--discrete", type=int, default=3)
    p.add_argument("--continuous", type=int, default=1)
    p.add_argument("--values", type=int, default=4)
    p.add_argument("--perfect-split", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="querycore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic catalog")
    p.add_argument("--seed", type=int, required=True)
    _add_shape_flags(p)
    p.add_argument("--n-targets", default="1")
    p.add_argument("--out", required=True)
    p.add_argument("--targets-out", default=None)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("simulate", help="run one simulated session")
    p.add_argument("--catalog", required=True)
    _add_session_flags(p)
    p.add_argument("--out", default=None, help="write the transcript as JSONL")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("bench", help="run many simulated sessions and aggregate metrics")
    p.add_argument("--catalog", default=None)
    p.add_argument("--synthetic", action="store_true", help="fresh random catalog per session")
    _add_shape_flags(p)
    _add_session_flags(p)
    p.add_argument("--sessions", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="write the metrics report as JSON")
    p.add_argument("--transcripts", default=None, help="write all transcripts as JSONL")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("report", help="render saved metrics reports")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("serve", help="serve the HTTP api (and the ui if built)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8351)
    p.add_argument("--ui-dir", default="frontend/dist")
    p.add_argument("--no-ui", action="store_true")
    p.add_argument("--transcripts", default=None)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CatalogError, ScoreError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
