"""Command-line interface: train, explain, add feedback, simulate, serve.

All failures exit nonzero and print one machine-readable JSON error object
to stderr: ``{"error": {"kind": ..., "message": ...}}``.  Rule conflicts
exit with code 2 and kind ``"conflict"``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import benchmarks
from .data import DataError, load_csv
from .model import Hyperparams
from .overlay import ConflictError, FeedbackError
from .plots import render_aggregate_plot
from .rules import ParseError, Rule, Schema, parse_clause
from .session import SessionError, SessionState, coerce_instance
from .simulate import (
    ExperimentConfig,
    aggregate_curves,
    run_mode,
    write_aggregate_csv,
    write_curves_csv,
    write_summary_json,
)
from .transform import TransformationConfig

MODE_ALIASES = {"exp1": "exp1", "exp2": "exp2", "al": "active_learning"}


class CliError(Exception):
    def __init__(self, kind: str, message: str, exit_code: int = 1):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.exit_code = exit_code


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Accept ``a..b`` (inclusive) or a comma-separated list."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise CliError("bad_seeds", f"cannot parse seed spec {text!r}") from None


def _parse_rule_arg(text: str, schema: Schema) -> Rule:
    """Parse ``<clause>@<label>``; an empty clause part means the empty clause."""
    if "@" not in text:
        raise CliError("bad_rule", f"expected '<clause>@<label>', got {text!r}")
    clause_text, label = text.rsplit("@", 1)
    return Rule(parse_clause(clause_text.strip(), schema), schema.validate_label(label.strip()))


def _load_instance_arg(text: str, schema: Schema) -> dict:
    """A JSON object literal, or ``@path`` to a JSON file."""
    try:
        if text.startswith("@"):
            with open(text[1:], "r", encoding="utf-8") as fh:
                obj = json.load(fh)
        else:
            obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("bad_instance", f"cannot read instance: {exc}") from None
    return coerce_instance(schema, obj)


def _cmd_train(args) -> int:
    schema = Schema.load(args.schema)
    ds = load_csv(args.data, schema=schema, label_column=args.label,
                  positive_label=args.positive_label)
    state = SessionState.create(
        args.out, ds, seed=args.seed, hyper=Hyperparams(), train_fraction=args.train_fraction
    )
    print(json.dumps({
        "session": args.out,
        "train_rows": len(state.train),
        "test_rows": len(state.test),
        "explainer_rules": sum(len(state.ers.clauses(lbl)) for lbl in schema.labels),
    }))
    return 0


def _cmd_explain(args) -> int:
    state = SessionState.load(args.session)
    x = _load_instance_arg(args.instance, state.schema)
    print(json.dumps(state.respond(x).to_json()))
    return 0


def _cmd_feedback_add(args) -> int:
    state = SessionState.load(args.session)
    if args.tconfig is not None:
        with open(args.tconfig, "r", encoding="utf-8") as fh:
            state.t_config = TransformationConfig.from_json(json.load(fh))
    corrected = _parse_rule_arg(args.corrected, state.schema)
    original = _parse_rule_arg(args.original, state.schema) if args.original else None
    fr = state.add_feedback(corrected, original=original)
    print(json.dumps({"id": fr.id}))
    return 0


def _cmd_simulate(args) -> int:
    schema = Schema.load(args.schema) if args.schema else None
    ds = load_csv(args.data, schema=schema, label_column=args.label)
    mode = MODE_ALIASES[args.mode]
    config = ExperimentConfig(
        mode=mode,
        dataset_name=args.dataset_name or args.data,
        seeds=_parse_seeds(args.seeds),
        oracle_depth=None,
    )
    started = time.perf_counter()
    curves = []
    for seed in config.seeds:
        curves.extend(run_mode(config, ds, seed))
    elapsed = time.perf_counter() - started

    out = args.out
    stem = out[:-4] if out.endswith(".csv") else out
    write_curves_csv(out, args.mode, config.dataset_name, curves)
    aggregate = aggregate_curves(curves)
    write_aggregate_csv(f"{stem}_aggregate.csv", args.mode, config.dataset_name, aggregate)
    write_summary_json(f"{stem}_summary.json", config, config.dataset_name, elapsed)
    title = f"{config.dataset_name} — {args.mode}"
    render_aggregate_plot(aggregate, title, f"{stem}.png")
    print(json.dumps({
        "curves": out,
        "aggregate": f"{stem}_aggregate.csv",
        "plot": f"{stem}.png",
        "summary": f"{stem}_summary.json",
        "wall_seconds": elapsed,
    }))
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        raise CliError("bad_addr", f"expected host:port, got {args.addr!r}")
    serve(args.session, host, int(port))
    return 0


def _cmd_dataset(args) -> int:
    ds = benchmarks.build(args.name)
    ds.save_csv(args.out)
    if args.schema_out:
        ds.schema.save(args.schema_out)
    print(json.dumps({"dataset": args.name, "rows": len(ds), "out": args.out}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rulepatch")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit model + explainer rules into a session directory")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--positive-label", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("explain", help="print the overlay response for one instance")
    p.add_argument("--session", required=True)
    p.add_argument("--instance", required=True, help="JSON object or @path")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("feedback", help="manage feedback rules")
    fsub = p.add_subparsers(dest="feedback_command", required=True)
    fa = fsub.add_parser("add", help="store a feedback rule")
    fa.add_argument("--session", required=True)
    fa.add_argument("--original", default=None, help='"<clause>@<label>"; omit for complementary')
    fa.add_argument("--corrected", required=True, help='"<clause>@<label>"')
    fa.add_argument("--tconfig", default=None, help="transformation config JSON path")
    fa.set_defaults(func=_cmd_feedback_add)

    p = sub.add_parser("simulate", help="run an oracle-driven experiment, write CSVs + plot")
    p.add_argument("--mode", required=True, choices=sorted(MODE_ALIASES))
    p.add_argument("--data", required=True)
    p.add_argument("--schema", default=None)
    p.add_argument("--label", default="label")
    p.add_argument("--seeds", default="0..9", help='"a..b" inclusive or comma list')
    p.add_argument("--out", required=True, help="per-run curve CSV path")
    p.add_argument("--dataset-name", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="serve one session over HTTP")
    p.add_argument("--session", required=True)
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("dataset", help="write a built-in benchmark dataset to CSV")
    p.add_argument("--name", required=True, choices=sorted(benchmarks.BUILDERS))
    p.add_argument("--out", required=True)
    p.add_argument("--schema-out", default=None)
    p.set_defaults(func=_cmd_dataset)

    return parser


def _emit_error(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": {"kind": kind, "message": message, **extra}}), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConflictError as exc:
        _emit_error("conflict", str(exc), conflict_with=exc.conflicting_id)
        return 2
    except CliError as exc:
        _emit_error(exc.kind, exc.message)
        return exc.exit_code
    except SessionError as exc:
        _emit_error(exc.kind, exc.message)
        return 1
    except ParseError as exc:
        _emit_error("parse_error", str(exc), position=exc.position)
        return 1
    except FeedbackError as exc:
        _emit_error("bad_feedback", str(exc))
        return 1
    except (DataError, OSError, ValueError) as exc:
        _emit_error("error", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
