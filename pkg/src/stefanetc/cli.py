"""Command-line front end.

Verbs:
    derive    print the derivation report for a config
    validate  check the initial-data / parameter validity conditions
    run       run one scenario and write series/events/report/summary files
    compare   run event_triggered vs a baseline on the same physics
    sweep     re-run a scenario over a list of values for one config key

Exit codes: 0 success, 1 configuration error, 2 validity breach during a run.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import harness, params
from .config import default_config_text, parse_config, parse_config_text
from .errors import ConfigurationError, NumericalFailure, ValidityBreach

KINDS = ("event_triggered", "continuous", "sampled_data")


def _load(args) -> "ScenarioConfig":
    if args.config is None:
        text = default_config_text()
    else:
        return parse_config(args.config)
    return parse_config_text(text)


def _output_dir(cfg, override: str | None) -> Path:
    root = os.environ.get("STEFANETC_OUTPUT_ROOT", "")
    directory = Path(override) if override else Path(cfg.scenario.output_dir)
    if root and not directory.is_absolute():
        directory = Path(root) / directory
    return directory


def _with_kind(cfg, kind: str):
    text = harness.serialize_config(cfg)
    lines = []
    in_scenario = False
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("["):
            in_scenario = stripped == "[scenario]"
        if in_scenario and stripped.split("=")[0].strip() == "kind":
            line = f"kind = {kind}"
        lines.append(line)
    return parse_config_text("\n".join(lines) + "\n")


def cmd_derive(args) -> int:
    cfg = _load(args)
    derived = params.derive_trigger(cfg.phys, cfg.ctrl, cfg.trig)
    sys.stdout.write(harness.derivation_report(cfg, derived))
    return 0


def cmd_validate(args) -> int:
    cfg = _load(args)
    report = params.validate_initial_data(cfg.init, cfg.ctrl, cfg.phys)
    for line in report.as_lines():
        print(line)
    print("overall:", "PASS" if report.overall_pass else "FAIL")
    return 0 if report.overall_pass else 1


def _print_summary(summary: dict) -> None:
    for key in sorted(summary):
        print(f"{key} = {summary[key]}")


def cmd_run(args) -> int:
    cfg = _load(args)
    if args.kind is not None:
        cfg = _with_kind(cfg, args.kind)
    result = harness.run_scenario(cfg)
    directory = _output_dir(cfg, args.output)
    written = harness.emit_outputs(result, directory)
    for path in written:
        print(f"wrote {path}")
    _print_summary(result.summary)
    if result.breach is not None:
        print(f"run halted: {result.breach.condition}: {result.breach.message}",
              file=sys.stderr)
        return 2
    return 0


def cmd_compare(args) -> int:
    cfg = _load(args)
    kinds = args.kinds.split(",") if args.kinds else ["event_triggered", args.baseline]
    for kind in kinds:
        if kind not in KINDS:
            raise ConfigurationError(f"unknown scenario kind {kind!r}")
    configs = [_with_kind(cfg, kind) for kind in kinds]
    rows = harness.compare_scenarios(configs)
    keys = ["scenario", "control_updates", "events_threshold",
            "events_max_dwell", "dwell_min", "dwell_mean", "dwell_max",
            "t_converged", "final_interface_gap"]
    print("\t".join(keys))
    for row in rows:
        print("\t".join(str(row.get(k, "")) for k in keys))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if "." not in args.param:
        raise ConfigurationError("--param must be section.key")
    section, key = args.param.split(".", 1)
    base_text = harness.serialize_config(cfg)
    header_printed = False
    for value in args.values:
        lines, in_section = [], False
        replaced = False
        for line in base_text.splitlines():
            stripped = line.strip()
            if stripped.startswith("["):
                in_section = stripped == f"[{section}]"
            if in_section and "=" in stripped \
                    and stripped.split("=")[0].strip() == key:
                line = f"{key} = {value}"
                replaced = True
            lines.append(line)
        if not replaced:
            raise ConfigurationError(
                f"config has no key {key!r} in section [{section}]")
        swept = parse_config_text("\n".join(lines) + "\n")
        result = harness.run_scenario(swept)
        row = dict(result.summary)
        row[args.param] = value
        keys = [args.param, "control_updates", "dwell_min", "dwell_mean",
                "t_converged", "final_interface_gap"]
        if not header_printed:
            print("\t".join(keys))
            header_printed = True
        print("\t".join(str(row.get(k, "")) for k in keys))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stefanetc",
        description="Event-triggered boundary control of the Stefan problem")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", default=None,
                       help="path to a .cfg file (default: built-in paraffin case)")

    p = sub.add_parser("derive", help="print the derived-constant report")
    add_common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("validate", help="check validity conditions")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a scenario and write output files")
    add_common(p)
    p.add_argument("--kind", choices=KINDS, default=None,
                   help="override scenario.kind")
    p.add_argument("--output", default=None, help="output directory override")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare scenario kinds on one config")
    add_common(p)
    p.add_argument("--baseline", choices=KINDS, default="sampled_data")
    p.add_argument("--kinds", default=None,
                   help="comma-separated kinds (overrides --baseline)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="re-run over values of one config key")
    add_common(p)
    p.add_argument("--param", required=True, help="section.key to vary")
    p.add_argument("--values", nargs="+", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (ValidityBreach, NumericalFailure) as exc:
        print(f"validity breach: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
