"""Command-line interface: run simulations, list presets, validate configs."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ValidationError
from .experiments import ExperimentConfig, run
from .presets import list_presets, preset_config


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"override must be key=value, got {text!r}")
    key, _, raw = text.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _load_config(args) -> ExperimentConfig:
    overrides = dict(args.override or [])
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.config is not None:
        config = ExperimentConfig.from_json(args.config)
        if overrides:
            config = config.with_overrides(**overrides)
        return config
    return preset_config(args.preset, **overrides)


def _cmd_run(args) -> int:
    try:
        config = _load_config(args)
    except (KeyError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    record = run(config)
    final = record.diagnostics[-1]
    print(f"{config.name}: {len(record.times)} snapshots, "
          f"t = {record.times[-1]:g}, mass = {final.mass:.6g}, "
          f"max_speed = {final.max_speed:.3e}")
    if "run_dir" in record.metadata:
        print(f"output: {record.metadata['run_dir']}")
    return 0


def _cmd_list_presets(args) -> int:
    catalog = list_presets()
    if args.json:
        print(json.dumps(catalog, indent=2, sort_keys=True))
        return 0
    width = max(len(name) for name in catalog)
    for name, entry in catalog.items():
        tag = " (long)" if entry["long"] else ""
        print(f"{name:<{width}}  {entry['description']}{tag}")
    return 0


def _cmd_validate(args) -> int:
    try:
        config = ExperimentConfig.from_json(args.config)
    except ValidationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    problems = config.validate()
    if problems:
        print(f"invalid: {config.name}", file=sys.stderr)
        for p in problems:
            print(f"  - {p}", file=sys.stderr)
        return 1
    print(f"ok: {config.name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aggblob",
        description="Deterministic particle solver for aggregation-diffusion equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file or preset")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON config file")
    src.add_argument("--preset", help="name of a built-in preset")
    p_run.add_argument(
        "--override",
        action="append",
        type=_parse_override,
        metavar="KEY=VALUE",
        help="override a config field (value parsed as JSON, else string); repeatable",
    )
    p_run.add_argument("--out", help="output directory (overrides config output_dir)")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list-presets", help="list built-in presets")
    p_list.add_argument("--json", action="store_true", help="emit the full catalog as JSON")
    p_list.set_defaults(func=_cmd_list_presets)

    p_val = sub.add_parser("validate", help="validate a config file without running it")
    p_val.add_argument("--config", required=True, help="path to a JSON config file")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
