"""Command line entry point: ``orbiquant run|validate|list``."""
from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .errors import ConfigError, OrbiquantError
from .group_actions import BUILTIN_ACTIONS


def _resolve(path: str | None, experiment: str | None) -> str:
    if path:
        return path
    configs = ex.builtin_configs()
    if experiment in configs:
        return str(configs[experiment])
    raise ConfigError(f"no --config given and no built-in config named {experiment!r}")


def _cmd_run(args) -> int:
    cfg = ex.load_config(_resolve(args.config, args.experiment))
    if cfg.experiment != args.experiment:
        raise ConfigError(f"config describes {cfg.experiment!r}, not {args.experiment!r}")
    if args.format:
        cfg = ex.ExperimentConfig(cfg.experiment, cfg.model, cfg.tolerances, cfg.seed,
                                  args.format, args.out)
    table = ex.run(cfg)
    paths = ex.write_outputs(table, cfg, args.out)
    for g in table.gates:
        print(f"{'PASS' if g.passed else 'FAIL'}  {g.name}: {g.value:.3e}")
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0 if table.passed else 1


def _cmd_validate(args) -> int:
    cfg = ex.load_config(args.config)
    print(f"ok: {cfg.experiment} (seed {cfg.seed}, format {cfg.format})")
    return 0


def _cmd_list(args) -> int:
    print("experiments:")
    for name in ex.EXPERIMENTS:
        print(f"  {name}")
    print("built-in configs:")
    for name, path in ex.builtin_configs().items():
        print(f"  {name}  ({path.name})")
    print("built-in actions:")
    for name in BUILTIN_ACTIONS:
        print(f"  {name}")
    print("  Z<q>-rotation, D<q>  (parametrized families)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbiquant", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment and write detail/summary files")
    r.add_argument("experiment", choices=ex.EXPERIMENTS)
    r.add_argument("--config", help="YAML config (default: the built-in config of that name)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--format", choices=("csv", "json"), help="override output.format")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("--config", required=True)
    v.set_defaults(func=_cmd_validate)
    lst = sub.add_parser("list", help="list experiments, built-in configs and actions")
    lst.set_defaults(func=_cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OrbiquantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
