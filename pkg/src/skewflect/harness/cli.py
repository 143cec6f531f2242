"""``skewflect <subcommand> [--config PATH] [--seed-override N] [--output DIR]``.

Exit status: 0 on success, 1 for configuration errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import EXPERIMENTS, ConfigError, build_config, load_config
from .experiments import COMMANDS


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewflect", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, aliases=[name.replace("_", "-")])
        sp.set_defaults(experiment=name)
        sp.add_argument("--config", help="YAML experiment description (defaults if omitted)")
        sp.add_argument("--seed-override", type=int, metavar="N",
                        help="run a single replicate with this seed")
        sp.add_argument("--output", metavar="DIR", help="directory for CSV output")
        sp.add_argument("--workers", type=int, help="threads per sampler run")
        sp.add_argument("--plot", action="store_true", help="also write SVG curves")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else build_config(args.experiment)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config describes {cfg.experiment!r}, not {args.experiment!r}")
        if args.seed_override is not None:
            cfg.seeds = [args.seed_override]
        if args.output:
            cfg.output_dir = args.output
        if args.workers:
            cfg.workers = args.workers
        if args.plot:
            cfg.plot = True
        cfg.validate()
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"skewflect: configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        files = COMMANDS[cfg.experiment](cfg)
    except Exception as exc:  # noqa: BLE001 - surfaced as exit status 2
        logging.getLogger("skewflect").debug("run failed", exc_info=True)
        print(f"skewflect: {cfg.experiment} failed: {exc}", file=sys.stderr)
        return 2
    for name, path in files.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
