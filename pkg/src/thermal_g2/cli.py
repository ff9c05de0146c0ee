"""Command-line front end: ``thermal-g2 {scan,decompose,hbt,validate}``."""
from __future__ import annotations

import argparse
import logging
import sys
from .config import load_config
from .errors import ConfigurationError, ThermalG2Error, UnsupportedLayoutError
from .experiment import regime_report, run_decompose, run_hbt, run_scan
from .presets import PRESETS, preset

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermal-g2",
        description="Second-order interference of thermal light in twin unbalanced Mach-Zehnder interferometers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("scan", "Monte Carlo scan of the intensity-fluctuation correlation"),
        ("decompose", "scan with the HBT / non-HBT two-photon decomposition"),
        ("hbt", "g2(tau) of a single HBT beam splitter"),
        ("validate", "print the coherence-regime report of the configured layout"),
    ):
        p = sub.add_parser(name, help=help_)
        source = p.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="path to a section.key = value config file")
        source.add_argument("--preset", choices=sorted(PRESETS), help="bundled config")
        p.add_argument("--seed", type=int, help="override run.seed")
        if name != "validate":
            p.add_argument("--out", help="CSV output path (default: stdout, summary then goes to stderr)")
            p.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
            p.add_argument("-v", "--verbose", action="store_true")
        if name == "decompose":
            p.add_argument(
                "--brute-force", action="store_true", help="direct O(N^2) pair enumeration instead of factorized sums"
            )
    return parser


def _load(args):
    config = preset(args.preset) if args.preset else load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigurationError("--seed must be non-negative")
        config = config.with_seed(args.seed)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _load(args)
    except (OSError, ConfigurationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(regime_report(config).format())
        return EXIT_OK

    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "scan":
            result = run_scan(config, workers=args.workers)
        elif args.command == "decompose":
            result = run_decompose(config, workers=args.workers, brute_force=args.brute_force)
        else:
            result = run_hbt(config, workers=args.workers)
    except (ConfigurationError, UnsupportedLayoutError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ThermalG2Error, ArithmeticError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    csv_text = result.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
        sys.stdout.write(result.summary.format())
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(result.summary.format())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
