"""``ehcoop`` command line: run, reproduce and validate experiments.

Exit status: 0 pass, 1 tolerance failure, 2 configuration error.
"""

import argparse
import logging
import sys

from .config import FIGURES, ConfigError, load_config, load_preset
from .experiments import reproduce_figure, run_experiment

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

_SOURCES = ("full", "thinned")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    common.add_argument("--out-dir", default=".", help="directory for CSV and JSON output")
    common.add_argument("--tolerance", type=float, help="sup-norm gap allowed between analytic and simulated curves")
    common.add_argument("--cluster-source", choices=_SOURCES, help="process the simulated clusters are drawn from")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ehcoop", description="Cooperative energy-harvesting network: analytic vs Monte Carlo.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run the experiment described by a JSON config")
    run.add_argument("config")
    rep = sub.add_parser("reproduce", parents=[common], help="regenerate the data behind a figure")
    rep.add_argument("figure_id", choices=FIGURES)
    val = sub.add_parser("validate", parents=[common], help="check a config without running it")
    val.add_argument("config")
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which already matches EXIT_CONFIG
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.trials is not None and args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.tolerance is not None and not args.tolerance > 0:
        print("error: --tolerance must be > 0", file=sys.stderr)
        return EXIT_CONFIG
    overrides = dict(seed=args.seed, trials=args.trials, cluster_source=args.cluster_source, tolerance=args.tolerance)
    try:
        if args.command == "reproduce":
            load_preset(args.figure_id)
            report = reproduce_figure(args.figure_id, out_dir=args.out_dir, **overrides)
            return EXIT_PASS if report.passed else EXIT_FAIL
        spec = load_config(args.config).with_overrides(**overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{args.config}: ok ({spec.kind}, {spec.sim.trials} trials, seed {spec.sim.master_seed})")
        return EXIT_PASS
    report = run_experiment(spec, args.out_dir)
    print(report.text())
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
