import argparse
import logging
import sys

from billiardavg.errors import BilliardError

logger = logging.getLogger("billiardavg")


def _window_arg(text: str):
    from billiardavg.statistics.window import Window

    center, sep, width = text.partition(":")
    try:
        return Window(float(center), float(width) if sep else 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected CENTER[:WIDTH] with width >= 0, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    from billiardavg.spectrum.shape import DEFAULT_ALPHA

    parser = argparse.ArgumentParser(
        prog="billiardavg",
        description="Spectral statistics of rectangular billiards under SA, RSA and PA averaging",
    )
    parser.add_argument(
        "--verbose", "-v", action="count", default=0,
        help="More log output (-v info, -vv debug)",
    )
    # Accept -v after the subcommand as well; SUPPRESS keeps the top-level count.
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("--verbose", "-v", action="count", default=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser(
        "spectrum", parents=[verbosity], help="Dump one unfolded spectrum as CSV"
    )
    spectrum.add_argument(
        "--alpha", type=float, default=DEFAULT_ALPHA,
        help=f"Aspect ratio (default: {DEFAULT_ALPHA:.6g})",
    )
    spectrum.add_argument(
        "--e-max", type=float, default=1e4,
        help="Largest raw energy to enumerate (default: 1e4)",
    )
    spectrum.add_argument(
        "--e-min", type=float, default=0.0,
        help="Smallest raw energy to store (default: 0)",
    )
    spectrum.add_argument(
        "--max-levels", type=int, default=None,
        help="Level budget for the enumeration",
    )
    spectrum.add_argument("--out", default="spectrum.csv", help="Output CSV path")
    spectrum.add_argument(
        "--window", type=_window_arg, action="append", default=[], metavar="CENTER[:WIDTH]",
        help="Print every sample statistic over this unfolded window (repeatable)",
    )

    run = sub.add_parser("run", parents=[verbosity], help="Run one experiment and write its CSV")
    run.add_argument("experiment", help="Experiment name (see list-experiments)")
    run.add_argument("--config", default=None, metavar="PATH", help="key = value config file")
    run.add_argument("--seed", type=int, default=None, help="Seed for the PA draws")
    run.add_argument("--out", default=None, metavar="PATH", help="CSV output path")
    run.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="Override one config key (repeatable)",
    )
    run.add_argument(
        "--quiet", "-q", action="store_true",
        help="No progress output, only errors",
    )

    listing = sub.add_parser("list-experiments", help="Show registered experiments")
    listing.add_argument("--keys", action="store_true", help="Also list every config key")
    return parser


def _spectrum(args) -> None:
    from billiardavg.errors import InvalidWindowError
    from billiardavg.spectrum.dump import dump_spectrum
    from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS, enumerate_levels
    from billiardavg.spectrum.shape import BilliardShape
    from billiardavg.spectrum.unfolding import unfold
    from billiardavg.statistics.sample import sample_statistic
    from billiardavg.statistics.window import StatisticKind
    from billiardavg.ui.components import statistic_table
    from billiardavg.ui.console import console

    raw = enumerate_levels(
        BilliardShape(args.alpha),
        args.e_max,
        e_min=args.e_min,
        max_levels=args.max_levels or DEFAULT_MAX_LEVELS,
    )
    spec = unfold(raw)
    path = dump_spectrum(raw, spec, args.out)
    logger.info("wrote %d levels to %s", raw.levels.size, path)
    console.print(f"{raw.levels.size} levels -> [path]{path}[/path]")

    stats = []
    for window in args.window:
        for kind in StatisticKind:
            try:
                stats.append(sample_statistic(kind, spec, window))
            except InvalidWindowError as exc:
                logger.info("skipping %s at %s: %s", kind.value, window, exc)
    if stats:
        console.print(statistic_table(stats))


def _run(args) -> None:
    from billiardavg.app import run_experiment
    from billiardavg.config import load_config, parse_overrides
    from billiardavg.harness.experiments import resolve_config
    from billiardavg.ui.console import console
    from billiardavg.ui.renderer import NullRenderer, RunRenderer

    file_values = load_config(args.config) if args.config else {}
    overrides = parse_overrides(args.set)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["output"] = args.out
    config = resolve_config(args.experiment, file_values, overrides)

    renderer = NullRenderer() if args.quiet else RunRenderer(console)
    run_experiment(config, renderer)


def _list(args) -> None:
    from billiardavg.config import ExperimentConfig
    from billiardavg.harness.experiments import EXPERIMENTS
    from billiardavg.ui.components import config_key_table, experiment_table
    from billiardavg.ui.console import console

    console.print(experiment_table(EXPERIMENTS.values()))
    if args.keys:
        console.print(config_key_table(ExperimentConfig.keys()))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    from billiardavg.ui.console import err_console, setup_logging
    setup_logging(args.verbose)

    handlers = {"spectrum": _spectrum, "run": _run, "list-experiments": _list}
    try:
        handlers[args.command](args)
    except KeyboardInterrupt:
        err_console.print("interrupted", style="error")
        return 130
    except (BilliardError, OSError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        if isinstance(exc, BilliardError):
            category = exc.category
        else:
            category = "io" if isinstance(exc, OSError) else "argument"
        err_console.print(
            f"error[{category}]: {exc}",
            style="error", markup=False, highlight=False, soft_wrap=True,
        )
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
