import argparse
import logging
import sys
from os import environ
from pathlib import Path
from typing import List, Optional, Sequence

from betta import ModelError, create_fit_control
from estimation import EstimationError
from frequency_data import FrequencyTableError
from simulation import NORMALITY, Q_CALIBRATION, InvalidStudyConfig, SimulationError
from storage import create_storage_interface
from tasks import (
    ABUNDANCE_FORMAT,
    FREQUENCY_FORMAT,
    Command,
    EstimationTaskError,
    create_run_manifest,
    estimate_richness_from_files,
    fit_richness_model,
    load_study_config,
    run_simulation_study,
    write_run_manifest,
)

EXIT_SUCCESS = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE_ERROR = 2
DATA_ERRORS = (
    FrequencyTableError,
    EstimationError,
    EstimationTaskError,
    ModelError,
    SimulationError,
    OSError,
    ValueError,
)


def is_debug_enabled():
    return environ.get("DEBUG", "0") == "1"


def enable_debug_if_necessary():
    """
    Enable debug logs with the DEBUG variable is set to 1
    """
    if is_debug_enabled():
        logging.basicConfig(level=logging.DEBUG)
        logging.debug("Debug enabled")


def configure_logging():
    enable_debug_if_necessary()
    if not is_debug_enabled():
        logging.basicConfig(level=logging.INFO)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m main",
        description="Species richness estimation and richness regression with heterogeneity.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    estimate = subparsers.add_parser(Command.ESTIMATE.value, help="Estimate richness per sample")
    estimate.add_argument("inputs", nargs="+", help="Frequency count (or abundance) files")
    estimate.add_argument("--method", choices=["ztnb", "chao", "external"], default=None)
    estimate.add_argument(
        "--input-format", choices=[FREQUENCY_FORMAT, ABUNDANCE_FORMAT], default=FREQUENCY_FORMAT
    )
    estimate.add_argument("--keep-going", action="store_true", help="Skip files that fail")
    estimate.add_argument("--out", default=None, help="Output directory")
    estimate.set_defaults(command_parser=estimate)

    fit = subparsers.add_parser(Command.FIT.value, help="Fit richness against covariates")
    fit.add_argument("estimates", help="Estimates CSV: sample_id,c_hat,se[,c_obs]")
    fit.add_argument("--covariates", default=None, help="Covariates CSV with a sample_id column")
    fit.add_argument(
        "--exclude", action="append", default=[], metavar="ID", help="Leave a sample out"
    )
    fit.add_argument("--tol", type=float, default=None)
    fit.add_argument("--max-iter", type=int, default=None)
    fit.add_argument("--out", default=None, help="Output directory")
    fit.set_defaults(command_parser=fit)

    simulate = subparsers.add_parser(Command.SIMULATE.value, help="Run a calibration study")
    simulate.add_argument("--study", choices=[NORMALITY, Q_CALIBRATION], default=None)
    simulate.add_argument("--config", default=None, help="JSON file with study settings")
    simulate.add_argument("--replicates", type=int, default=None)
    simulate.add_argument("--groups", type=int, default=None)
    simulate.add_argument("--group-size", type=int, default=None)
    simulate.add_argument("--size", type=float, default=None)
    simulate.add_argument("--prob", type=float, default=None)
    simulate.add_argument("--n-species", type=int, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--method", choices=["ztnb", "chao"], default=None)
    simulate.add_argument(
        "--bypass", action="store_true", default=None, help="Draw estimates from the exact null"
    )
    simulate.add_argument("--workers", type=int, default=None)
    simulate.add_argument("--out", default=None, help="Output directory")
    simulate.set_defaults(command_parser=simulate)
    return parser


def run_estimate(args: argparse.Namespace) -> int:
    storage = create_storage_interface(args.out)
    run = estimate_richness_from_files(
        args.inputs, storage, args.method, args.input_format, args.keep_going
    )
    manifest = create_run_manifest(
        Command.ESTIMATE,
        run.inputs,
        str(storage.root),
        arguments={
            "method": args.method,
            "input_format": args.input_format,
            "keep_going": args.keep_going,
        },
    )
    write_run_manifest(manifest, storage)
    return EXIT_SUCCESS


def run_fit(args: argparse.Namespace) -> int:
    storage = create_storage_interface(args.out)
    try:
        control = create_fit_control(args.tol, args.max_iter)
    except ValueError as e:
        args.command_parser.error(str(e))
    inputs = [(args.estimates, Path(args.estimates).read_text(encoding="utf-8"))]
    if args.covariates:
        inputs.append((args.covariates, Path(args.covariates).read_text(encoding="utf-8")))
    fit_richness_model(
        inputs[0][1],
        storage,
        inputs[1][1] if args.covariates else None,
        args.exclude,
        control,
    )
    manifest = create_run_manifest(
        Command.FIT,
        inputs,
        str(storage.root),
        arguments={"exclude": args.exclude, "tol": control.tol, "max_iter": control.max_iter},
    )
    write_run_manifest(manifest, storage)
    return EXIT_SUCCESS


def run_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    storage = create_storage_interface(args.out)
    inputs = []
    settings = {}
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        inputs.append((args.config, text))
        settings.update(load_study_config(text))
    flags = {
        "study": args.study,
        "replicates": args.replicates,
        "groups": args.groups,
        "group_size": args.group_size,
        "size": args.size,
        "prob": args.prob,
        "n_species": args.n_species,
        "seed": args.seed,
        "estimator": args.method,
        "bypass": args.bypass,
        "workers": args.workers,
    }
    settings.update({key: value for key, value in flags.items() if value is not None})
    if "study" not in settings:
        parser.error("the following arguments are required: --study (or a --config with a study)")
    report = run_simulation_study(settings, storage)
    manifest = create_run_manifest(
        Command.SIMULATE, inputs, str(storage.root), seed=report.seed, arguments=settings
    )
    write_run_manifest(manifest, storage)
    return EXIT_SUCCESS


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand and return its exit code: 0 on success, 1 for data and
    model errors, 2 for usage errors
    """
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging()
    try:
        if args.command == Command.ESTIMATE.value:
            return run_estimate(args)
        if args.command == Command.FIT.value:
            return run_fit(args)
        return run_simulate(args, args.command_parser)
    except InvalidStudyConfig as e:
        logging.error(f"Invalid study configuration: {e}")
        args.command_parser.print_usage(sys.stderr)
        return EXIT_USAGE_ERROR
    except DATA_ERRORS as e:
        logging.error(f"{args.command} failed: {e}")
        logging.debug("Failure details", exc_info=True)
        return EXIT_DATA_ERROR


def execute(argv: Optional[List[str]] = None):
    sys.exit(main(argv))


if __name__ == "__main__":
    execute()
