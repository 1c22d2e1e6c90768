"""Command-line entry point: `skewgraph run | validate | presets`."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence

from skewgraph import __version__
from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import (
    BudgetExceededError,
    ConvergenceError,
    SkewGraphError,
    SplitCheckError,
    ValidationError,
)
from skewgraph.experiments import (
    ExperimentRunner,
    load_config_data,
    parse_config,
    validate,
)
from skewgraph.services import ZooService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3


class JsonFormatter(logging.Formatter):
    """One JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, sort_keys=True)


def configure_logging(settings: Settings) -> None:
    handler = logging.StreamHandler(sys.stderr)
    if settings.log_format == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel("DEBUG" if settings.debug else settings.log_level.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewgraph",
        description="Experiments on step skew products over Markov shifts",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run the experiment described by a TOML config")
    run.add_argument("config", help="Path to the experiment config")
    run.add_argument("--out", help="Output directory (overrides the config)")
    run.add_argument("--seed", type=int, help="Seed (overrides the config)")

    check = commands.add_parser("validate", help="Check a config without running it")
    check.add_argument("config", help="Path to the experiment config")

    commands.add_parser("presets", help="List the preset systems")
    return parser


def _report(findings: Sequence[str]) -> None:
    for finding in findings:
        print(f"error: {finding}", file=sys.stderr)


def cmd_validate(args: argparse.Namespace) -> int:
    findings = validate(load_config_data(args.config))
    if findings:
        _report(findings)
        return EXIT_VALIDATION
    print(f"{args.config}: ok")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    data = load_config_data(args.config)
    if args.seed is not None:
        data["seed"] = args.seed
    findings = validate(data)
    if findings:
        _report(findings)
        return EXIT_VALIDATION
    config, _ = parse_config(data)
    record = ExperimentRunner(settings).run(config, args.out)
    print(f"Wrote results to {record.directory} (config sha256 {record.config_sha256[:12]})")
    return EXIT_OK


def cmd_presets() -> int:
    for preset in ZooService.list_presets():
        params = ", ".join(f"{k}={v}" for k, v in preset.defaults.items()) or "-"
        print(f"{preset.name:<20} {params:<32} {preset.description}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line.

    Returns:
        0 on success, 2 on validation errors, 3 on convergence or budget failures,
        1 on unexpected errors
    """
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging(settings)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "run":
            return cmd_run(args, settings)
        return cmd_presets()
    except (ValidationError, SplitCheckError) as e:
        _report([str(e)])
        return EXIT_VALIDATION
    except (ConvergenceError, BudgetExceededError) as e:
        _report([str(e)])
        return EXIT_CONVERGENCE
    except SkewGraphError as e:
        logger.exception(f"Experiment failed: {e}")
        _report([str(e)])
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        _report([f"unexpected error: {e}"])
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
