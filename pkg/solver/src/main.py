"""Command-line entry point: python main.py <command> [flags]."""
import argparse
import math
import re
import sys
from pathlib import Path
from typing import Callable, Sequence
from pydantic import ValidationError

from commands import acf, frac_gamma, gamma, mu0, oracle, sweep, verify
from exceptions import DomainError, NumericalFailureError, UsageError
from records import write_records
from schema import Command, OracleCheck, OutputFormat, ResultRecord, RunConfig, Suite
from settings import __version__

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

COMMANDS: dict[Command, Callable[[RunConfig], list[ResultRecord]]] = {
    Command.GAMMA: gamma.run,
    Command.FRAC_GAMMA: frac_gamma.run,
    Command.MU0: mu0.run,
    Command.ACF: acf.run,
    Command.SWEEP: sweep.run,
    Command.ORACLE: oracle.run,
    Command.VERIFY: verify.run,
}

ANGLE_PATTERN = re.compile(r"^\s*(?:(\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def parse_angle(text: str) -> float:
    """Radians, or multiples of pi such as 'pi/8', '3pi/4' and '3*pi/4'.

    Examples:
        >>> parse_angle("3pi/4") == 3 * math.pi / 4
        True
    """
    match = ANGLE_PATTERN.match(text)
    if match is None:
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"Expected an angle like 0.39 or pi/8, instead found '{text}'.") from None
    numerator = float(match.group(1)) if match.group(1) else 1.0
    denominator = float(match.group(2)) if match.group(2) else 1.0
    if denominator == 0:
        raise argparse.ArgumentTypeError(f"Expected a nonzero denominator in '{text}'.")
    return numerator * math.pi / denominator


def parse_mesh(text: str) -> tuple[int, int]:
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if match is None:
        raise argparse.ArgumentTypeError(f"Expected a mesh like 256x128, instead found '{text}'.")
    return int(match.group(1)), int(match.group(2))


def parse_orders(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated orders like 0.9,0.99, instead found '{text}'.") from None


def read_config_file(path: str) -> list[str]:
    """Turn 'key = value' lines ('#' comments allowed) into command-line flags; 'key = true' becomes a bare flag."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"Expected a readable config file, instead found '{path}': {exc.strerror}.") from exc

    flags = []
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"Expected 'key = value' on line {number} of {path}, instead found '{line}'.")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            flags.append(flag)
        elif value.lower() != "false":
            flags.extend([flag, value])
    return flags


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="cone-exponents", description="Characteristic exponents of s-harmonic functions on spherical-cap cones.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    common = ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="key=value file; flags on the command line override it")
    common.add_argument("--dim", dest="n", type=int, default=2, help="dimension n >= 2")
    common.add_argument("--theta", type=parse_angle, default=None, help="half-aperture in radians or as pi/8, 3pi/4")
    common.add_argument("--s", type=float, default=None, help="fractional order in (0, 1); 1 is classical mode")
    common.add_argument("--mesh", type=parse_mesh, default=None, help="extension mesh NxM (phi x psi cells)")
    common.add_argument("--nodes", type=int, default=None, help="nodes of the 1-D cap meshes")
    common.add_argument("--output", type=str, default=None, help="output file (default: standard output)")
    common.add_argument("--format", type=OutputFormat, choices=list(OutputFormat), default=OutputFormat.CSV)
    common.add_argument("--seed", type=int, default=0, help="seed of randomized property trials")

    subparsers.add_parser(Command.GAMMA.value, parents=[common], help="classical exponent gamma(theta)")
    frac = subparsers.add_parser(Command.FRAC_GAMMA.value, parents=[common], help="fractional exponent gamma_s(theta)")
    frac.add_argument("--levels", type=int, default=1, help="report raw eigenvalues over this many mesh doublings")
    subparsers.add_parser(Command.MU0.value, parents=[common], help="mu_0(theta) of a narrow cap")
    acf_parser = subparsers.add_parser(Command.ACF.value, parents=[common], help="ACF curve and its minimum")
    acf_parser.add_argument("--grid", type=int, default=41, help="odd number of apertures, at least 9")
    acf_parser.add_argument("--curve", action="store_true", help="emit Gamma^s on the grid")
    acf_parser.add_argument("--limit", action="store_true", help="emit the s -> 1 limit curve")
    sweep_parser = subparsers.add_parser(Command.SWEEP.value, parents=[common], help="s-sweep toward s = 1")
    sweep_parser.add_argument("--s-list", dest="s_list", type=parse_orders, default=(), help="increasing orders, e.g. 0.9,0.99,0.999")
    sweep_parser.add_argument("--estimates", action="store_true", help="emit the extrapolated limits instead of the table")
    oracle_parser = subparsers.add_parser(Command.ORACLE.value, parents=[common], help="fractional Laplacian quadrature checks")
    oracle_parser.add_argument("--check", type=OracleCheck, choices=list(OracleCheck), default=OracleCheck.HALFSPACE)
    verify_parser = subparsers.add_parser(Command.VERIFY.value, parents=[common], help="verification suites")
    verify_parser.add_argument("--suite", type=Suite, choices=list(Suite), required=True)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse and validate a command line.

    Args:
        argv (Sequence[str] | None, optional): Arguments without the program name. Defaults to sys.argv[1:].

    Returns:
        RunConfig: The validated configuration.

    Raises:
        UsageError: On unknown flags, malformed values or values outside the module preconditions.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    config_parser = ArgumentParser(add_help=False)
    config_parser.add_argument("--config", type=str, default=None)
    known, _ = config_parser.parse_known_args(argv)
    if known.config is not None and argv:
        # file flags go right after the command so that command-line flags win, required ones included
        argv = [argv[0], *read_config_file(known.config), *argv[1:]]
    args = build_parser().parse_args(argv)

    values = {key: value for key, value in vars(args).items() if key != "config" and value is not None}
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise UsageError("; ".join(error["msg"] for error in exc.errors())) from None


def run(config: RunConfig) -> int:
    """Dispatch a validated configuration and write its records.

    Returns:
        int: 0 on success, 2 on a numerical failure (a record with the residual is still written), 3 on a failed
            verification suite.
    """
    try:
        records = COMMANDS[config.command](config)
    except NumericalFailureError as exc:
        failure = ResultRecord.build({"error": str(exc), "residual": exc.residual, "iterations": exc.iterations}, config)
        emit([failure], config)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    emit(records, config)
    if config.command == Command.VERIFY and not all(record["passed"] for record in records):
        failed = sum(not record["passed"] for record in records)
        print(f"verify {config.suite.value}: {failed} of {len(records)} checks failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def emit(records: list[ResultRecord], config: RunConfig) -> None:
    text = write_records(records, config.format, config.output)
    if config.output is None:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_args(argv)
        return run(config)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
