"""Command-line entry point: ``magsim run|sweep|check|list``.

Exit status is 0 on success, 1 for configuration errors and 2 for runtime
failures, with a one-line diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from magsim.config import FORMATS, RunConfig, load_config, threads_from_env
from magsim.errors import ConfigError, MagsimError, ParameterError
from magsim.output import emit, format_value
from magsim.params import Direction, DriveConfig, build_params
from magsim.scenarios import PRESET_DESCRIPTIONS, preset_params, run_sweep
from magsim.transmission import mean_field
from magsim.validation import cycle_unit_estimates, reference_drive_table, validate

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
DEFAULT_CHECK_POWER_W = 1.0


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="magsim", description="Transmission and entanglement sweeps for a "
                                                "two-cavity magnomechanical system.")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--format", choices=FORMATS, help="table format (default: csv)")
        p.add_argument("--threads", type=_positive_int,
                       help="worker threads (default: $MAGSIM_THREADS or 1)")

    run = sub.add_parser("run", help="run a named figure scenario")
    run.add_argument("preset", choices=sorted(PRESET_DESCRIPTIONS))
    run.add_argument("--points", type=_positive_int, help="grid points per axis")
    output_flags(run)

    sweep = sub.add_parser("sweep", help="run a sweep described by a TOML config")
    sweep.add_argument("--config", required=True)
    output_flags(sweep)

    check = sub.add_parser("check", help="print the linearization validity report for a config")
    check.add_argument("--config", required=True)
    check.add_argument("--power", type=float,
                       help="probe power in W (default: the config's power, else 1 W)")

    sub.add_parser("list", help="list the named scenarios")
    return parser


def _execute(config: RunConfig, out, fmt, threads) -> None:
    spec = config.sweep_spec()
    workers = threads or config.threads or threads_from_env()
    result = run_sweep(spec, workers)
    fmt = fmt or config.format
    path = out or config.out
    if path is None:
        emit(result, fmt, sys.stdout)
        return
    # write to a temporary file first so a failure never leaves a truncated table
    tmp = f"{path}.partial"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            emit(result, fmt, fh)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _check(config: RunConfig, power: Optional[float] = None) -> None:
    try:
        if config.scenario:
            params = preset_params(config.scenario, config.overrides)
        else:
            params = build_params(config.overrides)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if power is None:
        power = params.P_a or DEFAULT_CHECK_POWER_W
    if power < 0:
        raise ConfigError(f"power: expected a non-negative value, got {power}")

    lines = [f"probe power {format_value(power)} W"]
    fields = ("direction", "m_occupancy", "simplified_occupancy", "occupancy_bound", "occupancy_status",
              "kerr_term", "drive_sum", "kerr_status")
    lines.append("\t".join(fields))
    for direction in (Direction.FORWARD, Direction.BACKWARD, Direction.MAGNON_ONLY):
        drive = DriveConfig.from_params(params, direction, power)
        state = mean_field(params, drive, config.meanfield_mode)
        report = validate(params, state, drive)
        row = [direction.value] + [format_value(_plain(getattr(report, f))) for f in fields[1:]]
        lines.append("\t".join(row))

    lines.append("")
    lines.append("reference drive amplitudes: power_w\tquoted\tcomputed\tratio\tconsistent")
    for row in reference_drive_table(params):
        mark = "consistent" if row["consistent"] else "DISCREPANCY"
        lines.append("\t".join(format_value(row[k]) for k in ("power_w", "quoted", "computed", "ratio"))
                     + f"\t{mark}")

    lines.append("")
    lines.append("mixed-unit estimates (couplings in Hz, amplitudes in rad/s):")
    for key, value in cycle_unit_estimates(params, power).items():
        lines.append(f"{key}\t{format_value(value)}")
    print("\n".join(lines))


def _plain(value):
    return getattr(value, "value", value)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list":
            for name, text in PRESET_DESCRIPTIONS.items():
                print(f"{name}\t{text}")
            return EXIT_OK
        if args.command == "run":
            config = RunConfig(scenario=args.preset, points=args.points)
        else:
            config = load_config(args.config)
        if args.command == "check":
            _check(config, args.power)
        else:
            _execute(config, args.out, args.format, args.threads)
    except (_UsageError, ConfigError) as exc:
        print(f"magsim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MagsimError, OSError) as exc:
        print(f"magsim: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
