"""Command-line front end: run trials, sweeps and config validation.

Configuration values resolve in three layers: built-in defaults, then a
JSON config file (``--config``), then explicit flags.  The JSON keys
are named exactly like the CSV columns (``n``, ``fiber_length_km``,
``alpha_db_per_km``, ``bsm_success``, ``decoherence``, ``rounds``,
``algorithm``, ``placement``, ``seed``, ``loss_model``,
``decoherence_exponent``) plus the sweep keys ``axis``, ``values``,
``algorithms``, ``placements``, ``trials`` and ``span_km``.

``QKDSIM_THREADS`` caps sweep parallelism (0 or unset picks the CPU
count).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .engine import SWEEP_AXES, SweepConfig, TrialConfig, TrialResult, run_sweep, run_trial
from .errors import ConfigError, QKDSimError
from .routing import AlgorithmKind
from .topology import Placement

CSV_COLUMNS = (
    "algorithm",
    "placement",
    "n",
    "fiber_length_km",
    "alpha_db_per_km",
    "bsm_success",
    "decoherence",
    "rounds",
    "seed",
    "key_rate",
    "flow_bits",
    "raw_bits_ab",
    "secret_bits_ab",
    "elapsed_ms",
)

_TRIAL_KEYS = (
    "n",
    "fiber_length_km",
    "alpha_db_per_km",
    "bsm_success",
    "decoherence",
    "rounds",
    "algorithm",
    "placement",
    "seed",
    "loss_model",
    "decoherence_exponent",
)
_SWEEP_KEYS = ("axis", "values", "algorithms", "placements", "trials", "span_km")

_AXIS_ALIASES = {
    "bsm": "bsm_success",
    "fiber": "fiber_length",
    "fixed_span": "fixed_span_grid_size",
}


@dataclass
class CliInvocation:
    """One parsed command line, before config-file resolution."""

    subcommand: str
    flags: dict = field(default_factory=dict)
    config_path: str | None = None
    output_path: str | None = None
    plot_path: str | None = None


def _parse_number(key: str, value, cast):
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for {key}: {value!r}") from exc


def _parse_int(key: str, value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"invalid value for {key}: {value!r}")
    if isinstance(value, float) and value != int(value):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return _parse_number(key, value, int)


def _parse_values(value) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = [part for part in value.split(",") if part.strip() != ""]
        return tuple(_parse_number("values", part, float) for part in parts)
    if isinstance(value, (list, tuple)):
        return tuple(_parse_number("values", part, float) for part in value)
    raise ConfigError(f"invalid value for values: {value!r}")


def _parse_name_list(key: str, value, parse_one):
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(",") if part.strip() != ""]
    elif isinstance(value, (list, tuple)):
        parts = [str(part) for part in value]
    else:
        raise ConfigError(f"invalid value for {key}: {value!r}")
    if not parts:
        raise ConfigError(f"{key} lists no entries")
    return tuple(parse_one(part) for part in parts)


def _normalize_axis(value: str) -> str:
    axis = str(value).strip().lower().replace("-", "_")
    axis = _AXIS_ALIASES.get(axis, axis)
    if axis not in SWEEP_AXES:
        raise ConfigError(f"invalid value for axis: {value!r} (expected one of {SWEEP_AXES})")
    return axis


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"unparsable config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = set(_TRIAL_KEYS) | set(_SWEEP_KEYS)
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r} in {path}")
    return data


def resolve_settings(invocation: CliInvocation) -> dict:
    """Merge defaults, config file and explicit flags into one mapping."""
    settings: dict = {}
    if invocation.config_path:
        settings.update(load_config_file(invocation.config_path))
    settings.update(invocation.flags)
    return settings


def build_trial_config(settings: dict) -> TrialConfig:
    defaults = TrialConfig()
    try:
        algorithm = settings.get("algorithm", defaults.algorithm)
        if not isinstance(algorithm, AlgorithmKind):
            algorithm = AlgorithmKind.parse(str(algorithm))
        placement = settings.get("placement", defaults.placement)
        if not isinstance(placement, Placement):
            placement = Placement.parse(str(placement))
    except QKDSimError as exc:
        raise ConfigError(str(exc)) from exc
    config = TrialConfig(
        n=_parse_int("n", settings.get("n", defaults.n)),
        fiber_length_km=_parse_number(
            "fiber_length_km", settings.get("fiber_length_km", defaults.fiber_length_km), float
        ),
        alpha_db_per_km=_parse_number(
            "alpha_db_per_km", settings.get("alpha_db_per_km", defaults.alpha_db_per_km), float
        ),
        bsm_success=_parse_number(
            "bsm_success", settings.get("bsm_success", defaults.bsm_success), float
        ),
        decoherence=_parse_number(
            "decoherence", settings.get("decoherence", defaults.decoherence), float
        ),
        rounds=_parse_int("rounds", settings.get("rounds", defaults.rounds)),
        algorithm=algorithm,
        placement=placement,
        seed=_parse_int("seed", settings.get("seed", defaults.seed)),
        loss_model=str(settings.get("loss_model", defaults.loss_model)),
        decoherence_exponent=str(
            settings.get("decoherence_exponent", defaults.decoherence_exponent)
        ),
    )
    config.validate()
    return config


def build_sweep_config(settings: dict) -> SweepConfig:
    base = build_trial_config(settings)
    if "axis" not in settings:
        raise ConfigError("sweep requires an axis (--axis)")
    if "values" not in settings:
        raise ConfigError("sweep requires axis values (--values)")
    algorithms = settings.get("algorithms")
    if algorithms is None:
        algorithms = (base.algorithm,)
    else:
        algorithms = _parse_name_list("algorithms", algorithms, AlgorithmKind.parse)
    placements = settings.get("placements")
    if placements is None:
        placements = (base.placement,)
    else:
        try:
            placements = _parse_name_list("placements", placements, Placement.parse)
        except QKDSimError as exc:
            raise ConfigError(str(exc)) from exc
    sweep = SweepConfig(
        base=base,
        sweep_axis=_normalize_axis(settings["axis"]),
        values=_parse_values(settings["values"]),
        algorithms=tuple(algorithms),
        placements=tuple(placements),
        trials_per_point=_parse_int("trials", settings.get("trials", 1)),
        span_km=_parse_number("span_km", settings.get("span_km", 10.0), float),
    )
    sweep.validate()
    return sweep


def trial_config_as_dict(config: TrialConfig) -> dict:
    return {
        "n": config.n,
        "fiber_length_km": config.fiber_length_km,
        "alpha_db_per_km": config.alpha_db_per_km,
        "bsm_success": config.bsm_success,
        "decoherence": config.decoherence,
        "rounds": config.rounds,
        "algorithm": str(config.algorithm),
        "placement": str(config.placement),
        "seed": config.seed,
        "loss_model": config.loss_model,
        "decoherence_exponent": config.decoherence_exponent,
    }


def sweep_config_as_dict(sweep: SweepConfig) -> dict:
    echo = trial_config_as_dict(sweep.base)
    echo["axis"] = sweep.sweep_axis
    echo["values"] = list(sweep.values)
    echo["algorithms"] = [str(a) for a in sweep.algorithms]
    echo["placements"] = [str(p) for p in sweep.placements]
    echo["trials"] = sweep.trials_per_point
    echo["span_km"] = sweep.span_km
    return echo


def result_row(result: TrialResult) -> dict:
    cfg = result.config
    return {
        "algorithm": str(cfg.algorithm),
        "placement": str(cfg.placement),
        "n": cfg.n,
        "fiber_length_km": cfg.fiber_length_km,
        "alpha_db_per_km": cfg.alpha_db_per_km,
        "bsm_success": cfg.bsm_success,
        "decoherence": cfg.decoherence,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "key_rate": result.key_rate,
        "flow_bits": result.flow_bits,
        "raw_bits_ab": result.raw_bits_ab,
        "secret_bits_ab": result.secret_bits_ab,
        "elapsed_ms": round(result.elapsed_seconds * 1000.0, 3),
    }


def _write_rows(handle, results) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for result in results:
        row = result_row(result)
        writer.writerow([str(row[column]) for column in CSV_COLUMNS])


def write_csv(results, path) -> None:
    """Write the result table; columns and their order are stable."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        _write_rows(handle, results)


def max_workers_from_env() -> int:
    raw = os.environ.get("QKDSIM_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"QKDSIM_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigError(f"QKDSIM_THREADS must be non-negative, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def _emit(results, invocation: CliInvocation) -> None:
    if invocation.output_path:
        write_csv(results, invocation.output_path)
        print(f"wrote {len(results)} result row(s) to {invocation.output_path}")
    else:
        _write_rows(sys.stdout, results)


def execute(invocation: CliInvocation) -> int:
    """Execute one parsed invocation; returns the process exit status."""
    settings = resolve_settings(invocation)

    if invocation.subcommand == "validate":
        wants_sweep = any(key in settings for key in ("axis", "values"))
        if wants_sweep:
            echo = sweep_config_as_dict(build_sweep_config(settings))
        else:
            echo = trial_config_as_dict(build_trial_config(settings))
        print(json.dumps(echo, indent=2))
        return 0

    if invocation.subcommand == "run":
        config = build_trial_config(settings)
        result = run_trial(config)
        _emit([result], invocation)
        return 0

    if invocation.subcommand == "sweep":
        sweep = build_sweep_config(settings)
        results = run_sweep(sweep, max_workers=max_workers_from_env())
        _emit(results, invocation)
        if invocation.plot_path is not None:
            from . import plots

            figure = plots.save_sweep_figure(sweep, results, invocation.plot_path)
            print(f"wrote figure to {figure}")
        return 0

    raise ConfigError(f"unknown subcommand {invocation.subcommand!r}")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-size", dest="n", type=int, help="grid side length N")
    parser.add_argument("--fiber-length", dest="fiber_length_km", type=float,
                        help="fiber length per edge in km")
    parser.add_argument("--alpha", dest="alpha_db_per_km", type=float,
                        help="fiber attenuation in dB/km")
    parser.add_argument("--bsm", dest="bsm_success", type=float,
                        help="Bell state measurement success probability")
    parser.add_argument("--decoherence", dest="decoherence", type=float,
                        help="per-swap decoherence probability")
    parser.add_argument("--rounds", dest="rounds", type=int, help="rounds per trial")
    parser.add_argument("--algorithm", dest="algorithm", help="global, nia or ia")
    parser.add_argument("--placement", dest="placement",
                        help="none, central, corner, diagonal, asymmetric or custom=<ids>")
    parser.add_argument("--seed", dest="seed", type=int, help="master seed")
    parser.add_argument("--loss-model", dest="loss_model", choices=["heralded", "silent"],
                        help="what a failed swap does to the channel")
    parser.add_argument("--decoherence-exponent", dest="decoherence_exponent",
                        choices=["swaps", "links"],
                        help="count decoherence per swap or per elementary link")
    parser.add_argument("--config", dest="config_path", metavar="PATH",
                        help="JSON config file; explicit flags override it")
    parser.add_argument("--output", dest="output_path", metavar="PATH",
                        help="CSV output path (default: stdout)")


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--axis", dest="axis",
                        help="sweep axis: fiber_length, decoherence, bsm,"
                             " grid_size or fixed_span_grid_size")
    parser.add_argument("--values", dest="values", help="comma-separated axis values")
    parser.add_argument("--algorithms", dest="algorithms",
                        help="comma-separated algorithm list")
    parser.add_argument("--placements", dest="placements",
                        help="comma-separated placement list")
    parser.add_argument("--trials", dest="trials", type=int, help="trials per sweep point")
    parser.add_argument("--span-km", dest="span_km", type=float,
                        help="total span for the fixed-span axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdsim",
        description="Monte-Carlo simulator of entanglement-based QKD on repeater grids",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run_parser = sub.add_parser("run", help="run one trial and emit a CSV row")
    _add_common_flags(run_parser)

    sweep_parser = sub.add_parser("sweep", help="run a parameter sweep")
    _add_common_flags(sweep_parser)
    _add_sweep_flags(sweep_parser)
    sweep_parser.add_argument("--plot", dest="plot_path", nargs="?", const="__auto__",
                              metavar="PATH",
                              help="also render the sweep figure (default: next to the CSV)")

    validate_parser = sub.add_parser("validate", help="echo the resolved config, no simulation")
    _add_common_flags(validate_parser)
    _add_sweep_flags(validate_parser)

    return parser


_FLAG_KEYS = _TRIAL_KEYS + _SWEEP_KEYS


def parse_args(argv=None) -> CliInvocation:
    namespace = build_parser().parse_args(argv)
    flags = {}
    for key in _FLAG_KEYS:
        value = getattr(namespace, key, None)
        if value is not None:
            flags[key] = value
    plot_path = getattr(namespace, "plot_path", None)
    output_path = getattr(namespace, "output_path", None)
    if plot_path == "__auto__":
        if not output_path:
            raise ConfigError("--plot without a path requires --output")
        plot_path = str(Path(output_path).with_suffix(".png"))
    return CliInvocation(
        subcommand=namespace.subcommand,
        flags=flags,
        config_path=getattr(namespace, "config_path", None),
        output_path=output_path,
        plot_path=plot_path,
    )


def main(argv=None) -> int:
    try:
        invocation = parse_args(argv)
        return execute(invocation)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QKDSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
