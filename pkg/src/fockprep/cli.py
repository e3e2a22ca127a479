"""Command-line front end.

Subcommands: spectrum, stats, sweep, fidelity, recipe, lifetime.  Every
subcommand reads its parameters from flags, from a JSON config passed
with --config, or both (flags win).  Config keys mirror the flag names;
unknown keys are rejected.  Output is CSV to --out (or the configured
output_path), "-" or nothing meaning standard output.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .counting import asymptotic_statistics, number_distribution
from .overlaps import overlap_matrix_between
from .scenarios import (
    ConfigError,
    SweepConfig,
    build_combined_scenario,
    check_recipe,
    lifetime_report,
    run_fidelity_sweep,
    run_sweep,
    _format_csv,
)
from .spectrum import (
    PhysicalUnits,
    SolverError,
    Trap,
    solve_bound_states,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage errors as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(piece) for piece in text.split(",") if piece.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated number list, got {text!r}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(piece) for piece in text.split(",") if piece.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from exc


def _load_config(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"config {path} has unknown keys: {', '.join(unknown)}")
    return raw


def _resolve(args, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _require(args, config: dict, key: str):
    value = _resolve(args, config, key)
    if value is None:
        raise ConfigError(f"missing required parameter {key!r} (flag or config)")
    return value


def _emit(text: str, args, config: dict) -> None:
    destination = _resolve(args, config, "out") or config.get("output_path")
    if destination in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output to {destination}: {exc}") from exc


_CONFIG_KEYS = {
    "spectrum": {"U", "width", "output_path"},
    "stats": {"U_i", "U_f", "ratio", "filling", "occupied", "emit_distribution", "output_path"},
    "sweep": {
        "U_i", "U_f", "filling_factors", "ratio_grid", "mode",
        "output_path", "r_window", "emit_distribution",
    },
    "fidelity": {"U_f", "level", "family", "capacities", "width", "output_path"},
    "recipe": {"U_i", "U_f", "ratio", "filling", "occupied", "output_path"},
    "lifetime": {"U_f", "width", "mass_kg", "length_scale_m", "output_path"},
}


def _cmd_spectrum(args, config) -> str:
    trap = Trap.from_dimensionless(
        float(_require(args, config, "U")),
        width=float(_resolve(args, config, "width", 1.0)),
    )
    header = ["index", "q", "kappa", "energy", "normalization", "penetration_length"]
    rows = [
        [
            s.index, s.interior_wavenumber, s.decay_constant,
            s.energy, s.normalization, s.penetration_length,
        ]
        for s in solve_bound_states(trap)
    ]
    return _format_csv(header, rows)


def _build_point(args, config):
    scenario = build_combined_scenario(
        float(_require(args, config, "U_i")),
        float(_require(args, config, "U_f")),
        float(_require(args, config, "ratio")),
        float(_resolve(args, config, "filling", 1.0)),
    )
    occupied = _resolve(args, config, "occupied")
    occupied = int(occupied) if occupied is not None else scenario.occupied_initial
    return scenario, occupied


def _cmd_stats(args, config) -> str:
    scenario, occupied = _build_point(args, config)
    states_i = solve_bound_states(scenario.initial)
    if not 1 <= occupied <= len(states_i):
        raise ConfigError(f"occupied must be in [1, {len(states_i)}], got {occupied}")
    states_f = solve_bound_states(scenario.final)
    entries = overlap_matrix_between(
        states_f, scenario.final, states_i[:occupied], scenario.initial
    )
    stats = asymptotic_statistics(entries)
    header = [
        "U_i", "U_f", "filling", "N_i", "ratio", "L_f", "V_f", "C_f",
        "mean", "variance", "fano",
    ]
    ratio = scenario.final.width / scenario.initial.width
    filling = _resolve(args, config, "filling", 1.0)
    row = [
        scenario.initial.dimensionless_strength,
        scenario.final.dimensionless_strength,
        float(filling), occupied, ratio,
        scenario.final.width, scenario.final.depth, len(states_f),
        stats.mean, stats.variance, stats.fano,
    ]
    if _resolve(args, config, "emit_distribution", False):
        header += [f"P_{n}" for n in range(len(states_f) + 1)]
        row += list(number_distribution(entries))
    return _format_csv(header, [row])


def _cmd_sweep(args, config) -> str:
    fillings = _resolve(args, config, "filling_factors")
    if isinstance(fillings, str):
        fillings = _parse_float_list(fillings)
    ratios = _resolve(args, config, "ratio_grid")
    if isinstance(ratios, str):
        ratios = _parse_float_list(ratios)
    kwargs = {}
    if fillings is not None:
        kwargs["filling_factors"] = tuple(fillings)
    sweep_config = SweepConfig(
        U_i=float(_require(args, config, "U_i")),
        U_f=float(_require(args, config, "U_f")),
        ratio_grid=tuple(ratios) if ratios is not None else None,
        mode=_resolve(args, config, "mode", "combined"),
        r_window=float(_resolve(args, config, "r_window", 20.0)),
        emit_distribution=bool(_resolve(args, config, "emit_distribution", False)),
        **kwargs,
    )
    return run_sweep(sweep_config)


def _cmd_fidelity(args, config) -> str:
    capacities = _require(args, config, "capacities")
    if isinstance(capacities, str):
        capacities = _parse_int_list(capacities)
    return run_fidelity_sweep(
        float(_require(args, config, "U_f")),
        int(_require(args, config, "level")),
        _require(args, config, "family"),
        capacities,
        width=float(_resolve(args, config, "width", 1.0)),
    )


def _cmd_recipe(args, config) -> str:
    scenario, occupied = _build_point(args, config)
    report = check_recipe(scenario.final, scenario.initial, occupied)
    header = [
        "U_i", "U_f", "ratio", "N_i",
        "epsilon_initial", "epsilon_final", "spans", "width_margin", "verdict",
    ]
    row = [
        scenario.initial.dimensionless_strength,
        scenario.final.dimensionless_strength,
        scenario.final.width / scenario.initial.width,
        occupied,
        report.epsilon_initial, report.epsilon_final,
        report.spans, report.width_margin, report.verdict,
    ]
    return _format_csv(header, [row])


def _cmd_lifetime(args, config) -> str:
    trap = Trap.from_dimensionless(
        float(_require(args, config, "U_f")),
        width=float(_resolve(args, config, "width", 1.0)),
    )
    units = PhysicalUnits(
        particle_mass=float(_require(args, config, "mass_kg")),
        length_scale=float(_require(args, config, "length_scale_m")),
    )
    return lifetime_report(trap, units)


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "stats": _cmd_stats,
    "sweep": _cmd_sweep,
    "fidelity": _cmd_fidelity,
    "recipe": _cmd_recipe,
    "lifetime": _cmd_lifetime,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="fockprep", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--config", help="JSON config file; flags override its keys")
        sub.add_argument("--out", help="output path, '-' for stdout (default)")

    sub = subparsers.add_parser("spectrum", help="bound-state table of one trap")
    sub.add_argument("--u", dest="U", type=float, help="trap strength U = V L^2")
    sub.add_argument("--width", type=float, help="trap width (default 1)")
    common(sub)

    sub = subparsers.add_parser("stats", help="statistics of a single scenario")
    sub.add_argument("--u-i", dest="U_i", type=float, help="initial strength")
    sub.add_argument("--u-f", dest="U_f", type=float, help="final strength")
    sub.add_argument("--ratio", type=float, help="final/initial width ratio")
    sub.add_argument("--filling", type=float, help="filling factor in (0, 1]")
    sub.add_argument("--occupied", type=int, help="particle number (overrides filling)")
    sub.add_argument(
        "--emit-distribution", dest="emit_distribution", action="store_const", const=True,
        help="append the full number distribution",
    )
    common(sub)

    sub = subparsers.add_parser("sweep", help="width-ratio sweep of the statistics")
    sub.add_argument("--u-i", dest="U_i", type=float, help="initial strength")
    sub.add_argument("--u-f", dest="U_f", type=float, help="final strength")
    sub.add_argument(
        "--filling-factors", dest="filling_factors",
        help="comma-separated filling factors (default 0.2,0.5,0.9,1.0)",
    )
    sub.add_argument(
        "--ratio-grid", dest="ratio_grid",
        help="comma-separated width ratios (default: 50 uniform from critical to 1)",
    )
    sub.add_argument("--mode", choices=("weakening", "squeezing", "combined"),
                     help="sweep mode (default combined)")
    sub.add_argument("--r-window", dest="r_window", type=float,
                     help="observation-window margin in penetration lengths (default 20)")
    sub.add_argument(
        "--emit-distribution", dest="emit_distribution", action="store_const", const=True,
        help="append the full number distribution per row",
    )
    common(sub)

    sub = subparsers.add_parser("fidelity", help="level fidelity against initial trap size")
    sub.add_argument("--u-f", dest="U_f", type=float, help="final strength")
    sub.add_argument("--level", type=int, help="final level (1-based)")
    sub.add_argument("--family", choices=("weakening", "squeezing"),
                     help="which isospectral initial-trap family to grow")
    sub.add_argument("--capacities", help="comma-separated initial capacities C_i")
    sub.add_argument("--width", type=float, help="final trap width (default 1)")
    common(sub)

    sub = subparsers.add_parser("recipe", help="safety check of a preparation recipe")
    sub.add_argument("--u-i", dest="U_i", type=float, help="initial strength")
    sub.add_argument("--u-f", dest="U_f", type=float, help="final strength")
    sub.add_argument("--ratio", type=float, help="final/initial width ratio")
    sub.add_argument("--filling", type=float, help="filling factor in (0, 1]")
    sub.add_argument("--occupied", type=int, help="particle number (overrides filling)")
    common(sub)

    sub = subparsers.add_parser("lifetime", help="SI dwell time of the final trap")
    sub.add_argument("--u-f", dest="U_f", type=float, help="final strength")
    sub.add_argument("--width", type=float, help="final trap width, internal units (default 1)")
    sub.add_argument("--mass-kg", dest="mass_kg", type=float, help="particle mass in kg")
    sub.add_argument("--length-scale-m", dest="length_scale_m", type=float,
                     help="SI length of one internal length unit, in meters")
    common(sub)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config, _CONFIG_KEYS[args.command])
        text = _COMMANDS[args.command](args, config)
        _emit(text, args, config)
    except ConfigError as exc:
        print(f"fockprep: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"fockprep: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (SolverError, ArithmeticError) as exc:
        print(f"fockprep: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
