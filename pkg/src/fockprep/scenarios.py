"""Quench scenarios, parameter sweeps and CSV emission.

A scenario is a pair of traps sharing the hard wall: an initial trap of
unit width holding the lowest ``occupied_initial`` levels, and a final
trap obtained by reducing the width (squeezing), the depth (weakening)
or both.  For a fixed final strength U_f the family of final traps is
parameterized by the width ratio L_f / L_i in [sqrt(U_f / U_i), 1]:
below the critical ratio the final trap would be deeper than the
initial one, which the reduction protocol forbids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import (
    asymptotic_statistics,
    fidelity_measure,
    number_distribution,
)
from .overlaps import (
    fidelity_momentum_limit,
    fidelity_position_limit,
    overlap_matrix_between,
)
from .spectrum import (
    PhysicalUnits,
    Trap,
    capacity,
    highest_occupied_level,
    resonance_lifetime,
    solve_bound_states,
)

__all__ = [
    "CSV_VERSION_LINE",
    "ConfigError",
    "CriticalWidthError",
    "Scenario",
    "SweepConfig",
    "RecipeReport",
    "build_combined_scenario",
    "run_sweep",
    "run_fidelity_sweep",
    "check_recipe",
    "lifetime_report",
]

CSV_VERSION_LINE = "# fockprep-csv v1"

_MODES = ("weakening", "squeezing", "combined", "fidelity_vs_Ci")
_FAMILIES = ("weakening", "squeezing")
_RATIO_SNAP = 1e-12


class ConfigError(ValueError):
    """A scenario or sweep configuration is invalid."""


class CriticalWidthError(ConfigError):
    """Requested width ratio falls below the critical ratio sqrt(U_f / U_i)."""

    def __init__(self, requested: float, critical: float):
        self.requested = requested
        self.critical = critical
        super().__init__(
            f"width ratio {requested:.15g} is below the critical ratio "
            f"{critical:.15g}; the final trap would be deeper than the initial one"
        )


@dataclass(frozen=True)
class Scenario:
    """Initial trap with its filled levels, and the reduced final trap."""

    initial: Trap
    occupied_initial: int
    final: Trap
    label: str


@dataclass(frozen=True)
class RecipeReport:
    """Energy- and width-margin check of a Fock-state preparation recipe.

    ``spans`` records whether the occupied initial band reaches above the
    final trap depth; ``width_margin`` counts how many tail penetration
    lengths of the top final state fit between the two trap edges.
    """

    epsilon_initial: float
    epsilon_final: float
    spans: bool
    width_margin: float
    verdict: str


@dataclass(frozen=True)
class SweepConfig:
    """Configuration of a width-ratio sweep at fixed trap strengths."""

    U_i: float
    U_f: float
    filling_factors: tuple[float, ...] = (0.2, 0.5, 0.9, 1.0)
    ratio_grid: tuple[float, ...] | None = None
    mode: str = "combined"
    output_path: str | None = None
    r_window: float = 20.0
    emit_distribution: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "filling_factors", tuple(float(f) for f in self.filling_factors))
        if self.ratio_grid is not None:
            object.__setattr__(self, "ratio_grid", tuple(float(r) for r in self.ratio_grid))
        for name in ("U_i", "U_f"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if self.U_f > self.U_i:
            raise ConfigError(
                f"U_f = {self.U_f:.15g} exceeds U_i = {self.U_i:.15g}; "
                f"no width ratio <= 1 can realize a pure reduction"
            )
        if not self.filling_factors:
            raise ConfigError("filling_factors must be non-empty")
        for f in self.filling_factors:
            if not 0.0 < f <= 1.0:
                raise ConfigError(f"filling factors must lie in (0, 1], got {f}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.ratio_grid is not None and self.mode in ("weakening", "squeezing"):
            raise ConfigError(f"ratio_grid is fixed by mode {self.mode!r}; drop it")
        critical = math.sqrt(self.U_f / self.U_i)
        if self.ratio_grid is not None:
            for r in self.ratio_grid:
                if not 0.0 < r <= 1.0:
                    raise ConfigError(f"width ratios must lie in (0, 1], got {r}")
                if r < critical * (1.0 - _RATIO_SNAP):
                    raise CriticalWidthError(r, critical)
        if not (math.isfinite(self.r_window) and self.r_window > 0):
            raise ConfigError(f"r_window must be positive, got {self.r_window}")

    @property
    def critical_ratio(self) -> float:
        return math.sqrt(self.U_f / self.U_i)


def _occupation(filling: float, levels: int) -> int:
    return max(1, int(math.floor(filling * levels + 0.5)))


def build_combined_scenario(U_i: float, U_f: float, ratio: float, filling: float) -> Scenario:
    """Scenario with initial strength U_i (unit width), final strength U_f
    at width ratio ``ratio``, and the lowest round(filling * C_i) levels
    filled (at least one).

    Raises ``CriticalWidthError`` when the ratio falls below
    sqrt(U_f / U_i), where the final trap would be deeper than the
    initial one.
    """
    if not 0.0 < ratio <= 1.0:
        raise ConfigError(f"width ratio must lie in (0, 1], got {ratio}")
    if not 0.0 < filling <= 1.0:
        raise ConfigError(f"filling must lie in (0, 1], got {filling}")
    critical = math.sqrt(U_f / U_i)
    if ratio < critical * (1.0 - _RATIO_SNAP):
        raise CriticalWidthError(ratio, critical)
    initial = Trap.from_dimensionless(U_i)
    occupied = _occupation(filling, capacity(initial))
    final = Trap.from_dimensionless(U_f, width=ratio * initial.width)
    label = (
        f"U_i={U_i:.15g} U_f={U_f:.15g} ratio={ratio:.15g} filling={filling:.15g}"
    )
    return Scenario(initial=initial, occupied_initial=occupied, final=final, label=label)


def _format_value(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".15g")
    return str(value)


def _format_csv(header, rows) -> str:
    lines = [CSV_VERSION_LINE, ",".join(header)]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def run_sweep(config: SweepConfig) -> str:
    """Width-ratio sweep of the trapped-number statistics, as CSV text.

    One row per (filling factor, width ratio), filling-major.  The
    default combined grid is 50 uniform ratios from the critical value
    to 1; mode "weakening" pins the ratio to 1 and mode "squeezing" to
    the critical value.  Identical configs produce byte-identical
    output.
    """
    if config.mode == "fidelity_vs_Ci":
        raise ConfigError(
            "mode 'fidelity_vs_Ci' is served by run_fidelity_sweep (CLI: fidelity)"
        )
    critical = config.critical_ratio
    if config.mode == "weakening":
        ratios: tuple[float, ...] = (1.0,)
    elif config.mode == "squeezing":
        ratios = (critical,)
    else:
        ratios = config.ratio_grid or tuple(np.linspace(critical, 1.0, 50))

    initial = Trap.from_dimensionless(config.U_i)
    states_i = solve_bound_states(initial)
    levels = len(states_i)
    if levels == 0:
        raise ConfigError(f"initial trap U_i = {config.U_i:.15g} holds no bound states")

    final_levels = capacity(Trap.from_dimensionless(config.U_f))
    header = [
        "U_i", "U_f", "filling", "N_i", "ratio", "L_f", "V_f", "C_f",
        "mean", "variance", "fano",
    ]
    if config.emit_distribution:
        header += [f"P_{n}" for n in range(final_levels + 1)]

    per_ratio = []
    for ratio in ratios:
        final = Trap.from_dimensionless(config.U_f, width=ratio * initial.width)
        states_f = solve_bound_states(final)
        entries = overlap_matrix_between(states_f, final, states_i, initial)
        per_ratio.append((ratio, final, entries))

    rows = []
    for filling in config.filling_factors:
        occupied = _occupation(filling, levels)
        for ratio, final, entries in per_ratio:
            block = entries[:, :occupied]
            stats = asymptotic_statistics(block)
            row = [
                config.U_i, config.U_f, filling, occupied, ratio,
                final.width, final.depth, len(block),
                stats.mean, stats.variance, stats.fano,
            ]
            if config.emit_distribution:
                row += list(number_distribution(block))
            rows.append(row)
    return _format_csv(header, rows)


def run_fidelity_sweep(
    U_f: float,
    level: int,
    family: str,
    capacities,
    width: float = 1.0,
) -> str:
    """Occupation fidelity of one final level against initial trap size.

    Two isospectral families of completely loaded initial traps (both
    have U_i = C_i**2 pi**2): "weakening" deepens the trap at the final
    width, "squeezing" widens it at the final depth.  Reference columns
    carry the two infinite-size limits: the position-window probability
    and the momentum-window probability of the target state.
    """
    if family not in _FAMILIES:
        raise ConfigError(f"family must be one of {_FAMILIES}, got {family!r}")
    capacities = [int(c) for c in capacities]
    if not capacities or any(c < 1 for c in capacities):
        raise ConfigError(f"capacities must be positive integers, got {capacities}")
    final = Trap.from_dimensionless(U_f, width=width)
    states_f = solve_bound_states(final)
    if not 1 <= level <= len(states_f):
        raise ConfigError(f"level must be in [1, {len(states_f)}], got {level}")
    target = states_f[level - 1]
    position_limit = fidelity_position_limit(target, final, window=width)
    momentum_limit = fidelity_momentum_limit(target, final, cutoff=math.sqrt(final.depth))

    header = [
        "family", "U_f", "level", "C_i", "U_i", "L_i", "N_i",
        "fidelity", "position_limit", "momentum_limit",
    ]
    rows = []
    for c_i in capacities:
        strength = (c_i * math.pi) ** 2
        if family == "weakening":
            initial = Trap.from_dimensionless(strength, width=width)
        else:
            initial_width = c_i * math.pi / math.sqrt(final.depth)
            initial = Trap(width=initial_width, depth=final.depth)
        fidelity = fidelity_measure(final, level, initial, c_i)
        rows.append([
            family, U_f, level, c_i, strength, initial.width, c_i,
            fidelity, position_limit, momentum_limit,
        ])
    return _format_csv(header, rows)


def check_recipe(final: Trap, initial: Trap, occupied_initial: int) -> RecipeReport:
    """Check whether a filled initial trap can Fock-fill the final trap.

    The recipe is safe when the occupied initial band spans the full
    final band (Fermi level above the final depth) and the initial trap
    is wider than the final one by at least one tail penetration length
    of the top final state.  Sitting on the energy boundary, or spanning
    it without the width margin, is marginal.
    """
    states_f = solve_bound_states(final)
    if not states_f:
        raise ConfigError(
            f"final trap U = {final.dimensionless_strength:.15g} holds no bound states"
        )
    if initial.width < final.width:
        raise ConfigError(
            f"initial width {initial.width:.15g} is below the final width "
            f"{final.width:.15g}"
        )
    top = states_f[-1]
    epsilon_initial = highest_occupied_level(initial, occupied_initial)
    epsilon_final = final.depth
    spans = epsilon_initial > epsilon_final
    width_margin = (initial.width - final.width) / top.penetration_length
    # The depth is only a boundary up to the binding energy of the top
    # final state (that state sits at V - kappa**2, not at V).
    boundary_band = -top.energy * (1.0 + 1e-9) + 1e-12
    if spans and width_margin >= 1.0:
        verdict = "safe"
    elif spans or abs(epsilon_initial - epsilon_final) <= boundary_band:
        verdict = "marginal"
    else:
        verdict = "unsafe"
    return RecipeReport(
        epsilon_initial=epsilon_initial,
        epsilon_final=epsilon_final,
        spans=spans,
        width_margin=width_margin,
        verdict=verdict,
    )


def lifetime_report(final: Trap, units: PhysicalUnits) -> str:
    """One-row CSV with the SI dwell time of the final trap."""
    tau = resonance_lifetime(final, units)
    header = ["L_f_m", "U_f", "C_f", "mass_kg", "tau_s", "tau_ms"]
    row = [
        final.width * units.length_scale,
        final.dimensionless_strength,
        capacity(final),
        units.particle_mass,
        tau,
        tau * 1e3,
    ]
    return _format_csv(header, [row])
