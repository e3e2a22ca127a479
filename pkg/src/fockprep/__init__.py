"""Fock-state preparation of trapped hard-core atoms by sudden trap reduction.

Exact single-particle machinery for a hard-wall square trap: bound and
scattering spectra, closed-form overlaps between two trap
configurations, and the determinantal counting statistics of the atom
number left behind after the trap is suddenly squeezed and/or weakened.
"""

from .counting import (
    CountingStatistics,
    DensityKernel,
    asymptotic_statistics,
    build_density_kernel,
    fidelity_measure,
    minimum_initial_particles,
    number_distribution,
    window_statistics,
)
from .overlaps import (
    OverlapMatrix,
    build_overlap_matrix,
    fidelity_momentum_limit,
    fidelity_position_limit,
    momentum_amplitude,
    overlap,
    overlap_matrix_between,
)
from .scenarios import (
    CSV_VERSION_LINE,
    ConfigError,
    CriticalWidthError,
    RecipeReport,
    Scenario,
    SweepConfig,
    build_combined_scenario,
    check_recipe,
    lifetime_report,
    run_fidelity_sweep,
    run_sweep,
)
from .spectrum import (
    HBAR,
    BoundState,
    MarginalStateWarning,
    PhysicalUnits,
    ScatteringState,
    SolverError,
    Trap,
    capacity,
    evaluate_bound_state,
    highest_occupied_level,
    resonance_lifetime,
    scattering_state,
    solve_bound_states,
)

__version__ = "0.1.0"

__all__ = [
    "HBAR",
    "CSV_VERSION_LINE",
    "__version__",
    "Trap",
    "BoundState",
    "ScatteringState",
    "PhysicalUnits",
    "MarginalStateWarning",
    "SolverError",
    "capacity",
    "solve_bound_states",
    "evaluate_bound_state",
    "scattering_state",
    "resonance_lifetime",
    "highest_occupied_level",
    "OverlapMatrix",
    "overlap",
    "overlap_matrix_between",
    "build_overlap_matrix",
    "momentum_amplitude",
    "fidelity_position_limit",
    "fidelity_momentum_limit",
    "CountingStatistics",
    "DensityKernel",
    "asymptotic_statistics",
    "number_distribution",
    "fidelity_measure",
    "build_density_kernel",
    "window_statistics",
    "minimum_initial_particles",
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
