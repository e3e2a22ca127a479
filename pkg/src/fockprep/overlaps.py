"""Closed-form overlaps between bound states of two trap configurations.

Both traps share the hard wall at the origin; the final trap must not be
wider than the initial one (the protocol only ever shrinks or weakens
the trap).  Every integral splits into three elementary pieces:
sin * sin on [0, L_f], exp * sin on [L_f, L_i] and exp * exp on
[L_i, infinity), so no quadrature is involved.  The same machinery
yields the amplitudes on half-line sine waves and the two limiting
fidelity integrals (a position window for a very dense spectrum at
fixed width, a momentum window for a very wide trap at fixed depth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .spectrum import BoundState, Trap, solve_bound_states

__all__ = [
    "OverlapMatrix",
    "overlap",
    "overlap_matrix_between",
    "build_overlap_matrix",
    "momentum_amplitude",
    "fidelity_position_limit",
    "fidelity_momentum_limit",
]

# Below this wavenumber difference (units of 1/length) the sin*sin
# antiderivative switches to its series form; sin(dq L)/(2 dq) would be
# 0/0 at exact degeneracy.
_DEGENERATE_DQ = 1e-6


@dataclass(frozen=True)
class OverlapMatrix:
    """Matrix of final-on-initial bound-state overlaps.

    ``entries[j, n]`` is the overlap of final state j+1 with initial
    state n+1; rows run over all final bound states, columns over the
    ``occupied_initial`` lowest initial ones.
    """

    entries: np.ndarray
    initial_trap: Trap
    final_trap: Trap
    occupied_initial: int


def _sin_sin_integral(q_a, q_b, length):
    """Integral of sin(q_a x) sin(q_b x) over [0, length], degeneracy safe."""
    q_a = np.asarray(q_a, dtype=float)
    q_b = np.asarray(q_b, dtype=float)
    diff = q_a - q_b
    total = q_a + q_b
    degenerate = np.abs(diff) * length < _DEGENERATE_DQ
    safe_diff = np.where(degenerate, 1.0, diff)
    direct = np.sin(diff * length) / (2.0 * safe_diff)
    series = 0.5 * length * (1.0 - (diff * length) ** 2 / 6.0)
    return np.where(degenerate, series, direct) - np.sin(total * length) / (2.0 * total)


def _exp_sin_integral(kappa, q, lower, upper):
    """Integral of exp(-kappa (x - lower)) sin(q x) over [lower, upper]."""
    span = upper - lower
    head = kappa * np.sin(q * lower) + q * np.cos(q * lower)
    tail = kappa * np.sin(q * upper) + q * np.cos(q * upper)
    return (head - np.exp(-kappa * span) * tail) / (kappa * kappa + q * q)


def overlap_matrix_between(final_states, final_trap, initial_states, initial_trap):
    """Overlap matrix between explicit state lists (rows final, columns initial)."""
    if final_trap.width > initial_trap.width:
        raise ValueError(
            f"final trap width {final_trap.width:.15g} exceeds initial width "
            f"{initial_trap.width:.15g}; the protocol only reduces the trap"
        )
    l_f = final_trap.width
    l_i = initial_trap.width
    span = l_i - l_f

    q_f = np.array([s.interior_wavenumber for s in final_states])[:, None]
    k_f = np.array([s.decay_constant for s in final_states])[:, None]
    n_f = np.array([s.normalization for s in final_states])[:, None]
    q_i = np.array([s.interior_wavenumber for s in initial_states])[None, :]
    k_i = np.array([s.decay_constant for s in initial_states])[None, :]
    n_i = np.array([s.normalization for s in initial_states])[None, :]

    well = _sin_sin_integral(q_f, q_i, l_f)
    shelf = _exp_sin_integral(k_f, q_i, l_f, l_i)
    tails = np.sin(q_i * l_i) * np.exp(-k_f * span) / (k_f + k_i)
    return n_f * n_i * (well + np.sin(q_f * l_f) * (shelf + tails))


def overlap(
    final_state: BoundState,
    final_trap: Trap,
    initial_state: BoundState,
    initial_trap: Trap,
) -> float:
    """Overlap of one final bound state with one initial bound state."""
    block = overlap_matrix_between([final_state], final_trap, [initial_state], initial_trap)
    return float(block[0, 0])


def build_overlap_matrix(initial: Trap, occupied_initial: int, final: Trap) -> OverlapMatrix:
    """Overlaps of every final bound state with the occupied initial ones.

    Parameters
    ----------
    initial : Trap
        Pre-quench trap, its lowest ``occupied_initial`` levels filled.
    occupied_initial : int
        Number of particles; must not exceed the initial capacity.
    final : Trap
        Post-quench trap; must not be wider than the initial one.
    """
    states_i = solve_bound_states(initial)
    if not 1 <= occupied_initial <= len(states_i):
        raise ValueError(
            f"occupied_initial must be in [1, {len(states_i)}], got {occupied_initial}"
        )
    states_f = solve_bound_states(final)
    entries = overlap_matrix_between(states_f, final, states_i[:occupied_initial], initial)
    return OverlapMatrix(
        entries=entries,
        initial_trap=initial,
        final_trap=final,
        occupied_initial=occupied_initial,
    )


def momentum_amplitude(state: BoundState, trap: Trap, k) -> float | np.ndarray:
    """Amplitude of a bound state on the half-line sine wave of wavenumber k.

    The sine waves sqrt(2/pi) sin(k x) are the scattering basis of the
    bare wall; the squared amplitudes integrate to one over k >= 0.
    """
    wavenumbers = np.asarray(k, dtype=float)
    if np.any(wavenumbers < 0.0):
        raise ValueError("wavenumbers must be >= 0")
    q = state.interior_wavenumber
    kappa = state.decay_constant
    length = trap.width
    well = _sin_sin_integral(wavenumbers, q, length)
    tail = (
        math.sin(q * length)
        * (kappa * np.sin(wavenumbers * length) + wavenumbers * np.cos(wavenumbers * length))
        / (kappa * kappa + wavenumbers * wavenumbers)
    )
    values = state.normalization * math.sqrt(2.0 / math.pi) * (well + tail)
    if np.isscalar(k) or wavenumbers.ndim == 0:
        return float(values)
    return values


def fidelity_position_limit(state: BoundState, trap: Trap, window: float) -> float:
    """Probability of finding the bound state inside [0, window].

    This is the limiting capture fidelity when the initial spectrum
    becomes dense at fixed width (deep-trap limit): the occupied
    subspace projector turns into the position-window projector.
    """
    if window < 0.0:
        raise ValueError(f"window must be >= 0, got {window}")
    q = state.interior_wavenumber
    norm = state.normalization
    length = trap.width
    if window <= length:
        return norm**2 * (window / 2.0 - math.sin(2.0 * q * window) / (4.0 * q))
    kappa = state.decay_constant
    inside = length / 2.0 - math.sin(2.0 * q * length) / (4.0 * q)
    outside = math.sin(q * length) ** 2 * (1.0 - math.exp(-2.0 * kappa * (window - length))) / (
        2.0 * kappa
    )
    return norm**2 * (inside + outside)


def fidelity_momentum_limit(state: BoundState, trap: Trap, cutoff: float) -> float:
    """Squared amplitude of the bound state below a momentum cutoff.

    Limiting capture fidelity when the initial trap becomes wide at
    fixed depth: the occupied subspace projector turns into the
    projector on sine waves with k below sqrt(V_i).
    """
    if cutoff <= 0.0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")

    def integrand(k: float) -> float:
        return momentum_amplitude(state, trap, k) ** 2

    interior = [state.interior_wavenumber] if state.interior_wavenumber < cutoff else None
    value, _ = quad(
        integrand, 0.0, cutoff, points=interior, limit=200, epsabs=1e-8, epsrel=1e-8
    )
    return value
