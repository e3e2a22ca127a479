"""Single-particle spectrum of a square trap closed by a hard wall.

The potential is +infinity for x <= 0, -V on 0 < x <= L and 0 for x > L.
Internal units set hbar = 2m = 1, so a trap is fixed by its width L and
depth V, or equivalently by the dimensionless strength U = V L**2
(equal to 2 m V L**2 / hbar**2 in SI units).  Bound states carry an
interior wavenumber q with energy E = q**2 - V < 0 and an exponential
tail of decay constant kappa = sqrt(V - q**2); the allowed q solve

    kappa = -q * cot(q L),        q L in ((j - 1/2) pi, j pi),

one root per branch j = 1 .. capacity.  A new branch opens each time
sqrt(U) crosses a half-odd-integer multiple of pi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "HBAR",
    "MarginalStateWarning",
    "SolverError",
    "Trap",
    "BoundState",
    "ScatteringState",
    "PhysicalUnits",
    "capacity",
    "solve_bound_states",
    "evaluate_bound_state",
    "scattering_state",
    "resonance_lifetime",
    "highest_occupied_level",
]

HBAR = 1.054571817e-34  # J s

# A state whose tail decays slower than exp(-1e-8 x/L) is treated as
# unbound: its penetration length exceeds 1e8 trap widths and it drops
# out of any finite observation window.
_KAPPA_L_MIN = 1e-8

# Margin keeping brackets strictly inside a branch; the relative part
# absorbs the representation error of j*pi for large j.
_BRACKET_PAD = 1e-12
_EPS = float(np.finfo(float).eps)


class SolverError(RuntimeError):
    """A bound-state root could not be isolated (solver misconfiguration)."""


class MarginalStateWarning(UserWarning):
    """The trap sits at, or within round-off of, a capacity threshold."""


@dataclass(frozen=True)
class Trap:
    """Hard-wall square trap of the given width and depth (internal units)."""

    width: float
    depth: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"trap width must be positive and finite, got {self.width}")
        if not (math.isfinite(self.depth) and self.depth > 0.0):
            raise ValueError(f"trap depth must be positive and finite, got {self.depth}")

    @property
    def dimensionless_strength(self) -> float:
        """U = V L**2, the only parameter the spectrum depends on up to scaling."""
        return self.depth * self.width**2

    @classmethod
    def from_dimensionless(cls, strength: float, width: float = 1.0) -> "Trap":
        """Build the trap of the given strength U at the given width."""
        return cls(width=width, depth=strength / width**2)


@dataclass(frozen=True)
class BoundState:
    """One bound level: sin(q x) inside, exponential tail outside.

    The wavefunction is

        phi(x) = N sin(q x)                          0 <= x < L,
        phi(x) = N sin(q L) exp(-kappa (x - L))      x >= L,

    with N chosen so the state has unit norm on the half line.
    """

    index: int
    interior_wavenumber: float
    decay_constant: float
    energy: float
    normalization: float
    penetration_length: float


@dataclass(frozen=True)
class ScatteringState:
    """Continuum state of energy k**2 entering and leaving the trap region."""

    wavenumber: float
    interior_wavenumber: float
    interior_amplitude: complex
    s_matrix: complex


@dataclass(frozen=True)
class PhysicalUnits:
    """Conversion between internal units (hbar = 2m = 1) and SI.

    ``length_scale`` is the SI length of one internal length unit.
    """

    particle_mass: float
    length_scale: float
    hbar: float = HBAR

    def __post_init__(self) -> None:
        for name in ("particle_mass", "length_scale", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value}")


def _theta_residual(theta: float, strength: float) -> float:
    """kappa L + theta cot(theta) as a function of theta = q L."""
    root = math.sqrt(strength)
    return math.sqrt((root - theta) * (root + theta)) + theta / math.tan(theta)


def _theta_residual_prime(theta: float, strength: float) -> float:
    cot = 1.0 / math.tan(theta)
    kappa_l = math.sqrt(strength - theta * theta)
    return -theta / kappa_l + cot - theta * (1.0 + cot * cot)


def _tail_residual(kappa_l: float, strength: float) -> float:
    """Same matching condition parameterized by kappa L (top branch).

    Near a capacity threshold the root in theta sits within round-off of
    sqrt(U), while in the decay constant it stays well conditioned (the
    derivative is 1 + O(kappa L)), so the truncated top branch is solved
    in this variable.
    """
    theta = math.sqrt(strength - kappa_l * kappa_l)
    return kappa_l + theta / math.tan(theta)


def _tail_residual_prime(kappa_l: float, strength: float) -> float:
    theta = math.sqrt(strength - kappa_l * kappa_l)
    cot = 1.0 / math.tan(theta)
    return 1.0 - kappa_l * cot / theta + kappa_l * (1.0 + cot * cot)


def capacity(trap: Trap) -> int:
    """Number of bound states the trap supports.

    Counts the half-odd-integer multiples of pi strictly below sqrt(U).
    A top state whose tail decay constant would fall below 1e-8 / L
    (marginally bound) is excluded and a ``MarginalStateWarning`` is
    issued; a strength exactly at a threshold gets the smaller count.
    """
    root = math.sqrt(trap.dimensionless_strength)
    shifted = root / math.pi + 0.5
    count = int(math.floor(shifted))
    if count <= 0:
        return 0
    if shifted == count:
        warnings.warn(
            f"trap strength U = {trap.dimensionless_strength:.15g} sits exactly at a "
            f"capacity threshold; the marginal state is excluded",
            MarginalStateWarning,
            stacklevel=2,
        )
        return count - 1
    if root < count * math.pi and _tail_residual(_KAPPA_L_MIN, trap.dimensionless_strength) >= 0.0:
        warnings.warn(
            f"top state of trap U = {trap.dimensionless_strength:.15g} is marginally "
            f"bound (kappa L < {_KAPPA_L_MIN:g}) and is excluded",
            MarginalStateWarning,
            stacklevel=2,
        )
        return count - 1
    return count


def _solve_branch(strength: float, branch: int) -> tuple[float, float]:
    """Return (theta, kappa L) for the root on the given branch."""
    root = math.sqrt(strength)
    lower = (branch - 0.5) * math.pi
    upper = branch * math.pi

    if upper <= root:
        # Interior branch: bracket theta between the branch ends.
        lo = lower + _BRACKET_PAD + 8.0 * _EPS * lower
        hi = upper - _BRACKET_PAD - 8.0 * _EPS * upper
        f_lo = _theta_residual(lo, strength)
        f_hi = _theta_residual(hi, strength)
        if not (f_lo > 0.0 > f_hi):
            raise SolverError(
                f"failed to bracket bound-state branch {branch} of U = {strength:.15g}: "
                f"residuals ({f_lo:.3g}, {f_hi:.3g})"
            )
        theta = brentq(_theta_residual, lo, hi, args=(strength,), xtol=1e-13, rtol=4.0 * _EPS)
        # One Newton polish step; brentq already sits at ~1e-13.
        f = _theta_residual(theta, strength)
        fp = _theta_residual_prime(theta, strength)
        if fp != 0.0:
            candidate = theta - f / fp
            if lo <= candidate <= hi and abs(_theta_residual(candidate, strength)) <= abs(f):
                theta = candidate
        kappa_l = math.sqrt((root - theta) * (root + theta))
        return theta, kappa_l

    # Truncated top branch (sqrt(U) < branch*pi): solve for the decay constant.
    limit = math.sqrt((root - lower) * (root + lower))
    hi = limit * (1.0 - 1e-12)
    f_lo = _tail_residual(_KAPPA_L_MIN, strength)
    f_hi = _tail_residual(hi, strength)
    if not (f_lo < 0.0 < f_hi):
        raise SolverError(
            f"failed to bracket top bound state of U = {strength:.15g}: "
            f"residuals ({f_lo:.3g}, {f_hi:.3g})"
        )
    kappa_l = brentq(_tail_residual, _KAPPA_L_MIN, hi, args=(strength,), xtol=1e-15, rtol=4.0 * _EPS)
    f = _tail_residual(kappa_l, strength)
    fp = _tail_residual_prime(kappa_l, strength)
    if fp != 0.0:
        candidate = kappa_l - f / fp
        if _KAPPA_L_MIN <= candidate <= hi and abs(_tail_residual(candidate, strength)) <= abs(f):
            kappa_l = candidate
    theta = math.sqrt((root - kappa_l) * (root + kappa_l))
    return theta, kappa_l


def solve_bound_states(trap: Trap) -> list[BoundState]:
    """All bound states of the trap, ordered by increasing energy.

    Each branch j carries exactly one root with q L in
    ((j - 1/2) pi, j pi); a bracketing failure raises ``SolverError``
    rather than silently dropping a state.
    """
    strength = trap.dimensionless_strength
    length = trap.width
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MarginalStateWarning)
        count = capacity(trap)

    states = []
    for branch in range(1, count + 1):
        theta, kappa_l = _solve_branch(strength, branch)
        q = theta / length
        kappa = kappa_l / length
        norm = 1.0 / math.sqrt(
            length / 2.0
            - math.sin(2.0 * theta) / (4.0 * q)
            + math.sin(theta) ** 2 / (2.0 * kappa)
        )
        states.append(
            BoundState(
                index=branch,
                interior_wavenumber=q,
                decay_constant=kappa,
                energy=-(kappa * kappa),
                normalization=norm,
                penetration_length=1.0 / kappa,
            )
        )
    return states


def evaluate_bound_state(state: BoundState, trap: Trap, x):
    """Wavefunction value(s) of a bound state at x >= 0.

    Accepts a scalar or array of positions; negative positions are
    rejected (the wall makes the wavefunction identically zero there,
    and asking for it is almost always a bug).
    """
    positions = np.asarray(x, dtype=float)
    if np.any(positions < 0.0):
        raise ValueError("positions must be >= 0 (hard wall at the origin)")
    q = state.interior_wavenumber
    inside = np.sin(q * positions)
    tail = math.sin(q * trap.width) * np.exp(
        -state.decay_constant * np.clip(positions - trap.width, 0.0, None)
    )
    values = state.normalization * np.where(positions < trap.width, inside, tail)
    if np.isscalar(x) or positions.ndim == 0:
        return float(values)
    return values


def scattering_state(trap: Trap, k: float) -> ScatteringState:
    """Continuum state at exterior wavenumber k > 0.

    Inside the trap the state is A sin(q x) with q = sqrt(k**2 + V); for
    x > L it is exp(-i k x) - S exp(i k x) (up to the 1/sqrt(2 pi)
    normalization), with a unimodular reflection amplitude S.
    """
    if not (math.isfinite(k) and k > 0.0):
        raise ValueError(f"exterior wavenumber must be positive and finite, got {k}")
    q = math.sqrt(k * k + trap.depth)
    length = trap.width
    ql = q * length
    denom = q * math.cos(ql) - 1j * k * math.sin(ql)
    amplitude = -2j * k * np.exp(-1j * k * length) / denom
    s_matrix = np.exp(-2j * k * length) * (q * math.cos(ql) + 1j * k * math.sin(ql)) / denom
    return ScatteringState(
        wavenumber=k,
        interior_wavenumber=q,
        interior_amplitude=complex(amplitude),
        s_matrix=complex(s_matrix),
    )


def resonance_lifetime(trap: Trap, units: PhysicalUnits) -> float:
    """Semiclassical dwell time (seconds) of the released trap content.

    A particle moving at the trap-depth speed sqrt(2 V / m) crosses the
    trap width in tau = L sqrt(m / (2 V)), the time scale on which the
    unbound part of the cloud leaves the trap region after the quench.
    """
    length_si = trap.width * units.length_scale
    depth_si = (
        trap.dimensionless_strength * units.hbar**2 / (2.0 * units.particle_mass * length_si**2)
    )
    return length_si * math.sqrt(units.particle_mass / (2.0 * depth_si))


def highest_occupied_level(trap: Trap, occupied: int) -> float:
    """Energy of the highest occupied level measured from the trap bottom.

    For `occupied` fermions filling the lowest levels this is
    q_occupied**2 = E + V, the Fermi energy above the bottom of the well.
    """
    states = solve_bound_states(trap)
    if not 1 <= occupied <= len(states):
        raise ValueError(
            f"occupied level count must be in [1, {len(states)}], got {occupied}"
        )
    return states[occupied - 1].interior_wavenumber ** 2
