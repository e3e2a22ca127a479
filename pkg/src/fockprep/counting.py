"""Determinantal counting statistics of spinless fermions.

For free (or hard-core-mapped) fermions filling orthonormal orbitals,
the number of particles found in a subspace or spatial window is a sum
of independent Bernoulli trials whose success probabilities are the
eigenvalues of the projected one-body overlap kernel.  Two routes are
provided: the asymptotic route through a bound-state overlap matrix
(subspace projector), and a real-space grid route through the one-body
density kernel (window projector), which serves as an independent
cross-check of the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .overlaps import OverlapMatrix, overlap_matrix_between
from .spectrum import Trap, capacity, solve_bound_states

__all__ = [
    "CountingStatistics",
    "DensityKernel",
    "asymptotic_statistics",
    "number_distribution",
    "fidelity_measure",
    "build_density_kernel",
    "window_statistics",
    "minimum_initial_particles",
]

# Eigenvalues are occupation probabilities; excursions beyond [0, 1]
# larger than this indicate a corrupted overlap matrix.
_PROBABILITY_SLACK = 1e-8
# Singular values of the overlap matrix may not exceed 1 by more than
# this before the input is rejected outright.
_SINGULAR_SLACK = 1e-6


@dataclass(frozen=True)
class CountingStatistics:
    """Mean, variance and level statistics of the trapped-atom number.

    ``fano`` is None when the mean vanishes (the ratio is undefined);
    ``distribution`` is filled only when a full distribution was
    requested.
    """

    mean: float
    variance: float
    fano: float | None
    level_probabilities: np.ndarray
    distribution: np.ndarray | None = None


@dataclass(frozen=True)
class DensityKernel:
    """One-body density kernel of a set of orbitals sampled on a grid.

    The kernel Delta(x, x') = sum_n phi_n(x)* phi_n(x') is kept in
    factored form through the orbital samples; ``delta`` materializes
    the full matrix and is meant for diagnostics on modest grids.
    """

    grid: np.ndarray
    orbitals: np.ndarray
    rho: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        total = np.zeros((self.grid.size, self.grid.size), dtype=self.orbitals.dtype)
        for row in self.orbitals:
            total += np.outer(np.conj(row), row)
        return total


def _entries(matrix) -> np.ndarray:
    if isinstance(matrix, OverlapMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def _level_probabilities(entries: np.ndarray) -> np.ndarray:
    gram = entries @ entries.T
    if gram.size:
        gram = 0.5 * (gram + gram.T)
    eigenvalues = np.linalg.eigvalsh(gram) if gram.size else np.zeros(0)
    top = math.sqrt(max(float(eigenvalues[-1]), 0.0)) if eigenvalues.size else 0.0
    if top > 1.0 + _SINGULAR_SLACK:
        raise ValueError(
            f"overlap matrix has singular value {top:.15g} > 1 + {_SINGULAR_SLACK:g}; "
            f"the overlaps are corrupted"
        )
    return eigenvalues


def asymptotic_statistics(overlap_matrix) -> CountingStatistics:
    """Long-time statistics of the number of atoms left in the final trap.

    Accepts an ``OverlapMatrix`` (or bare matrix of overlaps, rows over
    final bound states, columns over occupied initial orbitals).  The
    mean is the squared Frobenius norm; the variance subtracts the
    squared Frobenius norm of the projected Gram matrix.
    """
    entries = _entries(overlap_matrix)
    eigenvalues = _level_probabilities(entries)
    mean = float(np.sum(entries * entries))
    gram = entries.T @ entries
    variance = max(mean - float(np.sum(gram * gram)), 0.0)
    fano = variance / mean if mean > 0.0 else None
    return CountingStatistics(
        mean=mean,
        variance=variance,
        fano=fano,
        level_probabilities=np.clip(eigenvalues, 0.0, 1.0),
    )


def number_distribution(overlap_matrix) -> np.ndarray:
    """Full distribution P(N) of the trapped-atom number.

    The count is a sum of independent Bernoulli variables with the
    eigenvalues of W W^T as success probabilities; the distribution is
    their convolution.  Eigenvalues outside [-1e-8, 1 + 1e-8] raise,
    smaller excursions are clipped back to [0, 1].
    """
    entries = _entries(overlap_matrix)
    eigenvalues = _level_probabilities(entries)
    if eigenvalues.size and (
        eigenvalues[0] < -_PROBABILITY_SLACK or eigenvalues[-1] > 1.0 + _PROBABILITY_SLACK
    ):
        raise ValueError(
            f"level probabilities outside [0, 1] beyond tolerance: "
            f"range [{eigenvalues[0]:.15g}, {eigenvalues[-1]:.15g}]"
        )
    probabilities = np.clip(eigenvalues, 0.0, 1.0)
    distribution = np.zeros(probabilities.size + 1)
    distribution[0] = 1.0
    for p in probabilities:
        shifted = np.empty_like(distribution)
        shifted[0] = 0.0
        shifted[1:] = distribution[:-1]
        distribution = distribution * (1.0 - p) + shifted * p
    return distribution


def fidelity_measure(final: Trap, level: int, initial: Trap, occupied_initial: int) -> float:
    """Probability that final level ``level`` ends up occupied.

    Sums the squared overlaps of the chosen final bound state with the
    ``occupied_initial`` lowest initial states; reaches 1 exactly when
    the final state lies inside the occupied initial subspace.
    """
    states_f = solve_bound_states(final)
    if not 1 <= level <= len(states_f):
        raise ValueError(f"final level must be in [1, {len(states_f)}], got {level}")
    states_i = solve_bound_states(initial)
    if not 1 <= occupied_initial <= len(states_i):
        raise ValueError(
            f"occupied_initial must be in [1, {len(states_i)}], got {occupied_initial}"
        )
    row = overlap_matrix_between(
        [states_f[level - 1]], final, states_i[:occupied_initial], initial
    )
    return float(np.sum(row * row))


def build_density_kernel(orbitals, grid) -> DensityKernel:
    """Density kernel of orbitals sampled on a common uniform grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two points")
    steps = np.diff(grid)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12 * abs(steps[0])):
        raise ValueError("grid must be uniformly spaced")
    samples = np.asarray(orbitals)
    if samples.ndim == 1:
        samples = samples[None, :]
    if samples.ndim != 2 or samples.shape[1] != grid.size:
        raise ValueError(
            f"orbitals of shape {samples.shape} do not match grid of {grid.size} points"
        )
    rho = np.sum(np.abs(samples) ** 2, axis=0)
    return DensityKernel(grid=grid, orbitals=samples, rho=rho)


def window_statistics(kernel: DensityKernel, window: float) -> CountingStatistics:
    """Counting statistics of the number of particles inside [0, window].

    Mean and variance are trapezoid integrals of the density and of the
    squared kernel over the window; the kernel integral is evaluated in
    factored (Gram) form, which reproduces the full two-dimensional
    product-trapezoid sum exactly.  The window edge snaps to the nearest
    grid point.
    """
    grid = kernel.grid
    step = grid[1] - grid[0]
    if not grid[0] - 0.5 * step <= window <= grid[-1] + 0.5 * step:
        raise ValueError(
            f"window end {window:.15g} lies outside the sampled grid "
            f"[{grid[0]:.15g}, {grid[-1]:.15g}]"
        )
    edge = int(round((window - grid[0]) / step))
    if edge < 1:
        return CountingStatistics(
            mean=0.0, variance=0.0, fano=None, level_probabilities=np.zeros(0)
        )
    weights = np.full(edge + 1, step)
    weights[0] = weights[-1] = 0.5 * step
    block = kernel.orbitals[:, : edge + 1]
    gram = (block * weights) @ np.conj(block.T)
    gram = 0.5 * (gram + np.conj(gram.T))
    mean = float(np.trapezoid(kernel.rho[: edge + 1], dx=step))
    variance = max(mean - float(np.sum(np.abs(gram) ** 2)), 0.0)
    eigenvalues = np.linalg.eigvalsh(gram)
    fano = variance / mean if mean > 0.0 else None
    return CountingStatistics(
        mean=mean,
        variance=variance,
        fano=fano,
        level_probabilities=np.clip(eigenvalues, 0.0, 1.0),
    )


def minimum_initial_particles(final: Trap, initial_width: float) -> int:
    """Smallest particle number able to fill the final trap completely.

    Phase-space estimate: the occupied initial band must span the final
    one, which requires at least capacity * L_i / L_f particles.
    """
    if initial_width < final.width:
        raise ValueError(
            f"initial width {initial_width:.15g} is below the final width "
            f"{final.width:.15g}"
        )
    return math.ceil(capacity(final) * initial_width / final.width - 1e-9)
