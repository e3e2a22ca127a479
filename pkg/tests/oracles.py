"""Shared first-principles cross-checks for the test suite.

Everything here recomputes quantities from their definitions (piecewise
wavefunctions, adaptive quadrature, Sturm node counting, brute-force
enumeration, literal double-trapezoid sums) so the closed forms in the
package are tested against independently coded routes rather than
against themselves.
"""

import itertools
import math

import numpy as np
from scipy import integrate

from fockprep import evaluate_bound_state


def wavefunction(state, trap, x):
    """phi(x) from the defining piecewise form, scalar arithmetic only."""
    q = state.interior_wavenumber
    if x < trap.width:
        return state.normalization * math.sin(q * x)
    return (
        state.normalization
        * math.sin(q * trap.width)
        * math.exp(-state.decay_constant * (x - trap.width))
    )


def quad_norm(state, trap, r=20.0):
    """Norm integral by adaptive quadrature over [0, L + r xi]."""
    upper = trap.width + r * state.penetration_length
    value, _ = integrate.quad(
        lambda x: wavefunction(state, trap, x) ** 2,
        0.0,
        upper,
        points=[trap.width],
        epsabs=1e-12,
        epsrel=1e-12,
        limit=300,
    )
    return value


def quad_overlap(state_a, trap_a, state_b, trap_b):
    """<phi_a|phi_b> by adaptive quadrature on the half line.

    The product decays like exp(-(kappa_a + kappa_b) x) past the wider
    edge, so truncating 32 joint decay lengths out keeps the tail below
    1e-13 of the integrand scale.
    """
    rate = state_a.decay_constant + state_b.decay_constant
    upper = max(trap_a.width, trap_b.width) + 32.0 / rate
    kinks = sorted({trap_a.width, trap_b.width})
    value, _ = integrate.quad(
        lambda x: wavefunction(state_a, trap_a, x) * wavefunction(state_b, trap_b, x),
        0.0,
        upper,
        points=kinks,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=400,
    )
    return value


def sturm_bound_count(trap, kappa_l=1e-6):
    """Number of bound levels below energy -(kappa_l / L)**2 by node counting.

    Sturm oscillation: the count of eigenvalues below E equals the count
    of nodes on (0, inf) of the solution with psi(0) = 0 at energy E.
    For the square trap that solution is sin(q0 x) inside and a
    decaying/growing exponential pair outside, so the nodes come out in
    closed form: floor(q0 L / pi) interior ones, plus one beyond the
    edge when the boundary value and the growing-mode coefficient have
    opposite signs.
    """
    kappa0 = kappa_l / trap.width
    q0_squared = trap.depth - kappa0 * kappa0
    if q0_squared <= 0.0:
        return 0
    q0 = math.sqrt(q0_squared)
    interior = int(math.floor(q0 * trap.width / math.pi))
    value = math.sin(q0 * trap.width)
    slope = q0 * math.cos(q0 * trap.width)
    growing = value + slope / kappa0
    return interior + (1 if value * growing < 0.0 else 0)


def random_strength(rng, lo=1.7, hi=60.0, margin=0.05):
    """Draw sqrt(U) uniformly in [lo, hi], away from branch edges.

    Keeping sqrt(U) at least `margin` from every multiple of pi/2 avoids
    capacity thresholds (odd multiples) and floor ambiguities in the
    node-count oracle (even multiples), and bounds the top state's
    kappa L away from zero.
    """
    half_pi = 0.5 * math.pi
    while True:
        root = rng.uniform(lo, hi)
        offset = root / half_pi
        if abs(offset - round(offset)) * half_pi > margin:
            return root * root


def enumerate_distribution(level_probabilities):
    """Occupation-number distribution by summing over all level subsets."""
    lams = np.asarray(level_probabilities, dtype=float)
    probabilities = np.zeros(lams.size + 1)
    for bits in itertools.product((0, 1), repeat=lams.size):
        weight = 1.0
        for lam, bit in zip(lams, bits):
            weight *= lam if bit else 1.0 - lam
        probabilities[sum(bits)] += weight
    return probabilities


def projected_block(entries, final_states, final_trap, grid):
    """Initial orbitals projected on the final bound subspace, on a grid.

    Row n holds sum_j W[j][n] phi_j^f(grid); these are the long-time
    bound-space remnants whose kernel feeds the grid-based statistics.
    """
    basis = np.array(
        [evaluate_bound_state(state, final_trap, grid) for state in final_states]
    )
    return np.asarray(entries).T @ basis


def literal_window_statistics(block, grid, window):
    """Mean and variance of the window count by the literal double sum.

    Trapezoid weights applied explicitly to rho and to |Delta(x, x')|**2
    with Delta built as an actual matrix, no factoring tricks.
    """
    block = np.asarray(block)
    step = grid[1] - grid[0]
    last = int(round((window - grid[0]) / step))
    sub = block[:, : last + 1]
    weights = np.full(last + 1, step)
    weights[0] = weights[-1] = 0.5 * step
    delta = sub.conj().T @ sub
    rho = np.real(np.diag(delta))
    mean = float(weights @ rho)
    double = float(weights @ (np.abs(delta) ** 2) @ weights)
    return mean, mean - double
