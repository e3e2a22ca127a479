"""Cross-trap overlaps, momentum amplitudes, and projector limit values."""

import math

import numpy as np
import pytest
from scipy import integrate

from fockprep import (
    BoundState,
    Trap,
    build_overlap_matrix,
    capacity,
    fidelity_momentum_limit,
    fidelity_position_limit,
    momentum_amplitude,
    overlap,
    solve_bound_states,
)

import oracles


def hand_built_state(q, width):
    """Bound state with interior wavenumber exactly q, plus its trap.

    Inverts the quantization condition: picks the depth that makes q an
    eigen-wavenumber of a trap of the given width.  Lets tests place two
    traps' states at exactly degenerate q.
    """
    kappa = -q / math.tan(q * width)
    assert kappa > 0.0, "chosen (q, width) must sit on a bound branch"
    trap = Trap(width=width, depth=q * q + kappa * kappa)
    theta = q * width
    norm = 1.0 / math.sqrt(
        width / 2.0 - math.sin(2.0 * theta) / (4.0 * q) + math.sin(theta) ** 2 / (2.0 * kappa)
    )
    state = BoundState(
        index=1,
        interior_wavenumber=q,
        decay_constant=kappa,
        energy=-kappa * kappa,
        normalization=norm,
        penetration_length=1.0 / kappa,
    )
    return state, trap


def test_identical_traps_give_identity_block():
    trap = Trap.from_dimensionless(100 * math.pi**2)
    matrix = build_overlap_matrix(trap, 10, trap)
    assert matrix.entries.shape == (10, 10)
    assert np.max(np.abs(matrix.entries - np.eye(10))) < 1e-10


def test_reference_pair_matches_quadrature():
    initial = Trap.from_dimensionless(400.0)
    final = Trap.from_dimensionless(100.0, width=0.7)
    states_i = solve_bound_states(initial)
    states_f = solve_bound_states(final)
    matrix = build_overlap_matrix(initial, len(states_i), final)
    for j, state_f in enumerate(states_f):
        for n, state_i in enumerate(states_i):
            closed = overlap(state_f, final, state_i, initial)
            assert closed == matrix.entries[j, n]
            direct = oracles.quad_overlap(state_f, final, state_i, initial)
            assert abs(closed - direct) < 1e-9


def test_random_pairs_match_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(60):
        initial = Trap.from_dimensionless(
            oracles.random_strength(rng, lo=2.0, hi=28.0), width=rng.uniform(0.7, 1.8)
        )
        final = Trap.from_dimensionless(
            oracles.random_strength(rng, lo=2.0, hi=28.0),
            width=initial.width * rng.uniform(0.35, 1.0),
        )
        states_i = solve_bound_states(initial)
        states_f = solve_bound_states(final)
        state_i = states_i[rng.integers(len(states_i))]
        state_f = states_f[rng.integers(len(states_f))]
        closed = overlap(state_f, final, state_i, initial)
        direct = oracles.quad_overlap(state_f, final, state_i, initial)
        assert abs(closed - direct) < 1e-9


def test_degenerate_wavenumbers_use_stable_branch():
    q = 4.0
    state_f, trap_f = hand_built_state(q, width=0.6)
    state_i, trap_i = hand_built_state(q, width=1.3)
    exact = overlap(state_f, trap_f, state_i, trap_i)
    direct = oracles.quad_overlap(state_f, trap_f, state_i, trap_i)
    assert abs(exact - direct) < 1e-9
    # nearby non-degenerate evaluation lands on the same value
    state_near, trap_near = hand_built_state(q + 1e-7, width=1.3)
    shifted = overlap(state_f, trap_f, state_near, trap_near)
    assert abs(exact - shifted) < 1e-5
    # just outside the series window the generic branch takes over
    state_off, trap_off = hand_built_state(q + 5e-6, width=1.3)
    generic = overlap(state_f, trap_f, state_off, trap_off)
    assert abs(generic - oracles.quad_overlap(state_f, trap_f, state_off, trap_off)) < 1e-9


def test_projection_compression_bounds():
    rng = np.random.default_rng(13)
    for _ in range(15):
        initial = Trap.from_dimensionless(
            oracles.random_strength(rng, lo=4.0, hi=40.0), width=1.0
        )
        final = Trap.from_dimensionless(
            oracles.random_strength(rng, lo=2.0, hi=30.0), width=rng.uniform(0.4, 1.0)
        )
        occupied = int(rng.integers(1, capacity(initial) + 1))
        matrix = build_overlap_matrix(initial, occupied, final)
        assert matrix.entries.shape == (capacity(final), occupied)
        singular = np.linalg.svd(matrix.entries, compute_uv=False)
        assert singular.max() <= 1.0 + 1e-8
        gram = matrix.entries @ matrix.entries.T
        eigen = np.linalg.eigvalsh((gram + gram.T) / 2.0)
        assert eigen.min() >= -1e-10
        assert eigen.max() <= 1.0 + 1e-8


def test_reference_reduction_mean_near_final_capacity():
    initial = Trap.from_dimensionless(1e4 * math.pi**2)
    final = Trap.from_dimensionless(1e2 * math.pi**2, width=0.5)
    matrix = build_overlap_matrix(initial, 100, final)
    assert float(np.sum(matrix.entries**2)) == pytest.approx(10.0, abs=0.05)


def test_reduction_orientation_and_occupation_enforced():
    wide = Trap.from_dimensionless(400.0, width=1.0)
    narrow = Trap.from_dimensionless(100.0, width=0.7)
    with pytest.raises(ValueError):
        build_overlap_matrix(narrow, 1, wide)
    with pytest.raises(ValueError):
        build_overlap_matrix(wide, 99, narrow)
    with pytest.raises(ValueError):
        build_overlap_matrix(wide, 0, narrow)


def test_momentum_amplitude_matches_quadrature_including_degenerate_point():
    trap = Trap.from_dimensionless(60.0, width=0.9)
    state = solve_bound_states(trap)[-1]
    q = state.interior_wavenumber
    upper = trap.width + 40.0 / state.decay_constant
    for k in (q, q + 1e-7, 0.3, 1.7 * q):
        direct, _ = integrate.quad(
            lambda x: math.sqrt(2.0 / math.pi)
            * math.sin(k * x)
            * oracles.wavefunction(state, trap, x),
            0.0,
            upper,
            points=[trap.width],
            epsabs=1e-11,
            epsrel=1e-11,
            limit=400,
        )
        assert abs(momentum_amplitude(state, trap, k) - direct) < 1e-8
    assert momentum_amplitude(state, trap, 0.0) == 0.0
    grid = np.linspace(0.0, 2.0 * q, 11)
    values = momentum_amplitude(state, trap, grid)
    assert values.shape == grid.shape
    with pytest.raises(ValueError):
        momentum_amplitude(state, trap, -0.5)


def test_momentum_amplitudes_are_complete():
    trap = Trap.from_dimensionless(25 * math.pi**2)
    states = solve_bound_states(trap)
    for state in (states[0], states[-1]):
        q = state.interior_wavenumber
        cutoff = q + 60.0 * state.decay_constant
        total, _ = integrate.quad(
            lambda k: momentum_amplitude(state, trap, k) ** 2,
            0.0,
            cutoff,
            points=[q],
            epsabs=1e-10,
            epsrel=1e-10,
            limit=400,
        )
        assert abs(total - 1.0) < 1e-6


def test_position_window_probability():
    trap = Trap.from_dimensionless(25 * math.pi**2)
    state = solve_bound_states(trap)[-1]
    assert fidelity_position_limit(state, trap, 0.0) == 0.0
    far = trap.width + 50.0 * state.penetration_length
    assert abs(fidelity_position_limit(state, trap, far) - 1.0) < 1e-8
    # window at the trap edge: pure interior piece of the norm
    q, norm = state.interior_wavenumber, state.normalization
    interior = norm**2 * (trap.width / 2.0 - math.sin(2.0 * q * trap.width) / (4.0 * q))
    at_edge = fidelity_position_limit(state, trap, trap.width)
    assert at_edge == pytest.approx(interior, rel=1e-12)
    assert at_edge == pytest.approx(0.8773657867990904, rel=1e-10)
    for window in (0.3, trap.width, trap.width + 0.7):
        direct, _ = integrate.quad(
            lambda x: oracles.wavefunction(state, trap, x) ** 2,
            0.0,
            window,
            points=[min(window, trap.width)],
            epsabs=1e-12,
            epsrel=1e-12,
        )
        assert abs(fidelity_position_limit(state, trap, window) - direct) < 1e-10
    # probability mass is nondecreasing in the window
    rng = np.random.default_rng(5)
    windows = np.sort(rng.uniform(0.0, 3.0, size=9))
    values = [fidelity_position_limit(state, trap, float(w)) for w in windows]
    assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        fidelity_position_limit(state, trap, -0.1)


def test_momentum_window_probability():
    trap = Trap.from_dimensionless(25 * math.pi**2)
    state = solve_bound_states(trap)[-1]
    tiny = fidelity_momentum_limit(state, trap, 1e-6)
    assert 0.0 <= tiny < 1e-10
    full = fidelity_momentum_limit(
        state, trap, state.interior_wavenumber + 80.0 * state.decay_constant
    )
    assert abs(full - 1.0) < 1e-6
    at_depth = fidelity_momentum_limit(state, trap, math.sqrt(trap.depth))
    assert at_depth == pytest.approx(0.9066683441058, rel=1e-8)
    with pytest.raises(ValueError):
        fidelity_momentum_limit(state, trap, 0.0)
