import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from algnls.evolution import (
    PERTURBATION_MODES,
    BlowUpError,
    EvolutionState,
    default_grid,
    discrete_energy,
    discrete_mass,
    fourier_shift,
    h1_norm,
    make_state,
    orbit_distance,
    orbit_fit,
    perturbation,
    stability_experiment,
    state_from_profile,
    step,
)
from algnls.profile import sample_profile

from conftest import DEGENERATE, MONOTONE, WINDOW


@pytest.fixture(scope="module")
def ground():
    n, L = default_grid(1.0)
    return sample_profile(MONOTONE, 1.0, n, L)


def free_gaussian(x, t, s=1.0):
    # exact solution of i u_t + u_xx = 0 from exp(-x^2 / (2 s^2))
    z = s * s + 2j * t
    return np.sqrt(s * s / z) * np.exp(-x * x / (2.0 * z))


# --- integrator -----------------------------------------------------------------

def test_zero_stays_zero():
    st0 = make_state(MONOTONE, 20.0, np.zeros(256))
    assert np.all(step(st0, 50).field == 0)


def test_free_gaussian_matches_exact_solution():
    L, N = 40.0, 1024
    x = -L + 2 * L / N * np.arange(N)
    st0 = make_state(None, L, free_gaussian(x, 0.0), dt=1e-3)
    st1 = step(st0, 1000)
    assert np.max(np.abs(st1.field - free_gaussian(x, st1.t))) <= 1e-8
    assert discrete_mass(st1) == pytest.approx(st0.mass0, rel=1e-14)


def test_standing_wave_modulus(ground):
    st0 = state_from_profile(ground, dt=1e-3, phase=0.4)
    st1 = step(st0, 5000)
    r = np.asarray(ground.rs[:-1])
    assert np.max(np.abs(np.abs(st1.field) - r)) <= 1e-6
    # phase advances as e^{+i omega t}
    c = st1.field[ground.n]
    assert np.angle(c * np.exp(-1j * (0.4 + st1.t))) == pytest.approx(0.0, abs=1e-5)


def test_conservation(ground):
    st0 = make_state(MONOTONE, ground.L, perturbation(ground, "even", 0.05), dt=1e-3)
    st1 = step(st0, 2000)
    assert abs(discrete_mass(st1) / st0.mass0 - 1) <= 1e-8
    assert abs(discrete_energy(st1) / st0.energy0 - 1) <= 1e-6


@given(st.floats(-math.pi, math.pi))
def test_gauge_covariance(theta):
    n, L = 256, 20.0
    prof = sample_profile(WINDOW, 1.0, n // 2, L)
    field = perturbation(prof, "random", 0.05, seed=3)
    a = step(make_state(WINDOW, L, np.exp(1j * theta) * field, 1e-2), 20).field
    b = np.exp(1j * theta) * step(make_state(WINDOW, L, field, 1e-2), 20).field
    assert np.max(np.abs(a - b)) <= 1e-12


@given(st.integers(-100, 100))
def test_translation_covariance(shift):
    n, L = 256, 20.0
    prof = sample_profile(WINDOW, 1.0, n // 2, L)
    field = perturbation(prof, "random", 0.05, seed=5)
    a = step(make_state(WINDOW, L, np.roll(field, shift), 1e-2), 20).field
    b = np.roll(step(make_state(WINDOW, L, field, 1e-2), 20).field, shift)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_second_order_splitting():
    n, L = default_grid(1.0)
    prof = sample_profile(MONOTONE, 1.0, n, L)
    field = perturbation(prof, "even", 0.05)

    def run(dt):
        return step(make_state(MONOTONE, L, field, dt), int(round(1.0 / dt))).field

    ref = run(0.02 / 8)
    e1 = np.max(np.abs(run(0.02) - ref))
    e2 = np.max(np.abs(run(0.01) - ref))
    assert 3.0 <= e1 / e2 <= 5.0


def test_blow_up_detected():
    field = np.ones(64, dtype=complex)
    field[3] = np.nan
    with pytest.raises(ValueError, match="finite"):
        make_state(MONOTONE, 10.0, field)
    # a state that went non-finite mid-run
    with pytest.raises(BlowUpError, match="blow-up or instability detected"):
        step(EvolutionState(MONOTONE, 10.0, field), 1)


def test_negative_steps_rejected():
    with pytest.raises(ValueError):
        step(make_state(MONOTONE, 10.0, np.zeros(64)), -1)


# --- orbit distance -------------------------------------------------------------

def test_distance_to_itself(ground):
    st0 = state_from_profile(ground)
    assert orbit_distance(st0, ground) <= 1e-8


def test_distance_invariant_under_symmetries(ground):
    r = np.asarray(ground.rs[:-1])
    moved = np.exp(0.7j) * fourier_shift(r, 3.2, ground.h)
    fit = orbit_fit(moved, r, ground.h)
    assert fit.distance <= 1e-6
    assert fit.shift == pytest.approx(3.2, abs=1e-8)
    assert fit.phase == pytest.approx(0.7, abs=1e-8)


def test_distance_of_scaled_profile(ground):
    r = np.asarray(ground.rs[:-1])
    d = orbit_fit((1 + 1e-3) * r, r, ground.h).distance
    assert d == pytest.approx(1e-3 * h1_norm(r, ground.h), rel=0.1)


def test_incompatible_grids(ground):
    with pytest.raises(ValueError):
        orbit_distance(make_state(MONOTONE, ground.L, np.zeros(64)), ground)


@pytest.mark.parametrize("mode", PERTURBATION_MODES)
def test_initial_distance_equals_prepared_size(ground, mode):
    r = np.asarray(ground.rs[:-1])
    size = 1e-3 * h1_norm(r, ground.h)
    d0 = orbit_fit(perturbation(ground, mode, 1e-3, seed=1), r, ground.h).distance
    assert d0 == pytest.approx(size, rel=0.1)


def test_unknown_mode(ground):
    with pytest.raises(ValueError, match="unknown perturbation mode"):
        perturbation(ground, "sideways", 1e-3)


def test_random_mode_reproducible(ground):
    a = perturbation(ground, "random", 1e-3, seed=7)
    b = perturbation(ground, "random", 1e-3, seed=7)
    c = perturbation(ground, "random", 1e-3, seed=8)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# --- stability experiment -------------------------------------------------------

def test_short_stability_run():
    series = stability_experiment(MONOTONE, 1.0, 1e-3, 5.0, samples=20)
    assert len(series.times) == 21
    assert np.all(series.distances >= 0)
    assert series.distances[0] == pytest.approx(series.perturbation_size, rel=0.1)
    assert series.max_distance <= 10 * series.perturbation_size
    assert np.max(np.abs(series.mass_drift)) <= 1e-8
    assert np.max(np.abs(series.energy_drift)) <= 1e-6


def test_unperturbed_run_stays_on_orbit():
    # the scheme's O(dt^2) phase/profile defect is what remains at eps = 0
    series = stability_experiment(MONOTONE, 1.0, 0.0, 10.0, dt=2.5e-4, samples=20)
    assert series.max_distance <= 1e-6


def test_degenerate_exploration_completes():
    series = stability_experiment(DEGENERATE, 0.25, 1e-3, 2.0, samples=10)
    assert np.all(np.isfinite(series.distances))


@pytest.mark.parametrize("kwargs", [dict(eps=0.2), dict(eps=-1e-3), dict(T=0.0), dict(T=101.0), dict(omega=0.0)])
def test_experiment_rejects_bad_input(kwargs):
    args = dict(p=MONOTONE, omega=1.0, eps=1e-3, T=1.0)
    args.update(kwargs)
    with pytest.raises(ValueError):
        stability_experiment(**args)


def test_default_grid():
    n, L = default_grid(1.0)
    assert (n, L) == (512, 30.0)
    n, L = default_grid(0.25)
    assert L == 60.0 and 2 * L / (2 * n) <= 0.6
