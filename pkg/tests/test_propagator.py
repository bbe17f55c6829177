import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcyclotron.initial_state import dress_initial_state, synthesize_state
from abcyclotron.landau import energy, overlap_dp_matrix
from abcyclotron.params import DriveSpec, ModelParams
from abcyclotron.propagator import (
    InteractionRHS,
    IntegrationError,
    SchroedingerRHS,
    Trajectory,
    acceleration_series,
    drive_value,
    integrate,
    integrate_fixed,
    mean_energy,
    rhs,
    rk4_step,
)

SMALL = ModelParams(n_max=40)
STATIC = ModelParams(n_max=40, epsilon=0.0)


def random_state(size, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=size) + 1j * rng.normal(size=size)
    return x / np.linalg.norm(x)


def test_drive_value(params):
    a, ap = drive_value(0.0, params)
    assert (a, ap) == (params.p, pytest.approx(params.epsilon * params.omega))
    a, ap = drive_value(params.period, params)
    assert a == params.p and ap == pytest.approx(params.epsilon * params.omega)
    for N in (1, 7, 300, 12345):
        assert drive_value(N * params.period, params)[0] == params.p
    t = 0.3 * params.period
    a, ap = drive_value(t, params)
    assert a == pytest.approx(params.p + params.epsilon * math.sin(params.omega * t), abs=1e-14)
    assert ap == pytest.approx(params.epsilon * params.omega * math.cos(params.omega * t), abs=1e-14)


def test_rhs_static_is_free_phase():
    x = random_state(41)
    out = rhs(0.4, x, STATIC)
    assert np.allclose(out, -1j * energy(np.arange(41), STATIC) * x, atol=1e-15)


def test_overlap_action_matches_dense_matrix():
    f = SchroedingerRHS(SMALL)
    x = random_state(41, 2)
    for a in (0.0, 0.4, 2.5, 2.9, -0.2):
        assert np.allclose(f.overlap_action(a, x), overlap_dp_matrix(a, 41) @ x, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 50), st.integers(0, 10**6))
def test_rhs_conserves_norm(t, seed):
    x = random_state(41, seed)
    dx = rhs(t, x, SMALL)
    assert abs(2 * np.vdot(x, dx).real) < 1e-14
    y = random_state(41, seed + 1)
    dy = InteractionRHS(SMALL)(t, y)
    assert abs(2 * np.vdot(y, dy).real) < 1e-14


def test_interaction_picture_agrees_with_lab_frame():
    P = ModelParams(n_max=10)
    f_lab = SchroedingerRHS(P)
    f_int = InteractionRHS(P)
    x0 = random_state(11, 5)
    t_end = 2 * P.period
    lab = integrate_fixed(f_lab, x0, t_end, 16000)
    inter = f_int.to_lab(t_end, integrate_fixed(f_int, x0, t_end, 4000))
    assert np.max(np.abs(lab - inter)) < 1e-8


def test_dynamic_phase_integrates_energy():
    f = InteractionRHS(SMALL)
    t = 1.7
    s = np.linspace(0, t, 20001)
    a = np.array([drive_value(v, SMALL)[0] for v in s])
    n = 7
    integrand = SMALL.omega_c * (n + a + 0.5)
    ref = np.sum((integrand[1:] + integrand[:-1]) * np.diff(s)) / 2
    assert f.dynamic_phase(t)[n] == pytest.approx(ref, rel=1e-8)


def test_rk4_local_error_order():
    f = SchroedingerRHS(SMALL)
    x = random_state(41, 9)
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        full = rk4_step(f, 0.1, x, h)
        half = rk4_step(f, 0.1 + h / 2, rk4_step(f, 0.1, x, h / 2), h / 2)
        errs.append(np.linalg.norm(full - half))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 5) < 0.3)


def test_rk4_global_order_on_solvable_case():
    P = ModelParams(n_max=10, epsilon=0.0)
    f = SchroedingerRHS(P)
    x0 = random_state(11, 4)
    t_end = 3.0
    exact = np.exp(-1j * energy(np.arange(11), P) * t_end) * x0
    errs = [np.max(np.abs(integrate_fixed(f, x0, t_end, n) - exact)) for n in (200, 400, 800)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4) < 0.1)


@pytest.mark.parametrize("picture,n_max", [("interaction", 40), ("lab", 10)])
def test_integrate_static_exact(picture, n_max):
    # the lab frame has to resolve the phases exp(-i E_n t) and is kept to a small basis
    P = ModelParams(n_max=n_max, epsilon=0.0)
    x0 = random_state(n_max + 1, 1)
    t_end = 10 * P.period
    traj = integrate(x0, t_end, P, picture=picture)
    exact = np.exp(-1j * energy(np.arange(n_max + 1), P) * t_end) * x0
    # in the interaction picture the static problem is integrated exactly; in the
    # lab frame the accepted local errors (<= tol each) accumulate over the steps
    bound = 1e-8 if picture == "interaction" else traj.steps_accepted * 1e-8
    assert np.max(np.abs(traj.states[-1] - exact)) < bound
    e_bound = 1e-8 if picture == "interaction" else bound * 2 * energy(n_max, P)
    assert np.ptp(traj.energies) < e_bound


def test_trajectory_sampling(params):
    x0 = np.zeros(41, dtype=complex)
    x0[3] = 1.0
    traj = integrate(x0, 2.5 * SMALL.period, SMALL, samples_per_period=4)
    assert traj.times[0] == 0.0
    assert np.all(np.diff(traj.times) > 0)
    assert np.allclose(traj.times, np.arange(11) * SMALL.period / 4)
    assert traj.flux[4] == SMALL.p and traj.flux[8] == SMALL.p
    assert traj.energies[0] == pytest.approx(energy(3, SMALL))
    # step doubling: three RK4 steps of four stages per attempt
    assert traj.rhs_evals == 12 * (traj.steps_accepted + traj.steps_rejected)


def test_mean_energy_basis_state():
    x = np.zeros(41, dtype=complex)
    x[5] = 1.0
    assert mean_energy(x, 3 * SMALL.period, SMALL) == pytest.approx(energy(5, SMALL))


def test_integrate_errors():
    x0 = random_state(41)
    with pytest.raises(ValueError):
        integrate(x0, 0.0, SMALL)
    with pytest.raises(ValueError):
        integrate(x0, 1.0, SMALL, tol=0.0)
    with pytest.raises(ValueError):
        integrate(x0, 1.0, SMALL, picture="heisenberg")
    with pytest.raises(IntegrationError):
        integrate(x0, 1.0, SMALL, tol=1e-30, h_min=1e-3)


def test_leakage_flag():
    x0 = np.zeros(11, dtype=complex)
    x0[9] = 1.0
    traj = integrate(x0, SMALL.period, ModelParams(n_max=10))
    assert traj.leaked


@pytest.fixture(scope="module")
def reference_run():
    """Reference state over 60 periods, inside the leakage-free horizon of n_max = 120."""
    P = ModelParams()
    from abcyclotron.initial_state import gaussian_density

    rho = gaussian_density()
    x0 = dress_initial_state(synthesize_state(rho, P), P)
    return P, x0, integrate(x0, 60 * P.period, P, samples_per_period=4)


def test_reference_run_conservation(reference_run):
    P, _, traj = reference_run
    assert traj.norm_drift < 1e-6
    assert traj.max_tail < 1e-6
    assert not traj.leaked


def test_tolerance_refinement(reference_run):
    P, x0, traj = reference_run
    fine = integrate(x0, 20 * P.period, P, tol=1e-10, samples_per_period=1)
    coarse_e = traj.energies[np.argmin(np.abs(traj.times - 20 * P.period))]
    assert fine.energies[-1] == pytest.approx(coarse_e, rel=1e-5)


def test_reference_slope_before_truncation_edge(reference_run):
    P, _, traj = reference_run
    acc = acceleration_series(traj, 0.5)
    assert acc.slope == pytest.approx(0.1796, rel=0.1)


def test_acceleration_series_synthetic():
    t = np.linspace(0, 100, 101)
    traj = Trajectory(t, np.zeros((101, 1)), 0.3 * t, np.ones(101), np.zeros(101), t, t)
    acc = acceleration_series(traj)
    assert acc.slope == pytest.approx(0.3, abs=1e-12)
    assert np.allclose(acc.ratio, 0.3)
    assert acc.times[0] > 0
    const = Trajectory(t, np.zeros((101, 1)), np.full(101, 5.0), np.ones(101), np.zeros(101), t, t)
    acc = acceleration_series(const)
    assert np.allclose(acc.ratio * acc.times, 5.0)
    assert acc.slope == pytest.approx(0.0, abs=1e-12)


def test_generic_drive_runs():
    drive = DriveSpec({1: -0.5j, 2: 0.1})
    x0 = np.zeros(41, dtype=complex)
    x0[2] = 1.0
    traj = integrate(x0, 3 * SMALL.period, SMALL, drive)
    assert traj.norm_drift < 1e-6
    assert traj.flux[-1] == pytest.approx(SMALL.p + SMALL.epsilon * drive.value(0.0), abs=1e-14)
