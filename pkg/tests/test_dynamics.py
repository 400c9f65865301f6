import numpy as np
import pytest

from brute_force import dense_hamiltonian, dense_propagate
from pbgsim.dos import DiscretizedReservoir, build_reservoir
from pbgsim.dynamics import (
    PropagationConfig,
    SystemParams,
    build_hamiltonian,
    detuning_scale,
    propagate,
    rhs_one_excitation,
    rhs_two_excitation,
    schrodinger_rhs,
)
from pbgsim.errors import BasisMismatchError, ConfigError, IntegrationError
from pbgsim.statespace import (
    ATOM_EXCITED,
    ATOM_EXCITED_DEFECT_LOADED,
    BasisState,
    StateVector,
    build_basis,
    initial_state,
)


def handmade_reservoir(detunings, g, shift=0.0):
    freqs = np.asarray(detunings, dtype=float)
    return DiscretizedReservoir(
        frequencies=freqs,
        coupling_g=g,
        omega_e=0.0,
        omega_u=float(freqs[-1]) if len(freqs) else 1.0,
        delta_seed=1e-4,
        vacuum_shift=shift,
    )


def random_state(basis, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
    return StateVector(basis, amps / np.linalg.norm(amps))


# ---------------------------------------------------------------- RHS algebra


def test_decoupled_atom_rotates_in_phase():
    res = handmade_reservoir([0.3, 0.7, 1.1], g=0.0)
    params = SystemParams(delta_o=1.0)
    basis = build_basis(1, 3, False)
    psi = initial_state(basis, ATOM_EXCITED)
    dpsi = rhs_one_excitation(params, res, psi)
    assert dpsi.amps[0] == pytest.approx(-1j, abs=1e-15)
    assert np.all(dpsi.amps[1:] == 0.0)


def test_rhs_inner_product_is_imaginary():
    res = handmade_reservoir([0.2, 0.5, 0.9, 1.4], g=0.3, shift=0.05)
    params = SystemParams(delta_o=-0.2, delta_d=-0.4, g_d=0.8)
    for p, builder in ((1, rhs_one_excitation), (2, rhs_two_excitation)):
        basis = build_basis(p, 4, True)
        for seed in range(4):
            psi = random_state(basis, seed)
            dpsi = builder(params, res, psi)
            assert abs(np.vdot(psi.amps, dpsi.amps).real) < 1e-13


@pytest.mark.parametrize("p", [1, 2])
def test_generator_is_anti_hermitian(p):
    res = handmade_reservoir([0.15, 0.45, 0.8, 1.3, 1.9], g=0.35, shift=0.07)
    params = SystemParams(delta_o=-0.1, delta_d=-0.15, g_d=0.9)
    basis = build_basis(p, 5, True)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(1000):
        phi = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
        psi = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
        phi /= np.linalg.norm(phi)
        psi /= np.linalg.norm(psi)
        lhs = np.vdot(phi, rhs(psi))
        rhs_conj = -np.conj(np.vdot(psi, rhs(phi)))
        worst = max(worst, abs(lhs - rhs_conj))
    assert worst < 1e-12


def test_two_excitation_pure_phases_when_uncoupled():
    res = handmade_reservoir([0.25, 0.65], g=0.0)
    params = SystemParams(delta_o=0.4, delta_d=-0.3, g_d=0.0)
    basis = build_basis(2, 2, True)
    h = build_hamiltonian(params, res, basis).toarray()
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    # diagonal detuning sums for a few hand-picked states
    assert h[basis.index_of(BasisState(True, 1, ())), basis.index_of(BasisState(True, 1, ()))] \
        == pytest.approx(0.4 - 0.3)
    i_b0 = basis.index_of(BasisState(False, 2, ()))
    assert h[i_b0, i_b0] == pytest.approx(-0.6)
    i_pair = basis.index_of(BasisState(False, 0, ((1, 1), (2, 1))))
    assert h[i_pair, i_pair] == pytest.approx(0.25 + 0.65)
    i_dbl = basis.index_of(BasisState(False, 0, ((2, 2),)))
    assert h[i_dbl, i_dbl] == pytest.approx(1.3)


@pytest.mark.parametrize(
    "p, n, defect",
    [(1, 3, False), (1, 3, True), (2, 2, True), (2, 3, True), (2, 3, False)],
)
def test_assembly_matches_operator_algebra(p, n, defect):
    res = build_reservoir(n, 2.0, 1e-3)
    params = SystemParams(delta_o=-0.1, delta_d=-0.1, g_d=1.0)
    basis = build_basis(p, n, defect)
    ours = build_hamiltonian(params, res, basis).toarray()
    brute = dense_hamiltonian(params, res, basis)
    assert np.max(np.abs(ours - brute)) < 1e-14


def test_basis_mismatch_is_rejected():
    res = handmade_reservoir([0.3, 0.8], g=0.2)
    params = SystemParams()
    psi = initial_state(build_basis(1, 2, False), ATOM_EXCITED)
    with pytest.raises(BasisMismatchError):
        rhs_two_excitation(params, res, psi)
    with pytest.raises(BasisMismatchError):
        build_hamiltonian(params, res, build_basis(1, 5, False))


# ---------------------------------------------------------------- propagation


def test_zero_generator_is_identity():
    basis = build_basis(1, 2, False)
    psi = random_state(basis, 5)
    traj = propagate(
        lambda y: np.zeros_like(y), psi, PropagationConfig(t_max=1.0, dt=1e-2)
    )
    assert np.array_equal(traj.final_state.amps, psi.amps)


def test_diagonal_phase_after_pi():
    res = handmade_reservoir([1.0], g=0.0)
    params = SystemParams()
    basis = build_basis(1, 1, False)
    psi = StateVector(basis, np.array([0.0, 1.0], dtype=complex))
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    dt = np.pi / 3000.0  # lands on t = pi exactly, at roughly the default step
    traj = propagate(rhs, psi, PropagationConfig(t_max=np.pi, dt=dt, sample_stride=100))
    assert abs(traj.final_state.amps[1] - (-1.0)) < 1e-9


def test_single_mode_rabi_oscillation():
    g = 0.8
    res = handmade_reservoir([0.0], g=g)
    params = SystemParams()
    basis = build_basis(1, 1, False)
    psi = initial_state(basis, ATOM_EXCITED)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    traj = propagate(
        rhs,
        psi,
        PropagationConfig(t_max=10.0, dt=1e-3, sample_stride=10),
        obs=lambda t, y: abs(y[0]) ** 2,
    )
    expected = np.cos(g * traj.times) ** 2
    assert np.max(np.abs(np.array(traj.observables) - expected)) < 1e-6


def test_atom_defect_rabi_with_sqrt2_enhancement():
    g_d = 0.7
    res = handmade_reservoir([], g=0.0)
    params = SystemParams(delta_o=-0.1, delta_d=-0.1, g_d=g_d)
    basis = build_basis(2, 0, True)
    psi = initial_state(basis, ATOM_EXCITED_DEFECT_LOADED)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    traj = propagate(
        rhs,
        psi,
        PropagationConfig(t_max=10.0, dt=1e-3, sample_stride=10),
        obs=lambda t, y: abs(y[0]) ** 2,
    )
    expected = np.cos(np.sqrt(2.0) * g_d * traj.times) ** 2
    assert np.max(np.abs(np.array(traj.observables) - expected)) < 1e-6


def test_trajectory_matches_dense_propagation():
    res = build_reservoir(3, 2.0, 1e-3)
    params = SystemParams(delta_o=-0.1, delta_d=-0.1, g_d=1.0)
    basis = build_basis(2, 3, True)
    psi = initial_state(basis, ATOM_EXCITED_DEFECT_LOADED)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    cfg = PropagationConfig(t_max=5.0, dt=1e-3, sample_stride=100, store_full_state=True)
    traj = propagate(rhs, psi, cfg)
    h = dense_hamiltonian(params, res, basis)
    exact = dense_propagate(h, psi.amps, traj.times)
    ours = np.array([s.amps for s in traj.states])
    assert np.max(np.abs(ours - exact)) < 1e-9


def test_norm_and_excitation_conserved_under_propagation():
    from pbgsim.observables import total_excitations

    res = build_reservoir(8, 2.0, 1e-3)
    params = SystemParams(delta_o=-0.1, delta_d=-0.1, g_d=1.0)
    basis = build_basis(2, 8, True)
    psi = initial_state(basis, ATOM_EXCITED_DEFECT_LOADED)
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    traj = propagate(
        rhs,
        psi,
        PropagationConfig(t_max=5.0, dt=1e-3, sample_stride=50),
        obs=lambda t, y: (np.vdot(y, y).real, total_excitations(basis, y)),
    )
    norms = np.array([r[0] for r in traj.observables])
    ntot = np.array([r[1] for r in traj.observables])
    assert np.max(np.abs(norms - 1.0)) < 1e-10
    assert np.max(np.abs(ntot - 2.0)) < 1e-10


def test_sampling_grid_and_zero_time():
    basis = build_basis(1, 1, False)
    psi = initial_state(basis, ATOM_EXCITED)
    zero = propagate(lambda y: np.zeros_like(y), psi, PropagationConfig(t_max=0.0, dt=1e-3))
    assert list(zero.times) == [0.0]

    cfg = PropagationConfig(t_max=0.01, dt=1e-3, sample_stride=3)
    traj = propagate(lambda y: np.zeros_like(y), psi, cfg)
    assert np.allclose(traj.times, [0.0, 0.003, 0.006, 0.009, 0.01])


def test_step_bound_is_enforced():
    basis = build_basis(1, 1, False)
    psi = initial_state(basis, ATOM_EXCITED)
    with pytest.raises(ConfigError):
        propagate(
            lambda y: np.zeros_like(y),
            psi,
            PropagationConfig(t_max=1.0, dt=1e-2),
            max_detuning=64.0,
        )


def test_detuning_scale():
    res = handmade_reservoir([1.0], g=0.1, shift=0.2)
    res = DiscretizedReservoir(
        frequencies=res.frequencies,
        coupling_g=res.coupling_g,
        omega_e=0.0,
        omega_u=32.0,
        delta_seed=1e-4,
        vacuum_shift=0.2,
    )
    params = SystemParams(delta_o=-0.5, delta_d=-2.0)
    assert detuning_scale(params, res) == pytest.approx(64.0)


def test_unstable_step_aborts_with_norm_drift():
    res = handmade_reservoir([300.0], g=0.0)
    params = SystemParams()
    basis = build_basis(1, 1, False)
    psi = StateVector(basis, np.array([0.0, 1.0], dtype=complex))
    rhs = schrodinger_rhs(build_hamiltonian(params, res, basis))
    with pytest.raises(IntegrationError, match="reduce dt"):
        propagate(rhs, psi, PropagationConfig(t_max=5.0, dt=1e-2, sample_stride=10))


def test_non_finite_amplitudes_abort():
    basis = build_basis(1, 1, False)
    psi = initial_state(basis, ATOM_EXCITED)
    bad = lambda y: np.full_like(y, np.nan)
    with pytest.raises(IntegrationError, match="non-finite"):
        propagate(bad, psi, PropagationConfig(t_max=1.0, dt=1e-2, sample_stride=1))


def test_propagation_config_validation():
    with pytest.raises(ConfigError):
        PropagationConfig(t_max=1.0, dt=0.0)
    with pytest.raises(ConfigError):
        PropagationConfig(t_max=-1.0, dt=1e-3)
    with pytest.raises(ConfigError):
        PropagationConfig(t_max=1.0, dt=1e-3, sample_stride=0)
