"""Amplitude equations of motion for p = 1, 2 and fixed-step propagation.

The Schroedinger equations for the sector amplitudes are linear with a
time-independent generator, so the right-hand side is assembled once as a
sparse Hermitian matrix H and applied as dpsi/dt = -i H psi. The vacuum
shift S = g_r^2 N / (omega_u - omega_e) is subtracted from the diagonal of
every amplitude that carries the excited atom; sqrt(2) factors appear on
couplings into doubly occupied bosonic modes.

One-excitation sector (atom + optional defect + modes):
    d a0 /dt = -i (Delta_o - S) a0 - i g_d b_d - i sum_j g_j b_j
    d b_d/dt = -i Delta_d b_d - i g_d a0
    d b_j/dt = -i Delta_j b_j - i g_j a0

Two-excitation sector (defect loaded):
    d a0  /dt = -i (Delta_o + Delta_d - S) a0 - i sqrt2 g_d b0 - i sum_j g_j b_j
    d b0  /dt = -i 2 Delta_d b0 - i sqrt2 g_d a0
    d a_j /dt = -i (Delta_o + Delta_j - S) a_j - i g_d b_j
                - i sum_{k!=j} g_k b_jk - i sqrt2 g_j b_jj
    d b_j /dt = -i (Delta_j + Delta_d) b_j - i g_j a0 - i g_d a_j
    d b_jk/dt = -i (Delta_j + Delta_k) b_jk - i g_k a_j - i g_j a_k   (j < k)
    d b_jj/dt = -i 2 Delta_j b_jj - i sqrt2 g_j a_j
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .dos import DiscretizedReservoir
from .errors import BasisMismatchError, ConfigError, IntegrationError
from .statespace import BasisState, ExcitationBasis, StateVector, build_basis

NORM_DRIFT_TOL = 1e-8
STEP_RESOLUTION = 0.1  # required bound on dt * (fastest detuning)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """Atom and defect parameters, detuned from the band edge.

    A defect inside the gap has delta_d < 0 (documented, not enforced).
    """

    delta_o: float = 0.0
    delta_d: float = 0.0
    g_d: float = 0.0


@dataclass(frozen=True)
class PropagationConfig:
    t_max: float
    dt: float = 1e-3
    sample_stride: int = 10
    store_full_state: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.t_max < 0:
            raise ConfigError(f"t_max must be >= 0, got {self.t_max}")
        if self.sample_stride < 1:
            raise ConfigError(f"sample_stride must be >= 1, got {self.sample_stride}")


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    observables: list
    final_state: StateVector
    states: Optional[list] = None
    norm_drift_max: float = 0.0


def detuning_scale(params: SystemParams, res: DiscretizedReservoir) -> float:
    """Fastest frequency in the generator, used to bound the step size."""
    return max(
        abs(params.delta_o) + res.vacuum_shift,
        2.0 * abs(params.delta_d),
        2.0 * (res.omega_u - res.omega_e),
    )


def build_hamiltonian(
    params: SystemParams, res: DiscretizedReservoir, basis: ExcitationBasis
) -> sp.csr_matrix:
    """Assemble the sector Hamiltonian (real symmetric, CSR)."""
    if res.n_modes != basis.n_modes:
        raise BasisMismatchError(
            f"reservoir has {res.n_modes} modes but basis was built for {basis.n_modes}"
        )
    n = basis.n_modes
    det = res.detunings
    g = res.couplings
    s = res.vacuum_shift
    size = basis.size

    diag = np.zeros(size)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def couple(i, j, v):
        i, j, v = np.broadcast_arrays(
            np.atleast_1d(np.asarray(i, dtype=np.int64)),
            np.atleast_1d(np.asarray(j, dtype=np.int64)),
            np.atleast_1d(np.asarray(v, dtype=float)),
        )
        rows.append(i)
        cols.append(j)
        vals.append(v)

    if basis.p == 1:
        off = 1
        if basis.has_defect:
            diag[1] = params.delta_d
            couple(0, 1, params.g_d)
            off = 2
        diag[0] = params.delta_o - s
        if n:
            diag[off : off + n] = det
            couple(np.zeros(n, dtype=np.int64), off + np.arange(n), g)
    else:
        tri_j, tri_k = np.triu_indices(n)
        npair = len(tri_j)
        is_diag = tri_j == tri_k
        if basis.has_defect:
            b_off, a_off, p_off = 2, 2 + n, 2 + 2 * n
            diag[0] = params.delta_o + params.delta_d - s
            diag[1] = 2.0 * params.delta_d
            couple(0, 1, SQRT2 * params.g_d)
            if n:
                diag[b_off : b_off + n] = det + params.delta_d
                couple(np.zeros(n, dtype=np.int64), b_off + np.arange(n), g)
                couple(b_off + np.arange(n), a_off + np.arange(n), params.g_d)
        else:
            a_off, p_off = 0, n
        if n:
            diag[a_off : a_off + n] = params.delta_o + det - s
            diag[p_off : p_off + npair] = det[tri_j] + det[tri_k]
            # a_j <-> b_jk carries g_k, a_k <-> b_jk carries g_j; the
            # doubly-occupied entries take a single sqrt(2) g_j instead.
            pcols = p_off + np.arange(npair)
            v1 = np.where(is_diag, SQRT2 * g[tri_j], g[tri_k])
            couple(a_off + tri_j, pcols, v1)
            couple(a_off + tri_k[~is_diag], pcols[~is_diag], g[tri_j[~is_diag]])

    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(vals)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0)
    upper = sp.coo_matrix((v, (r, c)), shape=(size, size))
    h = sp.diags(diag) + upper + upper.T
    return h.tocsr()


def _layout_check(basis: ExcitationBasis) -> None:
    """Spot-check that the enumerated order matches the block layout above."""
    if basis.p == 1:
        assert basis.state_of(0) == BasisState(True)
    elif basis.has_defect:
        assert basis.state_of(0) == BasisState(True, defect_photons=1)
        assert basis.state_of(1) == BasisState(False, defect_photons=2)


def schrodinger_rhs(hamiltonian: sp.spmatrix) -> Callable[[np.ndarray], np.ndarray]:
    """Return psi -> -i H psi as a fast callable."""
    a = (-1j) * hamiltonian.tocsr()
    return a.dot


def _apply_rhs(params, res, psi: StateVector, p: int) -> StateVector:
    basis = psi.basis
    if basis.p != p:
        raise BasisMismatchError(f"state lives in the p={basis.p} sector, expected p={p}")
    _layout_check(basis)
    h = build_hamiltonian(params, res, basis)
    return StateVector(basis, -1j * (h @ psi.amps))


def rhs_one_excitation(
    params: SystemParams, res: DiscretizedReservoir, psi: StateVector
) -> StateVector:
    """Time derivative of a one-excitation state."""
    return _apply_rhs(params, res, psi, 1)


def rhs_two_excitation(
    params: SystemParams, res: DiscretizedReservoir, psi: StateVector
) -> StateVector:
    """Time derivative of a two-excitation state."""
    return _apply_rhs(params, res, psi, 2)


def propagate(
    rhs,
    psi0: StateVector,
    cfg: PropagationConfig,
    obs: Optional[Callable[[float, np.ndarray], object]] = None,
    max_detuning: Optional[float] = None,
) -> Trajectory:
    """Classical fixed-step 4th-order propagation of dpsi/dt = rhs(psi).

    ``rhs`` is a callable on bare amplitude arrays (see schrodinger_rhs) or a
    sparse/dense matrix already containing the -i factor. Observables are
    sampled every ``sample_stride`` steps via ``obs(t, amps)``. Norm drift
    beyond 1e-8 or non-finite amplitudes abort the run.
    """
    if max_detuning is not None and cfg.dt * max_detuning > STEP_RESOLUTION:
        raise ConfigError(
            f"dt={cfg.dt:g} does not resolve the fastest detuning {max_detuning:g}: "
            f"need dt <= {STEP_RESOLUTION / max_detuning:g}"
        )
    f = rhs if callable(rhs) else rhs.dot

    basis = psi0.basis
    y = psi0.amps.astype(np.complex128, copy=True)
    dt = cfg.dt
    n_steps = int(round(cfg.t_max / dt)) if cfg.t_max > 0 else 0
    if n_steps and abs(n_steps * dt - cfg.t_max) > 1e-9 * max(1.0, cfg.t_max):
        warnings.warn(
            f"t_max={cfg.t_max:g} is not a multiple of dt={dt:g}; "
            f"stopping at {n_steps * dt:g}",
            stacklevel=2,
        )

    norm0 = float(np.vdot(y, y).real)
    times = [0.0]
    records = [obs(0.0, y)] if obs else []
    states = [StateVector(basis, y.copy())] if cfg.store_full_state else None
    drift_max = 0.0

    def check(t, y):
        nonlocal drift_max
        if not np.all(np.isfinite(y.view(np.float64))):
            raise IntegrationError(f"non-finite amplitudes at t={t:g}; reduce dt")
        drift = abs(float(np.vdot(y, y).real) - norm0)
        drift_max = max(drift_max, drift)
        if drift > NORM_DRIFT_TOL:
            raise IntegrationError(
                f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL:g} at t={t:g}; reduce dt"
            )

    for step in range(1, n_steps + 1):
        k1 = f(y)
        k2 = f(y + (0.5 * dt) * k1)
        k3 = f(y + (0.5 * dt) * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % cfg.sample_stride == 0 or step == n_steps:
            t = step * dt
            check(t, y)
            times.append(t)
            if obs:
                records.append(obs(t, y))
            if states is not None:
                states.append(StateVector(basis, y.copy()))

    return Trajectory(
        times=np.array(times),
        observables=records,
        final_state=StateVector(basis, y),
        states=states,
        norm_drift_max=drift_max,
    )


def basis_for(params: SystemParams, res: DiscretizedReservoir, p: int) -> ExcitationBasis:
    """Sector basis matching a parameter set; the defect slot is included for
    every two-excitation run and for one-excitation runs with g_d != 0."""
    has_defect = params.g_d != 0.0 or (p == 2)
    return build_basis(p, res.n_modes, has_defect)
