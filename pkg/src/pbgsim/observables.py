"""Scalar diagnostics over a state vector: populations, photon numbers, sectors.

The reservoir sector populations partition the basis by reservoir photon
number alone, so states with the atom excited and one reservoir photon do
count towards the one-photon sector; set ``include_excited_atom=False`` for
the alternative reading that keeps only ground-atom states there (the
partition identity p0 + p1 + p2 = |psi|^2 then no longer holds).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError
from .statespace import ExcitationBasis, StateVector


@dataclass(frozen=True)
class ObservableRecord:
    p_excited: float
    n_defect: float
    p_res_zero: float
    p_res_one: float
    p_res_two: float
    n_total: float
    norm_sq: float

    CSV_FIELDS = (
        "p_excited",
        "n_defect",
        "p_res_zero",
        "p_res_one",
        "p_res_two",
        "n_total",
        "norm_sq",
    )


class _Weights:
    """Per-basis weight vectors so each observable is one dot product."""

    def __init__(self, basis: ExcitationBasis):
        n = basis.size
        self.excited = np.zeros(n)
        self.defect = np.zeros(n)
        self.res_count = np.zeros(n)
        self.total = np.zeros(n)
        for i, s in enumerate(basis.states):
            self.excited[i] = 1.0 if s.atom_excited else 0.0
            self.defect[i] = s.defect_photons
            self.res_count[i] = s.n_reservoir
            self.total[i] = s.total_excitations
        self.res_zero = (self.res_count == 0).astype(float)
        self.res_one = (self.res_count == 1).astype(float)
        self.res_two = (self.res_count == 2).astype(float)
        self.res_one_ground = self.res_one * (1.0 - self.excited)


def _weights(basis: ExcitationBasis) -> _Weights:
    w = getattr(basis, "_observable_weights", None)
    if w is None:
        w = _Weights(basis)
        basis._observable_weights = w
    return w


def _amps(basis: ExcitationBasis, psi) -> np.ndarray:
    if isinstance(psi, StateVector):
        if psi.basis is not basis:
            raise BasisMismatchError("state vector belongs to a different basis")
        return psi.amps
    a = np.asarray(psi, dtype=np.complex128)
    if a.shape != (basis.size,):
        raise BasisMismatchError(
            f"amplitudes of shape {a.shape} do not match basis of size {basis.size}"
        )
    return a


def atomic_inversion(basis: ExcitationBasis, psi) -> float:
    """Population in the upper atomic state."""
    a = _amps(basis, psi)
    return float(np.dot(_weights(basis).excited, np.abs(a) ** 2))


def defect_photon_number(basis: ExcitationBasis, psi) -> float:
    """Mean photon number in the defect mode."""
    if not basis.has_defect:
        raise BasisMismatchError("basis has no defect mode")
    a = _amps(basis, psi)
    return float(np.dot(_weights(basis).defect, np.abs(a) ** 2))


def reservoir_sector_populations(
    basis: ExcitationBasis, psi, include_excited_atom: bool = True
) -> tuple:
    """Populations in the 0-, 1- and 2-photon sectors of the reservoir space."""
    a = _amps(basis, psi)
    p = np.abs(a) ** 2
    w = _weights(basis)
    one = w.res_one if include_excited_atom else w.res_one_ground
    return (float(np.dot(w.res_zero, p)), float(np.dot(one, p)), float(np.dot(w.res_two, p)))


def total_excitations(basis: ExcitationBasis, psi) -> float:
    """Mean total excitation number; constant under the dynamics."""
    a = _amps(basis, psi)
    return float(np.dot(_weights(basis).total, np.abs(a) ** 2))


def norm_sq(psi) -> float:
    a = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    return float(np.vdot(a, a).real)


def record(basis: ExcitationBasis, psi, include_excited_atom: bool = True) -> ObservableRecord:
    """All diagnostics in one pass."""
    a = _amps(basis, psi)
    p = np.abs(a) ** 2
    w = _weights(basis)
    one = w.res_one if include_excited_atom else w.res_one_ground
    return ObservableRecord(
        p_excited=float(np.dot(w.excited, p)),
        n_defect=float(np.dot(w.defect, p)),
        p_res_zero=float(np.dot(w.res_zero, p)),
        p_res_one=float(np.dot(one, p)),
        p_res_two=float(np.dot(w.res_two, p)),
        n_total=float(np.dot(w.total, p)),
        norm_sq=float(np.sum(p)),
    )
