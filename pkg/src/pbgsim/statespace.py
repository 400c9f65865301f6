"""Fixed-excitation basis for (two-level atom) x (defect mode) x (N reservoir modes).

The total excitation number p = atom + defect photons + reservoir photons is
conserved, so each sector is enumerated once and addressed by contiguous
indices. Sectors with p <= 2 are supported; reservoir pair occupations are
stored once per unordered pair (j <= k), with the doubly-occupied b_jj
entries included in the pair block.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BasisMismatchError, DomainError, UnsupportedSectorError


@dataclass(frozen=True)
class BasisState:
    """One product state: atom level, defect occupation, reservoir occupation.

    ``reservoir_photons`` maps mode index (1-based) to photon count, stored
    as a sorted tuple of (mode, count) pairs so states are hashable.
    """

    atom_excited: bool
    defect_photons: int = 0
    reservoir_photons: tuple = ()

    @property
    def n_reservoir(self) -> int:
        return sum(c for _, c in self.reservoir_photons)

    @property
    def total_excitations(self) -> int:
        return int(self.atom_excited) + self.defect_photons + self.n_reservoir


def _canonical_reservoir(photons: Iterable) -> tuple:
    """Normalize a reservoir occupation to sorted (mode, count) pairs."""
    counts = Counter()
    for mode, count in photons:
        counts[int(mode)] += int(count)
    return tuple(sorted((m, c) for m, c in counts.items() if c > 0))


def reservoir_pair(j: int, k: int) -> tuple:
    """Occupation tuple for one photon in mode j and one in mode k (j = k allowed)."""
    return _canonical_reservoir([(j, 1), (k, 1)])


class ExcitationBasis:
    """Ordered basis of one excitation sector with bidirectional index maps.

    Ordering conventions (fixed so serialized states compare across runs):
      p=1, no defect : (a0, b_1..b_N)                      size 1 + N
      p=1, defect    : (a0, b_d, b_1..b_N)                 size 2 + N
      p=2, defect    : (a0, b0, {b_j}, {a_j}, {b_jk: j<=k}) size 2 + 2N + N(N+1)/2
      p=2, no defect : ({a_j}, {b_jk: j<=k})               size N + N(N+1)/2
    where a* states carry the excited atom and the pair block runs through
    unordered pairs lexicographically.
    """

    def __init__(self, p: int, n_modes: int, has_defect: bool, states: Sequence[BasisState]):
        self.p = p
        self.n_modes = n_modes
        self.has_defect = has_defect
        self.states = list(states)
        self._index = {s: i for i, s in enumerate(self.states)}

    @property
    def size(self) -> int:
        return len(self.states)

    def index_of(self, state: BasisState) -> int:
        key = BasisState(
            atom_excited=state.atom_excited,
            defect_photons=state.defect_photons,
            reservoir_photons=_canonical_reservoir(state.reservoir_photons),
        )
        try:
            return self._index[key]
        except KeyError:
            raise BasisMismatchError(f"state {state} is not in this p={self.p} sector") from None

    def state_of(self, i: int) -> BasisState:
        return self.states[i]

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return (
            f"ExcitationBasis(p={self.p}, n_modes={self.n_modes}, "
            f"has_defect={self.has_defect}, size={self.size})"
        )


def sector_size(p: int, n_modes: int, has_defect: bool) -> int:
    """Size of the p-excitation sector without enumerating it."""
    if p not in (1, 2):
        raise UnsupportedSectorError(
            f"p={p} is not supported; only the one- and two-excitation sectors are built"
        )
    if n_modes < 0:
        raise DomainError(f"n_modes must be >= 0, got {n_modes}")
    n = n_modes
    if p == 1:
        return 1 + (1 if has_defect else 0) + n
    pairs = n * (n + 1) // 2
    return (2 + 2 * n + pairs) if has_defect else (n + pairs)


def build_basis(p: int, n_modes: int, has_defect: bool) -> ExcitationBasis:
    """Enumerate the p-excitation sector in the documented order."""
    sector_size(p, n_modes, has_defect)  # validates p and n_modes

    modes = range(1, n_modes + 1)
    states: list[BasisState] = []
    if p == 1:
        states.append(BasisState(True))
        if has_defect:
            states.append(BasisState(False, defect_photons=1))
        states.extend(BasisState(False, reservoir_photons=((j, 1),)) for j in modes)
    else:
        if has_defect:
            states.append(BasisState(True, defect_photons=1))
            states.append(BasisState(False, defect_photons=2))
            states.extend(
                BasisState(False, defect_photons=1, reservoir_photons=((j, 1),)) for j in modes
            )
        states.extend(BasisState(True, reservoir_photons=((j, 1),)) for j in modes)
        for j in modes:
            for k in range(j, n_modes + 1):
                states.append(BasisState(False, reservoir_photons=reservoir_pair(j, k)))
    return ExcitationBasis(p, n_modes, has_defect, states)


@dataclass(eq=False)
class StateVector:
    """Complex amplitudes aligned with an ExcitationBasis."""

    basis: ExcitationBasis
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.basis.size,):
            raise BasisMismatchError(
                f"amplitude vector of shape {self.amps.shape} does not match "
                f"basis of size {self.basis.size}"
            )

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amps.copy())


ATOM_EXCITED = "atom-excited"
ATOM_EXCITED_DEFECT_LOADED = "atom-excited-defect-loaded"


def initial_state(basis: ExcitationBasis, which) -> StateVector:
    """Build a normalized initial state.

    ``which`` is either the name of a stock preparation (ATOM_EXCITED puts
    the whole amplitude on |e,0>; ATOM_EXCITED_DEFECT_LOADED on |e,1_d,0>)
    or a list of (BasisState, amplitude) pairs, which is normalized.
    """
    amps = np.zeros(basis.size, dtype=np.complex128)
    if which == ATOM_EXCITED:
        amps[basis.index_of(BasisState(True))] = 1.0
    elif which == ATOM_EXCITED_DEFECT_LOADED:
        amps[basis.index_of(BasisState(True, defect_photons=1))] = 1.0
    elif isinstance(which, str):
        raise DomainError(f"unknown initial-state name {which!r}")
    else:
        for state, amp in which:
            amps[basis.index_of(state)] += amp
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise DomainError("custom initial state has zero norm")
        amps /= norm
    return StateVector(basis, amps)
