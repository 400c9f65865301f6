"""Dynamics of a two-level atom coupled to a band-edge reservoir and a defect mode.

The continuum is replaced by a ladder of discrete modes (dos), the one- and
two-excitation sectors are enumerated (statespace) and propagated
(dynamics), with scalar diagnostics (observables) and an independent
memory-kernel reference solution (oracle). The cli module drives the
standard experiments and writes CSV/JSON artifacts.
"""

from .dos import (
    DensityOfStates,
    DiscretizedReservoir,
    Scheme,
    build_reservoir,
    coupling_from_integral,
    discretize,
    evaluate_dos,
    solve_k,
    vacuum_shift,
)
from .dynamics import (
    PropagationConfig,
    SystemParams,
    Trajectory,
    build_hamiltonian,
    propagate,
    rhs_one_excitation,
    rhs_two_excitation,
    schrodinger_rhs,
)
from .observables import (
    ObservableRecord,
    atomic_inversion,
    defect_photon_number,
    norm_sq,
    record,
    reservoir_sector_populations,
    total_excitations,
)
from .oracle import KernelSpec, decay_population, memory_kernel, solve_decay_exact
from .statespace import (
    ATOM_EXCITED,
    ATOM_EXCITED_DEFECT_LOADED,
    BasisState,
    ExcitationBasis,
    StateVector,
    build_basis,
    initial_state,
)

__version__ = "0.1.0"
