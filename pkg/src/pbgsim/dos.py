"""Band-edge density of states and its replacement by a ladder of discrete modes.

Units: frequencies and detunings are expressed in units of C^(2/3), times in
C^(-2/3), where C is the effective atom-reservoir coupling. Internally C = 1.

The mode density behind an isotropic band edge is

    rho(omega) = k / sqrt(omega - omega_e)   for omega > omega_e, else 0.

The continuum is replaced by N oscillators spaced so that each one accounts
for exactly one mode of the ladder (Delta_N = rho * Delta_omega = 1), all
sharing a single coupling g_r fixed by integrating the coupling density
over the discretized band [omega_e, omega_u]. The smooth remainder above
omega_u only shifts the excited level; that shift is carried along as
``vacuum_shift``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError, EdgeSingularityError


class Scheme(str, enum.Enum):
    """Recursion used to march the mode frequencies up the band."""

    FIRST_ORDER = "first-order"   # w_{i+1} = w_i + 1/rho(w_i)
    MIDPOINT = "midpoint"         # w_{i+1} = w_{i-1} + 2/rho(w_i), leapfrog


@dataclass(frozen=True)
class DensityOfStates:
    """Inverse-square-root mode density above a band edge.

    omega_e    : band edge frequency (0 in the rotating frame used throughout)
    k_const    : normalization k, units 1/sqrt(frequency); derive via solve_k
    coupling_C : effective atom-reservoir coupling (1 under the unit convention)
    """

    omega_e: float
    k_const: float
    coupling_C: float = 1.0


@dataclass(frozen=True, eq=False)
class DiscretizedReservoir:
    """Ladder of discrete modes standing in for the continuum below omega_u.

    All modes share the coupling ``coupling_g``; ``vacuum_shift`` is the
    level shift produced by the adiabatically eliminated modes above
    ``omega_u`` and enters the equations of motion with a minus sign on
    every excited-atom amplitude.
    """

    frequencies: np.ndarray
    coupling_g: float
    omega_e: float
    omega_u: float
    delta_seed: float
    vacuum_shift: float

    @property
    def n_modes(self) -> int:
        return len(self.frequencies)

    @property
    def detunings(self) -> np.ndarray:
        """Mode detunings from the band edge."""
        return self.frequencies - self.omega_e

    @property
    def couplings(self) -> np.ndarray:
        """Per-mode couplings; identical for this mode density, kept as an
        array so a future non-flat parametrization slots in unchanged."""
        return np.full(self.n_modes, self.coupling_g)


def evaluate_dos(dos: DensityOfStates, omega):
    """Mode density at ``omega``; zero below the edge.

    Accepts scalars or arrays. Evaluation exactly at the edge raises
    EdgeSingularityError (the density diverges there).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == dos.omega_e):
        raise EdgeSingularityError(
            f"density of states diverges at the band edge omega_e={dos.omega_e}"
        )
    out = np.zeros_like(w)
    above = w > dos.omega_e
    out[above] = dos.k_const / np.sqrt(w[above] - dos.omega_e)
    if np.isscalar(omega):
        return float(out)
    return out


def solve_k(n_modes: int, omega_e: float, omega_u: float) -> float:
    """Normalization k for which [omega_e, omega_u] holds exactly n_modes modes.

    Integrating rho over the band gives 2k*sqrt(omega_u - omega_e) = N, so
    k = N / (2 sqrt(omega_u - omega_e)). This makes the unit-per-mode spacing
    rule and the shared-coupling integral mutually consistent.
    """
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    if omega_u <= omega_e:
        raise DomainError(f"need omega_u > omega_e, got {omega_u} <= {omega_e}")
    return n_modes / (2.0 * np.sqrt(omega_u - omega_e))


def coupling_from_integral(dos: DensityOfStates, n_modes: int, omega_u: float) -> float:
    """Shared mode coupling g_r from the coupling-density integral over the band.

    N g_r^2 = (2C/pi) sqrt(omega_u - omega_e), i.e. the discrete modes carry
    the same total coupling weight as the continuum they replace.
    """
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    if omega_u <= dos.omega_e:
        raise DomainError(f"need omega_u > omega_e, got {omega_u} <= {dos.omega_e}")
    return float(
        np.sqrt(2.0 * dos.coupling_C / (n_modes * np.pi) * np.sqrt(omega_u - dos.omega_e))
    )


def vacuum_shift(res: DiscretizedReservoir) -> float:
    """Level shift from the modes above the cutoff, g_r^2 N / (omega_u - omega_e).

    Always >= 0; it pushes the excited level down, towards the gap, where it
    is protected from decay.
    """
    return res.vacuum_shift


def discretize(
    dos: DensityOfStates,
    n_modes: int,
    omega_u: float,
    delta_seed: float,
    scheme: Scheme = Scheme.MIDPOINT,
) -> DiscretizedReservoir:
    """Generate the mode ladder w_1..w_N and its shared coupling.

    The ladder is seeded at w_1 = omega_e + delta_seed and marched with
    spacings 1/rho. The midpoint (leapfrog) recursion needs a second point
    and takes one first-order step to get it.

    Raises ConsistencyError when the ladder endpoint misses omega_u by more
    than the seeding offset can explain (see note below), which indicates
    that (n_modes, omega_u, k) were not derived consistently.
    """
    scheme = Scheme(scheme)
    if delta_seed <= 0:
        raise DomainError(f"delta_seed must be > 0, got {delta_seed}")
    if omega_u <= dos.omega_e + delta_seed:
        raise DomainError("need omega_u > omega_e + delta_seed")
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    if scheme is Scheme.MIDPOINT and n_modes < 2:
        raise DomainError("midpoint recursion needs n_modes >= 2")

    w = np.empty(n_modes)
    w[0] = dos.omega_e + delta_seed
    if n_modes > 1:
        w[1] = w[0] + 1.0 / evaluate_dos(dos, w[0])
        if scheme is Scheme.FIRST_ORDER:
            for i in range(1, n_modes - 1):
                w[i + 1] = w[i] + 1.0 / evaluate_dos(dos, w[i])
        else:
            for i in range(1, n_modes - 1):
                w[i + 1] = w[i - 1] + 2.0 / evaluate_dos(dos, w[i])

    if np.any(np.diff(w) <= 0):
        raise ConsistencyError("mode ladder is not strictly increasing")

    # Seeding at a finite delta displaces the whole ladder upward by about
    # 2*sqrt(band_width*delta), so the endpoint may overshoot omega_u by that
    # much plus a couple of local spacings. A larger overshoot means the
    # caller's k does not match (n_modes, omega_u). Undershoot is normal: at
    # small N the recursion stalls below the cutoff.
    if n_modes > 1:
        width = omega_u - dos.omega_e
        tol = 2.0 * np.sqrt(width * delta_seed) + 2.0 * (w[-1] - w[-2])
        if w[-1] - omega_u > tol:
            raise ConsistencyError(
                f"ladder endpoint {w[-1]:.6g} overshoots omega_u={omega_u:.6g} by more "
                f"than {tol:.3g}: n_modes={n_modes}, omega_u and k={dos.k_const:.6g} "
                "are inconsistent (derive k with solve_k)"
            )

    g = coupling_from_integral(dos, n_modes, omega_u)
    shift = g * g * n_modes / (omega_u - dos.omega_e)
    return DiscretizedReservoir(
        frequencies=w,
        coupling_g=g,
        omega_e=dos.omega_e,
        omega_u=omega_u,
        delta_seed=delta_seed,
        vacuum_shift=shift,
    )


def build_reservoir(
    n_modes: int,
    omega_u: float,
    delta_seed: float,
    scheme: Scheme = Scheme.MIDPOINT,
    omega_e: float = 0.0,
    coupling_C: float = 1.0,
) -> DiscretizedReservoir:
    """Standard pipeline: solve for k, then discretize."""
    k = solve_k(n_modes, omega_e, omega_u)
    dos = DensityOfStates(omega_e=omega_e, k_const=k, coupling_C=coupling_C)
    return discretize(dos, n_modes, omega_u, delta_seed, scheme)
