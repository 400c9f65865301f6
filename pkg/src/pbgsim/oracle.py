"""Exact single-excitation decay through the reservoir memory kernel.

Eliminating the full continuum from the one-excitation equations leaves a
Volterra integro-differential equation for the excited-state amplitude,

    da/dt = -i Delta_o a(t) - int_0^t K(t - t') a(t') dt',

with the kernel given by the Fourier transform of the coupling density
(C/pi) (omega - omega_e)^(-1/2) over the band:

    K(tau) = C e^(-i pi/4) / sqrt(pi tau).

This path never touches the mode ladder, so it serves as an independent
check on the discretized propagation.

The tau^(-1/2) singularity is integrable but ruins ordinary quadrature, so
the history integral uses product integration: a(t) is interpolated
linearly on each panel and the kernel moments over the panel are taken in
closed form. Together with a trapezoidal step for the local terms the
scheme is second-order accurate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationError


@dataclass(frozen=True)
class KernelSpec:
    """Effective coupling and atomic detuning entering the kernel."""

    coupling_C: float = 1.0
    delta_o: float = 0.0


def memory_kernel(spec: KernelSpec, tau):
    """Reservoir correlation function K(tau); modulus C/sqrt(pi tau), phase -pi/4."""
    t = np.asarray(tau, dtype=float)
    if np.any(t <= 0):
        raise DomainError("memory kernel is defined for tau > 0 only")
    out = spec.coupling_C * np.exp(-1j * np.pi / 4.0) / np.sqrt(np.pi * t)
    if np.isscalar(tau):
        return complex(out)
    return out


def solve_decay_exact(spec: KernelSpec, t_grid) -> np.ndarray:
    """Excited-state amplitude a(t) on a uniform grid, a(0) = 1.

    The convolution coefficient of the newest point is known in closed form,
    so each step solves a scalar implicit equation; cost is O(n^2) in the
    number of grid points.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 1 or t[0] != 0.0:
        raise DomainError("t_grid must be one-dimensional and start at 0")
    n = len(t) - 1
    if n == 0:
        return np.ones(1, dtype=np.complex128)
    h = t[1] - t[0]
    if h <= 0 or not np.allclose(np.diff(t), h, rtol=1e-9, atol=1e-12):
        raise DomainError("t_grid must be uniformly spaced")

    c = spec.coupling_C * np.exp(-1j * np.pi / 4.0) / np.sqrt(np.pi)  # K = c tau^(-1/2)

    # Panel moments of the kernel against the linear interpolant: on panel l
    # (tau from l*h to (l+1)*h), the weight of the newer endpoint is
    # ((l+1)h M0 - M1)/h and of the older endpoint (M1 - lh M0)/h, with
    # M0 = int K dtau and M1 = int tau K dtau in closed form.
    l = np.arange(n + 1, dtype=float)
    sq = np.sqrt(l * h)
    m0 = 2.0 * c * np.diff(sq)
    m1 = (2.0 * c / 3.0) * np.diff((l * h) ** 1.5)
    lh = l[:-1] * h
    w_old = (m1 - lh * m0) / h
    w_new = ((lh + h) * m0 - m1) / h

    # Stationary convolution coefficients for the interior points:
    # I_m = conv[0] a_m + sum_{j=1}^{m-1} conv[m-j] a_j + w_old[m-1] a_0,
    # with conv[0] = w_new[0] and conv[d] = w_new[d] + w_old[d-1]; the
    # boundary point a_0 sits on only one panel and keeps its bare weight.
    conv = np.empty(n, dtype=np.complex128)
    conv[0] = w_new[0]
    conv[1:] = w_new[1:] + w_old[:-1]

    a = np.zeros(n + 1, dtype=np.complex128)
    hist = np.zeros(n + 1, dtype=np.complex128)  # hist[m] = I_m once a_m is known
    a[0] = 1.0
    idelta = 1j * spec.delta_o
    denom = 1.0 + 0.5 * h * idelta + 0.5 * h * conv[0]
    for m in range(n):
        known = np.dot(conv[1 : m + 1][::-1], a[1 : m + 1]) + w_old[m] * a[0]
        a[m + 1] = (a[m] * (1.0 - 0.5 * h * idelta) - 0.5 * h * (hist[m] + known)) / denom
        hist[m + 1] = known + conv[0] * a[m + 1]
        if not np.isfinite(a[m + 1]):
            raise IntegrationError(f"memory-kernel solve diverged at t={t[m + 1]:g}")
    return a


def decay_population(spec: KernelSpec, t_grid) -> np.ndarray:
    """|a(t)|^2 on the grid."""
    return np.abs(solve_decay_exact(spec, t_grid)) ** 2


def refinement_error(spec: KernelSpec, t_max: float, h: float) -> float:
    """Sup-norm change in |a|^2 when the step is halved; a self-convergence estimate."""
    n = int(round(t_max / h))
    coarse = decay_population(spec, np.arange(n + 1) * h)
    fine = decay_population(spec, np.arange(2 * n + 1) * (h / 2.0))
    return float(np.max(np.abs(coarse - fine[::2])))
