"""Factorised evolution for linear potentials: phase x translation x diffusion.

Heat equation with a linear term, ``F_t = F_xx + beta x F``::

    F(x, t) = exp(Phi(x, t; beta)) f(x + beta t^2, t),   Phi = beta^2 t^3/3 + beta t x

with ``f(., t)`` the Gauss-Weierstrass transform of the initial data.
Schrodinger equation in rescaled units, ``i Psi_tau = -Psi_xx + b x Psi``,
follows from ``t -> i tau``, ``beta -> -b``::

    Psi(x, tau) = exp(-i Phi(x, tau; b)) f(x + b tau^2, i tau)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError
from .grid import Grid, GridFunction, find_peak, fourier_multiply
from .special_fn import AiryScale, airy_ai, airy_two_var, theta_phase
from .transforms import gauss_weierstrass

AIRY_PEAK = -1.0187929716474710  # first zero of Ai', location of max |Ai|


@dataclass(frozen=True)
class LinearPotentialParams:
    """Constants of the linear-potential problems.

    ``beta`` multiplies ``x`` in the heat equation, ``b`` is the rescaled
    Schrodinger field (an inverse cube length), ``A`` the Airy length scale
    and ``B`` its physical counterpart ``(2 m q E)^(1/3)``.
    """

    beta: float = 0.0
    b: float = 0.0
    A: float = 1.0
    B: float = 1.0
    m_mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("A", "B", "m_mass", "hbar"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def scale(self) -> AiryScale:
        return AiryScale(self.A)


def rescale_schrodinger(m_mass: float, force: float, hbar: float, t: float) -> tuple[float, float]:
    """Physical ``(m, F, hbar, t)`` to rescaled ``(tau, b)``: ``tau = hbar t/2m``, ``b = 2 F m/hbar^2``."""
    if m_mass <= 0 or hbar <= 0:
        raise DomainError("mass and hbar must be positive")
    return hbar * t / (2.0 * m_mass), 2.0 * force * m_mass / hbar ** 2


def airy_constant_B(m_mass: float, charge_field: float) -> float:
    """``B = (2 m q E)^(1/3)``."""
    return float(np.cbrt(2.0 * m_mass * charge_field))


def phase_phi(x, t, beta):
    """``Phi(x, t; beta) = beta^2 t^3 / 3 + beta t x``."""
    return beta ** 2 * t ** 3 / 3.0 + beta * t * np.asarray(x)


def _shift_and_diffuse(f0: GridFunction, shift: float, diffusion) -> GridFunction:
    """``S D f0`` in one pass of the Fourier multiplier."""
    k = f0.grid.k
    mult = np.exp(-diffusion * k * k + 1j * k * shift)
    if f0.n % 2 == 0:
        ny = f0.n // 2
        mult[ny] = np.exp(-diffusion * k[ny] ** 2) * np.cos(k[ny] * shift)
    return fourier_multiply(f0, mult)


def solve_heat_linear(f0: GridFunction, beta: float, t: float, method: str = "fft") -> GridFunction:
    """Solve ``F_t = F_xx + beta x F`` from ``F(x, 0) = f0``.

    The diffusion and the shift by ``beta t^2`` commute; with
    ``method="fft"`` they are applied as one Fourier multiplier, with
    ``method="quad"`` the heat kernel is summed directly and the shifted
    Gaussian kernel ``exp(-(x + beta t^2 - xi)^2/4t)`` is used.  On the
    FFT route the round-off floor is multiplied by ``exp(beta t x)``, so
    where that factor is large (grid edge, large ``|beta t|``) prefer
    ``method="quad"``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if method == "fft":
        moved = _shift_and_diffuse(f0, beta * t * t, t)
    elif method == "quad":
        from .transforms import _check_decay, _toeplitz_apply
        _check_decay(f0, 1e-10)
        shift = beta * t * t
        norm = 1.0 / (2.0 * np.sqrt(np.pi * t))
        support = abs(shift) + np.sqrt(4.0 * t * 46.0)
        moved = _toeplitz_apply(f0, lambda d: norm * np.exp(-(d + shift) ** 2 / (4.0 * t)), support)
    else:
        raise DomainError(f"unknown method {method!r}")
    return moved * np.exp(phase_phi(f0.x, t, beta))


def gleisher_closed_form(x, t: float, beta: float = 0.0):
    """Heat flow of ``exp(-x^2)`` with linear term, in closed form."""
    x = np.asarray(x)
    return np.exp(phase_phi(x, t, beta)) / np.sqrt(1.0 + 4.0 * t) \
        * np.exp(-(x + beta * t * t) ** 2 / (1.0 + 4.0 * t))


def solve_heat_airy(grid: Grid, beta: float, t: float, scale: AiryScale = AiryScale()) -> GridFunction:
    """Heat flow with linear term of the Airy profile: ``exp(Phi) Ai(x + beta t^2, t)``."""
    if not t > 0:
        raise DomainError("t must be positive")
    x = grid.x
    vals = np.exp(phase_phi(x, t, beta)) * airy_two_var(x + beta * t * t, t, scale)
    return GridFunction(grid.x0, grid.dx, vals)


def solve_schrodinger_linear(f0: GridFunction, b: float, tau: float) -> GridFunction:
    """Solve ``i Psi_tau = -Psi_xx + b x Psi`` on a periodic grid.

    Free propagation by the multiplier ``exp(-i tau k^2)``, translation by
    ``b tau^2`` and the phase ``exp(-i Phi(x, tau; b))``.
    """
    if tau == 0:
        return f0
    moved = _shift_and_diffuse(f0, b * tau * tau, 1j * tau)
    return moved * np.exp(-1j * phase_phi(f0.x, tau, b))


def free_gaussian(x, tau: float):
    """``exp(i tau d^2) exp(-x^2)`` in closed form."""
    x = np.asarray(x)
    den = 1.0 + 4j * tau
    return np.exp(-x * x / den) / np.sqrt(den)


@dataclass
class AiryPacketReport:
    tau: float
    x_peak: float
    max_density: float
    expected_x_peak: float


def airy_packet_closed_form(x, b: float, tau: float, scale: AiryScale = AiryScale()):
    """``exp(-i Phi(x,tau;b)) exp(i Theta(x + b tau^2, tau)) Ai((A^3 x + (A^3 b - 1) tau^2)/A^4)``."""
    A = scale.A
    x = np.asarray(x, dtype=float)
    arg = (A ** 3 * x + (A ** 3 * b - 1.0) * tau ** 2) / A ** 4
    phase = -phase_phi(x, tau, b) + theta_phase(x + b * tau * tau, tau, scale)
    return np.exp(1j * phase) * airy_ai(arg)


def expected_peak(b: float, tau: float, scale: AiryScale = AiryScale()) -> float:
    """``x_peak(0) - (b - A^-3) tau^2`` with ``x_peak(0) = A a'_1``."""
    A = scale.A
    return A * AIRY_PEAK - (b - A ** -3) * tau ** 2


def solve_schrodinger_airy(grid: Grid, b: float, tau: float, scale: AiryScale = AiryScale()):
    """Airy initial packet ``Ai(x/A)`` evolved in closed form.

    Returns ``(psi, report)`` where the report carries the peak position of
    ``|psi|^2`` (parabolic refinement), the peak density and the predicted
    peak position.
    """
    psi = GridFunction(grid.x0, grid.dx, airy_packet_closed_form(grid.x, b, tau, scale))
    xp, dens = find_peak(grid.x, np.abs(psi.values) ** 2)
    return psi, AiryPacketReport(tau, xp, dens, expected_peak(b, tau, scale))


def airy_packet_trajectory(grid: Grid, b: float, taus, scale: AiryScale = AiryScale()) -> list:
    return [solve_schrodinger_airy(grid, b, float(tau), scale)[1] for tau in taus]


def _sample_profile(phi, t_grid: np.ndarray) -> np.ndarray:
    if callable(phi):
        return np.asarray(np.broadcast_to(phi(t_grid), t_grid.shape), dtype=float)
    vals = np.asarray(phi, dtype=float)
    if vals.shape != t_grid.shape:
        raise DomainError("sampled profile must match the time grid")
    return vals


def centroid_trajectory(phi, B: float, m_mass: float, t_grid) -> np.ndarray:
    """Airy-coordinate trajectory ``B^3 t^2/(4 m^2) + int_0^t (t - s)/m phi(s) ds``.

    ``phi`` is the applied force along +x, as a callable or samples on
    ``t_grid``; ``t_grid`` must be increasing and start at 0.  The memory
    integral is ``t I0(t) - I1(t)`` with cumulative trapezoidal ``I0 = int phi``
    and ``I1 = int s phi``.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    if t[0] != 0:
        raise DomainError("t_grid must start at 0")
    if B <= 0 or m_mass <= 0:
        raise DomainError("B and m must be positive")
    f = _sample_profile(phi, t)
    i0 = cumulative_trapezoid(f, t, initial=0.0)
    i1 = cumulative_trapezoid(t * f, t, initial=0.0)
    return B ** 3 * t ** 2 / (4.0 * m_mass ** 2) + (t * i0 - i1) / m_mass


def centroid_acceleration(phi, B: float, m_mass: float, t):
    """``B^3/(2 m^2) + phi(t)/m``."""
    t = np.asarray(t, dtype=float)
    return B ** 3 / (2.0 * m_mass ** 2) + _sample_profile(phi, t) / m_mass if callable(phi) \
        else B ** 3 / (2.0 * m_mass ** 2) + np.asarray(phi, dtype=float) / m_mass
