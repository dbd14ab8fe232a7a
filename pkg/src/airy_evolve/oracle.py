"""Reference PDE solvers used to validate the operator-factorised solutions.

Only :mod:`airy_evolve.grid` (and the error types) are imported here, so the
comparisons against :mod:`airy_evolve.evolution` and
:mod:`airy_evolve.transforms` are genuinely independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, StepSizeError, WidenDomainError
from .grid import Grid, GridFunction, apodization_window


@dataclass(frozen=True)
class OracleConfig:
    """Grid, time step, apodization window and scheme of a reference run."""

    x_min: float = -20.0
    x_max: float = 20.0
    n_grid: int = 2048
    dt: float = 1e-3
    apod_center: float = 0.0
    apod_width: float = 15.0
    scheme: str = "crank-nicolson"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise DomainError("x_min must be below x_max")
        if self.n_grid < 256:
            raise DomainError("n_grid must be at least 256")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.x_min <= self.apod_center <= self.x_max or self.apod_width <= 0:
            raise DomainError("apodization window must sit inside the domain")
        if self.scheme not in ("crank-nicolson", "split-step-fourier"):
            raise DomainError(f"unknown scheme {self.scheme!r}")

    def grid(self) -> Grid:
        return Grid.linspace(self.x_min, self.x_max, self.n_grid)

    def window(self, x) -> np.ndarray:
        return apodization_window(x, self.apod_center, self.apod_width)


def _as_profile(value) -> Callable[[float], float]:
    if callable(value):
        return lambda t: float(value(t))
    v = float(value)
    return lambda t: v


def _check_edges(values: np.ndarray, band: float = 0.02, tol: float = 1e-8):
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return
    m = max(2, int(band * mag.size))
    edge = max(mag[:m].max(), mag[-m:].max())
    if edge > tol * peak:
        raise WidenDomainError(
            f"solution reaches the boundary (edge/max = {edge / peak:.2e}); widen the domain")


def crank_nicolson_heat(f0: GridFunction, beta_of_t, alpha_of_t, t_final: float,
                        cfg: OracleConfig, check_edges: bool = True) -> GridFunction:
    """Crank-Nicolson solution of ``F_t = alpha(t) F_xx + beta(t) x F``.

    Second-order central differences in space with zero Dirichlet values at
    the two end points; the operator is evaluated at both ends of each step.
    ``beta_of_t`` and ``alpha_of_t`` may be numbers or callables.
    """
    if t_final < 0:
        raise DomainError("t_final must be non-negative")
    if t_final == 0:
        return f0
    alpha = _as_profile(alpha_of_t)
    beta = _as_profile(beta_of_t)
    x = f0.x[1:-1]
    u = np.array(f0.values[1:-1])
    m = u.size
    inv_dx2 = 1.0 / f0.dx ** 2
    n_steps = max(1, int(math.ceil(t_final / cfg.dt - 1e-12)))
    dt = t_final / n_steps

    def bands(t):
        a = alpha(t)
        if a < 0:
            raise DomainError("alpha(t) must be non-negative")
        main = -2.0 * a * inv_dx2 + beta(t) * x
        off = np.full(m - 1, a * inv_dx2)
        return main, off

    t = 0.0
    main0, off0 = bands(t)
    ab = np.zeros((3, m), dtype=complex)
    for _ in range(n_steps):
        rhs = u + 0.5 * dt * (main0 * u)
        rhs[:-1] += 0.5 * dt * off0 * u[1:]
        rhs[1:] += 0.5 * dt * off0 * u[:-1]
        main1, off1 = bands(t + dt)
        ab[0, 1:] = -0.5 * dt * off1
        ab[1, :] = 1.0 - 0.5 * dt * main1
        ab[2, :-1] = -0.5 * dt * off1
        u = solve_banded((1, 1), ab, rhs)
        t += dt
        main0, off0 = main1, off1
    out = np.zeros(f0.n, dtype=complex)
    out[1:-1] = u
    if check_edges:
        _check_edges(out)
    return f0.with_values(out)


@dataclass
class SplitStepDiagnostics:
    n_steps: int
    norm_drift: float
    times: list = field(default_factory=list)
    peak_positions: list = field(default_factory=list)
    peak_densities: list = field(default_factory=list)
    edge_amplitude: float = 0.0


def _peak(x, dens):
    i = int(np.argmax(dens))
    if 0 < i < dens.size - 1:
        y0, y1, y2 = dens[i - 1], dens[i], dens[i + 1]
        den = y0 - 2 * y1 + y2
        if den != 0:
            delta = 0.5 * (y0 - y2) / den
            return x[i] + delta * (x[1] - x[0]), y1 - 0.25 * (y0 - y2) * delta
    return x[i], dens[i]


def split_step_schrodinger(f0: GridFunction, b, tau_final: float, cfg: OracleConfig,
                           record_every: int = 0, peak_region=None,
                           drift_tol: float = 1e-6) -> tuple[GridFunction, SplitStepDiagnostics]:
    """Strang-split spectral solution of ``i Psi_tau = -Psi_xx + b(tau) x Psi``.

    Half potential kick, full kinetic step ``exp(-i k^2 dt)``, half kick; a
    time-dependent field is sampled at the step midpoint.  The grid is
    periodic, so results are only meaningful away from the wrap point.

    ``peak_region`` restricts peak tracking to ``lo <= x <= hi``.  Raises
    :class:`StepSizeError` if the norm drifts by more than ``drift_tol``.
    """
    field_of = _as_profile(b)
    x = f0.x
    k = f0.grid.k
    psi = np.array(f0.values)
    diag = SplitStepDiagnostics(n_steps=0, norm_drift=0.0)
    mask = np.ones(x.size, dtype=bool)
    if peak_region is not None:
        mask = (x >= peak_region[0]) & (x <= peak_region[1])
    xm = x[mask]

    def record(t):
        dens = np.abs(psi[mask]) ** 2
        xp, dp = _peak(xm, dens)
        diag.times.append(t)
        diag.peak_positions.append(float(xp))
        diag.peak_densities.append(float(dp))

    norm0 = np.sqrt(np.sum(np.abs(psi) ** 2))
    if tau_final == 0:
        record(0.0)
        return f0, diag
    n_steps = max(1, int(math.ceil(abs(tau_final) / cfg.dt - 1e-12)))
    dt = tau_final / n_steps
    kinetic = np.exp(-1j * k * k * dt)
    if record_every:
        record(0.0)
    for step in range(n_steps):
        bm = field_of((step + 0.5) * dt)
        half_kick = np.exp(-0.5j * bm * x * dt)
        psi = half_kick * np.fft.ifft(kinetic * np.fft.fft(half_kick * psi))
        if record_every and (step + 1) % record_every == 0:
            record((step + 1) * dt)
    if not record_every:
        record(tau_final)
    norm1 = np.sqrt(np.sum(np.abs(psi) ** 2))
    diag.n_steps = n_steps
    diag.norm_drift = float(abs(norm1 - norm0) / norm0)
    m = max(2, int(0.02 * x.size))
    diag.edge_amplitude = float(max(np.abs(psi[:m]).max(), np.abs(psi[-m:]).max())
                                / np.abs(psi).max())
    if diag.norm_drift > drift_tol:
        raise StepSizeError(f"norm drift {diag.norm_drift:.2e} exceeds {drift_tol:.0e}")
    return f0.with_values(psi), diag


def crank_nicolson_schrodinger(f0: GridFunction, b, tau_final: float, cfg: OracleConfig,
                               check_edges: bool = True) -> GridFunction:
    """Crank-Nicolson cross-check for the Schrodinger equation on a non-periodic grid."""
    if tau_final == 0:
        return f0
    field_of = _as_profile(b)
    x = f0.x[1:-1]
    psi = np.array(f0.values[1:-1])
    m = psi.size
    inv_dx2 = 1.0 / f0.dx ** 2
    n_steps = max(1, int(math.ceil(abs(tau_final) / cfg.dt - 1e-12)))
    dt = tau_final / n_steps
    off = np.full(m - 1, -inv_dx2)
    ab = np.zeros((3, m), dtype=complex)
    for step in range(n_steps):
        bm = field_of((step + 0.5) * dt)
        main = 2.0 * inv_dx2 + bm * x  # H = -d^2 + b x
        rhs = psi - 0.5j * dt * main * psi
        rhs[:-1] -= 0.5j * dt * off * psi[1:]
        rhs[1:] -= 0.5j * dt * off * psi[:-1]
        ab[0, 1:] = 0.5j * dt * off
        ab[1, :] = 1.0 + 0.5j * dt * main
        ab[2, :-1] = 0.5j * dt * off
        psi = solve_banded((1, 1), ab, rhs)
    out = np.zeros(f0.n, dtype=complex)
    out[1:-1] = psi
    if check_edges:
        _check_edges(out, tol=1e-6)
    return f0.with_values(out)
