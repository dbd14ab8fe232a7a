"""Uniform 1-D grids, sampled functions and spectral helpers.

Everything that needs to exchange sampled data (transforms, solvers and the
validation oracles) goes through :class:`GridFunction`.  The helpers here are
deliberately minimal so that the oracle module can depend on this file alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``x_j = x0 + j*dx`` for ``j = 0 .. n-1``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x0) and np.isfinite(self.dx)) or self.dx <= 0:
            raise DomainError(f"grid spacing must be positive and finite, got {self.dx!r}")
        if self.n < 2:
            raise DomainError("a grid needs at least two points")

    @classmethod
    def linspace(cls, x_min: float, x_max: float, n: int) -> "Grid":
        if not x_max > x_min:
            raise DomainError("x_max must exceed x_min")
        if n < 2:
            raise DomainError("a grid needs at least 2 points")
        return cls(float(x_min), (x_max - x_min) / (n - 1), int(n))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x_max(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return GridFunction(self.x0, self.dx, np.asarray(func(self.x)))

    def zeros(self) -> "GridFunction":
        return GridFunction(self.x0, self.dx, np.zeros(self.n, dtype=complex))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a uniform grid."""

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex, copy=True).reshape(-1)
        if vals.size < 2:
            raise DomainError("a GridFunction needs at least two samples")
        if not np.all(np.isfinite(vals)):
            raise DomainError("GridFunction samples must be finite")
        if not self.dx > 0 or not np.isfinite(self.dx):
            raise DomainError(f"grid spacing must be positive and finite, got {self.dx!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "values", vals)

    @property
    def grid(self) -> Grid:
        return Grid(self.x0, self.dx, self.values.size)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x0, self.dx, values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.n == other.n and np.isclose(self.x0, other.x0)
                and np.isclose(self.dx, other.dx))

    def norm(self) -> float:
        """Discrete L2 norm (rectangle rule)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.dx))

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            if not self.same_grid(other):
                raise DomainError("GridFunctions live on different grids")
            return other.values
        return other

    def __mul__(self, other):
        return self.with_values(self.values * self._other_values(other))

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values + self._other_values(other))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values - self._other_values(other))


def apodization_window(x, center: float, width: float, order: int = 8) -> np.ndarray:
    """Super-Gaussian window ``exp(-((x - center)/width)**order)``."""
    if width <= 0:
        raise DomainError("window width must be positive")
    return np.exp(-(((np.asarray(x) - center) / width) ** order))


def apodize(f: GridFunction, center: float, width: float, order: int = 8) -> GridFunction:
    return f.with_values(f.values * apodization_window(f.x, center, width, order))


def window_interior(x, center: float, width: float, fraction: float = 0.6) -> np.ndarray:
    """Boolean mask of the central ``fraction`` of a window (tolerances hold there)."""
    return np.abs(np.asarray(x) - center) <= fraction * width


def fourier_multiply(f: GridFunction, multiplier: np.ndarray) -> GridFunction:
    """Apply a Fourier multiplier ``m(k)`` (given in FFT order) to periodic samples."""
    return f.with_values(np.fft.ifft(np.fft.fft(f.values) * multiplier))


def translate(f: GridFunction, shift: float) -> GridFunction:
    """Band-limited shift: returns samples of ``f(x + shift)``."""
    if shift == 0:
        return f
    k = f.grid.k
    mult = np.exp(1j * k * shift)
    if f.n % 2 == 0:
        # The Nyquist mode has no well-defined sign under an odd multiplier.
        mult[f.n // 2] = np.cos(k[f.n // 2] * shift)
    return fourier_multiply(f, mult)


def spectral_derivative(f: GridFunction, order: int = 1) -> GridFunction:
    k = f.grid.k
    mult = (1j * k) ** order
    if f.n % 2 == 0 and order % 2 == 1:
        mult[f.n // 2] = 0.0
    return fourier_multiply(f, mult)


def relative_l2(a, b) -> float:
    """``||a - b|| / ||b||`` on plain arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def relative_linf(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def find_peak(x, y) -> tuple[float, float]:
    """Location and height of the maximum of ``y`` via a three-point parabola."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        return float(x[i]), float(y[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(x[i]), float(y1)
    delta = 0.5 * (y0 - y2) / denom
    dx = x[i + 1] - x[i]
    return float(x[i] + delta * dx), float(y1 - 0.25 * (y0 - y2) * delta)
