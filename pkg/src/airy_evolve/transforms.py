"""Gauss-Weierstrass and Airy transforms, cubic diffusion and their operator identities.

Every transform has two routes.  The polynomial route works on
:class:`~airy_evolve.polynomials.PolyDense` in exact arithmetic using the
terminating series of the exponential operator.  The grid route works on
:class:`~airy_evolve.grid.GridFunction` either by direct quadrature of the
integral kernel (``method="quad"``) or by a Fourier multiplier on the periodic
grid (``method="fft"``).

Operator forms used below:

* ``exp(b d^2)``            -> multiplier ``exp(-b k^2)``
* Airy transform, scale a  -> ``exp(-(a^3/3) d^3)``, multiplier ``exp(i a^3 k^3 / 3)``
* ``exp(t d^3)``            -> multiplier ``exp(-i t k^3)``
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConvergenceError, DomainError
from .grid import GridFunction, fourier_multiply, translate
from .polynomials import PolyDense, as_fraction, exp_derivative_operator
from .special_fn import airy_ai

EDGE_TOL = 1e-10


def _check_decay(f: GridFunction, edge_tol: float):
    vals = np.abs(f.values)
    peak = vals.max()
    if peak == 0:
        return
    edge = max(vals[0], vals[-1])
    if edge > edge_tol * peak:
        raise ConvergenceError(
            f"input does not decay at the grid edges (|f|edge/|f|max = {edge / peak:.2e}); "
            "apodize it or widen the grid")


def _toeplitz_apply(f: GridFunction, kernel, support: float | None = None) -> GridFunction:
    """``out_i = dx * sum_j K((i - j) dx) f_j``.

    With a finite ``support`` (kernel negligible beyond it) the sum is done
    directly, which keeps the error relative to the local size of ``f``;
    otherwise by FFT convolution over the full kernel.
    """
    n = f.n
    vals = f.values
    half = n - 1
    if support is not None:
        half = min(n - 1, int(math.ceil(support / f.dx)))
    m = np.arange(-half, half + 1)
    kern = kernel(m * f.dx)
    if support is not None:
        out = np.convolve(vals, kern)
    else:
        out = fftconvolve(vals.real, kern) + 1j * fftconvolve(vals.imag, kern) \
            if np.isrealobj(kern) else fftconvolve(vals, kern)
    return f.with_values(out[half: half + n] * f.dx)


def _odd_multiplier(f: GridFunction, phase: np.ndarray) -> np.ndarray:
    """``exp(i phase(k))`` for an odd phase, with the Nyquist bin symmetrised."""
    mult = np.exp(1j * phase)
    if f.n % 2 == 0:
        mult[f.n // 2] = np.cos(phase[f.n // 2])
    return mult


# ---------------------------------------------------------------------------
# Gauss-Weierstrass transform
# ---------------------------------------------------------------------------

def gauss_weierstrass(f, b, method: str = "fft", check_decay: bool = True,
                      edge_tol: float = EDGE_TOL):
    """Apply ``exp(b d^2/dx^2)``, i.e. convolve with the heat kernel of time ``b``.

    Parameters
    ----------
    f : GridFunction or PolyDense
        Polynomials are transformed exactly (``x^n`` -> ``H_n^(2)(x, b)``).
    b : real or complex
        Diffusion time.  ``Re(b) >= 0``; a purely imaginary ``b = i tau`` is
        the free Schrodinger propagator and is only available on the FFT route.
    method : {"fft", "quad"}
        Grid route.  ``"quad"`` sums the Gaussian kernel directly, treating the
        samples as zero outside the grid.
    """
    if isinstance(f, PolyDense):
        return exp_derivative_operator(f, b, 2)
    b = complex(b)
    if not (np.isfinite(b.real) and np.isfinite(b.imag)):
        raise DomainError("diffusion time must be finite")
    if b.real < 0:
        raise DomainError("backward diffusion (Re b < 0) is not supported")
    if b == 0:
        return f
    if method == "fft":
        k = f.grid.k
        return fourier_multiply(f, np.exp(-b * k * k))
    if method == "quad":
        if b.imag != 0:
            raise DomainError("the quadrature route needs a real diffusion time")
        if check_decay:
            _check_decay(f, edge_tol)
        bb = b.real
        norm = 1.0 / (2.0 * math.sqrt(math.pi * bb))
        # exp(-d^2/4b) < 1e-20 beyond this distance
        support = math.sqrt(4.0 * bb * 46.0)
        return _toeplitz_apply(f, lambda d: norm * np.exp(-d * d / (4.0 * bb)), support)
    raise DomainError(f"unknown method {method!r}")


def gauss_weierstrass_at(func, x, b: float, n_nodes: int = 120):
    """Heat-kernel transform of a callable at points ``x`` by Gauss-Hermite quadrature.

    ``(1/sqrt(pi)) sum_j w_j f(x + 2 sqrt(b) u_j)``; appropriate for bounded
    smooth ``func`` such as ``Ai``, which need no apodization on this route.
    """
    if b <= 0:
        raise DomainError("Gauss-Hermite route needs b > 0")
    u, w = np.polynomial.hermite.hermgauss(n_nodes)
    x = np.asarray(x, dtype=float)
    pts = x[..., None] + 2.0 * math.sqrt(b) * u
    return np.sum(w * func(pts), axis=-1) / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Airy transform and cubic diffusion
# ---------------------------------------------------------------------------

def airy_transform(f, alpha, method: str = "quad", check_decay: bool = True,
                   edge_tol: float = EDGE_TOL):
    """Airy transform ``(1/|alpha|) int f(x) Ai((eta - x)/alpha) dx``.

    Equivalent to ``exp(-(alpha^3/3) d^3)``.  The normalisation uses
    ``|alpha|`` so that negative scales (which occur when removing a linear
    potential) keep this operator meaning.
    """
    if alpha == 0 or not np.isfinite(float(alpha)):
        raise DomainError("Airy transform scale must be a nonzero finite number")
    if isinstance(f, PolyDense):
        a = as_fraction(alpha)
        return exp_derivative_operator(f, -a ** 3 / 3, 3)
    alpha = float(alpha)
    if method == "fft":
        k = f.grid.k
        return fourier_multiply(f, _odd_multiplier(f, alpha ** 3 * k ** 3 / 3.0))
    if method == "quad":
        if check_decay:
            _check_decay(f, edge_tol)
        return _toeplitz_apply(f, lambda d: airy_ai(d / alpha) / abs(alpha))
    raise DomainError(f"unknown method {method!r}")


def cubic_scale(t: float) -> float:
    """Airy-transform scale realising ``exp(t d^3)``: ``-(3t)^(1/3)``."""
    return -float(np.cbrt(3.0 * t))


def cubic_evolution(g, t, method: str = "quad", check_decay: bool = True):
    """Solve ``G_t = G_xxx`` forward to time ``t``: ``G = exp(t d^3) g``.

    Polynomials go through the terminating series (``x^n`` -> ``H_n^(3)``);
    grids through the Airy kernel ``(3t)^(-1/3) Ai((xi - x)/(3t)^(1/3))``.
    """
    if t == 0:
        return g
    if isinstance(g, PolyDense):
        return exp_derivative_operator(g, t, 3)
    if method == "fft":
        k = g.grid.k
        return fourier_multiply(g, _odd_multiplier(g, -float(t) * k ** 3))
    return airy_transform(g, cubic_scale(float(t)), method=method, check_decay=check_decay)


def exponential_cube_integral(u: float, lower: float | None = None, upper: float = 12.0,
                              n: int = 200_001) -> float:
    """``int exp(u s) Ai(s) ds``; equals ``exp(u^3/3)`` for ``u > 0``.

    Trapezoidal rule on ``[lower, upper]``.  The lower limit defaults to the
    point where ``exp(u s)`` has fallen below 1e-18.
    """
    if u <= 0:
        raise DomainError("the integral converges only for u > 0")
    if lower is None:
        lower = -42.0 / u
    s = np.linspace(lower, upper, n)
    return float(np.trapezoid(np.exp(u * s) * airy_ai(s), s))


# ---------------------------------------------------------------------------
# Operator identities on exact polynomials
# ---------------------------------------------------------------------------

def airy_position_operator(poly: PolyDense, alpha) -> PolyDense:
    """Image of the position operator under the Airy transform: ``eta - alpha^3 d^2``."""
    a = as_fraction(alpha)
    return poly.times_x() - poly.derivative(2).scale(a ** 3)


def weyl_conjugation_check(n: int, alpha) -> "Fraction":
    """Largest coefficient gap between ``(eta - alpha^3 d^2) eta^n`` and its conjugated form.

    The conjugated form is ``exp(-(alpha^3/3) d^3) eta exp((alpha^3/3) d^3) eta^n``.
    Exact rational arithmetic; the result is an exact ``Fraction``.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    a3 = as_fraction(alpha) ** 3
    f = PolyDense.monomial(n)
    lhs = airy_position_operator(f, alpha)
    inner = exp_derivative_operator(f, a3 / 3, 3).times_x()
    rhs = exp_derivative_operator(inner, -a3 / 3, 3)
    return (lhs - rhs).max_abs_coeff()


def weyl_commutator_residual(poly: PolyDense, alpha) -> "Fraction":
    """Largest coefficient of ``[X, d] f + f`` with ``X = eta - alpha^3 d^2``."""
    x_d = airy_position_operator(poly.derivative(), alpha)
    d_x = airy_position_operator(poly, alpha).derivative()
    return (x_d - d_x + poly).max_abs_coeff()


# ---------------------------------------------------------------------------
# Grid-level identities
# ---------------------------------------------------------------------------

def chain_rule_sides(g: GridFunction, p: float, q: float, method: str = "fft",
                     check_decay: bool = True):
    """Both sides of ``exp(p d^2) exp(qx) g = exp(p q^2) exp(qx) exp(2pq d) exp(p d^2) g``.

    Returns ``(lhs, rhs)`` as GridFunctions.
    """
    x = g.x
    lhs = gauss_weierstrass(g * np.exp(q * x), p, method=method, check_decay=check_decay)
    diffused = gauss_weierstrass(g, p, method=method, check_decay=check_decay)
    rhs = translate(diffused, 2.0 * p * q) * (math.exp(p * q * q) * np.exp(q * x))
    return lhs, rhs


def airy_transformed_solution(f0: GridFunction, b: float, tau: float, method: str = "fft"):
    """Solution of the linear-potential Schrodinger equation in Airy-transformed space.

    With scale ``alpha = -(1/b)^(1/3)`` the transformed equation reduces to
    ``i Phi_tau = b eta Phi``, so ``Phi(eta, tau) = exp(-i b eta tau) Phi(eta, 0)``:
    the phase rate depends on ``eta``.  Returns ``(alpha, Phi(., tau))``.
    """
    if b == 0:
        raise DomainError("b must be nonzero")
    alpha = -float(np.cbrt(1.0 / b))
    phi0 = airy_transform(f0, alpha, method=method)
    return alpha, phi0 * np.exp(-1j * b * f0.x * tau)
