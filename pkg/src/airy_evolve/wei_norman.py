"""Wei-Norman ordering for ``F_t = alpha(t) F_xx + beta(t) x F``.

The evolution operator is written ``exp(a + b d + c d^2) exp(d x)`` with
ordering functions obeying

    d' = beta,  c' = alpha,  b' = -2 beta c,  a' = -beta b,  a(0)=b(0)=c(0)=d(0)=0,

and re-factorised as ``exp(Phi~) S D``: phase ``a + d (c d + b + x)``, shift by
``b + 2 c d`` and diffusion time ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import ConvergenceError, DomainError
from .grid import GridFunction, fourier_multiply

RTOL = 1e-9
ATOL = 1e-12


# ---------------------------------------------------------------------------
# Coefficient presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """A named scalar function of time with an optional closed-form antiderivative."""

    name: str
    func: Callable[[float], float]
    antiderivative: Callable[[float], float] | None = None
    breakpoints: tuple = ()

    def __call__(self, t):
        return self.func(t)

    def integral(self, t: float) -> float | None:
        if self.antiderivative is None:
            return None
        return self.antiderivative(t) - self.antiderivative(0.0)


def constant(value: float) -> Profile:
    v = float(value)
    return Profile(f"constant:{v!r}", lambda t: v + 0.0 * np.asarray(t), lambda t: v * t)


def linear(c0: float, c1: float) -> Profile:
    c0, c1 = float(c0), float(c1)
    return Profile(f"linear:{c0!r},{c1!r}", lambda t: c0 + c1 * np.asarray(t),
                   lambda t: c0 * t + 0.5 * c1 * t * t)


def sine(amplitude: float = 1.0, omega: float = 1.0, offset: float = 0.0) -> Profile:
    a, w, o = float(amplitude), float(omega), float(offset)
    return Profile(f"sin:{a!r},{w!r},{o!r}", lambda t: o + a * np.sin(w * np.asarray(t)),
                   lambda t: o * t - a * math.cos(w * t) / w)


def polynomial(coeffs: Sequence[float]) -> Profile:
    cs = [float(c) for c in coeffs]
    poly = np.polynomial.Polynomial(cs)
    anti = poly.integ()
    return Profile("poly:" + ",".join(repr(c) for c in cs), lambda t: poly(np.asarray(t)),
                   lambda t: float(anti(t)))


def piecewise_constant(times: Sequence[float], values: Sequence[float]) -> Profile:
    """``values[i]`` on ``[times[i], times[i+1])``; ``times[0]`` must be 0."""
    times = [float(t) for t in times]
    values = [float(v) for v in values]
    if len(times) != len(values) or not times or times[0] != 0.0 or any(
            b <= a for a, b in zip(times, times[1:])):
        raise DomainError("piecewise profile needs increasing start times beginning at 0")
    tt = np.array(times)
    vv = np.array(values)

    def func(t):
        idx = np.searchsorted(tt, np.asarray(t), side="right") - 1
        return vv[np.clip(idx, 0, len(vv) - 1)]

    def anti(t):
        total = 0.0
        for i, start in enumerate(times):
            end = times[i + 1] if i + 1 < len(times) else math.inf
            if t <= start:
                break
            total += values[i] * (min(t, end) - start)
        return total

    label = ",".join(f"{v!r}@{t!r}" for t, v in zip(times, values))
    return Profile(f"piecewise:{label}", func, anti, tuple(times[1:]))


PRESETS = {
    "constant": constant,
    "linear": linear,
    "sin": sine,
    "poly": polynomial,
    "piecewise": None,  # parsed separately: value@start pairs
}


def parse_profile(text: str) -> Profile:
    """Parse ``name:args`` (e.g. ``constant:1``, ``sin:1,2``, ``piecewise:1@0,2@0.5``)."""
    name, _, args = text.strip().partition(":")
    name = name.strip().lower()
    if name not in PRESETS:
        raise DomainError(f"unknown profile {name!r}; choose from {sorted(PRESETS)}")
    try:
        if name == "piecewise":
            pairs = [item.split("@") for item in args.split(",") if item.strip()]
            return piecewise_constant([float(t) for _, t in pairs], [float(v) for v, _ in pairs])
        vals = [float(a) for a in args.split(",") if a.strip()]
        if name == "poly":
            return polynomial(vals)
        return PRESETS[name](*vals)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad arguments for profile {text!r}: {exc}") from None


@dataclass(frozen=True)
class CoeffFunctions:
    """Diffusion coefficient ``alpha(t)`` and linear-potential coefficient ``beta(t)``."""

    alpha: Profile
    beta: Profile

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted(set(self.alpha.breakpoints) | set(self.beta.breakpoints)))


@dataclass(frozen=True)
class WeiNormanCoeffs:
    t: float
    a: float
    b: float
    c: float
    d: float

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def phase_constant(self) -> float:
        """``a + d (c d + b)``: the x-independent part of the phase."""
        return self.a + self.d * (self.c * self.d + self.b)

    @property
    def shift(self) -> float:
        return self.b + 2.0 * self.c * self.d

    def phase(self, x):
        return self.a + self.d * (self.c * self.d + self.b + np.asarray(x))


# ---------------------------------------------------------------------------
# Two independent evaluations of the ordering functions
# ---------------------------------------------------------------------------

def _rhs(coeffs: CoeffFunctions, lo: float, hi: float):
    # Profiles are sampled strictly inside the segment so that a stage landing
    # on a breakpoint does not pick up the next piece.
    eps = 1e-12 * (hi - lo)

    def rhs(t, y):
        a, b, c, d = y
        tt = min(max(t, lo + eps), hi - eps)
        beta = float(coeffs.beta(tt))
        return [-beta * b, -2.0 * beta * c, float(coeffs.alpha(tt)), beta]
    return rhs


def _segments(t_end: float, breakpoints) -> list:
    cuts = [0.0] + [p for p in breakpoints if 0.0 < p < t_end] + [t_end]
    return list(zip(cuts[:-1], cuts[1:]))


def _ode_path(coeffs: CoeffFunctions, times: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    out = np.zeros((times.size, 4))
    y = np.zeros(4)
    t_end = float(times[-1])
    for lo, hi in _segments(t_end, coeffs.breakpoints):
        mask = (times > lo) & (times <= hi)
        sol = solve_ivp(_rhs(coeffs, lo, hi), (lo, hi), y, method="DOP853", rtol=rtol,
                        atol=atol, dense_output=True)
        if not sol.success:
            raise ConvergenceError(f"ODE integration failed on [{lo}, {hi}]: {sol.message}")
        if mask.any():
            out[mask] = sol.sol(times[mask]).T
        y = sol.y[:, -1]
    return out


def _quad(func, lo, hi, points, rtol, atol) -> float:
    if hi <= lo:
        return 0.0
    inner = [p for p in points if lo < p < hi] or None
    val, err = quad(func, lo, hi, points=inner, epsabs=atol, epsrel=rtol, limit=200)
    if not np.isfinite(val) or err > max(1e3 * atol, 1e3 * rtol * abs(val)):
        raise ConvergenceError(f"quadrature on [{lo}, {hi}] did not converge (err {err:.2e})")
    return val


def _quadrature_path(coeffs: CoeffFunctions, t: float, rtol: float, atol: float) -> tuple:
    pts = coeffs.breakpoints
    alpha, beta = coeffs.alpha, coeffs.beta
    # Inner levels are integrated more tightly than the outer ones.
    r_in, a_in = rtol * 1e-2, atol * 1e-2

    def c_of(s):
        closed = alpha.integral(s)
        if closed is not None:
            return closed
        return _quad(lambda u: float(alpha(u)), 0.0, s, pts, r_in, a_in)

    def d_of(s):
        closed = beta.integral(s)
        if closed is not None:
            return closed
        return _quad(lambda u: float(beta(u)), 0.0, s, pts, r_in, a_in)

    def b_of(s):
        return -2.0 * _quad(lambda u: float(beta(u)) * c_of(u), 0.0, s, pts, r_in, a_in)

    c = c_of(t)
    d = d_of(t)
    b = b_of(t)
    # a(t) = 2 int beta(t') int_0^t' beta(t'') c(t'') dt'' dt' = -int beta b
    a = -_quad(lambda s: float(beta(s)) * b_of(s), 0.0, t, pts, rtol, atol)
    return a, b, c, d


def wei_norman_coeffs(coeffs: CoeffFunctions, t: float, method: str = "ode",
                      rtol: float = RTOL, atol: float = ATOL) -> WeiNormanCoeffs:
    """Ordering functions ``(a, b, c, d)`` at time ``t``.

    ``method="ode"`` integrates the ordering ODEs with an adaptive
    Dormand-Prince stepper (restarted at profile breakpoints);
    ``method="quadrature"`` evaluates the nested integrals directly.
    All four vanish at ``t = 0``.
    """
    if method not in ("ode", "quadrature", "nested-quadrature"):
        raise DomainError(f"unknown method {method!r}")
    if t == 0:
        return WeiNormanCoeffs(0.0, 0.0, 0.0, 0.0, 0.0)
    if not t > 0:
        raise DomainError("t must be non-negative")
    if method == "ode":
        vals = _ode_path(coeffs, np.array([float(t)]), rtol, atol)[0]
        return WeiNormanCoeffs(float(t), *map(float, vals))
    return WeiNormanCoeffs(float(t), *_quadrature_path(coeffs, float(t), rtol, atol))


def wei_norman_table(coeffs: CoeffFunctions, times, method: str = "ode") -> list:
    """Ordering functions on an increasing set of times (``t = 0`` allowed)."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise DomainError("times must be increasing and non-negative")
    rows = []
    positive = times[times > 0]
    if method == "ode" and positive.size:
        vals = _ode_path(coeffs, positive, RTOL, ATOL)
        table = dict(zip(positive.tolist(), vals))
    else:
        table = {t: wei_norman_coeffs(coeffs, t, method).as_tuple() for t in positive.tolist()}
    for t in times.tolist():
        if t == 0:
            rows.append(WeiNormanCoeffs(0.0, 0.0, 0.0, 0.0, 0.0))
        else:
            rows.append(WeiNormanCoeffs(t, *map(float, table[t])))
    return rows


def factorized_evolution(coeffs: CoeffFunctions, f0: GridFunction, t: float,
                         method: str = "ode") -> GridFunction:
    """``exp(Phi~(x, t)) S(t) D(t) f0`` built from the ordering functions."""
    wn = wei_norman_coeffs(coeffs, t, method)
    if wn.c < 0:
        raise DomainError("accumulated diffusion time c(t) is negative (anti-diffusive)")
    k = f0.grid.k
    mult = np.exp(-wn.c * k * k + 1j * k * wn.shift)
    if f0.n % 2 == 0:
        ny = f0.n // 2
        mult[ny] = np.exp(-wn.c * k[ny] ** 2) * np.cos(k[ny] * wn.shift)
    return fourier_multiply(f0, mult) * np.exp(wn.phase(f0.x))


@dataclass(frozen=True)
class SchrodingerOrdering:
    """Ordering data for ``i Psi_tau = -Psi_xx - phi(tau) x Psi``.

    Obtained from the heat-type functions with ``alpha = i``,
    ``beta = i phi``: diffusion time ``i tau``, real shift and purely
    imaginary phase.
    """

    tau: float
    shift: float
    phase_const: float
    phase_slope: float

    def phase(self, x):
        return self.phase_const + self.phase_slope * np.asarray(x)


def schrodinger_ordering(force: Profile, tau: float, rtol: float = RTOL, atol: float = ATOL,
                         ) -> SchrodingerOrdering:
    """Real-valued integrals behind the time-dependent-field Schrodinger solution.

    With ``F(s) = int_0^s phi`` and ``G(s) = int_0^s s' phi(s') ds'``:
    ``c = i tau``, ``d = i F``, ``b = 2 G`` and ``a = -2 i int phi G``.  The
    shift is ``b + 2 c d = -2 int_0^tau (tau - s) phi(s) ds`` (the packet moves
    by minus this) and the phase ``a + d (c d + b + x)`` is ``i`` times a real
    affine function of ``x``.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    pts = force.breakpoints

    def big_f(s):
        closed = force.integral(s)
        if closed is not None:
            return closed
        return _quad(lambda u: float(force(u)), 0.0, s, pts, rtol * 1e-2, atol * 1e-2)

    def big_g(s):
        return _quad(lambda u: u * float(force(u)), 0.0, s, pts, rtol * 1e-2, atol * 1e-2)

    F = big_f(tau)
    G = big_g(tau)
    bb = 2.0 * G
    # a = -int beta b = -i int phi(s) 2 G(s) ds
    a_im = -_quad(lambda s: float(force(s)) * 2.0 * big_g(s), 0.0, tau, pts, rtol, atol)
    # phase = a + d (c d + b + x), with c = i tau, d = i F
    #       = i a_im + i F (-tau F + 2 G + x)
    phase_const = a_im + F * (-tau * F + bb)
    return SchrodingerOrdering(tau=float(tau), shift=2.0 * (G - tau * F),
                               phase_const=phase_const, phase_slope=F)


def factorized_schrodinger(force: Profile, f0: GridFunction, tau: float) -> GridFunction:
    """Solve ``i Psi_tau = -Psi_xx - phi(tau) x Psi`` by the factorised operator.

    ``phi`` is the applied force along +x; a constant ``phi = -b`` reproduces
    :func:`~airy_evolve.evolution.solve_schrodinger_linear` with field ``b``.
    """
    o = schrodinger_ordering(force, tau)
    k = f0.grid.k
    mult = np.exp(-1j * tau * k * k + 1j * k * o.shift)
    if f0.n % 2 == 0:
        ny = f0.n // 2
        mult[ny] = np.exp(-1j * tau * k[ny] ** 2) * np.cos(k[ny] * o.shift)
    return fourier_multiply(f0, mult) * np.exp(1j * o.phase(f0.x))
