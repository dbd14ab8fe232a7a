"""Airy function Ai(x), its heat-flow extension Ai(x, z) and the free-propagation form.

Conventions
-----------
The integrand is ``cos(xi**3/3 + (x/A)*xi)``: only the cube carries the factor
1/3.  With this choice ``exp(z d^2/dx^2) Ai(x/A)`` has the damped integral

    Ai(x, z) = 1/pi int_0^inf cos(xi^3/3 + x xi/A) exp(-z xi^2/A^2) dxi

and the free Schrodinger propagator ``exp(i tau d^2/dx^2)`` maps ``Ai(x/A)`` to
``exp(i Theta) Ai((A^3 x - tau^2)/A^4)`` with
``Theta = (tau/A^6) (A^3 x - 2 tau^2/3)``.

Numerically, ``Ai`` itself is evaluated from the Maclaurin series of
``y'' = x y`` for moderate ``|x|`` and from the classical asymptotic
expansions outside.  The integral representations are evaluated by an
independent route: the real line is shifted to ``Im t = c`` where the cubic
phase turns into Gaussian damping, and the trapezoidal rule is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

AI0 = 0.355028053887817239260063186004  # Ai(0)
AIP0 = -0.258819403792806798405183560189  # Ai'(0)

# Beyond this |x| the asymptotic expansions are used.
SERIES_LIMIT = 6.0


@dataclass(frozen=True)
class AiryScale:
    """Length scale ``A`` in ``Ai(x/A)``."""

    A: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.A) and self.A > 0):
            raise DomainError(f"Airy scale A must be positive, got {self.A!r}")


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls the contour-shifted trapezoidal evaluation of the Airy integrals.

    ``xi_max`` caps the half-width of the integration interval and
    ``n_points`` is the minimum number of nodes; both grow automatically as
    far as the cap allows to reach ``abs_tol``.
    """

    xi_max: float = 200.0
    n_points: int = 64
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_points: int = 400_000

    def __post_init__(self):
        if self.xi_max <= 0:
            raise DomainError("xi_max must be positive")
        if self.n_points < 16:
            raise DomainError("n_points must be at least 16")
        for tol in (self.abs_tol, self.rel_tol):
            if not 0 < tol < 1:
                raise DomainError("tolerances must lie in (0, 1)")


DEFAULT_QUAD = QuadratureConfig()


def _check_finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy function argument must be finite")
    return arr


def _airy_series(x: np.ndarray) -> np.ndarray:
    """Maclaurin series ``Ai = Ai(0) f(x) + Ai'(0) g(x)``."""
    x3 = x ** 3
    f_term = np.ones_like(x)
    g_term = x.copy()
    f_sum = f_term.copy()
    g_sum = g_term.copy()
    for k in range(200):
        f_term = f_term * x3 / ((3 * k + 2) * (3 * k + 3))
        g_term = g_term * x3 / ((3 * k + 3) * (3 * k + 4))
        f_sum += f_term
        g_sum += g_term
        if np.all(np.abs(f_term) + np.abs(g_term) <= 1e-18 * (np.abs(f_sum) + np.abs(g_sum))):
            break
    return AI0 * f_sum + AIP0 * g_sum


def _asymptotic_coeffs(n: int) -> np.ndarray:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    return u


_U = _asymptotic_coeffs(40)


def _truncated_sum(terms: np.ndarray) -> np.ndarray:
    """Sum an asymptotic series (rows = terms) up to its smallest term."""
    mags = np.abs(terms)
    out = np.zeros(terms.shape[1])
    for j in range(terms.shape[1]):
        col = mags[:, j]
        stop = int(np.argmin(col))
        out[j] = terms[: stop + 1, j].sum()
    return out


def _airy_asymptotic_pos(x: np.ndarray) -> np.ndarray:
    zeta = 2.0 / 3.0 * x ** 1.5
    k = np.arange(_U.size)[:, None]
    terms = ((-1.0) ** k) * _U[:, None] / zeta[None, :] ** k
    s = _truncated_sum(terms)
    return np.exp(-zeta) / (2.0 * math.sqrt(math.pi) * x ** 0.25) * s


def _airy_asymptotic_neg(x: np.ndarray) -> np.ndarray:
    ax = -x
    zeta = 2.0 / 3.0 * ax ** 1.5
    half = _U.size // 2
    j = np.arange(half)[:, None]
    even = ((-1.0) ** j) * _U[0::2][:half, None] / zeta[None, :] ** (2 * j)
    odd = ((-1.0) ** j) * _U[1::2][:half, None] / zeta[None, :] ** (2 * j + 1)
    p = _truncated_sum(even)
    q = _truncated_sum(odd)
    phase = zeta + math.pi / 4.0
    return (np.sin(phase) * p - np.cos(phase) * q) / (math.sqrt(math.pi) * ax ** 0.25)


def airy_ai(x):
    """Airy function of the first kind for real arguments.

    Accepts scalars or arrays; returns the same shape.
    """
    arr = _check_finite(x)
    flat = np.atleast_1d(arr).astype(float).ravel()
    out = np.empty_like(flat)
    mid = np.abs(flat) <= SERIES_LIMIT
    pos = flat > SERIES_LIMIT
    neg = flat < -SERIES_LIMIT
    if mid.any():
        out[mid] = _airy_series(flat[mid])
    if pos.any():
        out[pos] = _airy_asymptotic_pos(flat[pos])
    if neg.any():
        out[neg] = _airy_asymptotic_neg(flat[neg])
    if np.ndim(arr) == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Integral representations
# ---------------------------------------------------------------------------

def _contour_shift(u: float) -> float:
    # Saddle point sits at t = i sqrt(u) for u > 0.  For u < 0 a small shift
    # keeps the factor exp(c |u|) (and hence the cancellation) bounded.
    if u > 1.0:
        return math.sqrt(u)
    if u >= -2.0:
        return 1.0
    return min(1.0, 2.0 / abs(u))


def _airy_integral_scalar(u: float, s: complex, cfg: QuadratureConfig) -> complex:
    c = _contour_shift(u)
    sr, si = s.real, s.imag
    decay = c + sr
    # log-magnitude of the integrand: -decay t^2 + 2 si c t + const
    t0 = si * c / decay
    const = c ** 3 / 3.0 - u * c + sr * c * c + decay * t0 * t0
    # Width at which the integrand has dropped below abs_tol/10 of scale 1.
    drop = const - math.log(cfg.abs_tol / 10.0)
    half = math.sqrt(max(drop, 1.0) / decay)
    half = min(half, cfg.xi_max)
    lo, hi = t0 - half, t0 + half
    tmax = max(abs(lo), abs(hi))
    # The local frequency of the phase is ~ t^2 + u - c^2 + 2 si (shifted); resolve it.
    freq = tmax ** 2 + abs(u) + c * c + 2.0 * abs(si) * tmax + 1.0
    h = 0.5 * math.pi / freq
    n = int(math.ceil((hi - lo) / h)) + 1
    n = max(n, cfg.n_points)
    if n > cfg.max_points:
        n = cfg.max_points
    t = np.linspace(lo, hi, n)
    w = t + 1j * c
    expo = 1j * (w ** 3 / 3.0 + u * w) - s * w * w
    vals = np.exp(expo)
    h_eff = (hi - lo) / (n - 1)
    return complex(np.sum(vals) * h_eff / (2.0 * math.pi))


def airy_integral(u, s=0.0, config: QuadratureConfig = DEFAULT_QUAD):
    """``(1/2pi) int exp(i(t^3/3 + u t) - s t^2) dt`` over the real line.

    ``u`` is real (scalar or array), ``s`` a complex damping with
    ``Re(s) >= 0``.  ``s = 0`` gives ``Ai(u)``; real ``s`` gives the heat-flow
    extension; imaginary ``s`` the free Schrodinger evolution.
    """
    s = complex(s)
    if s.real < 0:
        raise DomainError("damping must satisfy Re(s) >= 0")
    arr = _check_finite(u)
    flat = np.atleast_1d(arr).ravel()
    out = np.array([_airy_integral_scalar(float(v), s, config) for v in flat])
    if np.ndim(arr) == 0:
        return out[0]
    return out.reshape(arr.shape)


def airy_ai_quad(x, config: QuadratureConfig = DEFAULT_QUAD):
    """Ai(x) from its integral representation (independent of :func:`airy_ai`)."""
    res = airy_integral(x, 0.0, config)
    return np.real(res) if np.ndim(res) else float(np.real(res))


def airy_two_var(x, z: float, scale: AiryScale = AiryScale(), config: QuadratureConfig = DEFAULT_QUAD):
    """Two-variable Airy function ``Ai(x, z) = exp(z d^2/dx^2) Ai(x/A)`` for ``z >= 0``."""
    if not np.isfinite(z) or z < 0:
        raise DomainError("Ai(x, z) is only defined here for z >= 0")
    A = scale.A
    res = airy_integral(np.asarray(x, dtype=float) / A, z / A ** 2, config)
    return np.real(res) if np.ndim(res) else float(np.real(res))


def theta_phase(x, tau, scale: AiryScale = AiryScale()):
    """Phase of the freely propagated Airy packet, ``(tau/A^6)(A^3 x - 2 tau^2/3)``."""
    A = scale.A
    return tau / A ** 6 * (A ** 3 * np.asarray(x) - 2.0 * tau ** 2 / 3.0)


def airy_complex_closed_form(x, tau: float, scale: AiryScale = AiryScale()):
    """``Ai(x, i tau) = exp(i Theta(x, tau)) Ai((A^3 x - tau^2)/A^4)``."""
    _check_finite(x)
    if not np.isfinite(tau):
        raise DomainError("tau must be finite")
    A = scale.A
    x = np.asarray(x, dtype=float)
    arg = (A ** 3 * x - tau ** 2) / A ** 4
    res = np.exp(1j * theta_phase(x, tau, scale)) * airy_ai(arg)
    return complex(res) if res.ndim == 0 else res


def airy_two_var_closed(x, z: float, scale: AiryScale = AiryScale()):
    """Closed form of Ai(x, z): the free-propagation formula continued to ``tau = -i z``.

    ``Ai(x, z) = exp((z/A^6)(A^3 x + 2 z^2/3)) Ai((A^3 x + z^2)/A^4)``.
    """
    if z < 0:
        raise DomainError("Ai(x, z) is only defined here for z >= 0")
    A = scale.A
    x = np.asarray(_check_finite(x))
    res = np.exp(z / A ** 6 * (A ** 3 * x + 2.0 * z ** 2 / 3.0)) * airy_ai((A ** 3 * x + z ** 2) / A ** 4)
    return float(res) if np.ndim(res) == 0 else res


# ---------------------------------------------------------------------------
# Second-order ODE satisfied by Ai(., z) at fixed z
# ---------------------------------------------------------------------------

# Coefficients (c2, c1, c0) of  c2 y'' + c1 y' + c0 x y = 0  as functions of (A, z).
ODE_FORMS = {
    # As printed alongside the definition of Ai(x, z).
    "printed": lambda A, z: (A ** 3, 2.0 * A ** 2 * z, 1.0),
    # Obtained by integrating the integral representation by parts and
    # confirmed by least squares (see fit_airy_ode).
    "derived": lambda A, z: (A ** 3, -2.0 * z, -1.0),
}


def _derivatives(x: float, z: float, scale: AiryScale, h: float, config: QuadratureConfig):
    """y, y', y'' at x from a five-point stencil on Ai(., z)."""
    pts = x + h * np.arange(-2, 3)
    y = np.asarray(airy_two_var(pts, z, scale, config))
    d1 = (y[0] - 8 * y[1] + 8 * y[3] - y[4]) / (12 * h)
    d2 = (-y[0] + 16 * y[1] - 30 * y[2] + 16 * y[3] - y[4]) / (12 * h * h)
    return y[2], d1, d2


def airy_ode_residual(x: float, z: float, scale: AiryScale = AiryScale(), form: str = "printed",
                      h: float = 1e-2, config: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Residual ``c2 y'' + c1 y' + c0 x y`` with ``y = Ai(., z)`` at ``x``.

    ``form`` selects the coefficient set from :data:`ODE_FORMS`.  Only the
    ``"derived"`` form, ``A^3 y'' - 2 z y' - x y = 0``, vanishes; the printed
    variant is kept so the discrepancy can be measured.
    """
    if z < 0:
        raise DomainError("z must be non-negative")
    try:
        coeffs = ODE_FORMS[form]
    except KeyError:
        raise DomainError(f"unknown ODE form {form!r}; choose from {sorted(ODE_FORMS)}") from None
    c2, c1, c0 = coeffs(scale.A, z)
    y, d1, d2 = _derivatives(float(x), z, scale, h, config)
    return float(c2 * d2 + c1 * d1 + c0 * x * y)


@dataclass
class OdeFit:
    """Least-squares coefficients of ``A^3 y'' + c1 y' + c0 x y = 0``."""

    z: float
    A: float
    c1: float
    c0: float
    rms_residual: float
    candidates: dict = field(default_factory=dict)

    def best_form(self) -> str:
        return min(self.candidates, key=self.candidates.get)


def fit_airy_ode(z: float, scale: AiryScale = AiryScale(), xs=None,
                 config: QuadratureConfig = DEFAULT_QUAD) -> OdeFit:
    """Fit the first-derivative and potential coefficients of the Ai(., z) ODE.

    The second-derivative coefficient is pinned to ``A^3``; ``c1`` and ``c0``
    come from a linear least-squares fit on samples of Ai(x, z).  The
    ``candidates`` entry holds the RMS residual of each form in
    :data:`ODE_FORMS` over the same samples.
    """
    if xs is None:
        xs = np.linspace(-5.0, 2.0, 29) * scale.A
    A = scale.A
    rows, rhs = [], []
    derivs = []
    for x in xs:
        y, d1, d2 = _derivatives(float(x), z, scale, 1e-2 * A, config)
        derivs.append((x, y, d1, d2))
        rows.append([d1, x * y])
        rhs.append(-A ** 3 * d2)
    rows = np.array(rows)
    rhs = np.array(rhs)
    sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    rms = float(np.sqrt(np.mean((rows @ sol - rhs) ** 2)))
    cands = {}
    for name, coeffs in ODE_FORMS.items():
        c2, c1, c0 = coeffs(A, z)
        res = [c2 * d2 + c1 * d1 + c0 * x * y for x, y, d1, d2 in derivs]
        cands[name] = float(np.sqrt(np.mean(np.square(res))))
    return OdeFit(z=z, A=A, c1=float(sol[0]), c0=float(sol[1]), rms_residual=rms, candidates=cands)
