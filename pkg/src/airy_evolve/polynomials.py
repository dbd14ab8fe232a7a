"""Exact polynomials: higher-order Hermite, heat and Airy polynomials.

Coefficients are :class:`fractions.Fraction` throughout, so recurrences and
operator identities can be checked with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

MAX_DEGREE = 30


def as_fraction(value) -> Fraction:
    """Exact conversion of ints, Fractions, decimal strings and binary floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if not np.isfinite(value):
            raise DomainError("polynomial parameters must be finite")
        return Fraction(value)
    raise DomainError(f"cannot convert {value!r} to an exact rational")


@dataclass(frozen=True)
class PolyDense:
    """Dense polynomial with exact rational coefficients in ascending degree."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, n: int, c=1) -> "PolyDense":
        if n < 0:
            raise DomainError("degree must be non-negative")
        return cls([0] * n + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "PolyDense") -> "PolyDense":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return PolyDense(x + y for x, y in zip(a, b))

    def __neg__(self) -> "PolyDense":
        return PolyDense(-c for c in self.coeffs)

    def __sub__(self, other: "PolyDense") -> "PolyDense":
        return self + (-other)

    def scale(self, factor) -> "PolyDense":
        f = as_fraction(factor)
        return PolyDense(f * c for c in self.coeffs)

    def __mul__(self, other: "PolyDense") -> "PolyDense":
        if self.is_zero() or other.is_zero():
            return PolyDense()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyDense(out)

    def times_x(self) -> "PolyDense":
        if self.is_zero():
            return self
        return PolyDense((Fraction(0),) + self.coeffs)

    def derivative(self, order: int = 1) -> "PolyDense":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * c for k, c in enumerate(cs)][1:]
        return PolyDense(cs)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyDense) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.coeffs), default=Fraction(0))

    def __call__(self, x):
        """Horner evaluation in floating point (scalar or array)."""
        x = np.asarray(x)
        acc = np.zeros_like(x, dtype=float if not np.iscomplexobj(x) else complex)
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def evaluate_exact(self, x) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        if self.is_zero():
            return "PolyDense(0)"
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        return "PolyDense(" + " + ".join(terms) + ")"


def _check_degree(n: int, max_degree: int):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    if n > max_degree:
        raise DomainError(f"degree {n} exceeds configured maximum {max_degree}")


def hermite_higher(n: int, p: int, lam, max_degree: int = MAX_DEGREE) -> PolyDense:
    """``H_n^(p)(x, lam) = n! sum_r x^(n-pr) lam^r / ((n-pr)! r!)``."""
    _check_degree(n, max_degree)
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise DomainError(f"order p must be an integer >= 2, got {p!r}")
    lam = as_fraction(lam)
    coeffs = [Fraction(0)] * (n + 1)
    for r in range(n // p + 1):
        coeffs[n - p * r] = Fraction(factorial(n), factorial(n - p * r) * factorial(r)) * lam ** r
    return PolyDense(coeffs)


def heat_polynomial(n: int, t, max_degree: int = MAX_DEGREE) -> PolyDense:
    return hermite_higher(n, 2, t, max_degree)


def airy_polynomial(n: int, t, max_degree: int = MAX_DEGREE) -> PolyDense:
    """Airy polynomial ``ai_n(x, t)``, i.e. the third-order Hermite polynomial."""
    return hermite_higher(n, 3, t, max_degree)


def airy_polynomial_quadrature(n: int, t: float, x, window: float = 20.0, n_grid: int = 8001):
    """Evaluate ``ai_n(x, t)`` from its Airy-kernel integral.

    ``(3t)^(-1/3) int Ai((xi - x)/(3t)^(1/3)) xi^n dxi`` with the monomial
    apodized by ``exp(-(xi/window)^8)``.  Floating point; used to
    cross-check the exact coefficients.
    """
    from .special_fn import airy_ai

    if t <= 0:
        raise DomainError("the quadrature path needs t > 0")
    gamma = (3.0 * t) ** (1.0 / 3.0)
    xi = np.linspace(-1.9 * window, 1.9 * window, n_grid)
    dxi = xi[1] - xi[0]
    g = xi ** n * np.exp(-((xi / window) ** 8))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        out[i] = np.sum(airy_ai((xi - xv) / gamma) * g) * dxi / gamma
    return out


def exp_derivative_operator(poly: PolyDense, lam, p: int) -> PolyDense:
    """``exp(lam d^p/dx^p)`` applied to a polynomial (the series terminates)."""
    if p < 1:
        raise DomainError("derivative order must be positive")
    lam = as_fraction(lam)
    out = PolyDense()
    term = poly
    k = 0
    while not term.is_zero():
        out = out + term.scale(lam ** k / factorial(k))
        term = term.derivative(p)
        k += 1
    return out


def raising_operator(poly: PolyDense, p: int, t, m: int | None = None) -> PolyDense:
    """``(x + m t d^(m-1)/dx^(m-1))`` applied to ``poly``; ``m`` defaults to ``p``."""
    m = p if m is None else m
    t = as_fraction(t)
    return poly.times_x() + poly.derivative(m - 1).scale(m * t)


@dataclass
class RecurrenceEntry:
    n: int
    raising_ok: bool
    lowering_ok: bool

    @property
    def ok(self) -> bool:
        return self.raising_ok and self.lowering_ok


@dataclass
class RecurrenceReport:
    p: int
    t: Fraction
    m: int
    entries: list

    @property
    def all_pass(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> list:
        return [e.n for e in self.entries if not e.ok]


def verify_recurrences(n_max: int, p: int, t, m: int | None = None,
                       max_degree: int = MAX_DEGREE) -> RecurrenceReport:
    """Check raising and lowering relations of ``H_n^(p)`` exactly.

    Raising: ``H_{n+1} = (x + m t d^(m-1)) H_n``; lowering: ``d H_n = n H_{n-1}``.
    ``m`` defaults to ``p``; passing another value shows which index the
    raising relation actually needs.
    """
    _check_degree(n_max, max_degree)
    m = p if m is None else m
    t = as_fraction(t)
    polys = [hermite_higher(n, p, t, max_degree + 1) for n in range(n_max + 2)]
    entries = []
    for n in range(n_max + 1):
        raising_ok = raising_operator(polys[n], p, t, m) == polys[n + 1]
        if n == 0:
            lowering_ok = polys[0].derivative().is_zero()
        else:
            lowering_ok = polys[n].derivative() == polys[n - 1].scale(n)
        entries.append(RecurrenceEntry(n, raising_ok, lowering_ok))
    return RecurrenceReport(p=p, t=t, m=m, entries=entries)


def coefficient_rows(polys: Sequence[PolyDense]) -> list:
    """Rows ``(n, degree, numerator, denominator)`` for CSV export."""
    rows = []
    for n, poly in enumerate(polys):
        for deg, c in enumerate(poly.coeffs):
            rows.append((n, deg, c.numerator, c.denominator))
    return rows
