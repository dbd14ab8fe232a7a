"""Named numerical checks reported by ``airy-evolve validate`` and the run manifest.

Each check function returns a list of :class:`Check` records; the registry
:data:`CHECKS` maps the public name to the function.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import evolution as ev
from . import oracle
from . import polynomials as pl
from . import special_fn as sf
from . import transforms as tr
from . import wei_norman as wn
from .grid import Grid, apodization_window, relative_l2, relative_linf, spectral_derivative, translate


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _below(name, value, tol, detail="") -> Check:
    value = float(value)
    return Check(name, value, tol, bool(value < tol), detail)


def check_gleisher() -> list:
    grid = Grid.linspace(-30.0, 30.0, 2048)
    f0 = grid.sample(lambda x: np.exp(-x * x))
    out = []
    for beta in (0.0, 0.5):
        for t in (0.1, 0.5, 1.0):
            exact = ev.gleisher_closed_form(grid.x, t, beta)
            for method in ("quad", "fft"):
                got = ev.solve_heat_linear(f0, beta, t, method=method).values
                out.append(_below(f"gleisher[{method},beta={beta},t={t}]",
                                  relative_linf(got, exact), 1e-6, "L-inf relative"))
    return out


def check_heat_oracle() -> list:
    cfg = oracle.OracleConfig(-20.0, 20.0, 2048, dt=1e-3)
    grid = cfg.grid()
    f0 = grid.sample(lambda x: np.exp(-x * x))
    analytic = ev.solve_heat_linear(f0, 0.5, 0.4).values
    cn = oracle.crank_nicolson_heat(f0, 0.5, 1.0, 0.4, cfg).values
    return [_below("heat-oracle[beta=0.5,t=0.4,n=2048]", relative_l2(cn, analytic), 1e-3, "L2 relative")]


def check_airy_packet() -> list:
    out = []
    scale = sf.AiryScale(1.0)
    grid = Grid(-20.0, 0.01, 3001)
    taus = np.linspace(0.0, 2.0, 21)
    reports = ev.airy_packet_trajectory(grid, 1.0, taus, scale)
    dens = np.array([r.max_density for r in reports])
    out.append(_below("airy-closed-form-max-density[b=1,A=1]", (dens.max() - dens.min()) / dens.max(),
                      1e-2, "relative spread of max|psi|^2 over tau in [0,2]"))
    disp = max(abs(r.x_peak - reports[0].x_peak) for r in reports) / grid.dx
    out.append(_below("airy-frozen-displacement[b=A^-3]", disp, 1.0, "grid cells"))

    cfg = oracle.OracleConfig(-110.0, 70.0, 4096, dt=1e-3, apod_center=-20.0, apod_width=50.0,
                              scheme="split-step-fourier")
    g = cfg.grid()
    interior = (cfg.apod_center - 0.6 * cfg.apod_width, cfg.apod_center + 0.6 * cfg.apod_width)
    f0 = g.sample(lambda x: sf.airy_ai(x) * cfg.window(x))
    for b in (0.0, 0.5, 1.0):
        _, diag = oracle.split_step_schrodinger(f0, b, 2.0, cfg, record_every=250, peak_region=interior)
        d = np.array(diag.peak_densities)
        out.append(_below(f"airy-split-step-peak-decay[b={b}]", (d[0] - d.min()) / d[0], 3e-2,
                          "relative peak decay over tau in [0,2]"))
        dev = max(abs(xp - ev.expected_peak(b, t, scale)) for t, xp in zip(diag.times, diag.peak_positions))
        out.append(_below(f"airy-split-step-trajectory[b={b}]", dev / g.dx, 2.0, "grid cells"))
    return out


def check_polynomials() -> list:
    out = []
    t = Fraction(3, 7)
    gw_bad = [n for n in range(13)
              if tr.gauss_weierstrass(pl.PolyDense.monomial(n), t) != pl.hermite_higher(n, 2, t)]
    cubic_bad = [n for n in range(13)
                 if tr.cubic_evolution(pl.PolyDense.monomial(n), t) != pl.hermite_higher(n, 3, t)]
    out.append(Check("gw-monomials-equal-H2[n<=12]", len(gw_bad), 0, not gw_bad, f"failures {gw_bad}"))
    out.append(Check("cubic-monomials-equal-H3[n<=12]", len(cubic_bad), 0, not cubic_bad,
                     f"failures {cubic_bad}"))
    for p in (2, 3, 4):
        rep = pl.verify_recurrences(12, p, t)
        out.append(Check(f"recurrences[p={p},n<=12]", len(rep.failures()), 0, rep.all_pass,
                         f"failures {rep.failures()}"))
    return out


def _residual(lhs, rhs, interior) -> float:
    return float(np.max(np.abs(lhs[interior] - rhs[interior])) / np.max(np.abs(rhs[interior])))


def check_transform_identities() -> list:
    out = []
    grid = Grid.linspace(-60.0, 30.0, 4096)
    x = grid.x
    f = grid.sample(lambda x: np.exp(-x * x) * np.cos(2 * x))
    fp = grid.sample(lambda x: -np.exp(-x * x) * (2 * x * np.cos(2 * x) + 2 * np.sin(2 * x)))
    xf = grid.sample(lambda x: x * np.exp(-x * x) * np.cos(2 * x))
    interior = np.abs(x + 15) < 27
    for alpha in (1.0, -0.8):
        phi = tr.airy_transform(f, alpha)
        d_phi = spectral_derivative(phi).values
        d2_phi = spectral_derivative(phi, 2).values
        out.append(_below(f"airy-transform-derivative[alpha={alpha}]",
                          _residual(tr.airy_transform(fp, alpha).values, d_phi, interior), 1e-4))
        out.append(_below(f"airy-transform-position[alpha={alpha}]",
                          _residual(tr.airy_transform(xf, alpha).values, x * phi.values - alpha ** 3 * d2_phi,
                                    interior), 1e-4))
    t = 0.3
    h = tr.gauss_weierstrass(f, t, method="quad")
    out.append(_below("gw-position[t=0.3]",
                      _residual(tr.gauss_weierstrass(xf, t, method="quad").values,
                                x * h.values + 2 * t * spectral_derivative(h).values, interior), 1e-4))
    out.append(_below("gw-derivative[t=0.3]",
                      _residual(tr.gauss_weierstrass(fp, t, method="quad").values,
                                spectral_derivative(h).values, interior), 1e-4))
    val = tr.exponential_cube_integral(1.0)
    out.append(_below("exponential-cube[u=1]", abs(val / math.exp(1.0 / 3.0) - 1.0), 1e-5, "relative"))
    return out


WN_PRESETS = {
    "constant": wn.CoeffFunctions(wn.constant(1.0), wn.constant(0.7)),
    "linear": wn.CoeffFunctions(wn.linear(0.0, 1.0), wn.constant(1.0)),
    "sin": wn.CoeffFunctions(wn.constant(1.0), wn.sine()),
    "poly": wn.CoeffFunctions(wn.polynomial([1.0, 0.5, 0.2]), wn.polynomial([0.3, -1.0, 0.4])),
    "piecewise": wn.CoeffFunctions(wn.piecewise_constant([0.0, 0.4], [1.0, 2.0]),
                                   wn.piecewise_constant([0.0, 0.3, 0.8], [0.5, -1.0, 2.0])),
}


def path_deviation(p, q) -> float:
    """Largest relative (absolute near zero) gap between two coefficient tuples."""
    return max(abs(u - v) / max(abs(u), abs(v), 1e-6) for u, v in zip(p, q))


def check_wei_norman() -> list:
    out = []
    for name, cf in WN_PRESETS.items():
        dev = max(path_deviation(wn.wei_norman_coeffs(cf, t).as_tuple(),
                                 wn.wei_norman_coeffs(cf, t, "quadrature").as_tuple())
                  for t in (0.5, 1.0, 1.5))
        out.append(_below(f"wei-norman-paths[{name}]", dev, 1e-6, "ode vs nested quadrature"))
    # constant coefficients in exact arithmetic: phase a + d(cd + b + x) = beta^2 t^3/3 + beta t x
    beta, t = Fraction(7, 10), Fraction(13, 10)
    c, d, b, a = t, beta * t, -beta * t * t, beta * beta * t ** 3 / 3
    const_ok = a + d * (c * d + b) == beta ** 2 * t ** 3 / 3 and d == beta * t
    out.append(Check("wei-norman-constant-phase-exact", 0 if const_ok else 1, 0, const_ok))
    num = wn.wei_norman_coeffs(WN_PRESETS["constant"], 1.3)
    gap = abs(num.phase_constant - 0.7 ** 2 * 1.3 ** 3 / 3) + abs(num.d - 0.7 * 1.3)
    out.append(_below("wei-norman-constant-phase-numeric", gap, 1e-10))

    cfg = oracle.OracleConfig(-20.0, 20.0, 2048, dt=1e-3)
    grid = cfg.grid()
    f0 = grid.sample(lambda x: np.exp(-x * x))
    coeffs = wn.CoeffFunctions(wn.constant(1.0), wn.sine())
    fact = wn.factorized_evolution(coeffs, f0, 1.0).values
    cn = oracle.crank_nicolson_heat(f0, lambda s: math.sin(s), 1.0, 1.0, cfg).values
    out.append(_below("wei-norman-vs-cn[beta=sin t,t=1]", relative_l2(fact, cn), 1e-3, "L2 relative"))
    return out


def check_centroid() -> list:
    out = []
    t = np.linspace(0.0, 3.0, 3001)
    for label, phi in (("zero", lambda s: 0.0 * s), ("const", lambda s: 0.8 + 0.0 * s), ("sin", np.sin)):
        xc = ev.centroid_trajectory(phi, 1.0, 1.0, t)
        h = t[1] - t[0]
        acc = (xc[2:] - 2 * xc[1:-1] + xc[:-2]) / h ** 2
        target = ev.centroid_acceleration(phi, 1.0, 1.0, t[1:-1])
        out.append(_below(f"centroid-acceleration[phi={label}]",
                          np.max(np.abs(acc - target) / np.abs(target)), 1e-4, "relative"))
    return out


def check_weyl() -> list:
    alpha = Fraction(3, 2)
    worst = max(tr.weyl_conjugation_check(n, alpha) for n in range(13))
    comm = max(tr.weyl_commutator_residual(pl.hermite_higher(n, 3, Fraction(1, 3)), alpha)
               for n in range(11))
    return [Check("weyl-conjugation[n<=12]", float(worst), 0, worst == 0, "exact rational"),
            Check("weyl-commutator[deg<=10]", float(comm), 0, comm == 0, "exact rational")]


def check_chain_rule() -> list:
    grid = Grid.linspace(-30.0, 30.0, 4096)
    g = grid.sample(lambda x: np.exp(-x * x))
    lhs, rhs = tr.chain_rule_sides(g, 0.1, 0.5)
    out = [_below("chain-rule[gaussian,p=0.1,q=0.5]", np.max(np.abs(lhs.values - rhs.values)), 1e-6, "L-inf")]
    one = grid.sample(lambda x: np.ones_like(x))
    lhs1, _ = tr.chain_rule_sides(one, 0.1, 0.5, method="quad", check_decay=False)
    interior = np.abs(grid.x) < 20
    exact = math.exp(0.1 * 0.25) * np.exp(0.5 * grid.x)
    out.append(_below("chain-rule-constant[p=0.1,q=0.5]",
                      np.max(np.abs(lhs1.values[interior] - exact[interior]) / exact[interior]), 1e-8,
                      "relative, |x| < 20"))
    return out


def check_airy_ode() -> list:
    out = []
    for z in (0.05, 0.1):
        fit = sf.fit_airy_ode(z)
        out.append(_below(f"airy-ode-derived-form[z={z}]", fit.candidates["derived"], 1e-6,
                          f"fit c1={fit.c1:.8f} c0={fit.c0:.8f}; printed rms={fit.candidates['printed']:.3e}"))
    return out


CHECKS = {
    "gleisher": check_gleisher,
    "heat-oracle": check_heat_oracle,
    "airy-packet": check_airy_packet,
    "polynomials": check_polynomials,
    "transform-identities": check_transform_identities,
    "wei-norman": check_wei_norman,
    "centroid": check_centroid,
    "weyl": check_weyl,
    "chain-rule": check_chain_rule,
    "airy-ode": check_airy_ode,
}


def run_checks(names) -> list:
    if names in ("all", ["all"]):
        names = list(CHECKS)
    out = []
    for name in names:
        if name not in CHECKS:
            raise KeyError(name)
        out.extend(CHECKS[name]())
    return out
