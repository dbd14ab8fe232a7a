"""Declarative scenarios: INI parsing, execution, CSV tables and the run manifest."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evolution as ev
from . import oracle
from . import polynomials as pl
from . import special_fn as sf
from . import transforms as tr
from . import validation
from . import wei_norman as wn
from .errors import DomainError
from .grid import Grid, apodization_window, relative_l2, relative_linf, window_interior
from .validation import Check, _below

OUT_ENV = "AIRY_EVOLVE_OUT"
DEFAULT_OUT = "airy_evolve_out"


class ConfigError(ValueError):
    """Malformed scenario configuration."""


def _fraction_str(text):
    return str(pl.as_fraction(text))


# name -> (type, default); ``None`` default means required
PARAMS = {
    "heat": {"beta": (float, 0.0), "t": (float, 0.5), "init": (str, "gaussian"), "A": (float, 1.0),
             "x_min": (float, -20.0), "x_max": (float, 20.0), "n": (int, 1024), "method": (str, "fft")},
    "schrodinger": {"b": (float, 0.5), "tau": (float, 1.0), "init": (str, "gaussian"), "A": (float, 1.0),
                    "x_min": (float, -40.0), "x_max": (float, 40.0), "n": (int, 4096),
                    "apod_center": (float, -25.0), "apod_width": (float, 100.0), "dt": (float, 1e-3)},
    "airy-packet": {"b": (float, 1.0), "A": (float, 1.0), "tau_max": (float, 2.0), "n_tau": (int, 11),
                    "x_min": (float, -15.0), "x_max": (float, 10.0), "n": (int, 2501)},
    "transform": {"transform": (str, "gw"), "param": (float, 0.3), "method": (str, "quad"),
                  "x_min": (float, -60.0), "x_max": (float, 30.0), "n": (int, 4096)},
    "poly": {"family": (str, "airy"), "n_max": (int, 8), "p": (int, 3), "lambda": (_fraction_str, "1")},
    "wei-norman": {"alpha": (str, "constant:1"), "beta": (str, "sin:1,1"), "t_max": (float, 1.0),
                   "n_t": (int, 11)},
    "centroid": {"phi": (str, "sin:1,1"), "B": (float, 1.0), "m": (float, 1.0), "t_max": (float, 3.0),
                 "n": (int, 3001)},
    "validate": {"checks": (str, "all")},
}
KINDS = tuple(PARAMS)


@dataclass
class Scenario:
    name: str
    kind: str
    parameters: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, kind: str, raw: dict) -> "Scenario":
        kind = kind.strip().lower()
        if kind not in PARAMS:
            raise ConfigError(f"scenario {name!r}: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")
        schema = PARAMS[kind]
        params = {}
        norm = {k.strip().replace("-", "_"): v for k, v in raw.items()}
        case = {k.lower(): k for k in schema}
        for key, value in norm.items():
            target = key if key in schema else case.get(key.lower())
            if target is None:
                raise ConfigError(f"scenario {name!r}: unknown parameter {key!r} for kind {kind!r}")
            typ = schema[target][0]
            try:
                params[target] = typ(value) if value is not None else schema[target][1]
            except (TypeError, ValueError, ZeroDivisionError):
                raise ConfigError(f"scenario {name!r}: bad value {value!r} for {target!r}") from None
        for key, (typ, default) in schema.items():
            params.setdefault(key, default)
        return cls(name, kind, params)


@dataclass
class RunConfig:
    output: Path
    parallel: bool
    scenarios: list


def load_config(path) -> RunConfig:
    """Read an INI file: an optional ``[run]`` section and ``[scenario NAME]`` sections."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    run = parser["run"] if parser.has_section("run") else {}
    scenarios = []
    for section in parser.sections():
        if section == "run":
            continue
        head, _, name = section.partition(" ")
        if head != "scenario" or not name.strip():
            raise ConfigError(f"unexpected section [{section}]; use [scenario NAME]")
        raw = dict(parser[section])
        kind = raw.pop("kind", None)
        if kind is None:
            raise ConfigError(f"scenario {name!r} has no 'kind'")
        scenarios.append(Scenario.build(name.strip(), kind, raw))
    parallel = str(run.get("parallel", "false")).strip().lower() in ("1", "true", "yes", "on")
    return RunConfig(Path(run.get("output", DEFAULT_OUT)), parallel, scenarios)


def resolve_output(default) -> Path:
    env = os.environ.get(OUT_ENV)
    return Path(env) if env else Path(default)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _field_rows(x, values):
    return [(xi, v.real, v.imag, abs(v) ** 2) for xi, v in zip(x, values)]


FIELD_HEADER = ("x", "re", "im", "abs2")


# ---------------------------------------------------------------------------
# Runners: each returns (tables, checks); tables maps suffix -> (header, rows)
# ---------------------------------------------------------------------------

def _run_heat(p):
    grid = Grid.linspace(p["x_min"], p["x_max"], p["n"])
    checks = []
    if p["init"] == "gaussian":
        f0 = grid.sample(lambda x: np.exp(-x * x))
        sol = ev.solve_heat_linear(f0, p["beta"], p["t"], method=p["method"])
        exact = ev.gleisher_closed_form(grid.x, p["t"], p["beta"])
        checks.append(_below("gleisher", relative_linf(sol.values, exact), 1e-6, "L-inf relative"))
    elif p["init"] == "airy":
        scale = sf.AiryScale(p["A"])
        sol = ev.solve_heat_airy(grid, p["beta"], p["t"], scale)
        x_arg = grid.x + p["beta"] * p["t"] ** 2
        closed = np.exp(ev.phase_phi(grid.x, p["t"], p["beta"])) * sf.airy_two_var_closed(x_arg, p["t"], scale)
        checks.append(_below("airy-heat-closed-form", relative_linf(sol.values, closed), 1e-8,
                             "integral vs closed form"))
    else:
        raise ConfigError(f"heat: unknown init {p['init']!r}")
    return {"": (FIELD_HEADER, _field_rows(grid.x, sol.values))}, checks


def _run_schrodinger(p):
    grid = Grid.linspace(p["x_min"], p["x_max"], p["n"])
    checks = []
    if p["init"] == "gaussian":
        f0 = grid.sample(lambda x: np.exp(-x * x))
        sol = ev.solve_schrodinger_linear(f0, p["b"], p["tau"])
        cfg = oracle.OracleConfig(p["x_min"], p["x_max"], max(p["n"], 256), dt=p["dt"],
                                  scheme="split-step-fourier")
        ref, _ = oracle.split_step_schrodinger(f0, p["b"], p["tau"], cfg)
        checks.append(_below("split-step-agreement", relative_l2(sol.values, ref.values), 1e-4, "L2 relative"))
    elif p["init"] == "airy":
        scale = sf.AiryScale(p["A"])
        c, w = p["apod_center"], p["apod_width"]
        f0 = grid.sample(lambda x: sf.airy_ai(x / scale.A) * apodization_window(x, c, w))
        sol = ev.solve_schrodinger_linear(f0, p["b"], p["tau"])
        exact = ev.airy_packet_closed_form(grid.x, p["b"], p["tau"], scale)
        m = window_interior(grid.x, c, w, 0.3)
        if m.sum() < 2:
            raise ConfigError("schrodinger: window interior does not intersect the grid")
        checks.append(_below("airy-closed-form-density", relative_l2(np.abs(sol.values[m]) ** 2,
                                                                     np.abs(exact[m]) ** 2), 1e-3,
                             "L2 relative on 30% window interior"))
    else:
        raise ConfigError(f"schrodinger: unknown init {p['init']!r}")
    drift = abs(sol.norm() - f0.norm()) / f0.norm()
    checks.append(_below("unitarity", drift, 1e-6, "relative norm change"))
    return {"": (FIELD_HEADER, _field_rows(grid.x, sol.values))}, checks


def _run_airy_packet(p):
    scale = sf.AiryScale(p["A"])
    grid = Grid.linspace(p["x_min"], p["x_max"], p["n"])
    taus = np.linspace(0.0, p["tau_max"], p["n_tau"])
    snaps, traj = [], []
    for tau in taus:
        psi, rep = ev.solve_schrodinger_airy(grid, p["b"], float(tau), scale)
        snaps.extend((tau, xi, v.real, v.imag, abs(v) ** 2) for xi, v in zip(grid.x, psi.values))
        traj.append((tau, rep.x_peak, rep.expected_x_peak, rep.max_density))
    dens = np.array([r[3] for r in traj])
    dev = max(abs(r[1] - r[2]) for r in traj) / grid.dx
    checks = [_below("peak-trajectory", dev, 2.0, "grid cells from x_peak(0) - (b - A^-3) tau^2"),
              _below("max-density-constant", (dens.max() - dens.min()) / dens.max(), 1e-2, "relative spread")]
    tables = {"": (("tau", "x", "re", "im", "abs2"), snaps),
              "_trajectory": (("tau", "x_peak", "expected_x_peak", "max_density"), traj)}
    return tables, checks


def _run_transform(p):
    grid = Grid.linspace(p["x_min"], p["x_max"], p["n"])
    f = grid.sample(lambda x: np.exp(-x * x))
    kind, q = p["transform"], p["param"]
    if kind == "gw":
        out = tr.gauss_weierstrass(f, q, method=p["method"])
        exact = np.exp(-grid.x ** 2 / (1 + 4 * q)) / np.sqrt(1 + 4 * q)
        checks = [_below("gw-closed-form", relative_linf(out.values, exact), 1e-8)]
    elif kind in ("airy", "cubic"):
        op = tr.airy_transform if kind == "airy" else tr.cubic_evolution
        out = op(f, q, method=p["method"])
        other = op(f, q, method="fft" if p["method"] == "quad" else "quad")
        m = np.abs(grid.x - 0.5 * (p["x_min"] + p["x_max"])) < 0.3 * (p["x_max"] - p["x_min"])
        checks = [_below("quad-vs-fft", relative_linf(out.values[m], other.values[m]), 1e-6,
                         "central 60% of grid")]
    else:
        raise ConfigError(f"transform: unknown transform {kind!r}")
    return {"": (FIELD_HEADER, _field_rows(grid.x, out.values))}, checks


def _run_poly(p):
    fam = p["family"]
    lam = p["lambda"]
    order = {"heat": 2, "airy": 3, "hermite": p["p"]}.get(fam)
    if order is None:
        raise ConfigError(f"poly: unknown family {fam!r}")
    try:
        polys = [pl.hermite_higher(n, order, lam) for n in range(p["n_max"] + 1)]
        rep = pl.verify_recurrences(p["n_max"], order, lam)
    except DomainError as exc:
        raise ConfigError(f"poly: {exc}") from None
    rows = pl.coefficient_rows(polys)
    checks = [Check("recurrences", len(rep.failures()), 0, rep.all_pass, f"failures {rep.failures()}")]
    return {"": (("n", "degree", "coefficient-numerator", "coefficient-denominator"), rows)}, checks


def _run_wei_norman(p):
    try:
        coeffs = wn.CoeffFunctions(wn.parse_profile(p["alpha"]), wn.parse_profile(p["beta"]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    times = np.linspace(0.0, p["t_max"], p["n_t"])
    ode = wn.wei_norman_table(coeffs, times, "ode")
    quad = wn.wei_norman_table(coeffs, times, "quadrature")
    rows = [(r.t, r.a, r.b, r.c, r.d) for r in ode]
    dev = max((validation.path_deviation(a.as_tuple(), b.as_tuple()) for a, b in zip(ode, quad)), default=0.0)
    checks = [_below("ode-vs-quadrature", dev, 1e-6, "largest relative gap")]
    return {"": (("t", "a", "b", "c", "d"), rows)}, checks


def _run_centroid(p):
    try:
        phi = wn.parse_profile(p["phi"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    t = np.linspace(0.0, p["t_max"], p["n"])
    xc = ev.centroid_trajectory(phi, p["B"], p["m"], t)
    h = t[1] - t[0]
    acc = (xc[2:] - 2 * xc[1:-1] + xc[:-2]) / h ** 2
    target = ev.centroid_acceleration(phi, p["B"], p["m"], t[1:-1])
    scale = np.maximum(np.abs(target), 1e-12)
    checks = [_below("acceleration-law", np.max(np.abs(acc - target) / scale), 1e-4, "relative")]
    return {"": (("t", "X_c"), list(zip(t, xc)))}, checks


def _run_validate(p):
    names = [n.strip() for n in p["checks"].split(",") if n.strip()]
    if names == ["all"]:
        names = list(validation.CHECKS)
    unknown = [n for n in names if n not in validation.CHECKS]
    if unknown:
        raise ConfigError(f"validate: unknown checks {unknown}; available: {', '.join(validation.CHECKS)}")
    return {}, validation.run_checks(names)


RUNNERS = {
    "heat": _run_heat,
    "schrodinger": _run_schrodinger,
    "airy-packet": _run_airy_packet,
    "transform": _run_transform,
    "poly": _run_poly,
    "wei-norman": _run_wei_norman,
    "centroid": _run_centroid,
    "validate": _run_validate,
}


def run_one(scenario: Scenario, out_dir: Path) -> dict:
    tables, checks = RUNNERS[scenario.kind](scenario.parameters)
    outputs = []
    for suffix, (header, rows) in tables.items():
        path = out_dir / f"{scenario.name}{suffix}.csv"
        write_csv(path, header, rows)
        outputs.append(path.name)
    return {
        "name": scenario.name,
        "kind": scenario.kind,
        "parameters": scenario.parameters,
        "outputs": outputs,
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }


def run_scenarios(scenarios, out_dir: Path, parallel: bool = False) -> dict:
    """Run scenarios, write their CSV tables and ``manifest.json``; return the manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if parallel and len(scenarios) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda s: run_one(s, out_dir), scenarios))
    else:
        results = [run_one(s, out_dir) for s in scenarios]
    manifest = {"scenarios": results, "passed": all(r["passed"] for r in results)}
    text = json.dumps(manifest, indent=2, sort_keys=True, default=_json_default)
    (out_dir / "manifest.json").write_text(text + "\n", encoding="utf-8")
    return manifest


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {obj!r}")


def run_scenario(config_path, kind: str | None = None, out_dir=None, parallel: bool | None = None) -> int:
    """Execute the scenarios of a config file; exit code 0 iff every check passes.

    ``kind`` keeps only scenarios of that kind.  Raises :class:`ConfigError`
    for malformed configuration.
    """
    cfg = load_config(config_path)
    scenarios = [s for s in cfg.scenarios if kind is None or s.kind == kind]
    target = resolve_output(out_dir if out_dir is not None else cfg.output)
    manifest = run_scenarios(scenarios, target, cfg.parallel if parallel is None else parallel)
    return 0 if manifest["passed"] else 1
