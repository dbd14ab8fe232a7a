import ast
import math
from pathlib import Path

import numpy as np
import pytest

import airy_evolve.oracle as oracle
from airy_evolve import evolution as ev
from airy_evolve import special_fn as sf
from airy_evolve.errors import DomainError, StepSizeError, WidenDomainError
from airy_evolve.grid import GridFunction, relative_l2


def _gauss(cfg):
    return cfg.grid().sample(lambda x: np.exp(-x * x))


def test_config_validation():
    with pytest.raises(DomainError):
        oracle.OracleConfig(n_grid=100)
    with pytest.raises(DomainError):
        oracle.OracleConfig(x_min=1.0, x_max=-1.0)
    with pytest.raises(DomainError):
        oracle.OracleConfig(dt=0.0)


def test_cn_heat_against_closed_form():
    cfg = oracle.OracleConfig(-20.0, 20.0, 2048, dt=1e-3)
    out = oracle.crank_nicolson_heat(_gauss(cfg), 0.0, 1.0, 0.5, cfg).values
    assert relative_l2(out, ev.gleisher_closed_form(cfg.grid().x, 0.5)) < 1e-4


def test_cn_heat_cross_validates_analytic_solver():
    cfg = oracle.OracleConfig(-20.0, 20.0, 2048, dt=1e-3)
    f0 = _gauss(cfg)
    cn = oracle.crank_nicolson_heat(f0, 0.5, 1.0, 0.4, cfg).values
    assert relative_l2(cn, ev.solve_heat_linear(f0, 0.5, 0.4).values) < 1e-3


def test_cn_zero_time():
    cfg = oracle.OracleConfig()
    f0 = _gauss(cfg)
    assert np.array_equal(oracle.crank_nicolson_heat(f0, 0.5, 1.0, 0.0, cfg).values, f0.values)


def test_cn_grid_refinement_is_second_order():
    def err(n, dt):
        cfg = oracle.OracleConfig(-12.0, 12.0, n, dt=dt)
        out = oracle.crank_nicolson_heat(_gauss(cfg), 0.0, 1.0, 0.4, cfg).values
        return relative_l2(out, ev.gleisher_closed_form(cfg.grid().x, 0.4))

    coarse, fine = err(257, 0.02), err(513, 0.01)
    assert 3.0 < coarse / fine < 5.0


def test_cn_detects_boundary_contamination():
    cfg = oracle.OracleConfig(-5.0, 5.0, 512, dt=1e-2)
    with pytest.raises(WidenDomainError):
        oracle.crank_nicolson_heat(_gauss(cfg), 0.0, 1.0, 2.0, cfg)


def test_split_step_free_gaussian():
    cfg = oracle.OracleConfig(-40.0, 40.0, 2048, dt=1e-3, scheme="split-step-fourier")
    out, diag = oracle.split_step_schrodinger(_gauss(cfg), 0.0, 1.0, cfg)
    assert relative_l2(out.values, ev.free_gaussian(cfg.grid().x, 1.0)) < 1e-5
    assert diag.norm_drift < 1e-6


def test_split_step_zero_time():
    cfg = oracle.OracleConfig(scheme="split-step-fourier")
    f0 = _gauss(cfg)
    out, diag = oracle.split_step_schrodinger(f0, 0.5, 0.0, cfg)
    assert np.array_equal(out.values, f0.values) and diag.n_steps == 0


def test_split_step_norm_over_many_steps():
    cfg = oracle.OracleConfig(-40.0, 40.0, 1024, dt=1e-4, scheme="split-step-fourier")
    _, diag = oracle.split_step_schrodinger(_gauss(cfg), 0.5, 1.0, cfg)
    assert diag.n_steps == 10000 and diag.norm_drift < 1e-6


def test_split_step_matches_analytic_linear_potential():
    cfg = oracle.OracleConfig(-40.0, 40.0, 2048, dt=1e-3, scheme="split-step-fourier")
    f0 = _gauss(cfg)
    out, _ = oracle.split_step_schrodinger(f0, 0.5, 1.0, cfg)
    assert relative_l2(out.values, ev.solve_schrodinger_linear(f0, 0.5, 1.0).values) < 1e-4


def test_split_step_self_accelerating_airy():
    cfg = oracle.OracleConfig(-110.0, 70.0, 4096, dt=1e-3, apod_center=-20.0, apod_width=50.0,
                              scheme="split-step-fourier")
    g = cfg.grid()
    f0 = g.sample(lambda x: sf.airy_ai(x) * cfg.window(x))
    region = (cfg.apod_center - 0.6 * cfg.apod_width, cfg.apod_center + 0.6 * cfg.apod_width)
    _, diag = oracle.split_step_schrodinger(f0, 0.0, 2.0, cfg, record_every=500, peak_region=region)
    for t, xp in zip(diag.times, diag.peak_positions):
        assert abs(xp - (ev.AIRY_PEAK + t * t)) < 2 * g.dx
    d = np.array(diag.peak_densities)
    assert (d[0] - d.min()) / d[0] < 3e-2


def test_crank_nicolson_schrodinger_cross_check():
    cfg = oracle.OracleConfig(-30.0, 30.0, 2048, dt=1e-3, scheme="crank-nicolson")
    f0 = _gauss(cfg)
    out = oracle.crank_nicolson_schrodinger(f0, 0.5, 0.5, cfg)
    assert relative_l2(out.values, ev.solve_schrodinger_linear(f0, 0.5, 0.5).values) < 1e-3


def test_split_step_drift_guard():
    cfg = oracle.OracleConfig(-40.0, 40.0, 512, dt=1e-3, scheme="split-step-fourier")
    with pytest.raises(StepSizeError):
        oracle.split_step_schrodinger(_gauss(cfg), 0.0, 0.01, cfg, drift_tol=0.0)


def test_oracle_imports_are_independent():
    tree = ast.parse(Path(oracle.__file__).read_text())
    local = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom) and node.level > 0:
            local.add(node.module)
        elif isinstance(node, ast.Import):
            assert not any(a.name.startswith("airy_evolve") for a in node.names)
        elif isinstance(node, ast.ImportFrom) and node.module and node.module.startswith("airy_evolve"):
            local.add(node.module.split(".", 1)[-1])
    assert local <= {"grid", "errors"}
    assert not {"evolution", "transforms", "special_fn", "wei_norman"} & local
    assert GridFunction.__module__ == "airy_evolve.grid"
