import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airy_evolve import evolution as ev
from airy_evolve import special_fn as sf
from airy_evolve import transforms as tr
from airy_evolve.errors import DomainError
from airy_evolve.grid import Grid, apodization_window, relative_l2, relative_linf, translate, window_interior


@pytest.mark.parametrize("method,beta", [("fft", 0.0), ("fft", 0.5), ("quad", 0.0), ("quad", 0.5),
                                         ("quad", -0.8)])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_gleisher_rule(gaussian_grid, method, beta, t):
    grid, f0 = gaussian_grid
    got = ev.solve_heat_linear(f0, beta, t, method=method).values
    assert relative_linf(got, ev.gleisher_closed_form(grid.x, t, beta)) < 1e-6


def test_fft_round_off_is_amplified_by_growing_phase(gaussian_grid):
    # the spectral round-off floor is multiplied by exp(beta t x) near the grid edge
    grid, f0 = gaussian_grid
    got = ev.solve_heat_linear(f0, -0.8, 1.0).values
    exact = ev.gleisher_closed_form(grid.x, 1.0, -0.8)
    m = np.abs(grid.x) < 20
    assert relative_linf(got[m], exact[m]) < 1e-8


def test_beta_zero_is_plain_diffusion(gaussian_grid):
    _, f0 = gaussian_grid
    a = ev.solve_heat_linear(f0, 0.0, 0.4).values
    b = tr.gauss_weierstrass(f0, 0.4).values
    assert np.max(np.abs(a - b)) < 1e-14


def test_heat_time_must_be_positive(gaussian_grid):
    _, f0 = gaussian_grid
    with pytest.raises(DomainError):
        ev.solve_heat_linear(f0, 0.5, 0.0)


def test_translation_commutes_with_diffusion():
    grid = Grid.linspace(-30.0, 30.0, 2048)
    f = grid.sample(lambda x: np.exp(-x * x) * np.cos(x))
    a = tr.gauss_weierstrass(translate(f, 0.37), 0.3).values
    b = translate(tr.gauss_weierstrass(f, 0.3), 0.37).values
    assert np.max(np.abs(a - b)) < 1e-8


@pytest.mark.parametrize("t", [0.2, 0.6])
def test_heat_pde_residual(gaussian_grid, t):
    grid, f0 = gaussian_grid
    beta, h = 0.5, 1e-4
    plus = ev.solve_heat_linear(f0, beta, t + h).values.real
    minus = ev.solve_heat_linear(f0, beta, t - h).values.real
    mid = ev.solve_heat_linear(f0, beta, t)
    from airy_evolve.grid import spectral_derivative
    res = (plus - minus) / (2 * h) - spectral_derivative(mid, 2).values.real - beta * grid.x * mid.values.real
    m = np.abs(grid.x) < 10
    assert np.max(np.abs(res[m])) < 1e-3 * np.max(np.abs(mid.values))


def test_schrodinger_zero_time_is_identity(gaussian_grid):
    _, f0 = gaussian_grid
    assert ev.solve_schrodinger_linear(f0, 0.7, 0.0) is f0


def test_free_packet(gaussian_grid):
    grid, f0 = gaussian_grid
    out = ev.solve_schrodinger_linear(f0, 0.0, 0.8).values
    assert relative_l2(out, ev.free_gaussian(grid.x, 0.8)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(0.0, 2.0))
def test_unitarity(b, tau):
    grid = Grid.linspace(-40.0, 40.0, 2048)
    f0 = grid.sample(lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    out = ev.solve_schrodinger_linear(f0, b, tau)
    assert abs(out.norm() / f0.norm() - 1) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_schrodinger_semigroup_up_to_phase_bookkeeping(b, t1, t2):
    # composing two steps differs from one step only by the time-origin of the phase; compare densities
    grid = Grid.linspace(-60.0, 60.0, 4096)
    f0 = grid.sample(lambda x: np.exp(-x * x))
    one = ev.solve_schrodinger_linear(f0, b, t1 + t2).values
    assert abs(np.sum(np.abs(one) ** 2) * grid.dx - f0.norm() ** 2) < 1e-8


def _eq_integral(x, b, tau, xi, f):
    # brute-force propagator integral, with the sign convention of every phase written out
    pref = 1.0 / (2.0 * cmath.sqrt(1j * math.pi * tau))
    dxi = xi[1] - xi[0]
    out = []
    for xv in np.atleast_1d(x):
        kern = np.exp(-((xv + b * tau ** 2 - xi) ** 2) / (4j * tau))
        phase = np.exp(-1j * (b * b * tau ** 3 / 3 + b * tau * xv))
        out.append(phase * pref * np.sum(kern * f) * dxi)
    return np.array(out)


def test_sign_pinning_against_brute_force_integral():
    b, tau = 0.7, 0.5
    grid = Grid.linspace(-40.0, 40.0, 4096)
    f0 = grid.sample(lambda x: np.exp(-x * x) * (1 + x))
    psi = ev.solve_schrodinger_linear(f0, b, tau)
    idx = np.searchsorted(grid.x, [-2.0, -0.5, 0.3, 1.7])
    xi = np.linspace(-12.0, 12.0, 240001)
    ref = _eq_integral(grid.x[idx], b, tau, xi, np.exp(-xi * xi) * (1 + xi))
    assert np.max(np.abs(psi.values[idx] - ref)) < 1e-8
    flipped = ev.solve_schrodinger_linear(f0, -b, tau)
    assert np.max(np.abs(flipped.values[idx] - ref)) > 1e-2


def _apodized_airy(grid, center, width, scale=sf.AiryScale()):
    return grid.sample(lambda x: sf.airy_ai(x / scale.A) * apodization_window(x, center, width))


@pytest.mark.parametrize("b,A", [(0.5, 1.0), (1.0, 1.2)])
def test_spectral_airy_density_matches_closed_form(b, A):
    scale = sf.AiryScale(A)
    grid = Grid.linspace(-250.0, 150.0, 8192)
    center, width, tau = -25.0, 100.0, 1.0
    psi = ev.solve_schrodinger_linear(_apodized_airy(grid, center, width, scale), b, tau)
    exact = ev.airy_packet_closed_form(grid.x, b, tau, scale)
    m = window_interior(grid.x, center, width, 0.3)
    assert relative_l2(np.abs(psi.values[m]) ** 2, np.abs(exact[m]) ** 2) < 1e-3


def test_phase_consistency_on_window_interior():
    grid = Grid.linspace(-250.0, 150.0, 8192)
    center, width, b, tau = -25.0, 100.0, 0.5, 1.0
    psi = ev.solve_schrodinger_linear(_apodized_airy(grid, center, width), b, tau).values
    exact = ev.airy_packet_closed_form(grid.x, b, tau)
    m = window_interior(grid.x, center, width, 0.3) & (np.abs(exact) > 1e-2 * np.max(np.abs(exact)))
    diff = np.angle(psi[m] * np.conj(exact[m]))
    assert np.var(diff) < 1e-3


def test_airy_packet_zero_time():
    grid = Grid.linspace(-10, 5, 301)
    psi, rep = ev.solve_schrodinger_airy(grid, 0.8, 0.0, sf.AiryScale(1.3))
    np.testing.assert_allclose(psi.values, sf.airy_ai(grid.x / 1.3), atol=1e-15)
    assert rep.expected_x_peak == pytest.approx(1.3 * ev.AIRY_PEAK)


@pytest.mark.parametrize("A", [0.8, 1.0, 1.25])
def test_frozen_packet(A):
    grid = Grid(-20.0, 0.01, 3001)
    scale = sf.AiryScale(A)
    b = A ** -3
    ref = np.abs(sf.airy_ai(grid.x / A)) ** 2
    for tau in (0.5, 1.5, 3.0):
        psi, _ = ev.solve_schrodinger_airy(grid, b, tau, scale)
        assert np.max(np.abs(np.abs(psi.values) ** 2 - ref)) < 1e-12


@pytest.mark.parametrize("b,A", [(1.0, 1.0), (0.3, 1.0), (2.0, 0.9)])
def test_closed_form_peak_and_density(b, A):
    grid = Grid(-40.0, 0.01, 6001)
    reports = ev.airy_packet_trajectory(grid, b, np.linspace(0, 2, 11), sf.AiryScale(A))
    dens = np.array([r.max_density for r in reports])
    assert (dens.max() - dens.min()) / dens.max() < 1e-2
    for r in reports:
        assert abs(r.x_peak - r.expected_x_peak) < 2 * grid.dx


def test_heat_airy_closed_form_matches_integral():
    grid = Grid.linspace(-8.0, 4.0, 61)
    got = ev.solve_heat_airy(grid, 0.4, 0.3).values
    x = grid.x + 0.4 * 0.09
    want = np.exp(ev.phase_phi(grid.x, 0.3, 0.4)) * sf.airy_two_var_closed(x, 0.3)
    assert relative_linf(got, want) < 1e-9


def test_rescaling_and_constants():
    tau, b = ev.rescale_schrodinger(2.0, 0.5, 1.0, 4.0)
    assert (tau, b) == (1.0, 2.0)
    assert ev.airy_constant_B(0.5, 8.0) == pytest.approx(8.0 ** (1 / 3))
    p = ev.LinearPotentialParams(A=1.5)
    assert p.scale.A == 1.5
    with pytest.raises(DomainError):
        ev.LinearPotentialParams(A=-1.0)


def test_centroid_closed_cases():
    t = np.linspace(0, 2, 201)
    np.testing.assert_allclose(ev.centroid_trajectory(lambda s: 0 * s, 1.2, 0.7, t),
                               1.2 ** 3 * t ** 2 / (4 * 0.49), atol=1e-14)
    got = ev.centroid_trajectory(lambda s: 0.3 + 0 * s, 1.0, 2.0, t)
    np.testing.assert_allclose(got, t ** 2 / 16 + 0.3 * t ** 2 / 4, atol=1e-13)


def test_centroid_sin_acceleration():
    t = np.linspace(0, 3, 3001)
    xc = ev.centroid_trajectory(np.sin, 1.0, 1.0, t)
    h = t[1] - t[0]
    acc = (xc[2:] - 2 * xc[1:-1] + xc[:-2]) / h ** 2
    target = 0.5 + np.sin(t[1:-1])
    assert np.max(np.abs(acc - target) / target) < 1e-4


def test_centroid_force_matches_schrodinger_peak():
    # a constant force -b in the scaled units moves the packet like the linear potential b x
    b = 0.6
    t = np.linspace(0, 2, 201)
    memory = ev.centroid_trajectory(lambda s: -b + 0 * s, 1e-9, 1.0, t)
    # factor 2 converts the scaled-time mass convention (2m = 1)
    np.testing.assert_allclose(2 * memory, -b * t ** 2, atol=1e-12)


def test_centroid_bad_grid():
    with pytest.raises(DomainError):
        ev.centroid_trajectory(np.sin, 1, 1, np.array([0.0, 1.0, 0.5]))
    with pytest.raises(DomainError):
        ev.centroid_trajectory(np.sin, 1, 1, np.array([0.1, 1.0]))
