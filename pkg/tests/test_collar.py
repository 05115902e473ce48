"""Collar geometry, the tau grid, and its calculus."""

import math

import numpy as np
import pytest

from collarlab import (CollarError, CollarParams, collar_from_t, collar_from_u,
                       geodesic_circle, make_grid, metric_density)
from collarlab.collar import U_MAX, U_MIN

PI = math.pi


def test_u_and_rho_derived_from_t():
    col = collar_from_t(math.exp(-10.0))
    assert col.u == pytest.approx(PI / 10.0, rel=1e-15)
    assert col.rho == pytest.approx(math.exp(-10.0), rel=1e-15)


def test_tau_interval_frozen_values():
    # u = pi/10, c = 0.5: interval (-pi + (pi/10) log 2, -(pi/10) log 2)
    col = collar_from_t(math.exp(-10.0), c=0.5)
    assert col.tau_min == pytest.approx(-2.92383, abs=5e-6)
    assert col.tau_max == pytest.approx(-0.21776, abs=5e-6)
    assert -PI < col.tau_min < col.tau_max < 0.0


def test_r_tau_roundtrip():
    col = collar_from_u(0.1)
    tau = np.linspace(col.tau_min, col.tau_max, 17)
    np.testing.assert_allclose(col.tau_of_r(col.r_of_tau(tau)), tau, rtol=1e-14)
    r = np.geomspace(col.rho / col.c, col.c, 17)
    np.testing.assert_allclose(col.r_of_tau(col.tau_of_r(r)), r, rtol=1e-14)


def test_collar_validation_errors():
    with pytest.raises(CollarError):
        collar_from_t(1.5)
    with pytest.raises(CollarError):
        collar_from_t(0.0)
    with pytest.raises(CollarError):
        collar_from_t(math.exp(-10.0), c=1.5)
    with pytest.raises(CollarError):
        collar_from_u(U_MAX * 2)
    with pytest.raises(CollarError):
        collar_from_u(U_MIN / 2)
    # u = 0.5 is allowed but c = 0.04 < e^{-pi} empties the interval
    with pytest.raises(CollarError, match="cut c too small"):
        CollarParams(t=complex(math.exp(-2 * PI)), c=0.04)


def test_geodesic_circle():
    col = collar_from_u(0.1)
    r_star, length = geodesic_circle(col)
    assert r_star == pytest.approx(math.sqrt(col.rho), rel=1e-15)
    assert length == pytest.approx(2 * PI * 0.1, rel=1e-15)


def test_metric_density_matches_grid_lam():
    col = collar_from_u(0.1)
    grid = make_grid(col, 256)
    np.testing.assert_allclose(metric_density(col, grid.nodes), grid.lam,
                               rtol=1e-13)
    # spot value at tau = -pi/2: lambda = u^2 / (2 r^2)
    val = metric_density(col, -PI / 2)
    assert val == pytest.approx(0.5 * 0.1**2 / col.r_of_tau(-PI / 2) ** 2,
                                rel=1e-14)


def test_make_grid_rejects_coarse_grids():
    col = collar_from_u(0.1)
    with pytest.raises(ValueError):
        make_grid(col, 32)


def test_grid_covers_interval():
    # Gauss nodes live strictly inside (tau_min, tau_max)
    col = collar_from_u(0.05)
    grid = make_grid(col, 512)
    assert col.tau_min < grid.nodes[0] < grid.nodes[-1] < col.tau_max
    assert grid.nodes[0] - col.tau_min < 0.02 * col.u
    assert col.tau_max - grid.nodes[-1] < 0.02 * col.u
    assert np.all(np.diff(grid.nodes) > 0)


def test_quadrature_closed_forms():
    col = collar_from_u(0.1)
    grid = make_grid(col, 512)
    a, b = col.tau_min, col.tau_max
    # polynomial: panels of 10 Gauss nodes are exact far beyond degree 3
    assert grid.integrate(grid.nodes**3) == pytest.approx((b**4 - a**4) / 4,
                                                          rel=1e-13)
    closed = (b - a) / 2 - (math.sin(2 * b) - math.sin(2 * a)) / 4
    assert grid.integrate(grid.sin_tau**2) == pytest.approx(closed, rel=1e-12)


def test_dtau_accuracy_on_trig():
    col = collar_from_u(0.1)
    grid = make_grid(col, 1024)
    f = np.sin(3 * grid.nodes)
    d1 = grid.dtau(f)
    d2 = grid.dtau(f, 2)
    assert np.abs(d1 - 3 * np.cos(3 * grid.nodes)).max() < 1e-8
    assert np.abs(d2 + 9 * np.sin(3 * grid.nodes)).max() < 1e-6


def test_dtau_polynomial_exactness():
    # 9-point stencils reproduce degree-8 polynomials up to roundoff
    col = collar_from_u(0.1)
    grid = make_grid(col, 256)
    f = grid.nodes**8
    scale = np.abs(f).max()
    assert np.abs(grid.dtau(f) - 8 * grid.nodes**7).max() < 1e-7 * scale
    assert np.abs(grid.dtau(f, 2) - 56 * grid.nodes**6).max() < 1e-4 * scale


def test_grid_geometry_arrays():
    col = collar_from_u(0.1)
    grid = make_grid(col, 256)
    np.testing.assert_allclose(grid.r, col.r_of_tau(grid.nodes), rtol=1e-14)
    np.testing.assert_allclose(grid.sin_tau, np.sin(grid.nodes), rtol=0,
                               atol=1e-15)
    np.testing.assert_allclose(grid.csc2, 1.0 / grid.sin_tau**2, rtol=1e-14)
    np.testing.assert_allclose(grid.lam * grid.inv_lam, 1.0, rtol=1e-14)
