"""Curvature workspace: tensors, block decomposition, perturbed family."""

import itertools
import math

import numpy as np
import pytest

from collarlab import (CurvatureWorkspace, hermitian_defect,
                       perturbed_prediction, upper_index)

PI = math.pi


@pytest.fixture(scope="module")
def ws1():
    return CurvatureWorkspace.single_collar(0.1, n_tau=1024)


@pytest.fixture(scope="module")
def ws2():
    return CurvatureWorkspace.from_u_values([0.09, 0.06], n_tau=1024,
                                            kappa=1.0)


def test_upper_index_conventions():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = a @ np.conj(a.T) + 3 * np.eye(3)
    g = upper_index(h)
    np.testing.assert_allclose(np.conj(g) @ h, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(upper_index(g), h, atol=1e-12)
    d = upper_index(np.diag([2.0 + 0j, 4.0]))
    np.testing.assert_allclose(np.diag(d), [0.5, 0.25])


def test_wp_metric_and_cometric_consistent(ws1):
    h = ws1.h().values[0, 0].real
    hup = ws1.h_upper()[0, 0].real
    assert h * hup == pytest.approx(1.0, rel=1e-14)
    u = 0.1
    assert abs(h / (u**3 / 2) - 1) < 3 * u


def test_first_metric_symmetries(ws2):
    scale = max(abs(ws2.R(*idx))
                for idx in itertools.product(range(2), repeat=4))
    for i, j, k, l in itertools.product(range(2), repeat=4):
        r = ws2.R(i, j, k, l)
        assert abs(r - ws2.R(k, j, i, l)) <= 1e-12 * scale
        assert abs(r - ws2.R(i, l, k, j)) <= 1e-12 * scale


def test_wp_tensor_is_hermitian(ws2):
    assert hermitian_defect(ws2.wp_tensor()) <= 1e-12


def test_tau_matches_leading_order(ws1):
    tau = ws1.tau()
    assert tau.kind == "Ricci"
    val = tau.values[0, 0].real
    assert abs(val / (3 / (4 * PI**2) * 0.1**2) - 1) < 1e-2


def test_g1_terms_at_desk_scale(ws1):
    rep = ws1.g1_terms()
    for k, ratio in rep.ratios().items():
        assert abs(ratio - 1) < 2e-2, k
    assert rep.total == pytest.approx(sum(rep.terms.values()), rel=1e-15)
    assert rep.total_target == pytest.approx(6 * 0.1**4 / (16 * PI**4),
                                             rel=1e-15)
    base = 0.1**4 / (16 * PI**4)
    assert rep.targets["g1-term-1"] == pytest.approx(9 * base, rel=1e-15)
    assert rep.targets["g1-term-3"] == pytest.approx(-3 * base, rel=1e-15)


def test_ricci_curvature_sums_blocks(ws1):
    got = ws1.ricci_curvature(0, 0, 0, 0)
    want = (ws1.block_a(0, 0, 0, 0) + ws1.block_b(0, 0, 0, 0)
            + ws1.block_c(0, 0, 0, 0) + ws1.block_d(0, 0, 0, 0))
    assert got == pytest.approx(want, rel=1e-15)


def test_perturbed_reduces_to_unperturbed_at_zero(ws1):
    assert ws1.perturbed_curvature(0, 0, 0, 0, 0.0) == pytest.approx(
        ws1.ricci_curvature(0, 0, 0, 0), rel=1e-12)


def test_perturbed_matches_prediction():
    ws = CurvatureWorkspace.single_collar(0.05, n_tau=1024)
    for C in (1.0, 10.0):
        val = ws.perturbed_curvature(0, 0, 0, 0, C).real
        assert val / perturbed_prediction(0.05, C) == pytest.approx(1.0,
                                                                    abs=1e-2)


def test_perturbed_inverse_dominance(ws1):
    tau_up = upper_index(ws1.tau().values)[0, 0].real
    for C in (1.0, 10.0):
        m = ws1.perturbed_metric(C)
        assert m.kind == "perturbed-Ricci"
        til_up = upper_index(m.values)[0, 0].real
        assert 0.0 < til_up < tau_up


def test_zero_coupling_kills_cross_entries():
    ws = CurvatureWorkspace.from_u_values([0.08, 0.05], n_tau=512, kappa=0.0)
    assert ws.R(0, 0, 0, 1) == 0.0
    assert ws.ricci_curvature(0, 0, 0, 1) == 0.0
    assert ws.tau().values[0, 1] == 0.0


def test_coupling_produces_cross_entries(ws2):
    assert abs(ws2.R(0, 0, 0, 1)) > 0.0
    assert abs(ws2.ricci_curvature(0, 0, 0, 1)) > 0.0


def test_workspace_memoizes(ws1):
    assert ws1.e_pair(0, 0, 0) is ws1.e_pair(0, 0, 0)
    assert ws1.R(0, 0, 0, 0) == ws1.R(0, 0, 0, 0)


def test_single_collar_phase_rotates_family():
    ws = CurvatureWorkspace.single_collar(0.1, n_tau=512, phase=0.7)
    b = ws.bspec.entries[(0, 0)].b
    assert abs(b) == pytest.approx(0.1 / PI, rel=1e-12)
    assert np.angle(-b) == pytest.approx(0.7, abs=1e-12)
    # diagonal metric entries are phase-invariant
    ws0 = CurvatureWorkspace.single_collar(0.1, n_tau=512)
    assert ws.h().values[0, 0].real == pytest.approx(
        ws0.h().values[0, 0].real, rel=1e-12)


def test_hermitian_defect_detects_asymmetry():
    t = np.zeros((1, 1, 1, 1), dtype=complex)
    t[0, 0, 0, 0] = 1j
    assert hermitian_defect(t) > 0.0
