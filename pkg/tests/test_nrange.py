import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idemkit import linalg as la
from idemkit.errors import BadParam, CheckFailed
from idemkit.grid import GridOperator, make_Qr, make_Sr
from idemkit.idempotent import random_idempotent
from idemkit.nrange import (EllipseParams, angle_grid, attain_interior, boundary_points,
                            closedness, direct_block_support, ellipse_2x2, fit_ellipse,
                            monte_carlo_points, numerical_radius, open_ellipse_qr,
                            operator_elliptical_range, sr_diagnostics, sr_support_exact,
                            support_function, support_profile, tq_ellipse, tq_ellipse_params,
                            tq_operator, tq_report)

from conftest import Q2

NIL = np.array([[0, 1], [0, 0]], dtype=complex)
# c + a for T_Q at ||Q|| = sqrt 2, i.e. d = (1 + sqrt 2) / 2
TQ_SUPPORT_0 = 2.235070109820131


def test_support_function_examples():
    assert support_function(np.eye(3), 0.0)[0] == pytest.approx(1.0)
    for al in np.linspace(0, 2 * np.pi, 9):
        assert support_function(NIL, al)[0] == pytest.approx(0.5, abs=1e-14)
    assert support_function(tq_operator(Q2), 0.0)[0] == pytest.approx(TQ_SUPPORT_0, abs=1e-12)


def test_boundary_points_examples():
    z = boundary_points(np.diag([0.0, 1.0]), angle_grid(16))
    assert np.allclose(z.imag, 0.0) and np.all((z.real >= -1e-15) & (z.real <= 1 + 1e-15))
    z = boundary_points(NIL, angle_grid(32))
    assert np.allclose(np.abs(z), 0.5, atol=1e-14)
    with pytest.raises(BadParam):
        boundary_points(NIL, angle_grid(4))


def test_nilpotent_disk_by_sampling(rng):
    zs = monte_carlo_points(NIL, 4000, rng)
    assert np.max(np.abs(zs)) <= 0.5 + 1e-12
    assert np.max(np.abs(zs)) > 0.49


def test_ellipse_2x2_examples():
    E = ellipse_2x2(np.diag([0.0, 1.0]))
    assert E.degenerate and E.minor_axis == pytest.approx(0.0, abs=1e-15)
    assert sorted(f.real for f in E.foci) == pytest.approx([0.0, 1.0])
    E = ellipse_2x2(NIL)
    assert E.foci[0] == pytest.approx(0) and E.foci[1] == pytest.approx(0)
    assert E.minor_axis == pytest.approx(1.0) and E.a == pytest.approx(0.5)
    for t in (1.0, 1.3, 2.0, 4.5):
        f = np.array([[t + 1, -la.ell(t)], [0, 0]])
        E = ellipse_2x2(f)
        assert sorted(fo.real for fo in E.foci) == pytest.approx([0.0, t + 1])
        assert E.minor_axis == pytest.approx(float(la.ell(t)), abs=1e-12)


def test_ellipse_point_parametrisation():
    E = EllipseParams(0.0, 0.0, 2.0, 1.0)
    al = angle_grid(12)
    r = np.sqrt(4 * np.cos(al) ** 2 + np.sin(al) ** 2)
    assert np.allclose(E.point(al), (4 * np.cos(al) + 1j * np.sin(al)) / r)
    assert np.allclose(E.level(E.point(al)), 1.0)


def test_fit_recovers_ellipse_2x2(rng):
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    E = ellipse_2x2(M)
    al = angle_grid(64)
    h = support_profile(M, al).values
    G = fit_ellipse(al, h, x_init=[E.x0, E.a, E.b, E.y0, E.theta])
    assert np.max(np.abs(G.support(al) - h)) <= 1e-9
    assert (G.a, G.b) == pytest.approx((E.a, E.b), abs=1e-8)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_ellipse_2x2_support_matches_eigen(seed):
    g = np.random.default_rng(seed)
    M = (g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2))) * g.uniform(0.1, 5)
    al = angle_grid(64)
    assert np.max(np.abs(ellipse_2x2(M).support(al) - support_profile(M, al).values)) <= 1e-9


def test_operator_elliptical_range_random_grid(rng):
    N = 60
    blocks = rng.normal(size=(N + 1, 2, 2)) + 1j * rng.normal(size=(N + 1, 2, 2))
    F = GridOperator(2.0, np.linspace(1, 2, N + 1), 0.3 - 0.2j, blocks)
    al = angle_grid(64)
    prof = operator_elliptical_range(F, al)
    assert np.max(np.abs(prof.values - support_profile(F, al).values)) <= 1e-9
    # per-block and dense eigensolves agree
    assert np.allclose(direct_block_support(F, al, dense_limit=0),
                       direct_block_support(F, al), atol=1e-10)


def test_operator_elliptical_range_detects_mismatch(monkeypatch):
    from idemkit import nrange
    F = make_Sr(3.0, 20)
    monkeypatch.setattr(nrange, "direct_block_support", lambda F, a, n=0: np.zeros(len(a)))
    with pytest.raises(CheckFailed):
        operator_elliptical_range(F, angle_grid(8))


def test_tq_2x2_is_quadratic_as_the_normal_form_predicts():
    rep = tq_report(Q2)
    assert rep["predicted_quadratic"] and rep["is_quadratic"]
    E = tq_ellipse(Q2)
    assert E.x0 + E.a == pytest.approx(TQ_SUPPORT_0, abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_tq_ellipse_random(seed):
    Q = random_idempotent(8, 3, 1.5, seed=seed)
    rep = tq_report(Q)
    d = rep["d"]
    E = tq_ellipse(Q)
    assert E.x0 == pytest.approx((d + 1) / 2, abs=1e-12)
    assert E.a == pytest.approx(np.sqrt(2 * d * d + d + 1) / 2, abs=1e-12)
    assert E.b == pytest.approx(float(la.ell(d)) / 2, abs=1e-12)
    assert not rep["predicted_quadratic"] and not rep["is_quadratic"]
    T = tq_operator(Q)
    assert la.op_norm(T) == pytest.approx(2 * E.a, abs=1e-7)
    assert numerical_radius(T) == pytest.approx(E.a + E.x0, abs=1e-7)
    zs = monte_carlo_points(T, 2000, np.random.default_rng(seed))
    assert np.max(E.level(zs)) <= 1 + 1e-7


def test_attain_interior(rng):
    Q = random_idempotent(6, 2, 1.2, seed=4)
    T = tq_operator(Q)
    E = tq_ellipse_params(0.5 * (Q.norm + 1))
    for _ in range(10):
        # interior point: convex combination of two attained values
        zs = monte_carlo_points(T, 2, rng)
        z = 0.5 * (zs[0] + zs[1])
        x = attain_interior(T, z)
        assert abs(np.vdot(x, T @ x) - z) <= 1e-6
        assert abs(np.linalg.norm(x) - 1) <= 1e-12
    assert E.level(z) < 1


def test_closedness_matrix():
    rep = closedness(random_idempotent(6, 3, 0.8, seed=2))
    assert rep.verdict == "closed" and rep.boundary_gap <= 1e-8


def test_closedness_continuum_qr_refines():
    gaps = [closedness(make_Qr(3.0, N)).boundary_gap for N in (100, 400)]
    assert all(g > 0 for g in gaps) and gaps[1] < gaps[0]
    rep = closedness(make_Qr(3.0, 100, continuum=False))
    assert rep.verdict == "closed" and rep.boundary_gap <= 1e-8


def test_open_ellipse_qr_at_r3():
    E = open_ellipse_qr(3.0)
    assert (E.x0, E.a ** 2, E.b ** 2) == pytest.approx((1.5, 2.75, 0.5), abs=1e-12)
    assert tq_ellipse_params(2.0).a == pytest.approx(E.a, abs=1e-12)


def test_sr_exact_values():
    assert sr_support_exact(3.0, 0.0) == pytest.approx(3.0, abs=1e-12)
    assert sr_support_exact(3.0, np.pi) == pytest.approx(2.0, abs=1e-12)
    assert sr_support_exact(3.0, 0.5 * np.pi) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(BadParam):
        sr_support_exact(1.0, 0.0)


def test_sr_diagnostics_small():
    diag = sr_diagnostics(2.0, 200, angles=64, refine=(4,))
    d = diag["d"]
    assert diag["regime_right"]["argmax_at_d"] and diag["regime_left"]["argmax_at_1"]
    assert diag["regime_right"]["max_dev"] <= 1e-12
    assert diag["fit"]["mismatch"] > diag["fit"]["floor"]
    assert diag["grid_profile_error"] <= 5 * diag["mesh_h"]
    gaps = [g for _, g in diag["attainment"]["gaps"]]
    assert gaps[0] > gaps[1] > 0
    assert diag["attainment"]["h_pi"] == pytest.approx(2 * (d - 1), abs=1e-10)
