"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import sys
from functools import lru_cache

import numpy as np
import pytest

from idemkit import linalg as la
from idemkit.canonical import canonical_form, invariant_subspaces
from idemkit.distance import min_distance_formula, projection_at_distance, s_norm_formula
from idemkit.grid import (UNIVERSAL, distinguish, grid_matched_projection, make_Qr, make_q_r_alt,
                          universal_check, GridOperator)
from idemkit.idempotent import (block_form, matched_projection, random_idempotent,
                                random_projection, reconstruct_from_matched)
from idemkit.nrange import (angle_grid, attain_interior, closedness, direct_block_support,
                            ellipse_2x2, fit_ellipse, monte_carlo_points, numerical_radius,
                            open_ellipse_qr, operator_elliptical_range, sr_diagnostics,
                            support_profile, tq_ellipse, tq_ellipse_params, tq_operator)

RESULTS = {}


@lru_cache(maxsize=None)
def corpus():
    """200 random idempotents, n <= 60, ||A|| in [0.1, 5]."""
    g = np.random.default_rng(1001)
    out = []
    for _ in range(200):
        n = int(g.integers(2, 61))
        k = int(g.integers(1, n))
        out.append(random_idempotent(n, k, float(g.uniform(0.1, 5.0)), rng=g))
    return tuple(out)


def record(num, title, worst, tol, ok=None, lower_bound=False):
    """Store and print one result line. With `lower_bound`, `tol` is a floor that `worst` must reach."""
    if ok is None:
        ok = worst >= tol if lower_bound else worst <= tol
    bound = f"needs >= {tol:.1e}" if lower_bound else f"tol {tol:.1e}"
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: worst {worst:.3e} ({bound})"
    RESULTS[num] = line
    print(line)
    return ok


def c1():
    worst = 0.0
    for Q in corpus():
        m = matched_projection(Q)
        I = np.eye(Q.n)
        worst = max(worst, la.op_norm(m @ m - m), la.op_norm(m - m.conj().T),
                    la.op_norm(matched_projection(Q.Q.conj().T) - m),
                    la.op_norm(matched_projection(I - Q.Q) - (I - m)))
    return record(1, "matched-projection laws", worst, 1e-9)


def c2():
    worst = 0.0
    for Q in corpus():
        m = matched_projection(Q)
        lo = la.op_norm(m - Q.Q)
        hi = la.op_norm(np.eye(Q.n) - m - Q.Q)
        worst = max(worst, abs(lo - min_distance_formula(Q.norm)), abs(hi - (1 + lo)))
    return record(2, "distance closed forms", worst, 1e-9)


def c3():
    rng = np.random.default_rng(3003)
    worst = -np.inf
    for Q in corpus()[:20]:
        lo = min_distance_formula(Q.norm)
        hi = 1 + lo
        for _ in range(1000):
            d = la.op_norm(random_projection(Q.n, rng) - Q.Q)
            worst = max(worst, lo - d, d - hi)
    return record(3, "extremality over 1e3 projections per Q (violation)", worst, 1e-9)


def c4():
    g = np.random.default_rng(4004)
    worst = 0.0
    for _ in range(20):
        n = int(g.integers(2, 31))
        Q = random_idempotent(n, int(g.integers(1, n)), float(g.uniform(0.1, 5.0)), rng=g)
        lo = min_distance_formula(Q.norm)
        for alpha in g.uniform(lo, lo + 1.0, 10):
            P = projection_at_distance(Q, alpha)
            worst = max(worst, abs(la.op_norm(P - Q.Q) - alpha))
    return record(4, "intermediate values |‖P−Q‖−α|", worst, 1e-6)


def c5():
    rng = np.random.default_rng(5005)
    inv, nrm = 0.0, 0.0
    for Q in corpus():
        I = np.eye(Q.n)
        Qa = Q.Q.conj().T
        S = I - Q.Q - Qa + 2 * Qa @ Q.Q
        for _ in range(5):
            P = random_projection(Q.n, rng)
            X, Y = P - Q.Q, I - P - Q.Q
            inv = max(inv, la.op_norm(X.conj().T @ X + Y.conj().T @ Y - S))
        a = la.op_norm(block_form(Q).A)
        nrm = max(nrm, abs(la.op_norm(S) - s_norm_formula(a)))
    ok = inv <= 1e-10 and nrm <= 1e-9
    return record(5, f"S invariance {inv:.2e} (tol 1e-10), ‖S‖ formula", nrm, 1e-9, ok)


def c6():
    rec, nrm, dims_ok = 0.0, 0.0, True
    for Q in corpus():
        cf = canonical_form(Q)
        rec = max(rec, la.op_norm(cf.rebuild_Q() - Q.Q) / Q.norm,
                  la.op_norm(cf.rebuild_m() - matched_projection(Q)) / Q.norm)
        nrm = max(nrm, abs(Q.norm - max(1.0, 2 * cf.d - 1)))
        subs = invariant_subspaces(Q)
        got = tuple(subs[h].shape[1] for h in ("H1", "H4", "H5", "H6"))
        dims_ok &= got == (cf.h1, cf.h4, cf.h5, cf.h5)
    ok = rec <= 1e-8 and nrm <= 1e-9 and dims_ok
    return record(6, f"canonical form: norm identity {nrm:.2e} (tol 1e-9), dims match={dims_ok}, "
                     "reconstruction/‖Q‖", rec, 1e-8, ok)


def c7():
    worst = max(la.op_norm(reconstruct_from_matched(Q) - Q.Q) for Q in corpus())
    return record(7, "Q rebuilt from P_R(Q) and m(Q)", worst, 1e-8)


def c8():
    r = 3.0
    F = make_Qr(r, 1000)
    h = F.mesh_h
    sq = np.einsum("nij,njk->nik", F.blocks, F.blocks)
    idem = float(np.max(np.abs(sq - F.blocks)))
    norm_err = abs(F.grid_norm - r)
    m = grid_matched_projection(F)
    m_err = max(float(np.max(np.abs(m.blocks - np.array([[1, 0], [0, 0]])))), abs(m.scalar_slot - 1))
    rep = universal_check(F)
    gap_ok = abs(rep.gap - h) <= 1e-9 * h
    ok = (idem <= 16 * np.finfo(float).eps * r * r and norm_err <= 2 * h * 3 and m_err <= 1e-12
          and rep.verdict == UNIVERSAL and gap_ok)
    return record(8, f"Q_r grid: idempotency {idem:.1e}, ‖·‖−r {norm_err:.1e}, "
                     f"verdict {rep.verdict}, gap {rep.gap:.6g} vs mesh_h {h:.6g}, m error", m_err, 1e-12, ok)


def c9():
    g = np.random.default_rng(9009)
    al = angle_grid(64)
    worst = 0.0
    for _ in range(500):
        M = (g.normal(size=(2, 2)) + 1j * g.normal(size=(2, 2))) * g.uniform(0.1, 5.0)
        worst = max(worst, float(np.max(np.abs(ellipse_2x2(M).support(al) - support_profile(M, al).values))))
    return record(9, "2×2 ellipse support vs eigenvalue support", worst, 1e-9)


def c10():
    g = np.random.default_rng(1010)
    al = angle_grid(64)
    N = 200
    worst = 0.0
    for _ in range(50):
        blocks = (g.normal(size=(N + 1, 2, 2)) + 1j * g.normal(size=(N + 1, 2, 2))) * g.uniform(0.1, 3.0)
        slot = complex(g.normal(), g.normal()) if g.uniform() < 0.5 else None
        F = GridOperator(float(g.uniform(1.1, 4.0)), np.linspace(1.0, 2.0, N + 1), slot, blocks)
        direct = direct_block_support(F, al)  # dense eigensolve of the assembled matrix
        sweep = support_profile(F, al, witnesses=False).values
        union = operator_elliptical_range(F, al, verify=False).values
        worst = max(worst, float(np.max(np.abs(sweep - direct))), float(np.max(np.abs(union - direct))))
    return record(10, "grid max-over-t profile vs block-diagonal eigenvalues", worst, 1e-9)


def c11():
    g = np.random.default_rng(1111)
    al = angle_grid(64)
    par = nrm = att = 0.0
    mc = -np.inf
    targets = 0
    for i in range(10):
        n = int(g.integers(2, 21))
        Q = random_idempotent(n, int(g.integers(1, n)), float(g.uniform(0.1, 5.0)), rng=g)
        d = 0.5 * (Q.norm + 1)
        E = tq_ellipse(Q, check=False)
        T = tq_operator(Q)
        prof = support_profile(T, al).values
        G = fit_ellipse(al, prof, fix_y0=0.0, axis_aligned=True, x_init=[E.x0, E.a, E.b])
        par = max(par, abs(G.x0 - (d + 1) / 2), abs(G.a - np.sqrt(2 * d * d + d + 1) / 2),
                  abs(G.b - float(la.ell(d)) / 2), float(np.max(np.abs(prof - E.support(al)))))
        nrm = max(nrm, abs(la.op_norm(T) - 2 * E.a), abs(numerical_radius(T) - (E.a + E.x0)))
        zs = monte_carlo_points(T, 10_000, g)
        mc = max(mc, float(np.max(E.level(zs))) - 1.0)
        for _ in range(2):
            rho, phi = np.sqrt(g.uniform(0, 0.9)), g.uniform(0, 2 * np.pi)
            z = E.x0 + rho * (E.a * np.cos(phi) + 1j * E.b * np.sin(phi))
            x = attain_interior(T, z)
            att = max(att, abs(np.vdot(x, T @ x) - z))
            targets += 1
    ok = par <= 1e-8 and nrm <= 1e-7 and mc <= 1e-7 and att <= 1e-6 and targets == 20
    return record(11, f"T_Q ellipse: params {par:.1e} (1e-8), ‖T‖/w(T) {nrm:.1e} (1e-7), "
                      f"MC excess {mc:.1e} (1e-7), attainment at {targets} targets", att, 1e-6, ok)


def c12():
    gaps_m = max(closedness(random_idempotent(8, 3, a, seed=s)).boundary_gap
                 for s, a in enumerate((0.3, 1.0, 2.5, 4.0)))
    reps = [closedness(make_Qr(3.0, N)) for N in (100, 400, 1600)]
    gaps = [rp.boundary_gap for rp in reps]
    refine_ok = all(g > 0 for g in gaps) and gaps[0] > gaps[1] > gaps[2]
    open_ok = all(rp.verdict == "open" for rp in reps)
    E = open_ellipse_qr(3.0)
    Ed = tq_ellipse_params(2.0)
    analytic = max(abs(E.x0 - 1.5), abs(E.a ** 2 - 2.75), abs(E.b ** 2 - 0.5),
                   abs(Ed.x0 - E.x0), abs(Ed.a - E.a), abs(Ed.b - E.b))
    ok = gaps_m <= 1e-8 and refine_ok and open_ok and analytic <= 1e-10
    return record(12, f"closedness: Q_r gaps {', '.join(f'{g:.2e}' for g in gaps)} decreasing={refine_ok}, "
                      f"ellipse constants {analytic:.1e} (1e-10), matrix boundary gap", gaps_m, 1e-8, ok)


def c13():
    ok = True
    parts = []
    worst_fit_margin = np.inf
    for r in (1.5, 2.0, 3.0):
        dg = sr_diagnostics(r, 100, angles=256, refine=(4, 16))
        d = dg["d"]
        prof_ok = dg["grid_profile_error"] <= 5 * dg["mesh_h"]
        reg_ok = (dg["regime_right"]["max_dev"] <= 1e-12 and dg["regime_left"]["max_dev"] <= 1e-12
                  and dg["regime_right"]["argmax_at_d"] and dg["regime_left"]["argmax_at_1"])
        fit, floor = dg["fit"]["mismatch"], dg["fit"]["floor"]
        gaps = [gp for _, gp in dg["attainment"]["gaps"]]
        att_ok = all(gp > 0 for gp in gaps) and all(a > b for a, b in zip(gaps, gaps[1:]))
        hpi_ok = abs(dg["attainment"]["h_pi"] - 2 * (d - 1)) <= 1e-10
        worst_fit_margin = min(worst_fit_margin, fit / floor)
        ok &= prof_ok and reg_ok and fit > floor and att_ok and hpi_ok
        parts.append(f"r={r}: fit {fit:.2e}>{floor:.1e}")
    return record(13, "S_r diagnostics (" + "; ".join(parts) + "); min fit/floor ratio",
                  worst_fit_margin, 1.0, ok, lower_bound=True)


def c14():
    ok = True
    worst = np.inf
    for N in (100, 200, 500, 1000, 2000):
        rep = distinguish(make_Qr(3.0, N), make_q_r_alt(3.0, N))
        ok &= rep["kernel_Qr"] == 1 and rep["kernel_qr"] >= N / 2 - 1 and rep["separated"]
        worst = min(worst, rep["kernel_qr"] / (N / 2 - 1))
    return record(14, "kernel-count discriminant separates Q_r from q_r; min count/(N/2−1)", worst, 1.0, ok,
                  lower_bound=True)


CRITERIA = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i + 1:02d}" for i in range(len(CRITERIA))])
def test_criterion(crit):
    assert crit(), RESULTS.get(CRITERIA.index(crit) + 1)


if __name__ == "__main__":
    failures = sum(not c() for c in CRITERIA)
    sys.exit(1 if failures else 0)
