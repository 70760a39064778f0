"""Operator-norm distances between an idempotent Q and the projections.

Every projection P satisfies min_Q <= ||P - Q|| <= max_Q, where

    min_Q = ||m(Q) - Q|| = (||Q|| - 1 + sqrt(||Q||^2 - 1)) / 2,
    max_Q = ||I - m(Q) - Q|| = 1 + min_Q,

and each value in between is attained. `projection_at_distance` builds such a
projection by bisection along explicit continuous paths of projections.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import CheckFailed, IsProjection, NoConvergence, OutOfRange
from .idempotent import (as_idempotent, block_form, matched_projection,
                         random_projection, range_projection)

SCAN_SAMPLES = 64


@dataclass(frozen=True, eq=False)
class DistanceReport:
    min_dist: float
    max_dist: float
    lambda_Q: float
    mu_Q: float
    witness_min: np.ndarray
    witness_max: np.ndarray


def _check(what, residual, tol):
    if not residual <= tol:
        raise CheckFailed(what, residual, tol)


def _tol(Q, tol):
    return 1e-9 * (1.0 + Q.norm) if tol is None else tol


def min_distance_formula(q):
    """(q - 1 + sqrt(q^2 - 1)) / 2 for an idempotent of norm q."""
    return 0.5 * (q - 1.0 + np.sqrt(max(q * q - 1.0, 0.0)))


def min_distance(Q, tol=None):
    """Closed-form minimum distance, checked against ||m(Q) - Q||."""
    Q = as_idempotent(Q)
    closed = min_distance_formula(Q.norm)
    direct = la.op_norm(matched_projection(Q) - Q.Q)
    _check("||m(Q)-Q|| vs closed form", abs(closed - direct), _tol(Q, tol))
    return closed


def max_distance(Q, tol=None):
    """1 + min_distance, checked against ||I - m(Q) - Q||."""
    Q = as_idempotent(Q)
    closed = 1.0 + min_distance_formula(Q.norm)
    direct = la.op_norm(np.eye(Q.n) - matched_projection(Q) - Q.Q)
    _check("||I-m(Q)-Q|| vs 1 + min", abs(closed - direct), _tol(Q, tol))
    return closed


def s_norm_formula(a):
    """||I - Q - Q* + 2Q*Q|| when the off-diagonal block has norm a."""
    return 1.0 + a * a + a * np.sqrt(1.0 + a * a)


def sqp_invariant(Q, rng=None, probes=3, tol=None):
    """S = I - Q - Q* + 2Q*Q.

    For any projection P, (P-Q)*(P-Q) + (I-P-Q)*(I-P-Q) = S. This is checked on
    `probes` random projections, and ||S|| is checked against the closed form.
    """
    Q = as_idempotent(Q)
    rng = np.random.default_rng(0) if rng is None else rng
    n = Q.n
    I = np.eye(n)
    Qm, Qa = Q.Q, la.adj(Q.Q)
    S = I - Qm - Qa + 2.0 * Qa @ Qm
    tol = 1e-10 * (1.0 + Q.norm ** 2) if tol is None else tol
    for _ in range(probes):
        P = random_projection(n, rng)
        X, Y = P - Qm, I - P - Qm
        _check("S_{Q,P} independent of P", la.op_norm(la.adj(X) @ X + la.adj(Y) @ Y - S), tol)
    a = la.op_norm(block_form(Q).A)
    _check("||S|| vs 1+a^2+a*sqrt(1+a^2)", abs(la.op_norm(S) - s_norm_formula(a)), 1e-9 * (1 + a * a))
    return S


def lambda_mu(Q):
    """(||P_R(Q) - Q||, ||I - P_R(Q) - Q||)."""
    Q = as_idempotent(Q)
    PR = range_projection(Q)
    return la.op_norm(PR - Q.Q), la.op_norm(np.eye(Q.n) - PR - Q.Q)


def distance_report(Q, tol=None):
    Q = as_idempotent(Q)
    m = matched_projection(Q)
    lam, mu = lambda_mu(Q)
    return DistanceReport(min_distance(Q, tol), max_distance(Q, tol), lam, mu, m, np.eye(Q.n) - m)


def null_padding_probe(Q):
    """Distances for P = m(Q) + P_H4, where H4 = N(Q) & N(Q*).

    Such a P has ||P - Q|| = max(min_Q, 1) while ||I - P - Q|| is still max_Q,
    so a projection can reach the maximum without its complement reaching
    the minimum. Returns None when H4 = {0}.
    """
    Q = as_idempotent(Q)
    H4 = la.intersect(la.kernel_basis(Q.Q), la.kernel_basis(la.adj(Q.Q)))
    if H4.shape[1] == 0:
        return None
    P = matched_projection(Q) + la.projector(H4)
    return {
        "dim_H4": int(H4.shape[1]),
        "P_minus_Q": la.op_norm(P - Q.Q),
        "I_minus_P_minus_Q": la.op_norm(np.eye(Q.n) - P - Q.Q),
        "projection": P,
    }


# --- constructive intermediate values ---------------------------------------

def _scaled_family(Q):
    """s -> U [[I, sA], [0, 0]] U*: idempotents from P_R(Q) (s=0) to Q (s=1)."""
    bf = block_form(Q)
    k = bf.U1.shape[1]
    U, Ua = bf.U, la.adj(bf.U)
    n = U.shape[0]

    def at(s):
        M = np.zeros((n, n), dtype=complex)
        M[:k, :k] = np.eye(k)
        M[:k, k:] = s * bf.A
        return U @ M @ Ua

    return at


def _rotation_legs(Q):
    """The two legs t -> P_{t,S} for S empty and S = all of K3.

    Works in H = K1 + K1' + K3 with K1' a copy of K1 inside K2. When
    dim K1 > dim K2 the construction runs on I - Q* and the output projections
    are complemented, since ||(I - P) - Q|| = ||P - (I - Q*)||.
    """
    n = Q.n
    flip = False
    Qw = Q.Q
    bf = block_form(Qw)
    if bf.U1.shape[1] > bf.U2.shape[1]:
        flip = True
        Qw = np.eye(n) - la.adj(Q.Q)
        bf = block_form(Qw)
    k = bf.U1.shape[1]
    U, Ua = bf.U, la.adj(bf.U)
    I = np.eye(n)

    def leg(full_k3):
        def at(t):
            c, s = np.cos(0.5 * np.pi * t), np.sin(0.5 * np.pi * t)
            M = np.zeros((n, n), dtype=complex)
            M[:k, :k] = c * c * np.eye(k)
            M[:k, k:2 * k] = c * s * np.eye(k)
            M[k:2 * k, :k] = c * s * np.eye(k)
            M[k:2 * k, k:2 * k] = s * s * np.eye(k)
            if full_k3:
                M[2 * k:, 2 * k:] = np.eye(n - 2 * k)
            P = U @ M @ Ua
            return I - P if flip else P
        return at

    return leg(False), leg(True)


def _legs(Q):
    n = Q.n
    fam = _scaled_family(Q.Q)
    fam_c = _scaled_family(np.eye(n) - la.adj(Q.Q))
    l2a, l2b = _rotation_legs(Q)
    return [
        ("min-to-lambda", lambda s: matched_projection(fam(1.0 - s))),
        ("lambda-to-mu/empty", l2a),
        ("lambda-to-mu/full", l2b),
        ("mu-to-max", lambda s: matched_projection(fam_c(s))),
    ]


def projection_at_distance(Q, alpha, dist_tol=1e-6, samples=SCAN_SAMPLES, max_iter=200):
    """A projection P with | ||P - Q|| - alpha | <= dist_tol.

    Four continuous legs cover [min_Q, lambda_Q], [lambda_Q, mu_Q] (two legs)
    and [mu_Q, max_Q]. Each leg is scanned at `samples` points; bisection
    runs on the first sub-interval whose end values bracket alpha.
    """
    Q = as_idempotent(Q)
    if Q.is_projection:
        raise IsProjection("intermediate distances are built for non-projection idempotents")
    lo, hi = min_distance_formula(Q.norm), 1.0 + min_distance_formula(Q.norm)
    if not lo - dist_tol <= alpha <= hi + dist_tol:
        raise OutOfRange(f"alpha={alpha} outside [{lo}, {hi}]")

    def gap(P):
        return la.op_norm(P - Q.Q) - alpha

    grid = np.linspace(0.0, 1.0, samples)
    for _, leg in _legs(Q):
        Ps = [leg(s) for s in grid]
        g = np.array([gap(P) for P in Ps])
        hit = np.flatnonzero(np.abs(g) <= 0.01 * dist_tol)
        if hit.size:
            return Ps[hit[0]]
        cross = np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:]))
        if cross.size == 0:
            continue
        i = cross[0]
        a, b, ga = grid[i], grid[i + 1], g[i]
        for _ in range(max_iter):
            mid = 0.5 * (a + b)
            P = leg(mid)
            gm = gap(P)
            if abs(gm) <= 0.01 * dist_tol:
                return P
            if np.sign(gm) == np.sign(ga):
                a, ga = mid, gm
            else:
                b = mid
            if b - a < 1e-15:
                break
        if abs(gm) <= dist_tol:
            return P
        raise NoConvergence(f"bisection stalled at residual {abs(gm):.3e}")
    raise NoConvergence(f"no leg brackets alpha={alpha}")
