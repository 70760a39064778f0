"""Numerical ranges through their support functions.

For a bounded T the support function of W(T) in direction a is

    h(a) = sup { Re(z e^{-ia}) : z in W(T) } = top eigenvalue of Re(e^{-ia} T),

attained at the top eigenvector. A 2x2 matrix has an elliptical numerical
range with foci at its eigenvalues; a block-diagonal operator built from 2x2
blocks has the closed convex hull of the block ellipses as the closure of its
numerical range, so its support function is the pointwise maximum.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares, minimize_scalar

from . import _kernels
from . import linalg as la
from .canonical import canonical_form
from .errors import BadParam, CheckFailed, IsProjection, NoConvergence
from .grid import GridOperator, cell_average_blocks, make_Sr
from .idempotent import as_idempotent, matched_projection

NONELLIPSE_FLOOR = 1e-3


# --- ellipses ----------------------------------------------------------------

@dataclass(frozen=True)
class EllipseParams:
    """Closed elliptical disk with centre x0 + i y0 and semi-axes a >= b.

    The major axis makes angle `theta` with the real axis. Foci and the minor
    axis length are kept when the ellipse came from a 2x2 matrix.
    """
    x0: float
    y0: float
    a: float
    b: float
    theta: float = 0.0
    foci: Optional[tuple] = None

    @property
    def degenerate(self):
        return self.a * self.b <= 1e-15 * max(1.0, self.a * self.a)

    @property
    def minor_axis(self):
        return 2.0 * self.b

    def support(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        phi = alpha - self.theta
        return (self.x0 * np.cos(alpha) + self.y0 * np.sin(alpha)
                + np.sqrt(self.a ** 2 * np.cos(phi) ** 2 + self.b ** 2 * np.sin(phi) ** 2))

    def point(self, alpha):
        """Boundary point z_a where the supporting line in direction a touches."""
        alpha = np.asarray(alpha, dtype=float)
        phi = alpha - self.theta
        r = np.sqrt(self.a ** 2 * np.cos(phi) ** 2 + self.b ** 2 * np.sin(phi) ** 2)
        r = np.where(r > 0, r, 1.0)
        local = (self.a ** 2 * np.cos(phi) + 1j * self.b ** 2 * np.sin(phi)) / r
        return self.x0 + 1j * self.y0 + np.exp(1j * self.theta) * local

    def level(self, z):
        """(x/a)^2 + (y/b)^2 in the ellipse frame; <= 1 inside."""
        w = (np.asarray(z) - (self.x0 + 1j * self.y0)) * np.exp(-1j * self.theta)
        return (w.real / self.a) ** 2 + (w.imag / self.b) ** 2


def _ellipse_arrays(blocks):
    """Centre, a^2, b^2, theta for stacked 2x2 blocks (rounding-safe form).

    With disc = tr^2 - 4 det and S = ||f||_F^2 - |tr|^2 / 2,
    a^2 = (S + |disc|/2) / 4 and b^2 = (S - |disc|/2) / 4. No square root of
    the discriminant is taken, so nearly equal foci cause no cancellation.
    """
    f = np.asarray(blocks, dtype=complex)
    tr = f[:, 0, 0] + f[:, 1, 1]
    det = f[:, 0, 0] * f[:, 1, 1] - f[:, 0, 1] * f[:, 1, 0]
    disc = tr * tr - 4.0 * det
    S = np.sum(np.abs(f) ** 2, axis=(1, 2)) - 0.5 * np.abs(tr) ** 2
    a2 = np.maximum(0.25 * (S + 0.5 * np.abs(disc)), 0.0)
    b2 = np.maximum(0.25 * (S - 0.5 * np.abs(disc)), 0.0)
    theta = np.where(disc != 0, 0.5 * np.angle(disc), 0.0)
    return 0.5 * tr, a2, b2, theta, disc


def ellipse_2x2(M):
    """W(M) for a 2x2 matrix: foci at the eigenvalues, minor axis
    sqrt(tr(M*M) - |l1|^2 - |l2|^2)."""
    M = la.as_matrix(M, square=True)
    if M.shape != (2, 2):
        raise BadParam("ellipse_2x2 needs a 2x2 matrix")
    c, a2, b2, th, disc = (v[0] for v in _ellipse_arrays(M[None]))
    root = np.sqrt(complex(disc))
    foci = (complex(c - 0.5 * root), complex(c + 0.5 * root))
    return EllipseParams(float(c.real), float(c.imag), float(np.sqrt(a2)), float(np.sqrt(b2)), float(th), foci)


def _ellipse_support_matrix(c, a2, b2, theta, angles):
    al = np.asarray(angles, dtype=float)[:, None]
    phi = al - theta[None, :]
    return (c.real[None, :] * np.cos(al) + c.imag[None, :] * np.sin(al)
            + np.sqrt(a2[None, :] * np.cos(phi) ** 2 + b2[None, :] * np.sin(phi) ** 2))


def fit_ellipse(angles, h, fix_y0=None, axis_aligned=False, x_init=None):
    """Least-squares ellipse whose support function matches samples h(angles)."""
    angles = np.asarray(angles, dtype=float)
    h = np.asarray(h, dtype=float)
    hmax = float(np.max(np.abs(h))) or 1.0

    def unpack(p):
        x0, a, b = p[0], p[1], p[2]
        y0 = fix_y0 if fix_y0 is not None else p[3]
        th = 0.0 if axis_aligned else p[-1]
        return x0, y0, abs(a), abs(b), th

    def resid(p):
        return EllipseParams(*unpack(p)).support(angles) - h

    p0 = [0.0, hmax, 0.5 * hmax]
    if fix_y0 is None:
        p0.append(0.0)
    if not axis_aligned:
        p0.append(0.1)
    if x_init is not None:
        p0 = list(x_init)
    sol = least_squares(resid, p0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
    x0, y0, a, b, th = unpack(sol.x)
    if b > a:
        a, b, th = b, a, th + 0.5 * np.pi
    return EllipseParams(float(x0), float(y0), float(a), float(b), float(th))


# --- support functions ---------------------------------------------------------

class GridWitness(NamedTuple):
    """Where a grid support value is attained: block `index` at mesh point t with
    2-vector `vector`, or the scalar summand (index None)."""
    index: Optional[int]
    t: Optional[float]
    vector: Optional[np.ndarray]


@dataclass(frozen=True, eq=False)
class SupportProfile:
    angles: np.ndarray
    values: np.ndarray
    witnesses: Optional[list] = None
    points: Optional[np.ndarray] = field(default=None)


def rotated_real_part(T, alpha):
    e = np.exp(-1j * alpha)
    return 0.5 * (e * T + np.conj(e) * la.adj(T))


def _top_eig2(H):
    w, V = np.linalg.eigh(H)
    return w[-1], V[:, -1]


def support_function(T, alpha):
    """(h(alpha), witness) for a matrix or a GridOperator."""
    if isinstance(T, GridOperator):
        prof = support_profile(T, np.array([alpha]))
        return float(prof.values[0]), prof.witnesses[0]
    T = la.as_matrix(T, square=True)
    w, V = np.linalg.eigh(rotated_real_part(T, alpha))
    return float(w[-1]), V[:, -1]


def support_profile(T, angles, witnesses=True):
    angles = np.asarray(angles, dtype=float)
    if isinstance(T, GridOperator):
        return _grid_profile(T, angles, witnesses)
    T = la.as_matrix(T, square=True)
    vals = np.empty(angles.size)
    wit = [] if witnesses else None
    pts = np.empty(angles.size, dtype=complex) if witnesses else None
    for j, al in enumerate(angles):
        w, V = np.linalg.eigh(rotated_real_part(T, al))
        vals[j] = w[-1]
        if witnesses:
            x = V[:, -1]
            wit.append(x)
            pts[j] = np.vdot(x, T @ x)
    return SupportProfile(angles, vals, wit, pts)


def _grid_profile(F, angles, witnesses):
    vals, idx = _kernels.grid_support(F.blocks, angles)
    use_scalar = np.zeros(angles.size, dtype=bool)
    if F.scalar_slot is not None:
        sv = np.real(F.scalar_slot * np.exp(-1j * angles))
        use_scalar = sv > vals
        vals = np.where(use_scalar, sv, vals)
    if not witnesses:
        return SupportProfile(angles, vals)
    wit, pts = [], np.empty(angles.size, dtype=complex)
    for j, al in enumerate(angles):
        if use_scalar[j]:
            wit.append(GridWitness(None, None, None))
            pts[j] = F.scalar_slot
            continue
        f = F.blocks[idx[j]]
        _, x = _top_eig2(rotated_real_part(f, al))
        wit.append(GridWitness(int(idx[j]), float(F.mesh[idx[j]]), x))
        pts[j] = np.vdot(x, f @ x)
    return SupportProfile(angles, vals, wit, pts)


def boundary_points(T, angles):
    """z_a = <T x_a, x_a> for the support witnesses x_a."""
    angles = np.asarray(angles, dtype=float)
    if angles.size < 8:
        raise BadParam("boundary tracing needs at least 8 angles")
    return support_profile(T, angles).points


def angle_grid(m):
    return 2.0 * np.pi * np.arange(m) / m


def operator_elliptical_range(F, angles, verify=True, tol=1e-9, dense_limit=1200):
    """Support profile of W(F) as the pointwise max of the block ellipses.

    With `verify`, the result is compared with the top eigenvalue of
    Re(e^{-ia} F) for the block-diagonal assembly of F (a dense eigensolve
    when the assembly has at most `dense_limit` rows, per-block eigensolves
    otherwise). A CheckFailed is raised on disagreement beyond `tol`.
    """
    angles = np.asarray(angles, dtype=float)
    c, a2, b2, th, _ = _ellipse_arrays(F.blocks)
    H = _ellipse_support_matrix(c, a2, b2, th, angles)
    vals = H.max(axis=1)
    if F.scalar_slot is not None:
        vals = np.maximum(vals, np.real(F.scalar_slot * np.exp(-1j * angles)))
    if verify:
        direct = direct_block_support(F, angles, dense_limit)
        err = float(np.max(np.abs(direct - vals)))
        if err > tol * max(1.0, F.grid_norm):
            raise CheckFailed("ellipse-union profile vs block-diagonal eigenvalues", err, tol)
    return SupportProfile(angles, vals)


def direct_block_support(F, angles, dense_limit=1200):
    """Top eigenvalue of Re(e^{-ia} F) from eigensolves, no ellipse formulas."""
    angles = np.asarray(angles, dtype=float)
    n = 2 * F.mesh.size + (F.scalar_slot is not None)
    if n <= dense_limit:
        M = F.dense()
        Hr, Hi = la.hermitian_part(M), -0.5j * (M - la.adj(M))
        out = np.empty(angles.size)
        for j, al in enumerate(angles):
            out[j] = scipy.linalg.eigh(np.cos(al) * Hr + np.sin(al) * Hi, eigvals_only=True,
                                       subset_by_index=[n - 1, n - 1], check_finite=False)[0]
        return out
    out = np.empty(angles.size)
    fh = np.conj(np.swapaxes(F.blocks, 1, 2))
    for j, al in enumerate(angles):
        e = np.exp(-1j * al)
        R = 0.5 * (e * F.blocks + np.conj(e) * fh)
        top = np.linalg.eigvalsh(R)[:, -1].max()
        if F.scalar_slot is not None:
            top = max(top, np.real(F.scalar_slot * e))
        out[j] = top
    return out


def numerical_radius(T, samples=256):
    """w(T) = max over directions of h(a): sampled, then refined by bounded Brent."""
    T = la.as_matrix(T, square=True)
    angles = angle_grid(samples)
    h = support_profile(T, angles, witnesses=False).values
    j = int(np.argmax(h))
    step = 2.0 * np.pi / samples
    res = minimize_scalar(lambda al: -support_function(T, al)[0],
                          bounds=(angles[j] - step, angles[j] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(h[j], -res.fun))


def monte_carlo_points(T, count, rng):
    """<T x, x> for `count` random unit vectors x."""
    T = la.as_matrix(T, square=True)
    n = T.shape[0]
    X = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return np.einsum("ki,ij,kj->k", X.conj(), T, X)


def quadratic_residual(T, cluster_tol=1e-8):
    """min over eigenvalue pairs (e1, e2) of ||(T - e1)(T - e2)|| / ||T||^2.

    If T is quadratic its minimal polynomial divides (z - e1)(z - e2), so both
    roots can be taken from the spectrum and this minimum is zero.
    """
    T = la.as_matrix(T, square=True)
    n = T.shape[0]
    ev = np.linalg.eigvals(T)
    cand = []
    for e in ev:
        if all(abs(e - c) > cluster_tol * max(1.0, abs(e)) for c in cand):
            cand.append(e)
    I = np.eye(n)
    scale = max(la.op_norm(T), 1.0) ** 2
    best = np.inf
    for i, e1 in enumerate(cand):
        for e2 in cand[i:]:
            best = min(best, la.op_norm((T - e1 * I) @ (T - e2 * I)) / scale)
    return float(best)


# --- the operator m(Q) + m(Q) Q ------------------------------------------------

def tq_operator(Q):
    Q = as_idempotent(Q)
    m = matched_projection(Q)
    return m + m @ Q.Q


def tq_ellipse_params(d):
    """Closure of W(m + mQ) when ||Q|| = 2d - 1: centre (d+1)/2, a = sqrt(2d^2+d+1)/2, b = l(d)/2."""
    return EllipseParams(0.5 * (d + 1.0), 0.0, 0.5 * np.sqrt(2 * d * d + d + 1.0), 0.5 * float(la.ell(d)))


def tq_report(Q, tol=1e-7):
    """Residuals of the norm, numerical radius and non-quadratic claims for T_Q.

    T_Q = 2I (+) 0 (+) [[D + I, -l(D)], [0, 0]] in the normal frame. It is
    quadratic exactly when the 2I summand is absent (h1 = 0) and D is scalar;
    `predicted_quadratic` records that structural prediction.
    """
    Q = as_idempotent(Q)
    if Q.is_projection:
        raise IsProjection("T_Q is built for non-projection idempotents")
    d = 0.5 * (Q.norm + 1.0)
    E = tq_ellipse_params(d)
    T = tq_operator(Q)
    cf = canonical_form(Q)
    dv = np.linalg.eigvalsh(cf.D)
    predicted = cf.h1 == 0 and (dv[-1] - dv[0]) <= 1e-8 * dv[-1]
    qres = quadratic_residual(T)
    return {
        "d": d,
        "ellipse": E,
        "norm_residual": abs(la.op_norm(T) - 2.0 * E.a),
        "radius_residual": abs(numerical_radius(T) - (E.a + E.x0)),
        "quadratic_residual": qres,
        "predicted_quadratic": bool(predicted),
        "is_quadratic": bool(qres <= tol),
    }


def tq_ellipse(Q, check=True, tol=1e-7):
    """Ellipse that is the closure of W(T_Q), with the norm and radius identities checked."""
    rep = tq_report(Q, tol)
    if check:
        for key in ("norm_residual", "radius_residual"):
            if rep[key] > tol * max(1.0, rep["d"]):
                raise CheckFailed(f"T_Q {key}", rep[key], tol)
        if rep["is_quadratic"] != rep["predicted_quadratic"]:
            raise CheckFailed("T_Q quadratic classification vs normal form", rep["quadratic_residual"], tol)
    return rep["ellipse"]


# --- interior attainment -------------------------------------------------------

def _attain_on_segment(T, u, v, target, iters=200):
    """Unit x in span{u, v} with <Tx, x> = target, for target on [<Tu,u>, <Tv,v>].

    Rotate so the segment lies on the real axis, pick the phase theta that makes
    the imaginary part vanish along x(s) = (1-s) u + e^{i theta} s v, then
    bisect on s for the real part.
    """
    pu, pv = np.vdot(u, T @ u), np.vdot(v, T @ v)
    length = abs(pv - pu)
    if length < 1e-300:
        return u
    beta = np.angle(pv - pu)
    B = np.exp(-1j * beta) * (T - pu * np.eye(T.shape[0]))
    K = -0.5j * (B - la.adj(B))
    theta = 0.5 * np.pi - np.angle(np.vdot(u, K @ v))
    ev = np.exp(1j * theta) * v
    tau = float(np.clip(np.real(np.exp(-1j * beta) * (target - pu)), 0.0, length))

    def x_at(s):
        x = (1.0 - s) * u + s * ev
        return x / np.linalg.norm(x)

    def g(s):
        x = x_at(s)
        return np.real(np.vdot(x, B @ x)) - tau

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return x_at(0.5 * (lo + hi))


def _fan_triangle(ws, z):
    """Find i with z in triangle (w0, w_i, w_{i+1}); return (i, barycentric)."""
    w0 = ws[0]
    for i in range(1, ws.size - 1):
        a, b = ws[i] - w0, ws[i + 1] - w0
        det = a.real * b.imag - a.imag * b.real
        if abs(det) < 1e-300:
            continue
        r = z - w0
        li = (r.real * b.imag - r.imag * b.real) / det
        lj = (a.real * r.imag - a.imag * r.real) / det
        if li >= -1e-13 and lj >= -1e-13 and li + lj <= 1 + 1e-13:
            return i, (1.0 - li - lj, li, lj)
    return None


def attain_interior(T, z, tol=1e-6, max_angles=4096):
    """Unit x with |<T x, x> - z| <= tol for a point z inside W(T).

    Support witnesses at K equally spaced directions give boundary points
    w_k in convex position. A fan triangle (w_0, w_i, w_{i+1}) containing z
    is located (doubling K until one exists), then two segment solves are
    done: first for the point q of edge [w_i, w_{i+1}] on the ray from w_0
    through z, then for z on [w_0, q].
    """
    T = la.as_matrix(T, square=True)
    z = complex(z)
    K = 32
    while K <= max_angles:
        prof = support_profile(T, angle_grid(K))
        hit = _fan_triangle(prof.points, z)
        if hit is not None:
            break
        K *= 2
    else:
        raise NoConvergence(f"target {z} not enclosed by {max_angles} boundary points")
    i, (l0, li, lj) = hit
    xs, ws = prof.witnesses, prof.points
    if li + lj <= 1e-15:
        x = xs[0]
    else:
        q = (li * ws[i] + lj * ws[i + 1]) / (li + lj)
        y = _attain_on_segment(T, xs[i], xs[i + 1], q)
        x = _attain_on_segment(T, xs[0], y, z)
    err = abs(np.vdot(x, T @ x) - z)
    if err > tol:
        raise NoConvergence(f"attained point misses target by {err:.3e}")
    return x


# --- closedness ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClosednessReport:
    verdict: str
    ellipse: EllipseParams
    boundary_gap: float
    witness_point: Optional[complex]
    mesh_N: Optional[int] = None


def tq_grid(F):
    """Blockwise m + mQ for an idempotent GridOperator."""
    from .grid import grid_matched_projection

    mF = grid_matched_projection(F)
    blocks = mF.blocks + np.einsum("nij,njk->nik", mF.blocks, F.blocks)
    s = None if F.scalar_slot is None else 2.0 * F.scalar_slot
    fn = None
    if F.func is not None:
        def fn(t):
            fb = F.func(t)
            mb = np.array([matched_projection(f) for f in fb.reshape(-1, 2, 2)]).reshape(fb.shape)
            return mb + np.einsum("...ij,...jk->...ik", mb, fb)
    return GridOperator(F.d, F.mesh, s, blocks, F.continuum, fn)


def closedness(source, angles=64):
    """Is W(T_Q) closed?

    It is closed exactly when ||D|| is an eigenvalue of D. A finite matrix
    always qualifies, and a boundary witness is returned together with its
    distance to the supporting lines of the ellipse. A continuum grid models
    a multiplication operator with no eigenvalue at d: its numerical range is
    the open ellipse, and the reported gap is the smallest margin, over the
    sampled directions, by which the cell-supported vectors stay inside.
    """
    al = angle_grid(angles)
    if isinstance(source, GridOperator):
        T = tq_grid(source)
        d = 0.5 * (source.grid_norm + 1.0)
        E = tq_ellipse_params(d)
        if not source.continuum:
            prof = support_profile(T, al)
            gap = float(np.max(np.abs(E.support(al) - prof.values)))
            return ClosednessReport("closed", E, gap, complex(prof.points[0]), source.mesh.size - 1)
        cells = cell_average_blocks(T)
        att = GridOperator(d, 0.5 * (source.mesh[:-1] + source.mesh[1:]), T.scalar_slot, cells, True)
        prof = support_profile(att, al)
        margin = E.support(al) - prof.values
        j = int(np.argmin(margin))
        return ClosednessReport("open", E, float(margin[j]), complex(prof.points[j]), source.mesh.size - 1)
    Q = as_idempotent(source)
    E = tq_ellipse(Q, check=False)
    T = tq_operator(Q)
    prof = support_profile(T, al)
    gap = float(np.max(np.abs(E.support(al) - np.real(prof.points * np.exp(-1j * al)))))
    return ClosednessReport("closed", E, gap, complex(prof.points[0]))


def open_ellipse_qr(r):
    """Open ellipse W(T_{Q_r}): centre (r+3)/4, a^2 = (r^2+3r+4)/8, b^2 = (r^2-1)/16."""
    return EllipseParams((r + 3.0) / 4.0, 0.0, np.sqrt((r * r + 3 * r + 4) / 8.0), np.sqrt((r * r - 1) / 16.0))


# --- S_r ---------------------------------------------------------------------------

def _sr_d(r):
    if not (np.isfinite(r) and r > 1):
        raise BadParam(f"need r > 1, got {r}")
    return 0.5 * (r + 1.0)


def sr_block_support(t, d, alpha):
    """Support of W(f_t) for the S_r block at t."""
    c = np.cos(alpha)
    return (d * t - 2 * d + 1) * c + 0.5 * np.sqrt(np.maximum((t - 1) * (d - t), 0.0) + (2 * (d - 1) * t * c) ** 2)


def _sr_argmax(d, alpha, scan=2049):
    ts = np.linspace(1.0, d, scan)
    vals, idx = _kernels.sr_scan(d, ts, np.array([np.cos(alpha)]))
    i = int(idx[0])
    best_t, best = ts[i], float(vals[0])
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, scan - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -sr_block_support(t, d, alpha), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-13})
        if -res.fun > best:
            best_t, best = float(res.x), float(-res.fun)
    for t in (1.0, d):
        v = float(sr_block_support(t, d, alpha))
        if v >= best:
            best_t, best = t, v
    return best_t, best


def sr_support_exact(r, alpha):
    """h_{W(S_r)}(alpha) = max over t in [1, d] of the per-block support.

    A dense scan locates the best sample and a bounded Brent search refines it
    inside the two neighbouring cells; both endpoints are always compared, so
    no unimodality assumption is needed.
    """
    d = _sr_d(r)
    if np.ndim(alpha) == 0:
        return _sr_argmax(d, float(alpha))[1]
    return np.array([_sr_argmax(d, float(a))[1] for a in np.ravel(alpha)])


def sr_thresholds(d):
    """cos of the two regime angles: sqrt2/(4 sqrt(d(2d-1))) and sqrt2/4."""
    return np.sqrt(2.0) / (4.0 * np.sqrt(d * (2 * d - 1))), np.sqrt(2.0) / 4.0


def sr_diagnostics(r, N, angles=256, refine=(4, 16)):
    """Evidence that the closure of W(S_r) is not an ellipse and that W(S_r) is
    neither closed nor open.

    Keys: `regime_right` and `regime_left` give the largest deviation from the
    closed forms (2d-1)(d-1)cos a (attained at t = d) and 2(1-d)cos a (at
    t = 1), plus whether the argmax sat at the expected endpoint. `fit` holds
    the ellipse fitted to four support samples and its worst mismatch over
    the angle grid. `attainment` holds, for the rightmost closure point
    s = (2d-1)(d-1), the margin by which cell-supported vectors miss it at
    each mesh; and the value h(pi), which equals -s' for the attained point
    s' = 2(1-d).
    """
    d = _sr_d(r)
    c1, c2 = sr_thresholds(d)
    al = angle_grid(angles)
    cos_a = np.cos(al)
    exact = np.empty(angles)
    argt = np.empty(angles)
    for j, a in enumerate(al):
        argt[j], exact[j] = _sr_argmax(d, a)

    s = (2 * d - 1) * (d - 1)
    s_prime = 2 * (1 - d)
    right = cos_a >= c1
    left = cos_a <= -c2
    dev_r = np.abs(exact[right] - s * cos_a[right])
    dev_l = np.abs(exact[left] - s_prime * cos_a[left])

    alpha1 = np.arccos(c1)
    fit_angles = np.array([0.0, 0.5 * np.pi, np.pi, 0.5 * alpha1])
    fit_h = np.array([_sr_argmax(d, a)[1] for a in fit_angles])
    E = fit_ellipse(fit_angles, fit_h, fix_y0=0.0, axis_aligned=True,
                    x_init=[0.5 * (fit_h[0] - fit_h[2]), 0.5 * (fit_h[0] + fit_h[2]), fit_h[1]])
    mismatch = float(np.max(np.abs(E.support(al) - exact)))

    gaps = []
    for k in (1,) + tuple(refine):
        F = make_Sr(r, N * k)
        cells = cell_average_blocks(F)
        att = GridOperator(d, 0.5 * (F.mesh[:-1] + F.mesh[1:]), F.scalar_slot, cells, True)
        reach = support_profile(att, np.array([0.0]), witnesses=False).values[0]
        gaps.append((N * k, float(s - reach)))

    F = make_Sr(r, N)
    grid_h = support_profile(F, al, witnesses=False).values
    h_pi = _sr_argmax(d, np.pi)[1]
    return {
        "r": r,
        "d": d,
        "N": N,
        "mesh_h": F.mesh_h,
        "cos_alpha1": c1,
        "cos_alpha2": c2,
        "regime_right": {"count": int(right.sum()), "max_dev": float(dev_r.max(initial=0.0)),
                         "argmax_at_d": bool(np.all(np.abs(argt[right] - d) <= 1e-9))},
        "regime_left": {"count": int(left.sum()), "max_dev": float(dev_l.max(initial=0.0)),
                        "argmax_at_1": bool(np.all(np.abs(argt[left] - 1.0) <= 1e-9))},
        "fit": {"ellipse": E, "mismatch": mismatch, "floor": NONELLIPSE_FLOOR * (d - 1)},
        "grid_profile_error": float(np.max(np.abs(grid_h - exact))),
        "attainment": {"s": s, "gaps": gaps, "s_prime": s_prime, "h_pi": float(h_pi)},
        "angles": al,
        "exact": exact,
    }
