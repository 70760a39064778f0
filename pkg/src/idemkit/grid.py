"""Sampled elements of C (+) 0 (+) M_2(C[1, d]).

A GridOperator stores a scalar summand and the 2x2 values f_t on a mesh of
[1, d]. With ``continuum=True`` it stands for the multiplication operator by
f on L^2[1, d], which has no eigenvalues; with ``continuum=False`` it is the
honest block-diagonal matrix built from the samples.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .errors import BadParam, IsProjection
from .idempotent import as_idempotent, matched_projection

UNIVERSAL = "universal-within-mesh"
NOT_UNIVERSAL = "not-universal"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class GridOperator:
    d: float
    mesh: np.ndarray
    scalar_slot: Optional[complex]
    blocks: np.ndarray
    continuum: bool = True
    func: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        mesh = np.asarray(self.mesh, dtype=float)
        blocks = np.asarray(self.blocks, dtype=complex)
        if mesh.ndim != 1 or mesh.size < 1 or np.any(np.diff(mesh) <= 0):
            raise BadParam("mesh must be a strictly increasing 1-D array")
        if blocks.shape != (mesh.size, 2, 2):
            raise BadParam(f"blocks must have shape ({mesh.size}, 2, 2), got {blocks.shape}")
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "blocks", blocks)

    @property
    def mesh_h(self):
        return float(np.max(np.diff(self.mesh))) if self.mesh.size > 1 else 0.0

    @property
    def grid_norm(self):
        vals = np.linalg.norm(self.blocks, 2, axis=(1, 2))
        top = float(np.max(vals))
        if self.scalar_slot is not None:
            top = max(top, abs(self.scalar_slot))
        return top

    def at(self, t):
        """Blocks at arbitrary points; needs the generating function."""
        if self.func is None:
            raise BadParam("operator has no generating function attached")
        return self.func(np.atleast_1d(np.asarray(t, dtype=float)))

    def dense(self):
        """Block-diagonal matrix: scalar slot first (if any), then every f_t."""
        n = 2 * self.mesh.size + (self.scalar_slot is not None)
        M = np.zeros((n, n), dtype=complex)
        o = 0
        if self.scalar_slot is not None:
            M[0, 0] = self.scalar_slot
            o = 1
        for i, f in enumerate(self.blocks):
            M[o + 2 * i:o + 2 * i + 2, o + 2 * i:o + 2 * i + 2] = f
        return M


def _check_r(r):
    if not (np.isfinite(r) and r > 1):
        raise BadParam(f"need r > 1, got {r}")
    return 0.5 * (r + 1.0)


def make_mesh(d, N, spacing="uniform", start=1.0):
    """N + 1 points from `start` to d, uniform or Chebyshev-clustered at the ends."""
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise BadParam(f"mesh size N must be an integer >= 2, got {N}")
    if not start < d:
        raise BadParam("mesh start must be below d")
    if spacing == "uniform":
        t = np.linspace(start, d, N + 1)
    elif spacing == "chebyshev":
        t = start + (d - start) * 0.5 * (1.0 - np.cos(np.pi * np.arange(N + 1) / N))
    else:
        raise BadParam(f"unknown spacing {spacing!r}")
    t[0], t[-1] = start, d
    return t


def idempotent_blocks(D):
    """[[D, -l(D)], [l(D), 1 - D]] for each value of D (>= 1)."""
    D = np.asarray(D, dtype=float)
    L = la.ell(D)
    out = np.empty(D.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = D
    out[..., 0, 1] = -L
    out[..., 1, 0] = L
    out[..., 1, 1] = 1.0 - D
    return out


def sr_blocks(t, d):
    """[[t - (2d-1), sqrt((t-1)(d-t))], [0, (2d-1)(t-1)]]."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = t - (2 * d - 1)
    out[..., 0, 1] = np.sqrt(np.maximum((t - 1.0) * (d - t), 0.0))
    out[..., 1, 1] = (2 * d - 1) * (t - 1.0)
    return out


def d1(t, d):
    """1 on [1, (d+1)/2], then 2t - d up to d."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= 0.5 * (d + 1.0), 1.0, 2.0 * t - d)


def make_Qr(r, N, spacing="uniform", continuum=True, start=1.0):
    """1 (+) 0 (+) [[D0, -l(D0)], [l(D0), 1 - D0]] with D0(t) = t on [1, (r+1)/2]."""
    d = _check_r(r)
    mesh = make_mesh(d, N, spacing, start)
    return GridOperator(d, mesh, 1.0 + 0j, idempotent_blocks(mesh), continuum, idempotent_blocks)


def make_Sr(r, N, spacing="uniform", continuum=True):
    """2(1-d) (+) 0 (+) the upper-triangular S_r blocks."""
    d = _check_r(r)
    mesh = make_mesh(d, N, spacing)
    fn = lambda t: sr_blocks(t, d)  # noqa: E731
    return GridOperator(d, mesh, complex(2 * (1 - d)), fn(mesh), continuum, fn)


def make_q_r_alt(r, N, spacing="uniform", continuum=True):
    """The idempotent of M_2(C[1,d]) built from D1 instead of D0 (no scalar summand)."""
    d = _check_r(r)
    mesh = make_mesh(d, N, spacing)
    fn = lambda t: idempotent_blocks(d1(t, d))  # noqa: E731
    return GridOperator(d, mesh, None, fn(mesh), continuum, fn)


def cell_average_blocks(F, nodes=4):
    """Mean of f over each mesh cell.

    For x = phi * indicator(cell) / sqrt(|cell|) the quadratic form of the
    multiplication operator is phi* (cell mean of f) phi, so these are the
    compressions reached by vectors that live on a single cell.
    """
    if F.func is None:
        return 0.5 * (F.blocks[:-1] + F.blocks[1:])
    x, w = np.polynomial.legendre.leggauss(nodes)
    a, b = F.mesh[:-1], F.mesh[1:]
    pts = 0.5 * (b - a)[:, None] * x[None, :] + 0.5 * (a + b)[:, None]
    vals = F.func(pts.ravel()).reshape(pts.shape + (2, 2))
    return np.einsum("k,ckij->cij", 0.5 * w, vals)


def in_cstar_qr(F, tol=1e-12):
    """Membership test for the C*-algebra generated by Q_r.

    At t = 1 the entries f12, f21, f22 must vanish and the scalar summand must
    equal f11(1). When the mesh stays away from 1 there is no constraint.
    """
    if F.mesh[0] > 1.0 + tol:
        return True
    f = F.blocks[0]
    ok = abs(f[0, 1]) <= tol and abs(f[1, 0]) <= tol and abs(f[1, 1]) <= tol
    if F.scalar_slot is not None:
        ok = ok and abs(F.scalar_slot - f[0, 0]) <= tol
    return bool(ok)


def grid_matched_projection(F):
    """m applied to every block and to the scalar summand."""
    blocks = np.array([matched_projection(f) for f in F.blocks])
    s = F.scalar_slot
    if s is not None:
        if min(abs(s), abs(s - 1)) > 1e-9:
            raise BadParam(f"scalar summand {s} is not idempotent")
        s = complex(round(s.real))
    return replace(F, blocks=blocks, scalar_slot=s, func=None)


def complement(F):
    """I - F blockwise. The zero summand of F becomes an identity summand, which
    adds only the value 1 to every spectrum computed here, so it is not stored."""
    I2 = np.eye(2)
    fn = None if F.func is None else (lambda t: I2 - F.func(t))
    s = None if F.scalar_slot is None else 1.0 - F.scalar_slot
    return replace(F, blocks=I2 - F.blocks, scalar_slot=s, func=fn)


@dataclass(frozen=True, eq=False)
class UniversalReport:
    verdict: str
    d: float
    spectrum: np.ndarray
    gap: float
    gap_tol: float
    endpoint_miss: float
    continuum: bool


def _transfer_operator(Q):
    """A = m Q m + I - m. Its spectrum is {1} together with sigma(D)."""
    m = matched_projection(Q)
    return m @ Q @ m + np.eye(Q.shape[0]) - m


def _spectral_gap(points, d):
    pts = np.sort(np.clip(points, 1.0, d))
    pts = np.r_[1.0, pts, d]
    return float(np.max(np.diff(pts)))


def universal_check(Q, reject_factor=10.0):
    """Does sigma(m Q m + I - m) fill [1, d], d = (||Q|| + 1) / 2?

    A finite matrix has finite spectrum, so its verdict is always
    ``not-universal`` with the largest gap as evidence. A continuum grid is
    ``universal-within-mesh`` when the largest gap is at most mesh_h times the
    typical slope of the sampled spectral function and the top sample reaches
    d; gaps beyond `reject_factor` times that tolerance give ``not-universal``
    and anything in between is ``inconclusive``.
    """
    if isinstance(Q, GridOperator):
        return _universal_grid(Q, reject_factor)
    Q = as_idempotent(Q)
    if Q.is_projection:
        raise IsProjection("universality is defined for non-projection idempotents")
    d = 0.5 * (Q.norm + 1.0)
    w = np.linalg.eigvalsh(la.hermitian_part(_transfer_operator(Q.Q)))
    gap = _spectral_gap(w, d)
    miss = float(max(abs(w.min() - 1.0), abs(d - w.max())))
    return UniversalReport(NOT_UNIVERSAL, d, w, gap, 0.0, miss, False)


def _universal_grid(F, reject_factor):
    # the recorded d, not the sampled norm: a mesh that stops short of d must fail
    d = F.d
    if d <= 1.0 + 1e-12:
        raise IsProjection("grid operator is a projection")
    A = np.array([_transfer_operator(f) for f in F.blocks])
    A = 0.5 * (A + np.conj(np.swapaxes(A, 1, 2)))
    w = np.linalg.eigvalsh(A)
    top = w[:, -1]
    spectrum = np.sort(np.r_[w.ravel(), [1.0] if F.scalar_slot is not None else []])
    gap = _spectral_gap(spectrum, d)
    miss = float(max(abs(spectrum.min() - 1.0), abs(d - spectrum.max())))
    if not F.continuum:
        return UniversalReport(NOT_UNIVERSAL, d, spectrum, gap, 0.0, miss, False)
    h = F.mesh_h
    slopes = np.abs(np.diff(top)) / np.diff(F.mesh)
    moving = slopes[slopes > 1e-12]
    slope = float(np.median(moving)) if moving.size else 1.0
    gap_tol = h * max(1.0, slope) * (1.0 + 1e-9)
    if gap <= gap_tol and miss <= gap_tol:
        verdict = UNIVERSAL
    elif gap > reject_factor * gap_tol or miss > reject_factor * gap_tol:
        verdict = NOT_UNIVERSAL
    else:
        verdict = INCONCLUSIVE
    return UniversalReport(verdict, d, spectrum, gap, gap_tol, miss, True)


def complement_check(Q, tol=1e-9):
    """Q and I - Q get the same verdict and their transfer operators share a spectrum."""
    if isinstance(Q, GridOperator):
        Qc = complement(Q)
    else:
        Q = as_idempotent(Q)
        Qc = Q.complement()
    a, b = universal_check(Q), universal_check(Qc)
    if a.verdict != b.verdict:
        return False
    sa, sb = np.unique(np.round(a.spectrum, 9)), np.unique(np.round(b.spectrum, 9))
    return sa.shape == sb.shape and bool(np.all(np.abs(sa - sb) <= tol * max(1.0, a.d)))


def ell_kernel_count(F, tol=1e-12):
    """Mesh points where l(D(t)) vanishes, with D(t) read off the (1,1) entry."""
    return int(np.sum(la.ell(F.blocks[:, 0, 0].real) <= tol))


def distinguish(Qr, qr, tol=1e-12):
    """Kernel sizes of l(D0) and l(D1) on the mesh.

    l(D0) vanishes only at t = 1 while l(D1) vanishes on the whole flat piece,
    so the two idempotents cannot be unitarily equivalent.
    """
    k0, k1 = ell_kernel_count(Qr, tol), ell_kernel_count(qr, tol)
    N = qr.mesh.size - 1
    return {"N": N, "kernel_Qr": k0, "kernel_qr": k1, "separated": bool(k0 == 1 and k1 >= N / 2 - 1)}
