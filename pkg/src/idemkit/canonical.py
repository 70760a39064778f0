"""Unitary normal form of a non-projection idempotent.

Every idempotent Q is unitarily equivalent to

    I_h1 (+) 0_h4 (+) [[D, -l(D)], [l(D), I - D]],    l(t) = sqrt(t^2 - t),

with D >= I having no eigenvalue 1. In the same frame m(Q) becomes
I (+) 0 (+) I (+) 0.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import DomainError, IsProjection
from .idempotent import as_idempotent, block_form, matched_projection

SPLIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    V: np.ndarray
    h1: int
    h4: int
    h5: int
    D: np.ndarray

    @property
    def dims(self):
        return self.h1, self.h4, self.h5

    @property
    def d(self):
        """||D||, which equals (||Q|| + 1) / 2."""
        return float(np.max(np.linalg.eigvalsh(self.D)))

    def model_Q(self):
        n = self.h1 + self.h4 + 2 * self.h5
        M = np.zeros((n, n), dtype=complex)
        M[: self.h1, : self.h1] = np.eye(self.h1)
        o = self.h1 + self.h4
        p = self.h5
        L = la.ell_matrix(self.D)
        M[o:o + p, o:o + p] = self.D
        M[o:o + p, o + p:] = -L
        M[o + p:, o:o + p] = L
        M[o + p:, o + p:] = np.eye(p) - self.D
        return M

    def model_m(self):
        diag = np.r_[np.ones(self.h1), np.zeros(self.h4), np.ones(self.h5), np.zeros(self.h5)]
        return np.diag(diag).astype(complex)

    def rebuild_Q(self):
        return la.adj(self.V) @ self.model_Q() @ self.V

    def rebuild_m(self):
        return la.adj(self.V) @ self.model_m() @ self.V


def canonical_form(Q, split_tol=SPLIT_TOL):
    """Normal form (V, dims, D) with V Q V* equal to the block model.

    From the block form Q = [[I, A], [0, 0]] and the SVD A = X S Y*, the
    nonzero singular values s give B = sqrt(1 + s^2) and D = (1 + B) / 2.
    Each pair of singular vectors spans a 2-D invariant subspace on which the
    self-adjoint unitary W below rotates [[1, s], [0, 0]] into the model block.
    """
    Q = as_idempotent(Q)
    bf = block_form(Q)
    A = bf.A
    if A.size == 0 or la.op_norm(A) <= split_tol * max(Q.norm, 1.0):
        raise IsProjection("Q is a projection within tolerance; no normal form")
    X, s, Yh = np.linalg.svd(A, full_matrices=True)
    Y = la.adj(Yh)
    p = int(np.sum(s > split_tol * s[0]))
    sig = s[:p]
    B = np.sqrt(1.0 + sig ** 2)
    D = 0.5 * (1.0 + B)
    rb = 1.0 / np.sqrt(B)
    w11 = rb * np.sqrt(D)
    w12 = rb * np.sqrt(D - 1.0)
    W = np.block([[np.diag(w11), np.diag(w12)], [np.diag(w12), -np.diag(w11)]])

    U1, U2 = bf.U1, bf.U2
    basis = np.hstack([U1 @ X[:, p:], U2 @ Y[:, p:], U1 @ X[:, :p], U2 @ Y[:, :p]])
    h1 = U1.shape[1] - p
    h4 = U2.shape[1] - p
    n = Q.n
    frame = np.eye(n, dtype=complex)
    frame[h1 + h4:, h1 + h4:] = W
    V = frame @ la.adj(basis)
    return CanonicalForm(V, h1, h4, p, np.diag(D).astype(complex))


def invariant_subspaces(Q):
    """Orthonormal bases of H1 = R(Q)&R(Q*), H4 = N(Q)&N(Q*), H5 = R(mQ(I-m)), H6 = R((I-m)Qm)."""
    Q = as_idempotent(Q)
    Qm, Qa = Q.Q, la.adj(Q.Q)
    m = matched_projection(Q)
    I = np.eye(Q.n)
    return {
        "H1": la.intersect(la.range_basis(Qm), la.range_basis(Qa)),
        "H4": la.intersect(la.kernel_basis(Qm), la.kernel_basis(Qa)),
        "H5": la.range_basis(m @ Qm @ (I - m)),
        "H6": la.range_basis((I - m) @ Qm @ m),
    }


def verify_eigen_transfer(D, tol=1e-8):
    """True iff the top eigenspace of D equals the l(||D||)-eigenspace of l(D).

    l(D) is formed as sqrt(D^2 - D) with its own eigendecomposition, so the
    two eigenspaces come from independent factorisations.
    """
    D = la.as_matrix(D, square=True)
    w = la.herm_eig(D).eigenvalues
    d = float(w[-1])
    if w[0] < 1.0 - tol:
        raise DomainError(f"D must satisfy D >= I; smallest eigenvalue {w[0]:.6g}")
    if d <= 1.0 + tol:
        raise DomainError(f"||D|| = {d:.12g} is within {tol:g} of 1; l(||D||) is degenerate")
    n = D.shape[0]
    L = la.psd_sqrt(D @ D - D)
    ld = float(la.ell(d))
    wd, Vd = la.herm_eig(D)
    wl, Vl = la.herm_eig(L)
    Ed = Vd[:, wd >= d - tol * d]
    El = Vl[:, wl >= ld - tol * max(ld, 1.0)]
    if Ed.shape[1] != El.shape[1]:
        return False
    return la.op_norm(la.projector(Ed) - la.projector(El)) <= np.sqrt(tol) * max(1, n)


def shifted_ratio_factor(D, a):
    """For D >= I with d = ||D|| > 1 and a < d/(2d-1), return (D_a, A) where

        D_a = (D - aI) / ||D - aI||,
        A = [(d-a)^2 l(d)^2 (D_a + l(D)/l(d))]^{-1} [(a^2 - 2da + d) D + a^2 (d-1) I].

    Both are positive definite and D_a - l(D)/l(d) = A (dI - D).
    """
    D = la.as_matrix(D, square=True)
    d = float(la.herm_eig(D).eigenvalues[-1])
    if d <= 1.0:
        raise DomainError("need ||D|| > 1")
    if not a < d / (2 * d - 1):
        raise DomainError(f"need a < d/(2d-1) = {d / (2 * d - 1):.6g}, got {a}")
    I = np.eye(D.shape[0])
    Da = (D - a * I) / la.op_norm(D - a * I)
    ld = float(la.ell(d))
    R = la.ell_matrix(D) / ld
    A = np.linalg.solve((d - a) ** 2 * ld ** 2 * (Da + R), (a * a - 2 * d * a + d) * D + a * a * (d - 1) * I)
    return Da, A
