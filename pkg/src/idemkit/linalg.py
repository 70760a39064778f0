"""Dense complex linear algebra used by the rest of the package.

Factorisations come from LAPACK through numpy. Everything here takes and
returns plain ``numpy`` arrays.
"""
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoConvergence, NotHermitian

SYM_TOL = 1e-10
EIG_TOL = 1e-10
RANK_TOL = 1e-10
GAP_TOL = 1e-8


class HermEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(M, square=False):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def adj(M):
    return np.conj(M).T


def op_norm(M):
    """Spectral norm (largest singular value)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermitian_part(M):
    return 0.5 * (M + adj(M))


def herm_eig(M, sym_tol=SYM_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    M = as_matrix(M, square=True)
    scale = max(op_norm(M), 1.0)
    asym = op_norm(M - adj(M))
    if asym > sym_tol * scale:
        raise NotHermitian(f"||M - M*|| = {asym:.3e} exceeds {sym_tol:.1e}*||M||")
    try:
        w, V = np.linalg.eigh(hermitian_part(M))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return HermEig(w, V)


def moore_penrose(M, rank_tol=RANK_TOL):
    """SVD-based pseudoinverse; singular values <= rank_tol * s_max count as zero."""
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=complex)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=complex)
    keep = s > rank_tol * s[0]
    return (adj(Vh[keep]) / s[keep]) @ adj(U[:, keep])


def func_calculus(M, f, sym_tol=SYM_TOL):
    """f(M) for Hermitian M and a vectorised real function f."""
    w, V = herm_eig(M, sym_tol)
    with np.errstate(invalid="ignore", divide="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape or not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)] if fw.shape == w.shape else w
        raise DomainError(f"function undefined at eigenvalue(s) {bad[:4]}")
    return (V * fw) @ adj(V)


def _clamp_tiny(w, tol):
    # eigenvalues of a PSD matrix can come out as -1e-16; those are zeros
    scale = max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    return np.where((w < 0) & (w >= -tol * scale), 0.0, w)


def psd_sqrt(M, tol=EIG_TOL):
    """Square root of a positive semidefinite matrix."""
    return func_calculus(M, lambda w: np.sqrt(_clamp_tiny(w, tol)))


def ell(t):
    """The scalar map t -> sqrt(t^2 - t), defined off the open interval (0, 1)."""
    t = np.asarray(t, dtype=float)
    v = t * t - t
    v = np.where((v < 0) & (v > -1e-12), 0.0, v)
    return np.sqrt(v)


def ell_matrix(D):
    """ell applied to a Hermitian D through the functional calculus."""
    return func_calculus(D, ell)


def abs_op(M):
    """|M| = (M* M)^(1/2), taken from the SVD M = U S V* as V S V*.

    Going through eigh(M* M) would square the condition number: a zero
    singular value comes back as sqrt(1e-16) ~ 1e-8.
    """
    M = as_matrix(M)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    n = M.shape[1]
    sv = np.zeros(n)
    sv[: s.size] = s
    return (adj(Vh) * sv) @ Vh


def positive_part(T):
    return func_calculus(T, lambda w: np.maximum(w, 0.0))


def negative_part(T):
    return func_calculus(T, lambda w: np.maximum(-w, 0.0))


def polar(M):
    """Polar decomposition M = V |M| with V a partial isometry."""
    M = as_matrix(M)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    keep = s > RANK_TOL * (s[0] if s.size else 0.0)
    V = U[:, keep] @ Vh[keep]
    return V, abs_op(M)


def range_basis(M, tol=RANK_TOL):
    """Orthonormal columns spanning the column space of M."""
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return U[:, :rank]


def kernel_basis(M, tol=RANK_TOL):
    """Orthonormal columns spanning the null space of M."""
    M = as_matrix(M)
    n = M.shape[1]
    if M.size == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return adj(Vh[rank:])


def orth_complement(U):
    """Orthonormal basis of the orthogonal complement of span(U)."""
    n = U.shape[0]
    if U.shape[1] == 0:
        return np.eye(n, dtype=complex)
    return kernel_basis(adj(U))


def projector(U):
    """Orthogonal projection onto span(U) for orthonormal U."""
    return U @ adj(U)


def intersect(U1, U2, gap=GAP_TOL):
    """Orthonormal basis of span(U1) & span(U2).

    Uses the eigenvalue-1 eigenspace of P1 P2 P1: a unit vector x satisfies
    <P1 P2 P1 x, x> = 1 exactly when x lies in both subspaces.
    """
    n = U1.shape[0]
    if U1.shape[1] == 0 or U2.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    P1 = projector(U1)
    M = P1 @ projector(U2) @ P1
    w, V = np.linalg.eigh(hermitian_part(M))
    return V[:, w >= 1.0 - gap]
