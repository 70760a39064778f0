"""Idempotent matrices: validation, random generation, block form, and the
projections canonically attached to an idempotent Q.

The matched projection is

    m(Q) = 1/2 (|Q*| + Q*) |Q*|^+ (|Q*| + I)^{-1} (|Q*| + Q),

the projection nearest to Q in operator norm.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import BadDims, NotIdempotent, SingularPencil

PENCIL_COND_CAP = 1e12


@dataclass(frozen=True, eq=False)
class Idempotent:
    Q: np.ndarray
    defect: float
    norm: float
    is_projection: bool
    tol: float

    @property
    def n(self):
        return self.Q.shape[0]

    def adjoint(self):
        return validate(la.adj(self.Q), self.tol)

    def complement(self):
        return validate(np.eye(self.n) - self.Q, self.tol)


@dataclass(frozen=True, eq=False)
class BlockForm:
    """Q = [U1 U2] [[I, A], [0, 0]] [U1 U2]* with U1 spanning R(Q), U2 spanning N(Q*)."""
    U1: np.ndarray
    U2: np.ndarray
    A: np.ndarray
    B: np.ndarray

    @property
    def U(self):
        return np.hstack([self.U1, self.U2])


def default_tol(Q):
    return 1e-9 * (1.0 + la.op_norm(Q) ** 2)


def validate(Q, idem_tol=None):
    """Check Q^2 = Q and wrap it. Also records whether Q is self-adjoint."""
    if isinstance(Q, Idempotent):
        return Q
    try:
        Q = la.as_matrix(Q, square=True)
    except ValueError as exc:
        raise BadDims(str(exc)) from exc
    norm = la.op_norm(Q)
    tol = default_tol(Q) if idem_tol is None else float(idem_tol)
    defect = la.op_norm(Q @ Q - Q)
    if defect > tol:
        raise NotIdempotent(f"||Q^2 - Q|| = {defect:.3e} exceeds {tol:.3e}")
    is_proj = la.op_norm(Q - la.adj(Q)) <= tol
    return Idempotent(Q, defect, norm, bool(is_proj), tol)


def as_idempotent(Q, idem_tol=None):
    return Q if isinstance(Q, Idempotent) else validate(Q, idem_tol)


def random_unitary(n, rng):
    """Haar-distributed n x n unitary (QR of a complex Ginibre matrix, phases fixed)."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(Z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_idempotent(n, k, a, seed=None, rng=None):
    """W* [[I_k, A], [0, 0]] W with Haar W and a Gaussian A rescaled to ||A|| = a."""
    if not (isinstance(n, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise BadDims("n and k must be integers")
    if not 1 <= k <= n - 1:
        raise BadDims(f"need 1 <= k <= n-1, got n={n}, k={k}")
    if a < 0:
        raise BadDims(f"skew magnitude must be non-negative, got {a}")
    rng = np.random.default_rng(seed) if rng is None else rng
    G = rng.standard_normal((k, n - k)) + 1j * rng.standard_normal((k, n - k))
    A = G * (a / la.op_norm(G)) if a > 0 else np.zeros_like(G)
    M = np.zeros((n, n), dtype=complex)
    M[:k, :k] = np.eye(k)
    M[:k, k:] = A
    W = random_unitary(n, rng)
    return validate(la.adj(W) @ M @ W)


def random_projection(n, rng, rank=None):
    """V diag(I_k, 0) V* with Haar V; k drawn uniformly from 0..n unless given."""
    k = int(rng.integers(0, n + 1)) if rank is None else int(rank)
    V = random_unitary(n, rng)
    return V[:, :k] @ la.adj(V[:, :k])


def block_form(Q):
    Q = as_idempotent(Q).Q
    U1 = la.range_basis(Q)
    U2 = la.orth_complement(U1)  # R(Q)^perp = N(Q*)
    A = la.adj(U1) @ Q @ U2
    B = la.psd_sqrt(np.eye(U1.shape[1]) + A @ la.adj(A))
    return BlockForm(U1, U2, A, B)


def matched_projection(Q):
    """m(Q) evaluated straight from its defining product."""
    Q = as_idempotent(Q).Q
    n = Q.shape[0]
    I = np.eye(n)
    Qs = la.adj(Q)
    absQs = la.abs_op(Qs)
    left = absQs + Qs
    right = absQs + Q
    return 0.5 * left @ la.moore_penrose(absQs) @ np.linalg.solve(absQs + I, right)


def matched_projection_blocks(Q):
    """m(Q) from the block form; an independent route used for cross-checks.

    In the basis [U1 U2], m(Q) = 1/2 [[(B+I)B^-1, B^-1 A], [A* B^-1, A* (B(B+I))^-1 A]].
    """
    bf = block_form(Q)
    k = bf.U1.shape[1]
    I = np.eye(k)
    Binv = np.linalg.inv(bf.B)
    A = bf.A
    top = np.hstack([(bf.B + I) @ Binv, Binv @ A])
    bot = np.hstack([la.adj(A) @ Binv, la.adj(A) @ np.linalg.solve(bf.B @ (bf.B + I), A)])
    U = bf.U
    return U @ (0.5 * np.vstack([top, bot])) @ la.adj(U)


def _pencil_inverse(Q):
    n = Q.shape[0]
    pencil = Q + la.adj(Q) - np.eye(n)
    inv = np.linalg.inv(pencil)
    size = la.op_norm(inv)
    if not np.isfinite(size) or size > PENCIL_COND_CAP:
        raise SingularPencil(f"||(Q+Q*-I)^-1|| = {size:.3e}; the input is too far from idempotent")
    return inv


def range_projection(Q):
    """Orthogonal projection onto R(Q): Q (Q + Q* - I)^{-1}."""
    Q = as_idempotent(Q).Q
    return Q @ _pencil_inverse(Q)


def null_projection(Q):
    """Orthogonal projection onto N(Q): (Q - I)(Q + Q* - I)^{-1}."""
    Q = as_idempotent(Q).Q
    return (Q - np.eye(Q.shape[0])) @ _pencil_inverse(Q)


def reconstruct_from_matched(Q):
    """Rebuild Q from P = P_R(Q) and m = m(Q) alone: [P(2m-I)P]^+ P(2m-I)."""
    Q = as_idempotent(Q)
    P = range_projection(Q)
    m = matched_projection(Q)
    X = P @ (2.0 * m - np.eye(Q.n))
    return la.moore_penrose(X @ P) @ X
