"""Idempotent matrices and the projections closest to and farthest from them."""
from .canonical import CanonicalForm, canonical_form, invariant_subspaces, verify_eigen_transfer
from .distance import (lambda_mu, max_distance, min_distance, null_padding_probe,
                       projection_at_distance, sqp_invariant)
from .errors import (BadDims, BadParam, CheckFailed, DomainError, IdemkitError, IsProjection,
                     NoConvergence, NotHermitian, NotIdempotent, OutOfRange, SingularPencil)
from .grid import GridOperator, make_Qr, make_Sr, make_q_r_alt, universal_check
from .idempotent import (Idempotent, block_form, matched_projection, null_projection,
                         random_idempotent, range_projection, validate)
from .nrange import (EllipseParams, closedness, numerical_radius, support_function,
                     support_profile, tq_ellipse, tq_operator)

__version__ = "0.1.0"

__all__ = [
    "BadDims", "BadParam", "CanonicalForm", "CheckFailed", "DomainError", "EllipseParams",
    "GridOperator", "IdemkitError", "Idempotent", "IsProjection", "NoConvergence",
    "NotHermitian", "NotIdempotent", "OutOfRange", "SingularPencil", "block_form",
    "canonical_form", "closedness", "invariant_subspaces", "lambda_mu", "make_Qr", "make_Sr",
    "make_q_r_alt", "matched_projection", "max_distance", "min_distance", "null_padding_probe",
    "null_projection", "numerical_radius", "projection_at_distance", "random_idempotent",
    "range_projection", "sqp_invariant", "support_function", "support_profile", "tq_ellipse",
    "tq_operator", "universal_check", "validate", "verify_eigen_transfer",
]
