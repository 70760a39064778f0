"""Exception hierarchy shared by every idemkit module."""


class IdemkitError(Exception):
    """Base class for all library errors."""


class NotHermitian(IdemkitError, ValueError):
    pass


class NoConvergence(IdemkitError, RuntimeError):
    pass


class DomainError(IdemkitError, ValueError):
    pass


class NotIdempotent(IdemkitError, ValueError):
    pass


class BadDims(IdemkitError, ValueError):
    pass


class SingularPencil(IdemkitError, ValueError):
    pass


class OutOfRange(IdemkitError, ValueError):
    pass


class IsProjection(IdemkitError, ValueError):
    pass


class BadParam(IdemkitError, ValueError):
    pass


class CheckFailed(IdemkitError, AssertionError):
    """An identity that must hold numerically did not, beyond tolerance.

    The offending residual is kept on the exception so reports can show it.
    """

    def __init__(self, what, residual, tol):
        super().__init__(f"{what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")
        self.what = what
        self.residual = float(residual)
        self.tol = float(tol)
