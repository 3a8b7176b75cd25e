"""Exception hierarchy shared by every calkinkit module."""

from __future__ import annotations


class CalkinError(Exception):
    """Base class for all calkinkit failures."""


class PreconditionError(CalkinError, ValueError):
    """An operation was called on input outside its documented domain."""


class SymbolVanishesOnCircle(CalkinError):
    """The symbol has (numerically) a zero on the unit circle; no index exists."""


class CaptureConditionViolated(PreconditionError):
    """A tall section was requested with a margin too small to hold every nonzero row."""


class NotEssentialIsometry(CalkinError):
    """The tuple is not an essential spherical isometry."""


class ToleranceAmbiguous(CalkinError):
    """A singular value sits in the gap ``[tol, 10 * tol)``; grow the section and retry."""


class NotStabilized(CalkinError):
    """Kernel dimensions differ across the section sizes of the stabilization protocol."""

    def __init__(self, message: str, dims: tuple[int, ...] = ()):
        super().__init__(message)
        self.dims = dims


class CertificateFailed(CalkinError):
    """A section kernel vector is not a kernel vector of the infinite operator."""


class MonotonicityFailed(CalkinError):
    """Certified row-kernel dimensions did not strictly increase."""


class IndexObstruction(CalkinError):
    """dim ker T > dim ker T* for a single operator: no isometric compact perturbation exists."""

    def __init__(self, message: str, kernel_dim: int = 0, cokernel_dim: int = 0):
        super().__init__(message)
        self.kernel_dim = kernel_dim
        self.cokernel_dim = cokernel_dim


class NotPositive(CalkinError):
    """A Gram operator that should be positive definite has an eigenvalue below the floor."""


class NotHermitian(CalkinError):
    pass


class NotEssentialInversePair(CalkinError):
    pass


class IndexMismatch(CalkinError):
    """Winding-number index and kernel-count index disagree."""


class IsometrizationFailed(CalkinError):
    """The isometrized tuple missed a residual bound."""


class FormatError(CalkinError):
    """An operator or tuple document does not follow the file schema."""
