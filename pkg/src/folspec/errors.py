"""Exception types shared across the package."""


class FolspecError(Exception):
    """Base class for all package errors."""


class BackendError(FolspecError):
    """An operation was asked of a scalar backend that cannot perform it."""


class DimensionMismatchError(FolspecError):
    """Shapes or ambient dimensions of the operands do not line up."""


class ContainmentError(FolspecError):
    """A subspace that must be contained in another is not.

    Raised by quotient computations; signals an engine bug or a
    misconfigured rank tolerance, never a property of valid input.
    """


class InconsistentSystemError(FolspecError):
    """A linear system that theory guarantees solvable failed to solve.

    On the float backend this is a tolerance diagnostic: the residual of the
    least-squares solution exceeded the declared rank tolerance.
    """


class ModelSpecError(FolspecError):
    """A declarative model description violates its invariants."""


class ModelBuildError(ModelSpecError):
    """A built complex failed the d^2 = 0 validation.

    Carries the validation report listing the failing cells.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotVaismanCompatible(FolspecError):
    """Betti input cannot belong to a Vaisman manifold (e.g. negative e_u)."""
