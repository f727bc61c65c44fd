"""Exception types shared across the package."""


class NotHermitian(ValueError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPSD(ValueError):
    """Matrix expected to be positive semidefinite is not."""


class DimMismatch(ValueError):
    """Operand dimensions are incompatible."""


class DimOutOfRange(ValueError):
    """Dimensions outside the regime an exact method supports."""


class IndexOutOfRange(IndexError):
    """Subset indices outside the declared factor dimension."""


class DomainError(ValueError):
    """Scalar parameter outside its admissible domain."""


class ModeMismatch(ValueError):
    """Gaussian channels with different mode counts."""


class LinearityViolation(ValueError):
    """Callable promised to be linear failed the linearity spot-check."""


class PreconditionFailed(ValueError):
    """A documented operation precondition does not hold."""


class NumericalFailure(RuntimeError):
    """Solver could not reach a trustworthy conclusion."""


class ConvergenceFailure(RuntimeError):
    """Iterative search stopped without meeting its convergence target."""
