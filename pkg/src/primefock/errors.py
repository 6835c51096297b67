"""Exception types shared across the package."""


class DivergenceError(ValueError):
    """A series was requested outside its half-plane of convergence."""


class TruncationViolation(RuntimeError):
    """A creation operator mapped vector support outside the basis in strict mode."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = tuple(offending) if offending else ()


class ResourceCapExceeded(RuntimeError):
    """A requested computation exceeds a configured size cap."""


class QuadratureUnderResolved(ValueError):
    """The radial quadrature order is too small to be exact for the requested degree."""


class NumericalFailure(RuntimeError):
    """An iterative scheme failed to converge; carries the residual it reached."""

    def __init__(self, message, achieved_residual=None):
        super().__init__(message)
        self.achieved_residual = achieved_residual
