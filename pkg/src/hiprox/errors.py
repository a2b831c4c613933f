"""Exception types shared across the package."""


class DimensionError(ValueError):
    """An array argument has the wrong shape for the operator it was passed to."""


class DomainError(ValueError):
    """A point lies outside the domain of an oracle or simple term.

    ``index`` identifies the violated row/coordinate where that is meaningful,
    else it is None.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ParameterError(ValueError):
    """A solver or certificate parameter is outside its admissible range."""


class CapabilityError(NotImplementedError):
    """The requested operation is outside the implemented scope (by design)."""


class CertificateError(RuntimeError):
    """A certificate input is malformed (e.g. g is not a valid subgradient).

    Distinct from a well-formed certificate that simply fails its inequality.
    """


class NumericalError(RuntimeError):
    """A numerical procedure failed (bracketing, non-convergence, ...).

    ``residual`` carries the last residual where available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
