"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the supported domain of an operation."""


class ConvergenceError(RuntimeError):
    """A quadrature or integration did not converge to the requested tolerance."""


class StepSizeError(RuntimeError):
    """Time step too coarse; a conserved quantity drifted beyond tolerance."""


class WidenDomainError(RuntimeError):
    """The solution reached the edge of the computational domain."""
