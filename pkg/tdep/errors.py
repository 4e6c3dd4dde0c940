"""Exceptions raised by tdep

Argument errors are reported as ValueError throughout the package.
The classes in this module refine ValueError and ArithmeticError for
the failure modes that callers (most notably the command line
interface) need to tell apart.
"""


class CapacityError(ValueError):
    """Raised when a product, convolution or cost matrix exceeds its budget"""


class DegenerateMeasureError(ValueError):
    """Raised when a normalizing quantity of a measure vanishes

    Typical causes are a marginal with zero diameter, zero variance,
    or zero distance variance.
    """


class ConvergenceError(ArithmeticError):
    """Raised when an iterative method fails within its budget

    The attribute `violation` holds the last measured marginal
    violation (Sinkhorn) or residual (matrix square root).
    """
    def __init__(self, message, violation=None):
        super(ConvergenceError, self).__init__(message)
        self.violation = violation


class NumericalError(ArithmeticError):
    """Raised when results drift beyond tolerated floating point error"""
