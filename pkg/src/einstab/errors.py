"""
Module with the exception types raised by einstab

Invalid parameters are reported with the built-in ValueError. The classes below cover
the two failure modes that are specific to the numerical certificates.
"""


class SolverError(RuntimeError):
    """
    Raised when an iterative solver (Newton iteration, bisection) fails to converge
    or cannot bracket a root. The last iterate is kept for the failure report.
    """

    def __init__(self, message, last_iterate=None, iterations=None):
        """
        :param message: Human-readable description of the failure
        :param last_iterate: Last iterate computed by the solver (or None if no iterate exists)
        :param iterations: Number of iterations performed before giving up
        """
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class InvariantViolation(AssertionError):
    """
    Raised when a built-in self-check fails, e.g., when a closed-form formula disagrees with
    the structure-constant oracle or a stored verdict does not match its witness.
    """

    def __init__(self, message, value=None, tolerance=None):
        """
        :param message: Description of the violated check
        :param value: The measured deviation
        :param tolerance: The tolerance the deviation was checked against
        """
        if value is not None and tolerance is not None:
            message = "%s (deviation %.3e > tolerance %.1e)" % (message, value, tolerance)
        super().__init__(message)
        self.value = value
        self.tolerance = tolerance
