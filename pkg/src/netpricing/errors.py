"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """Input outside the domain of an operation (negative actions, bad index)."""


class AssumptionError(ValueError):
    """A structural condition required by an operation does not hold."""


class NotUniformError(AssumptionError):
    """The game is not of the symmetric form a = a_bar*1, b = b_bar*1, G1 = g_bar*1.

    ``condition`` names the first violated requirement (``"a"``, ``"b"`` or
    ``"row_sums"``).
    """

    def __init__(self, condition: str, message: str):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(RuntimeError):
    """An iterative method hit its iteration cap or produced an invalid limit.

    ``diagnostics`` carries whatever the solver knew when it gave up.
    """

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
