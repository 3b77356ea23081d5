"""Exception types raised across the package."""


class DegenerateRecurrence(ValueError):
    """Characteristic polynomial lacks the (X - alpha)^2 (X - beta) shape with 1 as a root."""


class RatioUnit(ValueError):
    """alpha / beta is 1 or -1."""


class IndexTooSmall(ValueError):
    pass


class InternalContradiction(AssertionError):
    """A divisibility that must hold by construction did not. Indicates a bug."""


class BudgetExceeded(ValueError):
    pass


class RangeTooLarge(ValueError):
    pass


class NoConvergence(ArithmeticError):
    pass


class PreconditionViolated(ValueError):
    def __init__(self, clause, message=None):
        self.clause = clause
        super().__init__(message or clause)


class CapEscalationFailed(ArithmeticError):
    def __init__(self, n, cap):
        self.n = n
        self.cap = cap
        super().__init__(f"valuation at n={n} exceeds escalated cap {cap}")
