"""Exception types shared across the package."""


class EdgeEstError(Exception):
    pass


class OutOfRange(EdgeEstError, IndexError):
    """A vertex id or string index outside the valid range."""


class SelfLoop(EdgeEstError, ValueError):
    pass


class DomainError(EdgeEstError, ValueError):
    """Parameters outside an operation's admissible domain."""


class BudgetExhausted(EdgeEstError):
    """Raised when a query would push a session past its query budget."""

    def __init__(self, budget: int, used: int):
        super().__init__(f"query budget {budget} exhausted ({used} queries used)")
        self.budget = budget
        self.used = used
