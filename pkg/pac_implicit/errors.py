from __future__ import annotations


class PacImplicitError(ValueError):
    """Base class for every error raised by pac-implicit."""


class MissingVariable(PacImplicitError):
    def __init__(self, name: str):
        super().__init__(f"No value assigned to variable '{name}'")
        self.name = name


class UnexpectedNeq(PacImplicitError):
    """Raised when a disequality reaches the conjunctive feasibility check."""


class SizeLimitExceeded(PacImplicitError):
    pass


class OutOfRange(PacImplicitError):
    pass


class EmptySampleList(PacImplicitError):
    def __init__(self):
        super().__init__("At least one sample is required")


class InvalidConfig(PacImplicitError):
    pass


class Unbounded(PacImplicitError):
    """
    The doubling search ran past the magnitude cap without the verdict changing,
    so the samples never pin the objective down.
    """

    def __init__(self, bound):
        super().__init__(f"Objective bound search exceeded magnitude {bound}")
        self.bound = bound


class UnboundedAbove(Unbounded):
    pass


class UnboundedBelow(Unbounded):
    pass


class ParseError(PacImplicitError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}" if line else reason)
        self.line = line
        self.reason = reason


class InfeasibleProblem(PacImplicitError):
    pass


class RejectionBudgetExceeded(PacImplicitError):
    pass
