"""Shared exception types."""

from __future__ import annotations


class GTypeError(Exception):
    """Base class for all library errors."""


class ParseError(GTypeError):
    """Syntax error in a geometric-type file or a code literal."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class InvalidTypeError(GTypeError):
    """A geometric type failed validation where a valid one was required."""

    def __init__(self, report):
        self.report = report
        details = "; ".join(f"{rule}: {detail}" for rule, detail in report.violations)
        super().__init__(f"invalid geometric type: {details}")


class PreconditionError(GTypeError):
    """An operation was called outside its stated domain."""


class BudgetExceeded(GTypeError):
    """Materializing an iterated type would exceed the size budget."""

    def __init__(self, projected: int, budget: int, power: int):
        self.projected = projected
        self.budget = budget
        self.power = power
        super().__init__(
            f"alpha(T^{power}) = {projected} exceeds budget {budget}"
        )


class InconsistencyError(GTypeError):
    """Internal cross-check failed; indicates a bug, never bad input."""
