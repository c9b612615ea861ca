"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: validation/domain errors -> 2,
I/O and parse errors -> 3, precision failures -> 4.
"""


class DomainError(ValueError):
    """Arguments outside an operation's documented domain."""


class ParseError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class PrecisionError(RuntimeError):
    """Requested computation exceeds the configured precision budget.

    Raised instead of silently returning a phase (or sign) that working
    precision cannot support.
    """


class ConsistencyError(RuntimeError):
    """Two supposedly-agreeing computation routes disagree beyond bounds."""
