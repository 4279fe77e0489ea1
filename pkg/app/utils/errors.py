"""Error types shared by the calculus engines, the CLI and the HTTP routes."""

from typing import Iterable, Optional, Tuple


class CalculusError(Exception):
    """Base class for every user-facing error."""

    kind = "calculus_error"

    def to_json(self) -> dict:
        return {"error": str(self), "kind": self.kind}


class DomainError(CalculusError, ValueError):
    """An input violates the precondition of an operation."""

    kind = "domain_error"


class UnsupportedInputError(CalculusError):
    """Well-formed input the engine does not handle."""

    kind = "unsupported_input"


class InconsistentContextError(CalculusError):
    """Numerical data that cannot come from a smooth projective variety."""

    kind = "inconsistent_context"


class PreconditionError(CalculusError):
    """A certified precondition (e.g. regularity up to degree D) failed."""

    kind = "precondition_failed"


class ConfigurationError(CalculusError):
    kind = "configuration_error"


class WorkspaceError(CalculusError):
    kind = "workspace_error"


class ParseError(CalculusError):
    """Syntax error in an expression, with a 1-based character position."""

    kind = "parse_error"

    def __init__(self, message: str, position: int, expected: Iterable[str] = ()):
        self.position = position
        self.expected: Tuple[str, ...] = tuple(sorted(set(expected)))
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)

    def to_json(self) -> dict:
        data = super().to_json()
        data["position"] = self.position
        data["expected"] = list(self.expected)
        return data


class UnknownIdentifier(ParseError):
    kind = "unknown_identifier"


class TypeCheckError(ParseError):
    kind = "type_error"


class EvaluationError(CalculusError):
    """An inner error annotated with the span of the subexpression that raised it."""

    kind = "evaluation_error"

    def __init__(self, message: str, span: Tuple[int, int], source: Optional[str] = None,
                 cause: Optional[CalculusError] = None):
        self.span = span
        self.source = source
        self.cause = cause
        where = f"[{span[0]}:{span[1]}]"
        if source is not None:
            where += f" '{source[span[0] - 1:span[1] - 1]}'"
        super().__init__(f"{message} in {where}")

    def to_json(self) -> dict:
        data = super().to_json()
        data["span"] = list(self.span)
        if self.cause is not None:
            data["cause"] = self.cause.kind
        return data


class InvariantViolation(AssertionError):
    """An identity the engines guarantee did not hold."""

    kind = "invariant_violation"

    def to_json(self) -> dict:
        return {"error": str(self), "kind": self.kind}
