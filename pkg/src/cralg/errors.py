"""Exception hierarchy shared by every module."""


class CRAlgError(Exception):
    """Base class for all errors raised by cralg."""


class MalformedTableError(CRAlgError):
    pass


class CompositionError(CRAlgError):
    pass


class EvaluationError(CRAlgError):
    pass


class ImplicitSolveError(CRAlgError):
    pass


class BasepointError(CRAlgError):
    pass


class SingularMatrixError(CRAlgError):
    pass


class TangencyError(CRAlgError):
    pass


class NormalizationError(CRAlgError):
    pass


class OrderInsufficientError(CRAlgError):
    """The truncation order cannot support the requested computation."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class HypothesisFailed(CRAlgError):
    """A hypothesis of the extension theorem does not hold.

    ``condition`` is a short machine-readable key (see
    ``cralg.pipeline.CONDITIONS``); ``details`` carries the witness data.
    """

    def __init__(self, condition: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.condition = condition
        self.details = details or {}


class SubsetSelectionError(HypothesisFailed):
    """Rank deficiency while picking reflection equations.

    Only reachable when the rank condition check was bypassed or the input
    is inconsistent.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__("rank_condition", message, details)


class ParseError(CRAlgError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column
