"""Custom exceptions for the metric dimension solver suite."""
from typing import Any, Dict, Optional, Sequence, Tuple


class MetricDimensionError(Exception):
    """Base exception for all solver suite errors."""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        if self.details:
            return f"{self.message} | Details: {self.details}"
        return self.message


class GraphParseError(MetricDimensionError):
    """Raised when an edge list cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None,
                 token: Optional[str] = None, **kwargs):
        details = {"line": line, "token": token}
        details.update(kwargs)
        super().__init__(message, details)
        self.line = line


class GraphValidationError(MetricDimensionError):
    """Raised when a graph or vertex set breaks a structural rule."""

    def __init__(self, message: str, vertex: Optional[int] = None,
                 edge: Optional[Tuple[int, int]] = None, **kwargs):
        details = {"vertex": vertex, "edge": edge}
        details.update(kwargs)
        super().__init__(message, details)


class NotConnectedError(MetricDimensionError):
    """Raised when an operation requires a connected graph."""

    def __init__(self, message: str, components: Optional[int] = None, **kwargs):
        details = {"components": components}
        details.update(kwargs)
        super().__init__(message, details)


class ContractViolation(MetricDimensionError):
    """Raised when a caller breaks an operation's precondition."""

    exit_code = 1

    def __init__(self, message: str, operation: Optional[str] = None, **kwargs):
        details = {"operation": operation}
        details.update(kwargs)
        super().__init__(message, details)


class DecompositionError(MetricDimensionError):
    """Raised when a tree or modular decomposition is invalid."""

    def __init__(self, message: str, node: Optional[Any] = None,
                 vertex: Optional[int] = None, **kwargs):
        details = {"node": node, "vertex": vertex}
        details.update(kwargs)
        super().__init__(message, details)


class TdParseError(DecompositionError):
    """Raised when a .td file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None, **kwargs):
        super().__init__(message, line=line, **kwargs)
        self.line = line


class NotChordalError(DecompositionError):
    """Raised by the clique tree builder; carries a chordless cycle."""

    def __init__(self, message: str, cycle: Sequence[int] = (), **kwargs):
        super().__init__(message, cycle=list(cycle), **kwargs)
        self.cycle = tuple(cycle)


class BudgetExceededError(MetricDimensionError):
    """Raised when a search or table would exceed its configured budget."""

    exit_code = 3

    def __init__(self, message: str, node: Optional[Any] = None, bound: Optional[int] = None,
                 ceiling: Optional[int] = None, budget_k: Optional[int] = None, **kwargs):
        details = {"node": node, "bound": bound, "ceiling": ceiling, "budget_k": budget_k}
        details.update(kwargs)
        super().__init__(message, details)
        self.node = node


class GenerationError(MetricDimensionError):
    """Raised when a graph family cannot be generated for the given arguments."""

    def __init__(self, message: str, family: Optional[str] = None,
                 n: Optional[int] = None, seed: Optional[int] = None, **kwargs):
        details = {"family": family, "n": n, "seed": seed}
        details.update(kwargs)
        super().__init__(message, details)


class ConfigurationError(MetricDimensionError):
    """Raised when configuration is invalid or missing."""

    def __init__(self, message: str, config_key: Optional[str] = None,
                 config_file: Optional[str] = None, **kwargs):
        details = {"config_key": config_key, "config_file": config_file}
        details.update(kwargs)
        super().__init__(message, details)


class ReportValidationError(MetricDimensionError):
    """Raised when a report does not match its JSON schema."""

    exit_code = 1

    def __init__(self, message: str, schema: Optional[str] = None,
                 errors: Optional[Sequence[Dict[str, Any]]] = None, **kwargs):
        details = {"schema": schema, "errors": list(errors or [])}
        details.update(kwargs)
        super().__init__(message, details)
