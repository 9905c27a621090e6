"""Exception hierarchy. Anything a caller can fix by changing inputs is a
:class:`DomainError`; the CLI maps those to exit status 3."""


class QIError(Exception):
    """Base class for all package errors."""


class DomainError(QIError, ValueError):
    """Parameter outside the domain where an operation is defined."""


class StructuralError(QIError, ValueError):
    """Operands with mismatched dimension or basis."""


class CapacityError(DomainError):
    """Requested Hilbert-space dimension exceeds the configured cap."""


class EigenSolverError(QIError, ArithmeticError):
    def __init__(self, dim: int, detail: str):
        self.dim = dim
        super().__init__(f"eigensolver failed for dim={dim}: {detail}")


class DegenerateModelError(DomainError):
    """Outcome model with a deterministic absent-hypothesis response."""


class UnboundedTrialsError(DomainError):
    """No finite number of trials reaches the requested error."""


class ConfigError(QIError, ValueError):
    """Malformed scenario configuration or command-line value."""
