"""
Exceptions raised by finch

Every error carries a short machine-readable ``code`` and the process exit
code the CLI uses for it.
"""
from typing import Iterable, Optional


class FinchError(Exception):
    """Base class for all finch errors"""

    code = "error"
    exit_code = 2


class DomainError(FinchError):
    """A point lies outside a kernel domain, or a jet left the domain of sqrt/log/pow"""

    code = "domain"


class CapabilityError(FinchError):
    """Requested derivative orders exceed what the engine is configured for"""

    code = "capability"


class ParseError(FinchError):
    """Malformed metric expression text"""

    code = "parse"

    def __init__(self, message: str, position: int, expected: Iterable[str] = ()):
        self.position = position
        self.expected = sorted(set(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class ArityError(FinchError):
    """Variable index outside the dimension, or a function called with the wrong argument count"""

    code = "arity"


class ParamError(FinchError):
    """Invalid builtin parameters or metric spec"""

    code = "param"


class SingularMetricError(FinchError):
    """The metric tensor is (numerically) degenerate at the requested point"""

    code = "singular"
    exit_code = 3


class DeterminantSignError(SingularMetricError):
    """det g and det g~ have opposite signs, so the Painleve root is undefined"""

    code = "det-sign"


class StepFailure(FinchError):
    """The adaptive geodesic integrator could not continue"""

    code = "step"
    exit_code = 3

    def __init__(self, message: str, partial: Optional[object] = None):
        # partial: the Trajectory integrated up to the failure
        self.partial = partial
        super().__init__(message)
