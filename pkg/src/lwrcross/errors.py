"""Exception hierarchy shared by the solver, the scenario loader and the CLI."""


class LWRError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LWRError, ValueError):
    """A density argument lies outside [0, 1]."""


class InadmissibleConstraint(LWRError, ValueError):
    """The pair (interface speed, constraint level) violates the admissibility condition."""


class NoRoot(InadmissibleConstraint):
    """F_s(rho) = q has no solution because q is not below max F_s."""


class ScheduleError(LWRError):
    pass


class OutOfDomain(LWRError, ValueError):
    """An interface comes too close to the edge of the truncated domain."""


class InvalidStep(LWRError):
    """The interface moved by more than one cell, or to the left, in a single step."""


class CFLViolation(LWRError, ValueError):
    pass


class PhaseInvariantViolation(LWRError):
    """Two interfaces handled independently have overlapping stencils."""


class PreconditionError(LWRError, ValueError):
    pass


class ConfigMismatch(LWRError, ValueError):
    pass


class ParseError(LWRError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(LWRError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class IoError(LWRError, OSError):
    """An archive could not be read or written."""
