"""Exception hierarchy shared by every module."""


class MCFError(Exception):
    """Base class for all errors raised by this package."""


class NetworkError(MCFError, ValueError):
    """The problem instance violates a structural constraint."""


class UnbalancedSupply(NetworkError):
    pass


class NegativeCapacity(NetworkError):
    pass


class Disconnected(NetworkError):
    pass


class InvalidArc(NetworkError):
    """Endpoint out of range or self-loop."""


class OverflowRisk(MCFError, OverflowError):
    """Magnitudes leave too little headroom for 64-bit arithmetic."""


class NegativeCost(MCFError, ValueError):
    """The solver requires nonnegative arc costs."""


class InfeasibleFlow(MCFError, ValueError):
    pass


class NegativeCycle(MCFError, ValueError):
    pass


class InternalInconsistency(MCFError, AssertionError):
    """Independent optimality criteria disagreed."""


class DimacsError(MCFError, ValueError):
    """Base class for DIMACS parse errors; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimacsSyntaxError(DimacsError):
    pass


class IdOutOfRange(DimacsError):
    pass


class CapBelowLow(DimacsError):
    pass


class MissingProblemLine(DimacsError):
    pass


class InvalidSpec(MCFError, ValueError):
    pass


class SolverDisagreement(MCFError, RuntimeError):
    pass
