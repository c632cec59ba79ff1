"""
Exception hierarchy for the Ferromagnet Ground State Verifier
Input problems are ValueErrors, solver problems are RuntimeErrors
"""

from typing import Optional


class FerroError(Exception):
    """Base class for every error raised by the verifier."""


class InputError(FerroError, ValueError):
    """Bad input: the CLI reports these with exit code 2."""


# Graph construction

class TooFewVertices(InputError):
    pass


class SelfLoop(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class NonPositiveCoupling(InputError):
    pass


class DisconnectedGraph(InputError):
    pass


class InvalidParameter(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class GraphFormatError(InputError):
    """Malformed edge-list text. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: Optional[int] = None, source: str = "<text>"):
        self.line_number = line_number
        self.source = source
        location = f"{source}:{line_number}" if line_number is not None else source
        super().__init__(f"{location}: {message}")


class InvalidN(InputError):
    pass


# Basis and operators

class SectorTooLarge(InputError):
    pass


class SectorTooLargeForDense(InputError):
    pass


class SectorMismatch(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotSpecialUnitary(NotUnitary):
    pass


# Numerical failures

class InternalInvariantViolation(FerroError, RuntimeError):
    pass


class EigensolverFailure(FerroError, RuntimeError):
    pass


class NoConvergence(EigensolverFailure):

    def __init__(self, message: str, max_iters: int):
        self.max_iters = max_iters
        super().__init__(f"{message} (max_iters={max_iters})")


class DegeneracyInconclusive(EigensolverFailure):
    """Next eigenvalue above the energy threshold but below the gap threshold."""


class DegenerateRotationSample(FerroError, RuntimeError):
    pass


class ReportWriteError(FerroError, OSError):
    pass
