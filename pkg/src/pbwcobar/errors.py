"""Exception hierarchy. Mathematical verdicts (a failed PBW check, a non-Poisson
bivector) are report content, never exceptions."""


class PBWError(Exception):
    """Base class for all library errors."""


class ContextError(PBWError):
    """Operands live over different generator sets or truncation orders."""


class GradingError(PBWError):
    """An operation received an element of the wrong degree."""


class DegreeOverflowError(PBWError):
    """A product left the truncated basis of a strict algebra."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


class ResourceError(PBWError):
    """A finite slice exceeds the configured size cap."""


class PreconditionError(PBWError):
    """An operation's precondition failed; ``witness`` carries the evidence."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConventionError(PBWError):
    """A sign-convention identity that must hold did not."""


class ShapeError(PBWError):
    """Arity or shape mismatch between a graph and its inputs."""
