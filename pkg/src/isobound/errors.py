"""Exception types shared across the package."""


class IsoboundError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateConfiguration(IsoboundError):
    """The requested polygon does not exist (the defining expression is < 1)."""


class OutOfRange(IsoboundError):
    """A numeric argument lies outside its allowed interval.

    ``index`` and ``which`` identify the offending parameter when the error
    refers to a positional box constraint (twist/length lists).
    """

    def __init__(self, message, index=None, which=None):
        super().__init__(message)
        self.index = index
        self.which = which


class InvalidGraph(IsoboundError):
    """A graph violates pseudo-3-regularity, connectivity or count rules."""


class InvalidEdge(IsoboundError):
    """An edge argument is not present in the graph."""


class UnsupportedSignature(IsoboundError):
    """The (genus, cusps) signature admits no pants decomposition."""


class SignatureMismatch(IsoboundError):
    """The signature does not belong to the requested surface class."""


class UnsupportedCuspCase(IsoboundError):
    """The closed-form transversal needs both wrap curves non-cusped."""


class LoopEdgeUnsupported(IsoboundError):
    """The closed-form transversal needs two distinct pairs of pants."""


class NumericalInstability(IsoboundError):
    """A residual exceeded tolerance; carries the measured residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResourceLimit(IsoboundError):
    """An enumeration exceeded its configured element budget."""


class ParseError(IsoboundError):
    """A text document does not conform to its format."""


class ValidationError(IsoboundError):
    """A parsed document is well-formed but semantically inconsistent."""
