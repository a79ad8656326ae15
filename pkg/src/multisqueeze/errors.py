"""Exception types raised by the decomposition routines."""


class DecompositionError(ValueError):
    """Base class for invalid-input errors in this package."""


class NonFinite(DecompositionError):
    pass


class NotSymmetric(DecompositionError):
    pass


class ShapeMismatch(DecompositionError):
    pass


class EmptyInput(DecompositionError):
    pass


class TooLarge(DecompositionError):
    pass


class NotSymplectic(DecompositionError):
    pass


class DegenerateSupport(DecompositionError):
    pass


class NotUnitary(DecompositionError):
    pass


class BadDimension(DecompositionError):
    pass


class DegenerateBasis(DecompositionError):
    pass


class OddSpectrum(DecompositionError):
    pass


class BadTrisection(DecompositionError):
    pass


class TooManyPhotons(DecompositionError):
    pass


class PhotonNumberMismatch(DecompositionError):
    pass


class EmptySector(DecompositionError):
    pass


class BadParameter(DecompositionError):
    pass


class RouteMismatch(RuntimeError):
    """Two independent computation routes disagreed beyond tolerance."""


class ParseError(DecompositionError):
    """Malformed kernel file. ``field`` names the offending entry when known."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class VersionUnsupported(DecompositionError):
    pass
