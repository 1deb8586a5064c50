"""Exception hierarchy shared by the library and the command line."""


class LatticeToddError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class SchemaError(LatticeToddError):
    """Malformed input document or invalid parameters."""

    exit_code = 2


class GeometryError(LatticeToddError):
    """The input does not describe a region the requested operation accepts."""

    exit_code = 3


class UnboundedError(GeometryError):
    pass


class EmptyRegionError(GeometryError):
    pass


class NotFullDimensionalError(GeometryError):
    pass


class NotSimpleError(GeometryError):
    pass


class TypeChangeError(GeometryError):
    """A dilation changed the combinatorial type of the polytope."""


class ResourceLimitError(LatticeToddError):
    """A configured size cap was exceeded."""

    exit_code = 4


class VerificationError(LatticeToddError):
    exit_code = 5


class InterpolationError(LatticeToddError):
    """The sample set is not poised for the requested degree."""


class ConvergenceError(LatticeToddError):
    """A truncated series failed to converge at the requested tolerance."""


class TruncationError(SchemaError):
    """An operator series is truncated below the degree it must act on."""
