"""Exception hierarchy shared by all modules."""


class CubicGenusError(Exception):
    """Base class."""


class DomainError(CubicGenusError, ValueError):
    """Argument outside the supported domain."""


class ResourceError(CubicGenusError):
    """Memory or arithmetic-range budget exceeded."""


class OverflowCheckError(ResourceError):
    """A checked int64 computation would overflow."""


class ConsistencyError(CubicGenusError, AssertionError):
    """An internal identity failed; indicates a bug or corrupted input."""


class UnsupportedSpecError(CubicGenusError, ValueError):
    """Local specification shape not supported at this prime."""


class MassTableIncomplete(CubicGenusError, LookupError):
    """A local mass needed for a predicted coefficient is not available."""
