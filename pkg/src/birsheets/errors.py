"""Exception types shared across the package."""


class BirsheetsError(Exception):
    pass


class UnsupportedType(BirsheetsError, ValueError):
    pass


class CapExceeded(BirsheetsError, ValueError):
    pass


class InvalidOrbit(BirsheetsError, ValueError):
    pass


class NoValidPartition(BirsheetsError, ValueError):
    pass


class InconsistentEmbedding(BirsheetsError, ValueError):
    pass


class InvalidInstance(BirsheetsError, ValueError):
    pass


class UniquenessViolation(BirsheetsError, RuntimeError):
    """Two non-conjugate birational data for one orbit: an engine bug."""


class PointOutsideComponent(BirsheetsError, ValueError):
    pass


class IncompletePoset(BirsheetsError, RuntimeError):
    pass


class Undecidable(BirsheetsError, RuntimeError):
    pass
