"""Exception types raised across the package."""


class UdiscError(Exception):
    """Base class for all package errors."""


class NonSquare(UdiscError, ValueError):
    pass


class NotHermitian(UdiscError, ValueError):
    pass


class NoConvergence(UdiscError, RuntimeError):
    pass


class EmptyMatrix(UdiscError, ValueError):
    pass


class DimensionMismatch(UdiscError, ValueError):
    pass


class LengthMismatch(UdiscError, ValueError):
    pass


class IndexMismatch(UdiscError, ValueError):
    pass


class NotMinimal(UdiscError, ValueError):
    """The family is linearly dependent at the requested tolerance."""


class NotAPOVM(UdiscError, ValueError):
    """Positivity or normalization of a POVM is violated."""


class NotDistinguishing(UdiscError, ValueError):
    """The POVM does not unambiguously distinguish the family."""


class InvalidDensityMatrix(UdiscError, ValueError):
    pass


class NotDistinguishable(UdiscError, ValueError):
    pass


class TailTooLarge(UdiscError, ValueError):
    """Fock truncation drops more probability than allowed."""


class DegenerateLattice(UdiscError, ValueError):
    """Lattice generators do not span a positively oriented cell."""


class SizeCap(UdiscError, ValueError):
    pass


class HypothesisViolated(UdiscError, ValueError):
    """A bound was requested outside the regime where it holds."""


class SchemaError(UdiscError, ValueError):
    """Malformed input file. ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
