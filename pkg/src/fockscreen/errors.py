"""Exception types shared across the engine."""


class FockscreenError(Exception):
    """Base class for all engine errors."""


class DimensionMismatch(FockscreenError):
    """Vectors or matrices from incompatible spaces were combined."""


class NotInSpan(FockscreenError):
    """A vector falls outside the span of the requested basis."""


class NonIntegralPairing(FockscreenError):
    """A lattice pairing that must be an integer is not.

    Signals that the requested operator product is not single-valued
    on this sector, so the engine refuses to evaluate it.
    """


class UnboundedWindow(FockscreenError):
    """A truncation window admits infinitely many momenta."""


class WindowTooSmall(FockscreenError):
    """A requested block needs states beyond the materialized window."""


class EmptyWindow(FockscreenError):
    """No graded piece survives after intersecting validity windows."""


class RouteMismatch(FockscreenError):
    """Two independent constructions of the same tower disagree."""


class D2NotZero(FockscreenError):
    """A differential failed to square to zero (hard failure)."""


class StabilityError(FockscreenError):
    """An operator expected to preserve a subspace mapped out of it."""
