"""Exception types shared across the toolkit.

Every domain failure derives from :class:`RatpertError` so callers (and the
CLI exit-code mapping) can distinguish "the mathematics refused" from plain
usage bugs.
"""

from __future__ import annotations


class RatpertError(Exception):
    """Base class for all domain errors raised by this package."""


class PoleError(RatpertError):
    """A rational map was evaluated too close to a pole."""


class RootFindingError(RatpertError):
    """The simultaneous root iteration did not converge, or a required
    root (e.g. a repelling fixed point) could not be located."""


class DegenerateMapError(RatpertError):
    """Numerator and denominator share a root, or the critical-point
    structure is degenerate for the analysis at hand."""


class CriticalRelationError(RatpertError):
    """The forward orbit landed on (or within tolerance of) a critical point.

    Attributes:
        index: orbit index at which the relation occurred.
        orbit: the partially built orbit record, marked with the relation,
            for callers that want to inspect the prefix.
    """

    def __init__(self, message: str, index: int, orbit=None):
        super().__init__(message)
        self.index = index
        self.orbit = orbit


class InvalidOrbitError(RatpertError):
    """An orbit record is unusable for the requested analysis (e.g. it
    carries a critical relation, or is too short)."""


class NotSummableError(RatpertError):
    """The orbit shows divergent evidence; the series over 1/cocycle does
    not admit a meaningful partial-sum value."""


class PoleProximityError(RatpertError):
    """A vector field's pole lies too close to the orbit it would be
    summed over."""


class NoWitnessError(RatpertError):
    """All supplied moments vanish; no polynomial witness field exists up
    to the requested degree."""


class ParabolicCycleError(RatpertError):
    """The cycle multiplier is within tolerance of 1; the linearized
    conjugacy equation is singular there."""


class InvalidCycleError(RatpertError):
    """A cycle is unusable for continuation (not repelling, or Newton
    fails on it at the base parameter)."""


class ParseError(RatpertError):
    """Malformed textual input.

    Attributes:
        position: character offset of the first offending character, or -1.
    """

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


class ShapeError(RatpertError):
    """Result rows do not match the grid shape they are being arranged into."""
