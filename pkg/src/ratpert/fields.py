"""Perturbation direction fields: polynomial, or rational with known poles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import PoleProximityError
from .polynomial import ONE, Polynomial, poly_roots

#: A rational field's pole must stay at least this fraction of the orbit
#: diameter away from every orbit point.
POLE_DISTANCE_FRACTION = 1e-3


@dataclass(frozen=True)
class VectorFieldSpec:
    """A direction v in which the map is perturbed to R + lambda*v."""

    numerator: Polynomial
    denominator: Polynomial = ONE

    @staticmethod
    def constant(a: complex) -> "VectorFieldSpec":
        return VectorFieldSpec(Polynomial.constant(a))

    @staticmethod
    def monomial(degree: int, coefficient: complex = 1.0) -> "VectorFieldSpec":
        return VectorFieldSpec(Polynomial.monomial(degree, coefficient))

    @staticmethod
    def from_coefficients(coeffs: Sequence[complex]) -> "VectorFieldSpec":
        return VectorFieldSpec(Polynomial(tuple(complex(a) for a in coeffs)))

    @staticmethod
    def rational(numerator: Polynomial, denominator: Polynomial) -> "VectorFieldSpec":
        return VectorFieldSpec(numerator, denominator)

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.is_constant

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    @cached_property
    def poles(self) -> tuple[complex, ...]:
        if self.is_polynomial:
            return ()
        return poly_roots(self.denominator, tol=1e-12)

    def __call__(self, z):
        if self.is_polynomial:
            return self.numerator(z) / self.denominator.coefficients[0]
        return self.numerator(z) / self.denominator(z)

    def check_poles_clear(self, points: Sequence[complex]) -> None:
        """Reject fields whose poles approach the orbit sample.

        The minimum allowed distance is POLE_DISTANCE_FRACTION times the
        orbit diameter (at least that fraction absolute for degenerate
        one-point samples).
        """
        if self.is_polynomial or not self.poles:
            return
        pts = list(points)
        re = [z.real for z in pts]
        im = [z.imag for z in pts]
        diameter = max(max(re) - min(re), max(im) - min(im))
        min_allowed = POLE_DISTANCE_FRACTION * max(diameter, 1.0)
        for pole in self.poles:
            nearest = min(abs(pole - z) for z in pts)
            if nearest < min_allowed:
                raise PoleProximityError(
                    f"field pole at {pole} lies {nearest:.3e} from the orbit "
                    f"(minimum allowed {min_allowed:.3e})"
                )


CONSTANT_ONE = VectorFieldSpec.constant(1.0)
