"""Overflow-safe complex arithmetic with a separated base-2 exponent.

An :class:`XComplex` stores ``mantissa * 2**exponent`` with the mantissa
modulus normalized into [1, 2) (or exactly zero).  Products of many factors
whose magnitudes grow or shrink exponentially, such as derivative cocycles
along long orbits, stay representable: the exponent is a Python integer and
never saturates, while the mantissa stays in hardware range.

Mantissas are ordinary double-precision complex values, so mantissa
arithmetic carries the usual ~53-bit precision; exponent arithmetic is
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Normalization base.  Everything below assumes 2 (frexp/ldexp based).
BASE = 2

#: Significand width of the mantissa type.  An addend whose exponent lies
#: more than this far below the other operand cannot affect the result.
MANTISSA_BITS = 53


def _scaled(z: complex, shift: int) -> complex:
    """z * 2**shift, componentwise and exact (up to under/overflow)."""
    return complex(math.ldexp(z.real, shift), math.ldexp(z.imag, shift))


@dataclass(frozen=True)
class XComplex:
    """A complex number ``mantissa * 2**exponent`` with |mantissa| in [1, 2).

    Zero is represented canonically as mantissa 0, exponent 0.  Instances
    are immutable; all arithmetic returns new normalized values.  The
    exponent is an arbitrary-precision integer, so exponent overflow is
    structurally impossible (the OverflowError contract of fixed-width
    exponents is unreachable here).
    """

    mantissa: complex
    exponent: int

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_complex(z: complex) -> "XComplex":
        z = complex(z)
        return _normalize(z.real, z.imag, 0)

    @staticmethod
    def zero() -> "XComplex":
        return _ZERO

    @staticmethod
    def one() -> "XComplex":
        return _ONE

    # -- predicates / conversions -------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def to_complex(self) -> complex:
        """Collapse to a plain complex.

        Values below the double range underflow gracefully to 0; values
        above it raise OverflowError.
        """
        if self.is_zero:
            return 0j
        if self.exponent > 1100:
            raise OverflowError(
                f"value 2**{self.exponent} * {self.mantissa} exceeds double range"
            )
        try:
            return _scaled(self.mantissa, self.exponent)
        except OverflowError:
            raise OverflowError(
                f"value 2**{self.exponent} * {self.mantissa} exceeds double range"
            ) from None

    def magnitude(self) -> float:
        """|value| as a float; 0.0 on underflow, inf on overflow."""
        if self.is_zero:
            return 0.0
        try:
            return math.ldexp(abs(self.mantissa), self.exponent)
        except OverflowError:
            return math.inf

    def log2_abs(self) -> float:
        """log2 |value|; -inf for zero.  Never over/underflows."""
        if self.is_zero:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent

    def log_abs(self) -> float:
        """Natural log of |value|; -inf for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * math.log(2.0)

    # -- arithmetic ----------------------------------------------------

    def __mul__(self, other: "XComplex") -> "XComplex":
        if self.is_zero or other.is_zero:
            return _ZERO
        m = self.mantissa * other.mantissa
        return _normalize(m.real, m.imag, self.exponent + other.exponent)

    def __add__(self, other: "XComplex") -> "XComplex":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi, lo = (self, other) if self.exponent >= other.exponent else (other, self)
        shift = hi.exponent - lo.exponent
        if shift > MANTISSA_BITS:
            return hi
        m = hi.mantissa + _scaled(lo.mantissa, -shift)
        return _normalize(m.real, m.imag, hi.exponent)

    def __neg__(self) -> "XComplex":
        return XComplex(-self.mantissa, self.exponent)

    def __sub__(self, other: "XComplex") -> "XComplex":
        return self + (-other)

    def reciprocal(self) -> "XComplex":
        if self.is_zero:
            raise ZeroDivisionError("reciprocal of XComplex zero")
        m = 1.0 / self.mantissa
        return _normalize(m.real, m.imag, -self.exponent)

    def __truediv__(self, other: "XComplex") -> "XComplex":
        return self * other.reciprocal()

    def conjugate(self) -> "XComplex":
        return XComplex(self.mantissa.conjugate(), self.exponent)

    def __repr__(self) -> str:
        if self.is_zero:
            return "XComplex(0)"
        return f"XComplex({self.mantissa!r} * 2**{self.exponent})"


def _normalize(re: float, im: float, exponent: int) -> XComplex:
    """Build a normalized XComplex from raw components and an exponent."""
    if re == 0.0 and im == 0.0:
        return _ZERO
    if math.isnan(re) or math.isnan(im) or math.isinf(re) or math.isinf(im):
        raise ValueError(f"non-finite mantissa components ({re}, {im})")
    # Coarse rescale by the larger component first so that abs() cannot
    # overflow even for components near the double limits.
    _, e0 = math.frexp(max(abs(re), abs(im)))
    if e0 != 0:
        re = math.ldexp(re, -e0)
        im = math.ldexp(im, -e0)
        exponent += e0
    # Now the larger component is in [0.5, 1), so the modulus is in
    # [0.5, sqrt(2)); at most one doubling/halving remains.
    a = math.hypot(re, im)
    while a < 1.0:
        re *= 2.0
        im *= 2.0
        exponent -= 1
        a *= 2.0
    while a >= 2.0:
        re *= 0.5
        im *= 0.5
        exponent += 1
        a *= 0.5
    return XComplex(complex(re, im), exponent)


_ZERO = XComplex(0j, 0)
_ONE = XComplex(1 + 0j, 0)


# Functional aliases matching the operation-level vocabulary.

def xc_mul(a: XComplex, b: XComplex) -> XComplex:
    """Normalized product; exponent arithmetic is exact."""
    return a * b


def xc_add(a: XComplex, b: XComplex) -> XComplex:
    """Exponent-aligned sum; a swamped addend leaves the larger operand
    unchanged (exponent gap > MANTISSA_BITS)."""
    return a + b


def mantissa_ulp_gap(a: XComplex, b: XComplex) -> float:
    """Distance between two XComplex values in ulps of a [1, 2) mantissa.

    Aligns exponents when they differ by 1 (a value straddling the
    renormalization boundary); returns inf for larger exponent gaps.
    One ulp here is 2**-52.
    """
    if a.is_zero and b.is_zero:
        return 0.0
    if a.is_zero or b.is_zero:
        return math.inf
    d = a.exponent - b.exponent
    if abs(d) > 1:
        return math.inf
    ma = _scaled(a.mantissa, max(d, 0))
    mb = _scaled(b.mantissa, max(-d, 0))
    return abs(ma - mb) / 2.0 ** -52
