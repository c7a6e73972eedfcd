"""Rational and unicritical polynomial maps with derivative evaluation.

A MapSpec is a quotient of two coprime polynomials.  Evaluation returns the
value and the derivative together (Horner plus quotient rule), and the
finite-plane critical points are computed once and cached.

A map with J(R) = the whole sphere is outside this toolkit's scope; callers
are expected to supply maps with infinity in the Fatou set (for a rational
map not of that form, precompose with a Moebius change of coordinates
first; the toolkit does not choose one automatically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateMapError, PoleError, RootFindingError
from .polynomial import ONE, CLUSTER_TOL, Polynomial, cluster_points, poly_roots

#: Relative tolerance below which the denominator counts as a pole.
POLE_TOL = 1e-10

#: Relative residual a stored critical point must satisfy: |R'(z)| below
#: this times the local coefficient scale.
CRITICAL_RESIDUAL_TOL = 1e-10

#: Numerator/denominator roots closer than this (relative) fail coprimality.
COPRIMALITY_TOL = 1e-10


@dataclass(frozen=True)
class MapSpec:
    """A rational map numerator/denominator in lowest terms.

    Use the factories (:meth:`polynomial`, :meth:`unicritical`,
    :meth:`rational`) for validated construction; the bare constructor only
    runs cheap structural checks and is what perturbation code uses when
    coprimality is preserved by construction.
    """

    numerator: Polynomial
    denominator: Polynomial = ONE

    def __post_init__(self):
        if self.numerator.is_zero:
            raise DegenerateMapError("numerator is identically zero")
        if self.denominator.is_zero:
            raise DegenerateMapError("denominator is identically zero")
        if self.degree < 2:
            raise DegenerateMapError(
                f"map degree {self.degree} < 2; the dynamics here need degree >= 2"
            )

    # -- factories -------------------------------------------------------

    @staticmethod
    def polynomial(poly: Polynomial) -> "MapSpec":
        return MapSpec(poly, ONE)

    @staticmethod
    def unicritical(d: int, c: complex) -> "MapSpec":
        """z**d + c."""
        if d < 2:
            raise ValueError("unicritical degree must be >= 2")
        coeffs = [complex(c)] + [0j] * (d - 1) + [1 + 0j]
        return MapSpec(Polynomial(tuple(coeffs)), ONE)

    @staticmethod
    def rational(
        numerator: Polynomial,
        denominator: Polynomial,
        coprimality_tol: float = COPRIMALITY_TOL,
    ) -> "MapSpec":
        """Validated rational map; raises DegenerateMapError on a shared root."""
        if denominator.is_constant:
            if denominator.coefficients[0] == 0:
                raise DegenerateMapError("denominator is identically zero")
            scaled = numerator.scale(1.0 / denominator.coefficients[0])
            return MapSpec(scaled, ONE)
        if numerator.degree >= 1:
            num_roots = poly_roots(numerator, tol=1e-10)
            den_roots = poly_roots(denominator, tol=1e-10)
            for a in num_roots:
                for b in den_roots:
                    if abs(a - b) <= coprimality_tol * max(1.0, abs(a), abs(b)):
                        raise DegenerateMapError(
                            f"numerator and denominator share a root near {a}"
                        )
        return MapSpec(numerator, denominator)

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.denominator.is_constant

    @cached_property
    def derivative_numerator(self) -> Polynomial:
        """Numerator of R': P'Q - PQ' (just P' for polynomial maps)."""
        if self.is_polynomial:
            return self.numerator.derivative().scale(
                1.0 / self.denominator.coefficients[0]
            )
        return self.numerator.derivative() * self.denominator - self.numerator * self.denominator.derivative()

    @cached_property
    def critical_points(self) -> tuple[complex, ...]:
        """Finite-plane critical points, clustered within 1e-7 and deduplicated.

        A cluster of k nearby roots of R' is reported once (its centroid);
        the multiplicities are available via :meth:`critical_points_with_multiplicity`.
        """
        return tuple(z for z, _ in self.critical_points_with_multiplicity)

    @cached_property
    def critical_points_with_multiplicity(self) -> tuple[tuple[complex, int], ...]:
        dnum = self.derivative_numerator
        if dnum.is_zero:
            raise DegenerateMapError("derivative vanishes identically")
        if dnum.degree < 1:
            return ()
        roots = poly_roots(dnum, tol=1e-12)
        clusters = cluster_points(roots, tol=CLUSTER_TOL)
        out = []
        for center, count in clusters:
            center = _polish_root(dnum, center)
            residual = abs(dnum(center))
            scale = max(dnum.eval_scale(center), 1e-300)
            if residual > CRITICAL_RESIDUAL_TOL * scale:
                raise RootFindingError(
                    f"critical point candidate {center} has residual {residual:.3e}"
                )
            out.append((center, count))
        return tuple(out)


def _polish_root(p: Polynomial, z: complex, iterations: int = 3) -> complex:
    for _ in range(iterations):
        val, der = p.eval_with_derivative(z)
        if der == 0:
            return z
        step = val / der
        if abs(step) > 1.0 + abs(z):
            return z
        z = z - step
    return z


def eval_map(map: MapSpec, z: complex) -> tuple[complex, complex]:
    """R(z) and DR(z) by Horner and the quotient rule.

    Raises PoleError when |denominator(z)| falls below the pole tolerance
    relative to the local coefficient scale.
    """
    z = complex(z)
    p, dp = map.numerator.eval_with_derivative(z)
    if map.is_polynomial:
        q0 = map.denominator.coefficients[0]
        return p / q0, dp / q0
    q, dq = map.denominator.eval_with_derivative(z)
    scale = max(map.denominator.eval_scale(z), 1e-300)
    if abs(q) <= POLE_TOL * scale:
        raise PoleError(f"evaluation at {z} is within pole tolerance")
    value = p / q
    derivative = (dp * q - p * dq) / (q * q)
    return value, derivative


def eval_map_many(
    map: MapSpec, z: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (value, derivative, valid_mask); poles are masked, not raised."""
    z = np.asarray(z, dtype=complex)
    p, dp = map.numerator.eval_with_derivative(z)
    if map.is_polynomial:
        q0 = map.denominator.coefficients[0]
        ok = np.isfinite(p) & np.isfinite(dp)
        return p / q0, dp / q0, ok
    q, dq = map.denominator.eval_with_derivative(z)
    az = np.abs(z)
    scale = np.zeros_like(az)
    for a in map.denominator.coefficients[::-1]:
        scale = scale * az + abs(a)
    ok = np.abs(q) > POLE_TOL * np.maximum(scale, 1e-300)
    q_safe = np.where(ok, q, 1.0)
    value = p / q_safe
    derivative = (dp * q_safe - p * dq) / (q_safe * q_safe)
    ok = ok & np.isfinite(value) & np.isfinite(derivative)
    return value, derivative, ok


def critical_points(map: MapSpec) -> tuple[complex, ...]:
    """Finite-plane critical points of the map (deduplicated)."""
    return map.critical_points


def is_critical_point(map: MapSpec, z: complex) -> bool:
    """Residual check: does z satisfy |R'(z)| < tolerance at local scale?"""
    dnum = map.derivative_numerator
    scale = max(dnum.eval_scale(z), 1e-300)
    return abs(dnum(z)) <= CRITICAL_RESIDUAL_TOL * scale


def perturbed(map: MapSpec, field, lam: complex) -> MapSpec:
    """The map R + lam * v as a MapSpec.

    With v = vn/vd this is (P*vd + lam*vn*Q)/(Q*vd); coprimality is
    preserved structurally when v is polynomial (the common case), so no
    root-based validation is re-run here.
    """
    if lam == 0:
        return map
    vn, vd = field.numerator, field.denominator
    if vd.is_constant:
        vn = vn.scale(1.0 / vd.coefficients[0])
        num = map.numerator + vn.scale(lam) * map.denominator
        return MapSpec(num, map.denominator)
    num = map.numerator * vd + (vn * map.denominator).scale(lam)
    den = map.denominator * vd
    return MapSpec(num, den)


def default_escape_radius(d: int, c: complex) -> float:
    """Escape bound for z**d + c with margin: max(2, |c|^(1/(d-1))) + 1."""
    return max(2.0, abs(c) ** (1.0 / (d - 1))) + 1.0


def map_label(map: MapSpec) -> str:
    """Compact human-readable description used in diagnostics."""
    def poly_str(p: Polynomial) -> str:
        terms = []
        for k, a in enumerate(p.coefficients):
            if a == 0 and p.degree > 0:
                continue
            unit = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            terms.append(f"({a.real:g}{a.imag:+g}i){unit}" if a.imag else f"{a.real:g}{unit}")
        return " + ".join(terms) if terms else "0"

    if map.is_polynomial:
        return poly_str(map.numerator)
    return f"[{poly_str(map.numerator)}] / [{poly_str(map.denominator)}]"
