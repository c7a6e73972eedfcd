"""Critical-orbit iteration with its derivative cocycle, and diagnostics.

The central object is the orbit of a critical point c together with the
cumulative derivatives along the orbit of its critical value: cocycle[k] is
the derivative of the k-th iterate evaluated at R(c), kept in extended-range
arithmetic because it grows or decays exponentially.  Everything downstream
(the orbit-sum functional, the obstruction sequence) is built from this
record.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    CriticalRelationError,
    InvalidOrbitError,
    RootFindingError,
)
from .maps import MapSpec, default_escape_radius, eval_map, is_critical_point
from .polynomial import Polynomial, poly_roots
from .xcomplex import XComplex

#: Orbit points closer than this (relative) to a critical point are a
#: critical relation: the cocycle formulas divide by quantities that vanish.
RELATION_TOL = 1e-12

#: Distance at which a near-relation is still usable but worth a warning.
NEAR_RELATION_TOL = 1e-6

#: Tail ratios within this margin of 1 are inconclusive evidence.
SUMMABILITY_MARGIN = 0.05

#: Cycle coincidence tolerance for parameter classification.
CYCLE_DETECT_TOL = 1e-9


class NearCriticalRelationWarning(UserWarning):
    """The orbit passed unusually close to a critical point."""


@dataclass(frozen=True)
class OrbitRecord:
    """Forward orbit of a critical point c with the derivative cocycle.

    points[k] is the k-th iterate of c (points[0] = c); cocycle[k] is the
    derivative of the k-th iterate at the critical value R(c), so
    cocycle[0] = 1 and cocycle[k+1] = cocycle[k] * DR(points[k+1]).
    partial_sums_abs[k] accumulates 1/|cocycle[j]| for j <= k.
    """

    map: MapSpec
    points: tuple[complex, ...]
    cocycle: tuple[XComplex, ...]
    partial_sums_abs: tuple[float, ...]
    escaped_at: int | None
    truncated_at: int
    critical_relation_at: int | None = None

    @property
    def start(self) -> complex:
        """The critical value R(c), i.e. points[1]."""
        if len(self.points) < 2:
            raise InvalidOrbitError("orbit has no iterate beyond the critical point")
        return self.points[1]

    @property
    def has_critical_relation(self) -> bool:
        return self.critical_relation_at is not None

    def __len__(self) -> int:
        return len(self.points)


def iterate_orbit(
    map: MapSpec,
    c: complex,
    n_max: int,
    escape_radius: float = 1e6,
) -> OrbitRecord:
    """Iterate the critical point c for up to n_max steps.

    Stops early on escape (|z| > escape_radius, the escaping point is
    recorded) and raises CriticalRelationError if the orbit returns to a
    critical point within tolerance; the exception carries the marked
    prefix orbit.  PoleError propagates for rational maps.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    c = complex(c)
    if not is_critical_point(map, c):
        raise ValueError(f"{c} is not a critical point of the map (residual check)")

    crit = map.critical_points
    points: list[complex] = [c]
    cocycle: list[XComplex] = [XComplex.one()]
    partials: list[float] = [1.0]
    escaped_at: int | None = None

    value, _ = eval_map(map, c)
    for k in range(n_max):
        z = value
        points.append(z)
        index = k + 1

        nearest = min(abs(z - cp) / max(1.0, abs(cp)) for cp in crit)
        # Evaluate the next step and DR(z) in one pass.
        value, dz = eval_map(map, z)

        if nearest < RELATION_TOL or dz == 0:
            record = OrbitRecord(
                map=map,
                points=tuple(points),
                cocycle=tuple(cocycle) + (cocycle[-1] * XComplex.from_complex(dz),),
                partial_sums_abs=tuple(partials) + (math.inf,),
                escaped_at=None,
                truncated_at=index,
                critical_relation_at=index,
            )
            raise CriticalRelationError(
                f"orbit landed on a critical point at index {index}",
                index=index,
                orbit=record,
            )
        if nearest < NEAR_RELATION_TOL:
            warnings.warn(
                f"orbit within {nearest:.2e} of a critical point at index {index}",
                NearCriticalRelationWarning,
                stacklevel=2,
            )

        entry = cocycle[-1] * XComplex.from_complex(dz)
        cocycle.append(entry)
        try:
            increment = entry.reciprocal().magnitude()
        except OverflowError:
            increment = math.inf
        partials.append(partials[-1] + increment)

        if abs(z) > escape_radius:
            escaped_at = index
            break

    return OrbitRecord(
        map=map,
        points=tuple(points),
        cocycle=tuple(cocycle),
        partial_sums_abs=tuple(partials),
        escaped_at=escaped_at,
        truncated_at=len(points) - 1,
    )


@dataclass(frozen=True)
class SummabilityReport:
    """Evidence about convergence of the series over 1/|cocycle|.

    tail_ratio is the geometric mean of successive term ratios over the
    trailing window; classification is evidence only, never a proof.
    """

    partial_sum: float
    tail_ratio: float
    classification: str  # "summable-evidence" | "divergent-evidence" | "inconclusive"
    last_increment: float
    tail_estimate: float
    window: int
    n_terms: int


def summability_report(
    orbit: OrbitRecord,
    window: int,
    stabilization_tol: float = 1e-9,
) -> SummabilityReport:
    """Classify the partial sums of 1/|cocycle| as summable/divergent evidence.

    Summable evidence needs a tail ratio below 1 - margin and a stabilized
    partial sum; a ratio above 1 + margin, an overflowed sum, or
    superlinearly growing partial sums count as divergent evidence;
    everything else is inconclusive.
    """
    if orbit.has_critical_relation:
        raise InvalidOrbitError("orbit carries a critical relation")
    n = len(orbit.points)
    if window < 1 or n < 2 * window:
        raise ValueError(f"orbit has {n} entries; needs >= 2*window = {2 * window}")

    last = orbit.truncated_at
    sum_n = orbit.partial_sums_abs[last]
    log2_drop = orbit.cocycle[last - window].log2_abs() - orbit.cocycle[last].log2_abs()
    tail_ratio = 2.0 ** (log2_drop / window)

    increments = [
        orbit.partial_sums_abs[k] - orbit.partial_sums_abs[k - 1]
        for k in range(1, last + 1)
    ]
    last_increment = increments[-1]
    if tail_ratio < 1.0:
        tail_estimate = last_increment * tail_ratio / (1.0 - tail_ratio)
    else:
        tail_estimate = math.inf

    if math.isinf(sum_n) or tail_ratio > 1.0 + SUMMABILITY_MARGIN or _superlinear(
        increments, window
    ):
        classification = "divergent-evidence"
    elif (
        tail_ratio < 1.0 - SUMMABILITY_MARGIN
        and tail_estimate <= stabilization_tol * max(1.0, sum_n)
    ):
        classification = "summable-evidence"
    else:
        classification = "inconclusive"

    return SummabilityReport(
        partial_sum=sum_n,
        tail_ratio=tail_ratio,
        classification=classification,
        last_increment=last_increment,
        tail_estimate=tail_estimate,
        window=window,
        n_terms=last + 1,
    )


def _superlinear(increments: list[float], window: int) -> bool:
    if len(increments) < 2 * window:
        return False
    recent = increments[-window:]
    previous = increments[-2 * window : -window]
    prev_mean = sum(previous) / window
    if prev_mean == 0.0 or math.isinf(prev_mean):
        return False
    return sum(recent) / window > 2.0 * prev_mean


def default_summability_window(orbit_length: int) -> int:
    return max(2, min(64, orbit_length // 4))


@dataclass(frozen=True)
class ParameterClass:
    """Outcome of iterating the critical orbit of z**d + c.

    kind "attracting" certifies a detected cycle with |multiplier| < 1;
    "escaping" certifies leaving the escape radius; "undecided" is the
    fallback (a candidate non-hyperbolic parameter at this budget).
    """

    kind: str  # "escaping" | "attracting" | "undecided"
    period: int | None
    multiplier: complex | None
    iterations_used: int

    def __post_init__(self):
        if self.kind == "attracting":
            if self.period is None or self.period < 1:
                raise ValueError("attracting classification requires a period")
            if self.multiplier is None or abs(self.multiplier) >= 1.0:
                raise ValueError("attracting classification requires |multiplier| < 1")


def _unicritical_step(z: complex, c: complex, d: int) -> complex:
    w = z
    for _ in range(d - 1):
        w = w * z
    return w + c


def _unicritical_derivative(z: complex, d: int) -> complex:
    w = complex(d)
    for _ in range(d - 1):
        w = w * z
    return w


def classify_parameter(
    c: complex,
    d: int,
    n_max: int = 2048,
    escape_radius: float | None = None,
) -> ParameterClass:
    """Classify c for the family z**d + c by iterating the critical orbit.

    Escape is decided by radius crossing; attraction by Brent-style cycle
    detection followed by Newton refinement of the detected cycle and a
    multiplier check.  Anything else is undecided within the budget.
    """
    if d < 2:
        raise ValueError("family degree must be >= 2")
    c = complex(c)
    radius = default_escape_radius(d, c) if escape_radius is None else escape_radius

    z = 0j
    anchor = z
    anchor_index = 0
    next_power = 1
    refinement_attempts = 0

    for k in range(1, n_max + 1):
        z = _unicritical_step(z, c, d)
        if abs(z) > radius:
            return ParameterClass("escaping", None, None, k)
        if (
            refinement_attempts < 4
            and k > anchor_index
            and abs(z - anchor) < CYCLE_DETECT_TOL * max(1.0, abs(z))
        ):
            refinement_attempts += 1
            found = _refine_attracting_cycle(c, d, z, k - anchor_index)
            if found is not None:
                period, multiplier = found
                return ParameterClass("attracting", period, multiplier, k)
        if k == next_power:
            anchor = z
            anchor_index = k
            next_power *= 2

    return ParameterClass("undecided", None, None, n_max)


def _refine_attracting_cycle(
    c: complex, d: int, z0: complex, m: int
) -> tuple[int, complex] | None:
    """Newton-refine a period-m coincidence; return (minimal period, multiplier)
    if it certifies an attracting cycle, else None."""
    z = z0
    for _ in range(60):
        w = z
        deriv = 1 + 0j
        for _ in range(m):
            deriv *= _unicritical_derivative(w, d)
            w = _unicritical_step(w, c, d)
        f = w - z
        fprime = deriv - 1.0
        if abs(f) <= 1e-13 * max(1.0, abs(z)):
            break
        if fprime == 0 or not math.isfinite(abs(fprime)):
            return None
        step = f / fprime
        if not math.isfinite(abs(step)) or abs(step) > 1.0 + abs(z):
            return None
        z = z - step
    else:
        return None

    # minimal period among divisors of m
    period = m
    for q in range(1, m):
        if m % q:
            continue
        w = z
        for _ in range(q):
            w = _unicritical_step(w, c, d)
        if abs(w - z) < 1e-8 * max(1.0, abs(z)):
            period = q
            break

    w = z
    multiplier = 1 + 0j
    for _ in range(period):
        multiplier *= _unicritical_derivative(w, d)
        w = _unicritical_step(w, c, d)
    if abs(w - z) > 1e-9 * max(1.0, abs(z)):
        return None
    if abs(multiplier) < 1.0:
        return period, multiplier
    return None


def julia_sample(
    map: MapSpec,
    n_points: int,
    transient: int = 64,
    seed: int = 0,
) -> tuple[complex, ...]:
    """Sample the Julia set by inverse iteration from a repelling periodic
    point (a fixed point when the map has one in the finite plane).

    Each step solves R(z) = w for all preimages and picks one branch
    uniformly at random (deterministic for a given seed); the first
    `transient` points are discarded.
    """
    if map.degree < 2:
        raise ValueError("julia_sample needs map degree >= 2")
    if n_points < 0:
        raise ValueError("n_points must be >= 0")

    w = _repelling_periodic_point(map)
    rng = random.Random(seed)
    out: list[complex] = []
    for step in range(transient + n_points):
        # preimage equation R(z) = w, i.e. P(z) - w Q(z) = 0
        shifted = map.numerator - map.denominator.scale(w)
        if shifted.degree < 1:
            raise RootFindingError(f"no finite preimages of {w}")
        candidates = poly_roots(shifted, tol=1e-12)
        w = candidates[rng.randrange(len(candidates))]
        if step >= transient:
            out.append(w)
    return tuple(out)


def _compose_into_fraction(
    outer: Polynomial, num: Polynomial, den: Polynomial, degree: int
) -> Polynomial:
    """den**degree * outer(num/den).

    Numerator and denominator of a map must be homogenized by the same
    power (the map degree) so their quotient stays the composed map.
    """
    acc = Polynomial((0j,))
    den_power = Polynomial((1 + 0j,))
    powers = []
    for _ in range(degree + 1):
        powers.append(den_power)
        den_power = den_power * den
    num_power = Polynomial((1 + 0j,))
    for k, coeff in enumerate(outer.coefficients):
        if coeff != 0:
            acc = acc + (num_power * powers[degree - k]).scale(coeff)
        num_power = num_power * num
    return acc


def _repelling_periodic_point(map: MapSpec, max_period: int = 3) -> complex:
    """A finite periodic point of the lowest period <= max_period whose
    orbit multiplier satisfies |rho| > 1 (the strongest one found)."""
    num_n, den_n = Polynomial((0j, 1 + 0j)), Polynomial((1 + 0j,))
    d = map.degree
    for n in range(1, max_period + 1):
        num_n, den_n = (
            _compose_into_fraction(map.numerator, num_n, den_n, d),
            _compose_into_fraction(map.denominator, num_n, den_n, d),
        )
        periodic = num_n - den_n * Polynomial((0j, 1 + 0j))
        if periodic.degree < 1:
            continue
        try:
            candidates = poly_roots(periodic, tol=1e-10)
        except RootFindingError:
            continue
        best: complex | None = None
        best_mult = 1.0 + 1e-9
        for z in candidates:
            try:
                mult = 1 + 0j
                w = z
                for _ in range(n):
                    value, dz = eval_map(map, w)
                    mult *= dz
                    w = value
            except Exception:
                continue
            if abs(w - z) < 1e-6 * max(1.0, abs(z)) and abs(mult) > best_mult:
                best = z
                best_mult = abs(mult)
        if best is not None:
            return best
    raise RootFindingError(
        f"no finite repelling periodic point of period <= {max_period} found"
    )
