"""Derivative-weighted partial-sum sequence along a critical orbit.

b[n] is the cocycle at step n-1 times the n-term head of the orbit sum:
the infinitesimal displacement of the n-th iterate of the critical point
under the perturbation direction v.  Bounded sequences are consistent with
a rigid (structurally stable) configuration; growth at the cocycle's rate
is the expected signature of summable parameters.

The sequence is generated by the forward recurrence

    b[k+1] = DR(points[k]) * b[k] + v(points[k]),   b[0] = 0,

never by the displayed product-times-sum expression: multiplying a huge
cocycle into a tiny, heavily cancelling sum destroys every significant
digit.  The product form is kept only as a small-n cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidOrbitError
from .fields import VectorFieldSpec
from .maps import eval_map
from .orbits import OrbitRecord
from .xcomplex import XComplex

#: |growth exponent| below this is neither growth nor decay evidence.
GROWTH_MARGIN = 0.05

#: Least-squares fit uses the trailing half of the sequence, at least this
#: many samples when available.
MIN_FIT_SAMPLES = 32


@dataclass(frozen=True)
class ObstructionSeries:
    """The sequence b with a growth-rate fit.

    growth_exponent estimates lim sup (1/n) log |b[n]| by least squares
    over the trailing half; bounded_evidence is "bounded", "unbounded" or
    "inconclusive" by the sign of that exponent against a margin.  The
    identically-zero sequence reports exponent -inf and "bounded".
    """

    b: tuple[XComplex, ...]
    growth_exponent: float
    bounded_evidence: str

    def __len__(self) -> int:
        return len(self.b)


def obstruction_sequence(
    orbit: OrbitRecord,
    v: VectorFieldSpec,
    n: int,
) -> ObstructionSeries:
    """Generate b[0..n] by the forward recurrence in XComplex arithmetic."""
    if orbit.has_critical_relation:
        raise InvalidOrbitError("orbit carries a critical relation")
    if n < 1:
        raise ValueError("n must be >= 1")
    if orbit.truncated_at < n - 1:
        raise InvalidOrbitError(
            f"orbit has {orbit.truncated_at + 1} points; n = {n} needs {n} points"
        )

    b: list[XComplex] = [XComplex.zero()]
    for k in range(n):
        point = orbit.points[k]
        _, dz = eval_map(orbit.map, point)
        term = XComplex.from_complex(dz) * b[k] + XComplex.from_complex(
            complex(v(point))
        )
        b.append(term)

    exponent, evidence = _fit_growth(b)
    return ObstructionSeries(tuple(b), exponent, evidence)


def _fit_growth(b: list[XComplex]) -> tuple[float, str]:
    n = len(b) - 1
    start = max(1, n - max(n // 2, min(MIN_FIT_SAMPLES, n - 1)))
    samples = [
        (k, b[k].log_abs()) for k in range(start, n + 1) if not b[k].is_zero
    ]
    if not samples:
        return -math.inf, "bounded"
    if len(samples) < 2:
        return 0.0, "inconclusive"
    mean_k = sum(k for k, _ in samples) / len(samples)
    mean_l = sum(l for _, l in samples) / len(samples)
    sxx = sum((k - mean_k) ** 2 for k, _ in samples)
    sxy = sum((k - mean_k) * (l - mean_l) for k, l in samples)
    slope = sxy / sxx if sxx > 0 else 0.0
    if slope > GROWTH_MARGIN:
        return slope, "unbounded"
    if slope < -GROWTH_MARGIN:
        return slope, "bounded"
    return slope, "inconclusive"


def obstruction_direct(orbit: OrbitRecord, v: VectorFieldSpec, n: int) -> XComplex:
    """b[n] by the displayed product-times-sum form, in XComplex arithmetic.

    Numerically unstable for large n (catastrophic cancellation against a
    huge cocycle); intended as an independent cross-check at small n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if orbit.truncated_at < n - 1:
        raise InvalidOrbitError(f"orbit too short for n = {n}")
    total = XComplex.zero()
    for k in range(n):
        term = XComplex.from_complex(complex(v(orbit.points[k]))) / orbit.cocycle[k]
        total = total + term
    return orbit.cocycle[n - 1] * total
