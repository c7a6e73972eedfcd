"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the whole suite is desk scale (well under two minutes).
"""

import cmath
import math
import random
from contextlib import contextmanager

import pytest

from ratpert import (
    MapSpec,
    Polynomial,
    ScanConfig,
    VectorFieldSpec,
    XComplex,
    continue_cycle,
    cycle_from_point,
    default_cycle_seeds,
    eval_map,
    find_cycles,
    find_witness_field,
    iterate_orbit,
    mantissa_ulp_gap,
    motion_velocity_check,
    mu_functional,
    obstruction_direct,
    obstruction_sequence,
    scan_parameters,
    solve_alpha_on_cycle,
)
from ratpert.serialize import scan_rows_to_csv

ONE = VectorFieldSpec.constant(1)


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS - {description}")


def test_criterion_1_chebyshev_mu_oracle(chebyshev_orbit):
    with criterion(1, "mu(1) = 2/3 and mu(z) = 1/3 on z^2 - 2 within 1e-12"):
        constant = mu_functional(chebyshev_orbit, ONE, tol=1e-13)
        identity = mu_functional(chebyshev_orbit, VectorFieldSpec.monomial(1), tol=1e-13)
        assert constant.converged
        assert abs(constant.value - 2.0 / 3.0) < 1e-12
        assert abs(identity.value - 1.0 / 3.0) < 1e-12


def test_criterion_2_obstruction_growth(chebyshev_orbit):
    with criterion(2, "growth exponent within 0.02 of log 4 at n = 200, unbounded"):
        series = obstruction_sequence(chebyshev_orbit, ONE, 200)
        assert abs(series.growth_exponent - math.log(4.0)) < 0.02
        assert series.bounded_evidence == "unbounded"


def test_criterion_3_linearization_keystone(squaring_map):
    with criterion(3, "alpha, finite-difference motion, and continuation agree on z^2"):
        fixed = cycle_from_point(squaring_map, 1.0, 1)
        sol = solve_alpha_on_cycle(squaring_map, fixed, ONE)
        assert abs(sol.alpha[0] - (-1.0)) <= 1e-14

        check = motion_velocity_check(squaring_map, ONE, fixed, 1e-4)
        assert check.discrepancy < 1e-6

        continued = continue_cycle(squaring_map, ONE, fixed, 0.1, steps=10)
        assert continued.stopped_reason == "reached_target"
        exact = (1.0 + math.sqrt(0.6)) / 2.0
        assert abs(continued.final_cycle.base - exact) < 1e-10

        omega = cmath.exp(2j * cmath.pi / 3)
        pair = cycle_from_point(squaring_map, omega, 2)
        sol2 = solve_alpha_on_cycle(squaring_map, pair, ONE)
        expected = (2 * omega**2 + 1) / (-3)
        assert abs(sol2.alpha[0] - expected) < 1e-13
        check2 = motion_velocity_check(squaring_map, ONE, pair, 1e-4)
        assert check2.discrepancy < 1e-5


def test_criterion_4_functional_equation_residuals():
    with criterion(4, "cycle solve residuals < 1e-10 at 20 random parameters"):
        rng = random.Random(20240917)
        solved = 0
        for _ in range(20):
            angle = rng.uniform(0.0, 2.0 * math.pi)
            radius = 2.0 * math.sqrt(rng.uniform(0.0, 1.0))
            c = radius * complex(math.cos(angle), math.sin(angle))
            map = MapSpec.unicritical(2, c)
            seeds = default_cycle_seeds(map, count=500)
            assert len(seeds) == 500
            for period in range(1, 7):
                for cycle in find_cycles(map, period, seeds):
                    if abs(1.0 - cycle.multiplier) <= 1e-6:
                        continue  # parabolic: excluded by the precondition
                    sol = solve_alpha_on_cycle(map, cycle, ONE)
                    assert sol.max_residual < 1e-10
                    solved += 1
        assert solved >= 200  # the sweep actually exercised many cycles


def test_criterion_5_recurrence_invariant_long_run(chebyshev_map):
    with criterion(5, "10^4-term recurrence exact in exponent, <= 4 ulp, no overflow"):
        n = 10_000
        orbit = iterate_orbit(chebyshev_map, 0j, n)
        series = obstruction_sequence(orbit, ONE, n)
        # cocycle magnitude reaches 4^(10^4) = 2^(2*10^4): exponent exact
        assert orbit.cocycle[n].exponent == 2 * n
        assert abs(orbit.cocycle[n].mantissa) == 1.0
        for k in range(n):
            _, dz = eval_map(chebyshev_map, orbit.points[k])
            recomputed = XComplex.from_complex(dz) * series.b[k] + XComplex.from_complex(
                complex(ONE(orbit.points[k]))
            )
            if not series.b[k + 1].is_zero:
                assert recomputed.exponent == series.b[k + 1].exponent
            assert mantissa_ulp_gap(recomputed, series.b[k + 1]) <= 4.0
            assert math.isfinite(abs(series.b[k + 1].mantissa))


def test_criterion_6_formula_equivalence():
    cases = [
        (MapSpec.unicritical(2, -2), 0j),
        (MapSpec.unicritical(2, 1j), 0j),
        (MapSpec.polynomial(Polynomial((0, -3, 0, 1))), 1.0 + 0j),
        (MapSpec.polynomial(Polynomial((0, -3, 0, 1))), -1.0 + 0j),
    ]
    with criterion(6, "recurrence vs product-times-sum within 1e-8 for n <= 20"):
        for map, crit in cases:
            orbit = iterate_orbit(map, crit, 64)
            series = obstruction_sequence(orbit, ONE, 20)
            for n in range(1, 21):
                direct = obstruction_direct(orbit, ONE, n)
                got = series.b[n]
                gap = got - direct
                if direct.is_zero:
                    assert got.is_zero
                else:
                    ratio = gap.log2_abs() - direct.log2_abs()
                    assert 2.0**ratio <= 1e-8


def test_criterion_7_scan_determinism_and_classes():
    with criterion(7, "path scan classes and worker-count byte determinism"):
        path = (-2 + 0j, -1 + 0j, 0j, 1 + 0j)
        rows = scan_parameters(ScanConfig(d=2, path=path, orbit_length=256))
        assert [(r.kind, r.period) for r in rows] == [
            ("candidate", None),
            ("attracting", 2),
            ("attracting", 1),
            ("escaping", None),
        ]
        assert abs(rows[0].growth_exponent - math.log(4.0)) < 0.02
        baseline = scan_rows_to_csv(rows)
        for workers in (2, 8):
            config = ScanConfig(
                d=2, path=path, orbit_length=256, worker_count=workers
            )
            assert scan_rows_to_csv(scan_parameters(config)) == baseline


def test_criterion_8_linearity_and_witness(chebyshev_orbit):
    with criterion(8, "mu linearity to 1e-10 and witness norm sqrt(5)/3"):
        rng = random.Random(5)
        for _ in range(8):
            a = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)]
            b = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)]
            s = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            t = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            va = VectorFieldSpec.from_coefficients(a)
            vb = VectorFieldSpec.from_coefficients(b)
            vc = VectorFieldSpec.from_coefficients(
                [s * x + t * y for x, y in zip(a, b)]
            )
            mu_a = mu_functional(chebyshev_orbit, va, tol=1e-13).value
            mu_b = mu_functional(chebyshev_orbit, vb, tol=1e-13).value
            mu_c = mu_functional(chebyshev_orbit, vc, tol=1e-13).value
            assert abs(mu_c - (s * mu_a + t * mu_b)) <= 1e-10 * max(1.0, abs(mu_c))

        field, value = find_witness_field([2.0 / 3.0, 1.0 / 3.0])
        assert abs(value - math.sqrt(5.0) / 3.0) < 1e-12
        assert abs(value) > 0
        coeffs = field.numerator.coefficients
        assert math.sqrt(sum(abs(x) ** 2 for x in coeffs)) == pytest.approx(1.0)
