"""
Test script for the Nevanlinna suite: counting, proximity and characteristic
functions, family heights of [f₀ : f₁] and the first main theorem checks
"""

import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.exceptions import AdelicError, ArgumentError, NumericalGuardError
from app.models.height import ProximityMetric
from app.services.curve import jensen_reference
from app.services.nevanlinna import get_nevanlinna_calculator
from app.utils.arith import GaussianRational
from app.utils.polynomial import RationalFunction

LOG2 = math.log(2)
POWERS = [2, 4, 8, 16, 32, 64, 128]


def _point_away_from(rng: random.Random, radii) -> str:
    """Gaussian rational at distance ≥ 0.2 from every circle |z| = R"""
    while True:
        re = Fraction(rng.randint(-60, 60), 20)
        im = Fraction(rng.randint(-60, 60), 20)
        modulus = math.hypot(re, im)
        if all(abs(modulus - R) >= 0.2 for R in radii):
            return f"({re} + {im}*i)"


def test_counting_function():
    print("\n" + "="*70)
    print("TEST: Counting function N(r, a)")
    print("="*70)

    nev = get_nevanlinna_calculator()
    assert nev.counting_N("z", None, 10) == 0.0
    assert nev.counting_N("z", 0, 10) == pytest.approx(math.log(10))
    assert nev.counting_N("1/z", "inf", 10) == pytest.approx(math.log(10))
    assert nev.counting_N("(z-1)^2", 0, 10) == pytest.approx(2 * math.log(10))
    assert nev.counting_N("(z-1)^2", 0, 10, truncation=1) == pytest.approx(math.log(10))
    assert nev.counting_N("z - 1/2", 0, 1) == pytest.approx(LOG2)
    print("✓ N(10, 0) for z, 1/z at inf, truncated (z-1)^2")


def test_classical_counting_agrees():
    """∫₁^r n(t)/t dt form agrees when nothing but 0 lies in |z| ≤ 1"""
    nev = get_nevanlinna_calculator()
    for f, a in (("z^2*(z-3)", 0), ("1/(z*(z-2*i))", None), ("z - 5", 0)):
        for r in (4, 10):
            assert nev.counting_N_classical(f, a, r) == pytest.approx(nev.counting_N(f, a, r))
    with pytest.raises(ArgumentError):
        nev.counting_N_classical("z", 0, "1/2")


def test_proximity_function():
    nev = get_nevanlinna_calculator()
    assert nev.proximity_m("z", None, 10) == pytest.approx(math.log(10), abs=1e-12)
    assert nev.proximity_m("z", None, "1/2") == pytest.approx(0.0, abs=1e-12)
    assert nev.proximity_m("1/z", None, 10) == pytest.approx(0.0, abs=1e-12)
    assert nev.proximity_m("z", 1, 1000) == pytest.approx(0.0, abs=1e-12)


def test_characteristic_function():
    """T(r, z) = T(r, 1/z) = log r for r ≥ 1"""
    nev = get_nevanlinna_calculator()
    for r in (2, 10, 1000):
        assert nev.characteristic_T("z", None, r) == pytest.approx(math.log(r), abs=1e-10)
        assert nev.characteristic_T("1/z", None, r) == pytest.approx(math.log(r), abs=1e-10)
        assert nev.characteristic_T("z^3", None, r) == pytest.approx(3 * math.log(r), abs=1e-10)


def test_characteristic_table():
    print("\n" + "="*70)
    print("TEST: Characteristic table")
    print("="*70)

    nev = get_nevanlinna_calculator()
    report = nev.characteristic_table("z", ["inf", 0], [4, 2])
    assert [float(row.r) for row in report.rows] == [2.0, 2.0, 4.0, 4.0]
    for row in report.rows:
        assert row.error is None
        assert row.T == pytest.approx(math.log(float(row.r)), abs=1e-10)
        assert abs(row.gap) < 1e-10

    guarded = nev.characteristic_table("z - 1", [0], [Fraction(1, 2), 1, 2])
    errors = [row for row in guarded.rows if row.error]
    assert len(errors) == 1 and errors[0].r == 1
    print("✓ T = log r against [1 : z] on S_r; the radius through z = 1 is guarded")


def test_zero_on_circle_away_from_target():
    """A zero of f on the circle only matters for a = 0"""
    nev = get_nevanlinna_calculator()
    assert nev.proximity_m("z - 1", 5, 1) == pytest.approx(0.0, abs=1e-15)
    assert math.isfinite(nev.proximity_m("z - 1", 5, 1, ProximityMetric.FS_MAX))
    assert nev.counting_N("z - 1", 5, 1) == 0.0
    assert nev.counting_N("z - 1", None, 1) == 0.0

    row = nev.characteristic_table("z - 1", [5], [1]).rows[0]
    assert row.error is None
    assert row.m == pytest.approx(0.0, abs=1e-15)
    assert row.N == 0.0
    assert row.fs_height is not None

    with pytest.raises(NumericalGuardError):
        nev.proximity_m("z - 1", 0, 1)
    with pytest.raises(NumericalGuardError):
        nev.proximity_m("1/(z-1)", 5, 1)
    with pytest.raises(NumericalGuardError):
        nev.counting_N("z + 4", 5, 1)


def test_cartan_height():
    """h([1 : z]) against T(R, z): exact for max, within ½ log 2 for ℓ²"""
    nev = get_nevanlinna_calculator()
    for R in (2, 4, 8):
        report = nev.cartan_fs_height(["1", "z"], "max", R)
        assert report.value == pytest.approx(math.log(R), abs=1e-8)
        assert abs(report.gap) < 1e-8
        assert report.bound == 0.0

        l2 = nev.cartan_fs_height(["1", "z"], "l2", R)
        assert l2.value == pytest.approx(0.5 * math.log(1 + R * R), abs=1e-8)
        assert abs(l2.gap) <= l2.bound + 1e-8
        assert l2.bound == pytest.approx(0.5 * LOG2)


def test_cartan_height_bound_ignores_scaling():
    """[2 : z] has the same bound as [1 : z]: 0 for max, ½ log 2 for ℓ²"""
    nev = get_nevanlinna_calculator()
    report = nev.cartan_fs_height(["2", "z"], "max", 8)
    assert report.value == pytest.approx(math.log(4), abs=1e-8)
    assert report.bound == 0.0
    assert abs(report.gap) < 1e-8

    l2 = nev.cartan_fs_height(["2", "z"], "l2", 8)
    assert l2.bound == 0.5 * LOG2
    assert l2.value == pytest.approx(0.5 * math.log(68) - LOG2, abs=1e-8)
    assert 0.0 < l2.gap <= l2.bound


def test_cartan_height_reduction():
    """[z : z²] is reduced to [1 : z] first"""
    nev = get_nevanlinna_calculator()
    report = nev.cartan_fs_height(["z", "z^2"], "max", 3)
    assert report.reduced
    assert report.value == pytest.approx(math.log(3), abs=1e-8)


def test_family_height():
    nev = get_nevanlinna_calculator()
    report = nev.family_height(["1", "(z-1)/(z-5)"], "max", [2, 3, 4])
    assert all(row.error is None for row in report.rows)
    for row in report.rows:
        assert abs(row.gap) <= row.bound + 1e-8


def test_section_gap():
    print("\n" + "="*70)
    print("TEST: Change of target section")
    print("="*70)

    nev = get_nevanlinna_calculator()
    report = nev.fmt_section_gap("z", 0, None, POWERS)
    assert report.reference == pytest.approx(0.0, abs=1e-15)
    assert all(abs(row.gap) < 1e-8 for row in report.rows)

    report = nev.fmt_section_gap("2*z", 0, None, POWERS)
    assert report.reference == pytest.approx(-LOG2)
    assert all(abs(row.gap) < 1e-8 for row in report.rows)

    same = nev.fmt_section_gap("z", "inf", None, [2])
    assert same.rows[0].difference == 0.0
    print("✓ T(R, 2z; 0) - T(R, 2z; inf) = -log 2 for every R")


def test_section_gap_random():
    """
    20 random pairs (f, a) with f = a + h, where the zeros and poles of h
    stay off the circles; gaps stay below 1e-6
    """
    nev = get_nevanlinna_calculator()
    rng = random.Random(41)
    checked = 0
    while checked < 20:
        num = "*".join(f"(z - {_point_away_from(rng, POWERS)})" for _ in range(rng.randint(1, 3)))
        den = "*".join(f"(z - {_point_away_from(rng, POWERS)})" for _ in range(rng.randint(0, 2))) or "1"
        h = RationalFunction.parse(f"({num})/({den})")
        if h.is_constant():
            continue
        a = GaussianRational(Fraction(rng.randint(-12, 12), 4), Fraction(rng.randint(-12, 12), 4))
        f = h + a
        report = nev.fmt_section_gap(f, a, None, POWERS)
        log_a = 0.0 if a.is_zero() else max(0.0, 0.5 * math.log(float(a.norm())))
        assert report.reference == pytest.approx(log_a - jensen_reference(h), abs=1e-12)
        for row in report.rows:
            assert row.error is None, f"{f}, a = {a} at R = {row.R}: {row.error}"
            assert abs(row.gap) < 1e-6, f"{f}, a = {a} at R = {row.R}: gap {row.gap}"
        checked += 1


def test_defect_estimate():
    nev = get_nevanlinna_calculator()
    full = nev.defect_estimate("z^2", None, [10, 100, 1000])
    assert full.limit == pytest.approx(1.0, abs=1e-10)

    none = nev.defect_estimate("z", 1, [10, 100, 1000])
    assert none.limit == pytest.approx(0.0, abs=1e-10)

    small = nev.defect_estimate("z", None, ["1/2", 10])
    assert small.rows[0].skipped and small.rows[0].ratio is None
    assert small.limit == pytest.approx(1.0, abs=1e-10)

    with pytest.raises(ArgumentError):
        nev.defect_estimate("3", None, [10])


def test_order_estimate():
    nev = get_nevanlinna_calculator()
    report = nev.order_estimate("z^3", [10, 1000])
    assert report.growth == pytest.approx(3.0, abs=1e-10)
    assert report.r == 1000
    with pytest.raises(ArgumentError):
        nev.order_estimate("z", ["1/2"])


def test_metric_change_gap():
    nev = get_nevanlinna_calculator()
    for f, a in (("z", 0), ("(z-1)/(z+3)", "1/2"), ("z^2", None)):
        report = nev.metric_change_gap(f, a, 2)
        assert abs(report.gap) < 1e-10


def test_first_main_theorem_checks():
    nev = get_nevanlinna_calculator()
    check = nev.characteristic_sum_check("z", "1/z", 2)
    assert check.holds
    assert check.T_f == pytest.approx(LOG2, abs=1e-10)

    bound = nev.nevanlinna_inequality("z", 1, 2)
    assert bound.holds
    assert bound.value == pytest.approx(0.0, abs=1e-10)
    assert bound.bound == pytest.approx(LOG2)

    with pytest.raises(ArgumentError):
        nev.nevanlinna_inequality("z", None, 2)


def test_guards():
    nev = get_nevanlinna_calculator()
    with pytest.raises(NumericalGuardError):
        nev.counting_N("z - 1", 0, 1)
    with pytest.raises(NumericalGuardError):
        nev.proximity_m("1/(z-2)", None, 2)
    with pytest.raises(ArgumentError):
        nev.counting_N("z", "z", 2)
    with pytest.raises(ArgumentError):
        nev.counting_N("1", 1, 2)
    with pytest.raises(ArgumentError):
        nev.counting_N("z", 0, 2, truncation=0)
    with pytest.raises(ArgumentError):
        nev.proximity_m("z", None, 0)
    assert ProximityMetric("fs-l2") == ProximityMetric.FS_L2


def main():
    """Run every test in this file and print a summary"""
    tests = [
        test_counting_function,
        test_classical_counting_agrees,
        test_proximity_function,
        test_characteristic_function,
        test_characteristic_table,
        test_zero_on_circle_away_from_target,
        test_cartan_height,
        test_cartan_height_bound_ignores_scaling,
        test_cartan_height_reduction,
        test_family_height,
        test_section_gap,
        test_section_gap_random,
        test_defect_estimate,
        test_order_estimate,
        test_metric_change_gap,
        test_first_main_theorem_checks,
        test_guards,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✓ {test.__name__}")
        except (AssertionError, AdelicError) as e:
            failed += 1
            print(f"✗ {test.__name__}: {e}")

    print("\n" + "="*70)
    print(f"TEST SUMMARY: {len(tests) - failed}/{len(tests)} passed")
    print("="*70 + "\n")
    return failed == 0


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
