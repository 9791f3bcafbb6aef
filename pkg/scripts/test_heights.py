"""
Test script for heights of rational and quadratic points through
Fubini–Study metrics of ambient bundles
"""

import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.exceptions import AdelicError, ArgumentError
from app.models.bundle import ArchimedeanShape, DiagonalPNF, LatticeHermitianBundle
from app.models.curve import NevanlinnaCurve, QuadraticCurve, RationalCurve
from app.models.height import FSMetricSpec, ProjectivePoint
from app.services.heights import get_height_calculator

Q = RationalCurve()


def _standard(rank: int = 2, shape: ArchimedeanShape = ArchimedeanShape.L2) -> FSMetricSpec:
    return FSMetricSpec(ambient=DiagonalPNF.from_degrees([0.0] * rank, shape=shape))


def test_standard_heights():
    """h([3:4]) is log 5 for ℓ² and log 4 for the max norm"""
    print("\n" + "="*70)
    print("TEST: Heights of rational points")
    print("="*70)

    heights = get_height_calculator()
    point = ProjectivePoint(coords=["3", "4"])
    assert heights.fs_height(Q, _standard(), point).value == pytest.approx(math.log(5))
    assert heights.fs_height(Q, _standard(shape=ArchimedeanShape.MAX), point).value == pytest.approx(math.log(4))

    origin = heights.fs_height(Q, _standard(), ProjectivePoint(coords=["1", "0"]))
    assert origin.value == pytest.approx(0.0, abs=1e-12)
    assert origin.coordinate == 0
    print("✓ h[3:4] = log 5 (l2), log 4 (max); h[1:0] = 0")


def test_height_is_projective():
    """Scaling the coordinates leaves the height unchanged"""
    heights = get_height_calculator()
    base = heights.fs_height(Q, _standard(3), ProjectivePoint(coords=["1", "2", "3"])).value
    for scale in (Fraction(2), Fraction(-7, 3), Fraction(1, 30)):
        coords = [str(c * scale) for c in (1, 2, 3)]
        scaled = heights.fs_height(Q, _standard(3), ProjectivePoint(coords=coords)).value
        assert scaled == pytest.approx(base, abs=1e-12)


def test_lattice_hermitian_height():
    heights = get_height_calculator()
    fs_metric = FSMetricSpec(ambient=LatticeHermitianBundle.standard(2))
    report = heights.fs_height(Q, fs_metric, ProjectivePoint(coords=["3", "4"]))
    assert report.value == pytest.approx(math.log(5))
    assert report.metric == "lattice-hermitian rank 2"


def test_quadratic_height():
    """[1 : i] over ℚ(i) with the standard ℓ² metric"""
    heights = get_height_calculator()
    curve = QuadraticCurve(d=-1)
    fs_metric = FSMetricSpec(ambient=DiagonalPNF(curve=curve, weights=[{}, {}]))
    report = heights.fs_height(curve, fs_metric, ProjectivePoint(coords=["1", "i"]))
    assert report.value == pytest.approx(0.5 * math.log(2))


def _random_points(seed: int, count: int = 100):
    """Points of P^1(Q) with integer coordinates of absolute value ≤ 10³"""
    rng = random.Random(seed)
    points = []
    while len(points) < count:
        x, y = rng.randint(-1000, 1000), rng.randint(-1000, 1000)
        if x or y:
            points.append(ProjectivePoint(coords=[str(x), str(y)]))
    return points


def test_tensor_additivity():
    """h over O(m) equals m·h for m ≤ 4"""
    print("\n" + "="*70)
    print("TEST: Additivity along tensor powers")
    print("="*70)

    heights = get_height_calculator()
    points = [ProjectivePoint(coords=["3", "4"])] + _random_points(43)
    for shape in (ArchimedeanShape.L2, ArchimedeanShape.MAX):
        fs_metric = _standard(shape=shape)
        for point in points:
            for m in range(1, 5):
                report = heights.height_additivity_check(Q, fs_metric, fs_metric, point, m1=m, m2=0)
                assert abs(report.residual) < 1e-10, f"{point.coords}, m = {m}: {report.residual}"
                assert report.combined == pytest.approx(m * report.h1)
    print(f"✓ h_{{O(m)}} = m h for m = 1..4 on {len(points)} points")


def test_metric_change_bound():
    """|h − h′| ≤ ∫ d(ξ, ξ′) with the Gram change diag(4, 1)"""
    heights = get_height_calculator()
    standard = FSMetricSpec(ambient=LatticeHermitianBundle.standard(2))
    stretched = FSMetricSpec(ambient=LatticeHermitianBundle(lattice_basis=[[1, 0], [0, 1]], gram=[[4, 0], [0, 1]]))
    fixed = [ProjectivePoint(coords=c) for c in (["1", "1"], ["3", "4"], ["1", "0"], ["0", "1"])]
    for point in fixed + _random_points(43):
        report = heights.height_additivity_check(Q, standard, stretched, point)
        assert report.distance == pytest.approx(math.log(2))
        assert report.bound_holds, f"{point.coords}: |h1 - h2| = {report.difference}"
        assert abs(report.residual) < 1e-10

    report = heights.height_additivity_check(Q, standard, stretched, ProjectivePoint(coords=["1", "1"]))
    assert report.h1 == pytest.approx(0.5 * math.log(2))
    assert report.h2 == pytest.approx(0.5 * math.log(5))


def test_invalid_points():
    heights = get_height_calculator()
    with pytest.raises(ArgumentError):
        heights.fs_height(Q, _standard(), ProjectivePoint(coords=["0", "0"]))
    with pytest.raises(ArgumentError):
        heights.fs_height(Q, _standard(3), ProjectivePoint(coords=["1", "2"]))
    with pytest.raises(ArgumentError):
        heights.fs_height(NevanlinnaCurve(R=2), _standard(), ProjectivePoint(coords=["1", "z"]))
    with pytest.raises(ArgumentError):
        heights.height_additivity_check(Q, _standard(), _standard(), ProjectivePoint(coords=["1", "2"]), 0, 0)
    with pytest.raises(ValueError):
        ProjectivePoint(coords=["1"])


def main():
    """Run every test in this file and print a summary"""
    tests = [
        test_standard_heights,
        test_height_is_projective,
        test_lattice_hermitian_height,
        test_quadratic_height,
        test_tensor_additivity,
        test_metric_change_bound,
        test_invalid_points,
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
