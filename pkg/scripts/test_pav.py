"""
Test script for pseudo-absolute values at places of ℚ, ℚ(√d) and S_R
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
from app.models.place import (
    NevanlinnaBoundary,
    NevanlinnaInterior,
    PlaceClass,
    QuadraticPlace,
    RationalFinite,
    RationalInfinite,
    parse_place_key,
)
from app.services.pav import get_pav_evaluator
from app.utils.arith import INFINITY, QuadraticElement
from app.utils.polynomial import RationalFunction


def test_pav_eval_examples():
    """|6/5|_5 = 5, e^{-ord} inside the disc and a pole on the circle"""
    print("\n" + "="*70)
    print("TEST: Pseudo-absolute value evaluation")
    print("="*70)

    pav = get_pav_evaluator()
    assert pav.pav_eval(RationalFinite(p=5), Fraction(6, 5)) == pytest.approx(5.0)
    assert pav.pav_eval(RationalInfinite(), "-6/5") == pytest.approx(1.2)
    assert pav.pav_eval(RationalFinite(p=3), 0) == 0.0

    interior = NevanlinnaInterior(z="1/2", R=1)
    assert pav.pav_eval(interior, RationalFunction.parse("z - 1/2")) == pytest.approx(math.exp(-1))

    boundary = NevanlinnaBoundary(R=1, theta=0.0)
    assert pav.pav_eval(boundary, RationalFunction.parse("1/(z-1)")) == INFINITY
    assert pav.log_pav_eval(boundary, RationalFunction.parse("z-1")) == -INFINITY
    print("✓ |6/5|_5 = 5, |z-1/2| at 1/2 is 1/e, 1/(z-1) blows up at R e^{i0}")


def test_boundary_guard():
    """Numerically located poles near a generic node trip the clearance guard"""
    pav = get_pav_evaluator()
    node = NevanlinnaBoundary(R=1, theta=1.0)
    f = RationalFunction.parse("1/(z - (0.5403023058681398 + 0.8414709848078965*i))")
    with pytest.raises(NumericalGuardError):
        pav.log_pav_eval(node, f, clearance=1e-6)


def test_field_mismatch():
    pav = get_pav_evaluator()
    with pytest.raises(ArgumentError):
        pav.log_pav_eval(RationalFinite(p=2), RationalFunction.parse("z"))
    with pytest.raises(ArgumentError):
        pav.log_pav_eval(NevanlinnaInterior(z="0", R=1), QuadraticElement.parse("1+i", -1))


def test_classification():
    pav = get_pav_evaluator()
    assert pav.classify(NevanlinnaInterior(z="0", R=2)) == PlaceClass.NON_ARCHIMEDEAN
    assert pav.classify(NevanlinnaBoundary(R=2)) == PlaceClass.ARCHIMEDEAN
    assert pav.classify(RationalInfinite()) == PlaceClass.ARCHIMEDEAN
    assert pav.classify(QuadraticPlace(d=-1, base=RationalFinite(p=5), index=1)) == PlaceClass.NON_ARCHIMEDEAN

    assert not pav.is_finite(NevanlinnaBoundary(R=1, theta=0.0), RationalFunction.parse("1/(z-1)"))
    assert not pav.in_kernel(RationalFinite(p=3), 6)
    assert pav.in_kernel(NevanlinnaBoundary(R=1, theta=0.0), RationalFunction.parse("z-1"))


def test_split_places():
    """Places of Q(i) above 5, 2 and 3"""
    print("\n" + "="*70)
    print("TEST: Splitting of rational places")
    print("="*70)

    pav = get_pav_evaluator()
    above5 = pav.split_rational_place(-1, 5)
    assert len(above5) == 2
    assert all(s.weight == Fraction(1, 2) for s in above5)

    above2 = pav.split_rational_place(-1, 2)
    assert len(above2) == 1 and above2[0].weight == 1 and above2[0].splitting == "ramified"

    above3 = pav.split_rational_place(-1, "3")
    assert len(above3) == 1 and above3[0].residue_field_size == 9

    infinite = pav.split_rational_place(5, "inf")
    assert [s.splitting for s in infinite] == ["real", "real"]

    with pytest.raises(ArgumentError):
        pav.split_rational_place(4, 5)
    print("✓ 5 splits, 2 ramifies, 3 is inert in Q(i)")


def test_split_weights_sum_to_one():
    """Extension weights above every prime ≤ 100 and ∞ sum to exactly 1"""
    pav = get_pav_evaluator()
    primes = [p for p in range(2, 101) if all(p % q for q in range(2, int(p ** 0.5) + 1))]
    for d in (-1, -3, 5, -5):
        for base in primes + ["inf"]:
            splits = pav.split_rational_place(d, base)
            assert sum(s.weight for s in splits) == 1
            assert sum(s.local_degree for s in splits) == 2


def test_split_place_absolute_values():
    """|2+i| at the two places above 5 are 1/√5 and 1 in some order"""
    pav = get_pav_evaluator()
    x = QuadraticElement.parse("2+i", -1)
    logs = sorted(pav.log_pav_eval(s.place, x) for s in pav.split_rational_place(-1, 5))
    assert logs[0] == pytest.approx(-math.log(5))
    assert logs[1] == pytest.approx(0.0)


def _quadratic_places(pav, d: int):
    """Every place of Q(√d) above 2, 3, 5, 7 and ∞, tagged with its splitting"""
    places = []
    for base in (2, 3, 5, 7, "inf"):
        for split in pav.split_rational_place(d, base):
            places.append((split.splitting, split.place))
    return places


def _random_quadratic(rng: random.Random, d: int) -> QuadraticElement:
    while True:
        x = QuadraticElement(Fraction(rng.randint(-60, 60), rng.randint(1, 20)),
                             Fraction(rng.randint(-60, 60), rng.randint(1, 20)), d)
        if not x.is_zero():
            return x


def test_pav_multiplicative():
    """log|xy| = log|x| + log|y| at archimedean, inert, split and ramified places"""
    print("\n" + "="*70)
    print("TEST: Multiplicativity of |·|_ω")
    print("="*70)

    pav = get_pav_evaluator()
    rng = random.Random(29)
    seen = set()
    for d in (-1, 5):
        for splitting, place in _quadratic_places(pav, d):
            seen.add(splitting)
            for _ in range(20):
                x, y = _random_quadratic(rng, d), _random_quadratic(rng, d)
                assert pav.log_pav_eval(place, x * y) == pytest.approx(
                    pav.log_pav_eval(place, x) + pav.log_pav_eval(place, y), abs=1e-9
                ), f"{place.key}: x = {x}, y = {y}"
    assert {"split", "inert", "ramified"} <= seen

    for p in (2, 3, 5, 7):
        for _ in range(20):
            x = Fraction(rng.randint(-10**4, 10**4) or 1, rng.randint(1, 10**4))
            y = Fraction(rng.randint(-10**4, 10**4) or 1, rng.randint(1, 10**4))
            for place in (RationalFinite(p=p), RationalInfinite()):
                assert pav.log_pav_eval(place, x * y) == pytest.approx(
                    pav.log_pav_eval(place, x) + pav.log_pav_eval(place, y), abs=1e-9
                )
    print(f"✓ checked at {', '.join(sorted(seen))} places of Q(i) and Q(√5), and on Q")


def test_pav_ultrametric():
    """|x + y|_ω ≤ max(|x|_ω, |y|_ω) at every non-archimedean place"""
    pav = get_pav_evaluator()
    rng = random.Random(31)
    for d in (-1, 5):
        for _, place in _quadratic_places(pav, d):
            if pav.classify(place) != PlaceClass.NON_ARCHIMEDEAN:
                continue
            for _ in range(20):
                x, y = _random_quadratic(rng, d), _random_quadratic(rng, d)
                bound = max(pav.log_pav_eval(place, x), pav.log_pav_eval(place, y))
                assert pav.log_pav_eval(place, x + y) <= bound + 1e-9, f"{place.key}: x = {x}, y = {y}"

    place = NevanlinnaInterior(z="1/2", R=1)
    f, g = RationalFunction.parse("(z - 1/2)^2"), RationalFunction.parse("(z - 1/2)/(z + 3)")
    assert pav.log_pav_eval(place, f + g) <= max(pav.log_pav_eval(place, f), pav.log_pav_eval(place, g))


def test_place_keys():
    assert parse_place_key("p=5") == RationalFinite(p=5)
    assert parse_place_key("inf") == RationalInfinite()
    key = QuadraticPlace(d=-1, base=RationalFinite(p=5), index=1).key
    assert parse_place_key(key) == QuadraticPlace(d=-1, base=RationalFinite(p=5), index=1)
    with pytest.raises(ValueError):
        parse_place_key("p=x")


def main():
    """Run every test in this file and print a summary"""
    tests = [
        test_pav_eval_examples,
        test_boundary_guard,
        test_field_mismatch,
        test_classification,
        test_split_places,
        test_split_weights_sum_to_one,
        test_split_place_absolute_values,
        test_pav_multiplicative,
        test_pav_ultrametric,
        test_place_keys,
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
