"""
Pseudo-absolute values attached to places
"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import sympy
from sympy.ntheory import sqrt_mod

from app.config import settings
from app.exceptions import ArgumentError, NumericalGuardError
from app.models.place import (
    NevanlinnaBoundary,
    NevanlinnaInterior,
    PlaceClass,
    QuadraticPlace,
    RationalFinite,
    RationalInfinite,
    SplitPlace,
)
from app.models.root import ComplexRoot
from app.utils.arith import (
    INFINITY,
    GaussianRational,
    QuadraticElement,
    is_squarefree,
    log_fraction,
    padic_valuation,
    splitting_type,
    to_fraction,
)
from app.utils.geometry import angle_is_quarter_turn, points_near
from app.utils.polynomial import RationalFunction, ord_at


@lru_cache(maxsize=512)
def zeros_and_poles(f: RationalFunction) -> Tuple[Tuple[ComplexRoot, ...], Tuple[ComplexRoot, ...]]:
    """Located zeros and poles of f (cached; RationalFunction is immutable)"""
    return tuple(f.zeros()), tuple(f.poles())


def padic_sqrt(d: int, p: int, precision: int, index: int) -> int:
    """
    The index-th square root of d in ℤ_p, modulo p^precision

    Index 0 is the root with the smaller residue mod p (odd p), or the
    root ≡ 1 mod 4 (p = 2).
    """
    modulus = p ** precision
    candidates = sorted(set(sqrt_mod(d % modulus, modulus, all_roots=True)))
    if not candidates:
        raise ArgumentError(f"{d} has no square root modulo {p}^{precision}")
    if p == 2:
        ones = [r for r in candidates if r % 4 == 1]
        threes = [r for r in candidates if r % 4 == 3]
        chosen = ones if index == 0 else threes
    else:
        residues = sorted({r % p for r in candidates})
        target = residues[0] if index == 0 else residues[-1]
        chosen = [r for r in candidates if r % p == target]
    return chosen[0]


class PavEvaluator:
    """Evaluate |f|_ω and log|f|_ω at every kind of place"""

    def __init__(self):
        self.clearance = settings.clearance

    # -- field elements -------------------------------------------------

    def _rational(self, f) -> Fraction:
        if isinstance(f, (RationalFunction, QuadraticElement, GaussianRational)):
            raise ArgumentError(f"Element {f} does not belong to Q")
        return to_fraction(f)

    def _quadratic(self, f, d: int) -> QuadraticElement:
        if isinstance(f, (RationalFunction, GaussianRational)):
            raise ArgumentError(f"Element {f} does not belong to Q(sqrt({d}))")
        return QuadraticElement.coerce(f, d)

    def _function(self, f) -> RationalFunction:
        if isinstance(f, QuadraticElement):
            raise ArgumentError(f"Element {f} does not belong to the field of S_R")
        return RationalFunction.coerce(f)

    # -- evaluation -----------------------------------------------------

    def log_pav_eval(self, place, f, clearance: Optional[float] = None) -> float:
        """
        log|f|_ω as an extended real (−inf for |f| = 0, +inf for |f| = +∞)

        Args:
            place: Any Place
            f: Element of the field attached to the place's curve
            clearance: Guard radius for boundary places (defaults to settings)

        Returns:
            log of the pseudo-absolute value
        """
        if isinstance(place, RationalFinite):
            v = padic_valuation(self._rational(f), place.p)
            return -INFINITY if v == INFINITY else -v * math.log(place.p)
        if isinstance(place, RationalInfinite):
            q = self._rational(f)
            return -INFINITY if q == 0 else log_fraction(abs(q))
        if isinstance(place, QuadraticPlace):
            return self._log_quadratic(place, self._quadratic(f, place.d))
        if isinstance(place, NevanlinnaInterior):
            return self._log_interior(place, self._function(f))
        if isinstance(place, NevanlinnaBoundary):
            return self._log_boundary(place, self._function(f), clearance or self.clearance)
        raise ArgumentError(f"Unknown place {place!r}")

    def pav_eval(self, place, f, clearance: Optional[float] = None) -> float:
        """|f|_ω ∈ [0, +∞]"""
        value = self.log_pav_eval(place, f, clearance)
        if value == -INFINITY:
            return 0.0
        if value == INFINITY:
            return INFINITY
        return math.exp(value)

    def _log_quadratic(self, place: QuadraticPlace, f: QuadraticElement) -> float:
        if f.is_zero():
            return -INFINITY
        d = place.d
        if isinstance(place.base, RationalInfinite):
            if d > 0:
                plus, minus = f.real_embeddings()
                value = plus if place.index == 0 else minus
                return math.log(abs(value))
            return 0.5 * log_fraction(f.norm())
        p = place.base.p
        kind = splitting_type(d, p)
        if kind != "split":
            return 0.5 * -padic_valuation(f.norm(), p) * math.log(p)
        A, B, D = f.integral_form()
        norm = A * A - d * B * B
        precision = sympy.multiplicity(p, abs(norm)) + 3
        r = padic_sqrt(d, p, precision, place.index)
        embedded = (A + B * r) % p ** precision
        # embedded ≠ 0 mod p^precision since v_p(A + B·r) ≤ v_p(N)
        v = sympy.multiplicity(p, embedded) - sympy.multiplicity(p, D)
        return -v * math.log(p)

    def _log_interior(self, place: NevanlinnaInterior, f: RationalFunction) -> float:
        if f.is_zero():
            return -INFINITY
        if place.z is not None:
            return -float(ord_at(f, place.z))
        zeros, poles = zeros_and_poles(f)
        scale = 1e-9 * max(1.0, abs(place.point))
        order = sum(r.multiplicity for r in points_near(zeros, place.point, scale)) - \
            sum(r.multiplicity for r in points_near(poles, place.point, scale))
        return -float(order)

    def _log_boundary(self, place: NevanlinnaBoundary, f: RationalFunction, clearance: float) -> float:
        if f.is_zero():
            return -INFINITY
        if angle_is_quarter_turn(place.theta):
            k = int(round(place.theta / (math.pi / 2))) % 4
            unit = [GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1)][k]
            node = unit * GaussianRational(place.R)
            at = node.to_sympy()
            if GaussianRational.from_sympy(f.num.eval(at)).is_zero():
                return -INFINITY
            if GaussianRational.from_sympy(f.den.eval(at)).is_zero():
                return INFINITY
        zeros, poles = zeros_and_poles(f)
        near = points_near(zeros + poles, place.point, clearance)
        if near:
            raise NumericalGuardError(
                f"zero/pole at {near[0].location:.6g} lies within {clearance:g} of the node "
                f"{place.point:.6g}; perturb R or the node angle"
            )
        return float(f.log_abs([place.point])[0])

    # -- classification -------------------------------------------------

    def classify(self, place) -> PlaceClass:
        if isinstance(place, (RationalInfinite, NevanlinnaBoundary)):
            return PlaceClass.ARCHIMEDEAN
        if isinstance(place, QuadraticPlace):
            return self.classify(place.base)
        return PlaceClass.NON_ARCHIMEDEAN

    def is_finite(self, place, f) -> bool:
        """Membership of f in the finiteness ring A_ω"""
        return self.log_pav_eval(place, f) < INFINITY

    def in_kernel(self, place, f) -> bool:
        """Membership of f in the kernel m_ω"""
        return self.log_pav_eval(place, f) == -INFINITY

    # -- extensions -----------------------------------------------------

    def split_rational_place(self, d: int, base) -> List[SplitPlace]:
        """
        Places of ℚ(√d) above a place of ℚ with weights [L_x : ℚ_ω]/[L : ℚ]

        Args:
            d: Squarefree integer, d ≠ 0, 1
            base: RationalFinite, RationalInfinite, a prime, or "inf"

        Returns:
            One or two SplitPlace entries whose weights sum to 1
        """
        if d in (0, 1) or not is_squarefree(d):
            raise ArgumentError(f"d must be squarefree and different from 0 and 1 (got {d})")
        base = coerce_base_place(base)

        if isinstance(base, RationalInfinite):
            if d > 0:
                return [
                    SplitPlace(place=QuadraticPlace(d=d, base=base, index=i), weight=Fraction(1, 2),
                               splitting="real", local_degree=1)
                    for i in range(2)
                ]
            return [SplitPlace(place=QuadraticPlace(d=d, base=base, index=0), weight=Fraction(1),
                               splitting="complex", local_degree=2)]

        p = base.p
        kind = splitting_type(d, p)
        if kind == "split":
            return [
                SplitPlace(place=QuadraticPlace(d=d, base=base, index=i), weight=Fraction(1, 2),
                           splitting="split", local_degree=1, residue_field_size=p)
                for i in range(2)
            ]
        return [SplitPlace(
            place=QuadraticPlace(d=d, base=base, index=0),
            weight=Fraction(1),
            splitting=kind,
            local_degree=2,
            residue_field_size=p * p if kind == "inert" else p,
        )]

    def residue_field_size(self, place) -> Optional[int]:
        """Size of the residue field of a finite place of ℚ or ℚ(√d); None otherwise"""
        if isinstance(place, RationalFinite):
            return place.p
        if isinstance(place, QuadraticPlace) and isinstance(place.base, RationalFinite):
            return self.split_rational_place(place.d, place.base)[0].residue_field_size
        return None

    def local_degree(self, place) -> int:
        """[L_x : ℚ_ω] for quadratic places, 1 for places of the base field"""
        if isinstance(place, QuadraticPlace):
            return self.split_rational_place(place.d, place.base)[0].local_degree
        return 1


def coerce_base_place(base) -> Union[RationalFinite, RationalInfinite]:
    if isinstance(base, (RationalFinite, RationalInfinite)):
        return base
    if isinstance(base, str) and base.strip().lower() in ("inf", "∞", "infinity"):
        return RationalInfinite()
    if isinstance(base, str) and base.strip().startswith("p="):
        base = base.strip()[2:]
    try:
        return RationalFinite(p=int(base))
    except (TypeError, ValueError) as e:
        raise ArgumentError(f"Base place must be a prime or 'inf' (got {base!r})") from e


# Singleton instance
_pav_evaluator_instance: PavEvaluator = None


def get_pav_evaluator() -> PavEvaluator:
    """Get singleton pav evaluator instance"""
    global _pav_evaluator_instance
    if _pav_evaluator_instance is None:
        _pav_evaluator_instance = PavEvaluator()
    return _pav_evaluator_instance
