"""
Heights of closed points of projective space over proper curves
"""

from functools import reduce
from typing import List, Optional

from app.exceptions import ArgumentError, UnsupportedError
from app.models.bundle import DiagonalPNF, LatticeHermitianBundle
from app.models.curve import QuadraticCurve, RationalCurve
from app.models.height import AdditivityReport, FSMetricSpec, HeightReport, ProjectivePoint
from app.services.bundle import AnyBundle, get_bundle_algebra
from app.services.curve import get_curve_integrator


def describe_metric(b: AnyBundle) -> str:
    if isinstance(b, LatticeHermitianBundle):
        return f"lattice-hermitian rank {b.rank}"
    return f"diagonal {b.shape.value} rank {b.rank} on {b.curve.label}"


class HeightCalculator:
    """h_{O(1)}(P) through the Fubini–Study pseudo-metric of an ambient bundle"""

    def __init__(self):
        self.algebra = get_bundle_algebra()
        self.curves = get_curve_integrator()

    def _coordinates(self, curve, point: ProjectivePoint) -> list:
        if isinstance(curve, RationalCurve):
            return point.rational()
        if isinstance(curve, QuadraticCurve):
            return point.quadratic(curve.d)
        raise ArgumentError("heights of closed points need a proper curve (rational or quadratic)")

    @staticmethod
    def _is_zero(x) -> bool:
        return x.is_zero() if hasattr(x, "is_zero") else x == 0

    def _height(self, curve, b: AnyBundle, coords: list) -> tuple:
        if len(coords) != b.rank:
            raise ArgumentError(f"point has {len(coords)} coordinates, ambient bundle has rank {b.rank}")
        j = next(i for i, x in enumerate(coords) if not self._is_zero(x))
        # ∫ log‖x‖ dν = −deg(x); ∫ log|x_j| dν vanishes by the product formula
        value = -self.algebra.degree_element(b, coords) - self.curves.defect(curve, coords[j]).total
        return value, j

    def fs_height(self, curve, fs_metric: FSMetricSpec, point: ProjectivePoint) -> HeightReport:
        """
        h(P) = ∫ [log‖x‖_ω − log|x_j|_ω] dν for any j with x_j ≠ 0

        Args:
            curve: RationalCurve or QuadraticCurve
            fs_metric: Ambient bundle on K^{n+1}
            point: P = [x₀ : ... : x_n]
        """
        b = fs_metric.ambient
        if isinstance(b, DiagonalPNF) and b.curve != curve:
            raise ArgumentError(f"ambient bundle lives on {b.curve.label}, point on {curve.label}")
        if isinstance(b, LatticeHermitianBundle) and not isinstance(curve, RationalCurve):
            raise ArgumentError("lattice-hermitian metrics price rational points only")
        value, j = self._height(curve, b, self._coordinates(curve, point))
        return HeightReport(point=point.coords, metric=describe_metric(b), value=value, coordinate=j)

    def tensor_point(self, coords: list, m: int) -> list:
        """Coordinates of x^{⊗m} in the product basis of the tensor power"""
        return reduce(lambda acc, _: [a * x for a in acc for x in coords], range(m - 1), list(coords))

    def height_additivity_check(self, curve, metric1: FSMetricSpec, metric2: FSMetricSpec, point: ProjectivePoint,
                                m1: int = 1, m2: int = 1) -> AdditivityReport:
        """
        h over E₁^{⊗m₁} ⊗ E₂^{⊗m₂} against m₁h₁ + m₂h₂, plus the
        bound |h₁ − h₂| ≤ ∫ d_ω(E₁, E₂) dν
        """
        if m1 < 0 or m2 < 0 or m1 + m2 == 0:
            raise ArgumentError("tensor exponents must be non-negative and not both zero")
        coords = self._coordinates(curve, point)
        b1, b2 = metric1.ambient, metric2.ambient
        h1, _ = self._height(curve, b1, coords)
        h2, _ = self._height(curve, b2, coords)

        factors: List[AnyBundle] = [b1] * m1 + [b2] * m2
        ambient = reduce(self.algebra.tensor_bundle, factors)
        combined, _ = self._height(curve, ambient, self.tensor_point(coords, m1 + m2))
        expected = m1 * h1 + m2 * h2

        distance: Optional[float] = None
        try:
            distance = self.algebra.distance_integral(b1, b2)
        except (UnsupportedError, ArgumentError):
            pass
        difference = abs(h1 - h2)
        return AdditivityReport(
            m1=m1,
            m2=m2,
            h1=h1,
            h2=h2,
            combined=combined,
            expected=expected,
            residual=combined - expected,
            difference=difference,
            distance=distance,
            bound_holds=None if distance is None else difference <= distance + 1e-10,
        )


# Singleton instance
_height_calculator_instance: HeightCalculator = None


def get_height_calculator() -> HeightCalculator:
    """Get singleton height calculator instance"""
    global _height_calculator_instance
    if _height_calculator_instance is None:
        _height_calculator_instance = HeightCalculator()
    return _height_calculator_instance
