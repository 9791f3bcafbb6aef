"""
Topological adelic curves as measure spaces of places: support, defect,
Jensen cross-checks and the S_R family
"""

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import ArgumentError, NumericalGuardError
from app.models.curve import (
    ConvergenceReport,
    DefectReport,
    ExactProductReport,
    FamilyDefectReport,
    FamilyDefectRow,
    LocalTerm,
    NevanlinnaCurve,
    QuadraticCurve,
    QuadraticDefectReport,
    RationalCurve,
)
from app.models.place import NevanlinnaInterior, RationalFinite, RationalInfinite, WeightedPlace
from app.services.pav import get_pav_evaluator, zeros_and_poles
from app.utils.arith import (
    INFINITY,
    QuadraticElement,
    log_fraction,
    padic_valuation,
    prime_support,
    to_fraction,
)
from app.utils.diagnostics import debug
from app.utils.geometry import check_circle_clearance, circle_mean, circle_nodes
from app.utils.polynomial import RationalFunction, laurent_leading


def interior_weight(R: Fraction, location: complex, exact=None) -> float:
    """ν({z}) = log(R/|z|), and log R at z = 0"""
    if exact is not None:
        if exact.is_zero():
            return log_fraction(R)
        return log_fraction(R) - 0.5 * log_fraction(exact.norm())
    if location == 0:
        return log_fraction(R)
    return log_fraction(R) - math.log(abs(location))


def jensen_reference(f: RationalFunction) -> float:
    """log|c(f, 0)|"""
    return 0.5 * log_fraction(laurent_leading(f, 0).norm())


class CurveIntegrator:
    """Integration engine over the places of a topological adelic curve"""

    def __init__(self):
        self.pav = get_pav_evaluator()
        self.threads = settings.threads

    # -- support --------------------------------------------------------

    def support_places(self, curve, f) -> List[WeightedPlace]:
        """
        Discrete non-archimedean places where log|f|_ω ≠ 0, with their weights

        Archimedean places are always integrated separately and are not listed.
        """
        if isinstance(curve, RationalCurve):
            q = to_fraction(f)
            if q == 0:
                raise ArgumentError("support of 0 is undefined")
            return [WeightedPlace(place=RationalFinite(p=p), weight=1.0) for p in prime_support([q])]

        if isinstance(curve, QuadraticCurve):
            x = QuadraticElement.coerce(f, curve.d)
            if x.is_zero():
                raise ArgumentError("support of 0 is undefined")
            A, B, D = x.integral_form()
            primes = prime_support([Fraction(A * A - curve.d * B * B), Fraction(D)])
            places = []
            for p in primes:
                for split in self.pav.split_rational_place(curve.d, p):
                    places.append(WeightedPlace(place=split.place, weight=float(split.weight)))
            return places

        if isinstance(curve, NevanlinnaCurve):
            g = RationalFunction.coerce(f)
            if g.is_zero():
                raise ArgumentError("support of 0 is undefined")
            zeros, poles = zeros_and_poles(g)
            R = curve.R
            places = []
            for root in zeros + poles:
                if root.exact is not None:
                    inside = root.exact.norm() < R * R
                else:
                    inside = abs(root.location) < float(R)
                if not inside:
                    continue
                place = NevanlinnaInterior(z=root.exact, location=(root.real, root.imag), R=R) \
                    if root.exact is not None else NevanlinnaInterior(location=(root.real, root.imag), R=R)
                places.append(WeightedPlace(place=place, weight=interior_weight(R, root.location, root.exact)))
            return places

        raise ArgumentError(f"Unknown curve {curve!r}")

    def archimedean_places(self, curve) -> List[WeightedPlace]:
        if isinstance(curve, RationalCurve):
            return [WeightedPlace(place=RationalInfinite(), weight=1.0)]
        if isinstance(curve, QuadraticCurve):
            return [WeightedPlace(place=s.place, weight=float(s.weight))
                    for s in self.pav.split_rational_place(curve.d, RationalInfinite())]
        return []

    # -- generic engine -------------------------------------------------

    def integrate(
        self,
        curve,
        places: Sequence[WeightedPlace],
        local_log: Callable[[object], float],
        boundary_log: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> Tuple[float, float, List[LocalTerm]]:
        """
        ∫ φ dν for a function φ known at finitely many discrete places and, on
        S_R, on the boundary circle

        Args:
            curve: The curve
            places: Discrete places (with weights) where φ may be nonzero
            local_log: φ at a discrete place
            boundary_log: φ on an array of boundary points (S_R only)

        Returns:
            (discrete_part, boundary_part, terms)
        """
        terms = []
        for wp in places:
            value = local_log(wp.place)
            if value in (INFINITY, -INFINITY):
                raise ArgumentError(f"log-norm is infinite at {wp.key}")
            terms.append(LocalTerm(place=wp.key, weight=wp.weight, log_value=value))
        discrete = float(np.sum([t.weight * t.log_value for t in terms])) if terms else 0.0

        boundary = 0.0
        if isinstance(curve, NevanlinnaCurve) and boundary_log is not None:
            _, zs = circle_nodes(float(curve.R), curve.nodes)
            values = boundary_log(zs)
            if not np.all(np.isfinite(values)):
                raise NumericalGuardError(
                    f"non-finite integrand on |z| = {curve.R}; perturb R"
                )
            boundary = circle_mean(values)
        return discrete, boundary, terms

    # -- defects --------------------------------------------------------

    def defect(self, curve, f) -> DefectReport:
        """
        d_S(f) = ∫ log|f|_ω dν(ω)

        RationalCurve/QuadraticCurve: reference 0 (product formula).
        NevanlinnaCurve: reference log|c(f,0)| (Jensen).
        """
        if isinstance(curve, NevanlinnaCurve):
            return self._defect_nevanlinna(curve, RationalFunction.coerce(f))

        places = self.support_places(curve, f) + self.archimedean_places(curve)
        discrete, _, terms = self.integrate(curve, places, lambda place: self.pav.log_pav_eval(place, f))
        return DefectReport(
            discrete_part=discrete,
            boundary_part=0.0,
            total=discrete,
            reference=0.0,
            gap=discrete,
            terms=terms,
        )

    def _defect_nevanlinna(self, curve: NevanlinnaCurve, f: RationalFunction) -> DefectReport:
        if f.is_zero():
            raise ArgumentError("defect of 0 is undefined")
        zeros, poles = zeros_and_poles(f)
        check_circle_clearance(zeros + poles, float(curve.R), curve.clearance)

        places = self.support_places(curve, f)
        discrete, boundary, terms = self.integrate(
            curve, places, lambda place: self.pav.log_pav_eval(place, f), f.log_abs
        )
        total = discrete + boundary
        reference = jensen_reference(f)
        debug(f"defect on S_{curve.R}: discrete {discrete:.15g}, boundary {boundary:.15g}")
        return DefectReport(
            discrete_part=discrete,
            boundary_part=boundary,
            total=total,
            reference=reference,
            gap=total - reference,
            terms=terms,
        )

    def defect_exact(self, q) -> ExactProductReport:
        """Product formula on ℚ checked by exact prime-exponent bookkeeping"""
        q = to_fraction(q)
        if q == 0:
            raise ArgumentError("defect of 0 is undefined")
        exponents = {p: int(padic_valuation(q, p)) for p in prime_support([q])}
        product = abs(q)
        for p, v in exponents.items():
            product *= Fraction(1, p ** v) if v >= 0 else Fraction(p ** (-v))
        return ExactProductReport(
            value=q,
            exponents=exponents,
            archimedean=abs(q),
            product=product,
            exact=product == 1,
            numeric_total=self.defect(RationalCurve(), q).total,
        )

    def defect_quadratic(self, d: int, f) -> QuadraticDefectReport:
        """
        Defect on ℚ(√d) with the extension weights, cross-checked against
        (1/2)·d_ℚ(N(f))
        """
        curve = QuadraticCurve(d=d)
        x = QuadraticElement.coerce(f, d)
        if x.is_zero():
            raise ArgumentError("defect of 0 is undefined")
        report = self.defect(curve, x)
        norm = x.norm()
        return QuadraticDefectReport(
            d=d,
            element=str(x),
            total=report.total,
            norm=norm,
            norm_defect=0.5 * self.defect(RationalCurve(), norm).total,
            terms=report.terms,
        )

    # -- S_R family -----------------------------------------------------

    def family_defect(self, f, R_grid: Sequence, template: Optional[NevanlinnaCurve] = None) -> FamilyDefectReport:
        """
        Table R ↦ d_{S_R}(f); per-row guard failures are recorded, not raised
        """
        f = RationalFunction.coerce(f)
        if f.is_zero():
            raise ArgumentError("defect of 0 is undefined")
        radii = sorted({to_fraction(R) for R in R_grid})
        if not radii:
            raise ArgumentError("radius grid is empty")
        template = template or NevanlinnaCurve(R=radii[0])
        reference = jensen_reference(f)

        def row(R: Fraction) -> FamilyDefectRow:
            try:
                report = self._defect_nevanlinna(template.with_radius(R), f)
                return FamilyDefectRow(R=R, total=report.total, reference=reference, gap=report.gap)
            except NumericalGuardError as e:
                return FamilyDefectRow(R=R, reference=reference, error=str(e))

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            rows = list(executor.map(row, radii))

        totals = [r.total for r in rows if r.total is not None]
        spread = (max(totals) - min(totals)) if totals else None
        bound = 100 * template.tolerance
        proper = bool(totals) and all(abs(r.gap) <= bound for r in rows if r.gap is not None)
        return FamilyDefectReport(
            function=str(f),
            reference=reference,
            rows=rows,
            spread=spread,
            asymptotically_proper=proper,
        )

    def convergence_check(self, curve: NevanlinnaCurve, f, nodes: Optional[int] = None) -> ConvergenceReport:
        """Jensen gap at N and 2N trapezoid nodes"""
        nodes = nodes or curve.nodes
        gap = self.defect(curve.with_nodes(nodes), f).gap
        gap_doubled = self.defect(curve.with_nodes(2 * nodes), f).gap
        ratio = None if gap_doubled == 0 else abs(gap) / abs(gap_doubled)
        return ConvergenceReport(nodes=nodes, gap=gap, gap_doubled=gap_doubled, ratio=ratio)


# Singleton instance
_curve_integrator_instance: CurveIntegrator = None


def get_curve_integrator() -> CurveIntegrator:
    """Get singleton curve integrator instance"""
    global _curve_integrator_instance
    if _curve_integrator_instance is None:
        _curve_integrator_instance = CurveIntegrator()
    return _curve_integrator_instance
