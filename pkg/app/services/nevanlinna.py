"""
Nevanlinna suite on the family S_R: counting, proximity and characteristic
functions, truncation, defects, family heights of holomorphic curves and the
first main theorem checks
"""

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from app.config import settings
from app.exceptions import ArgumentError, NumericalGuardError
from app.models.bundle import ArchimedeanShape, DiagonalPNF, NevanlinnaWeight
from app.models.curve import NevanlinnaCurve
from app.models.height import (
    CartanHeightReport,
    CharacteristicReport,
    CharacteristicRow,
    CountingBound,
    DefectEstimate,
    DefectRow,
    FamilyHeightReport,
    MetricChangeReport,
    OrderEstimate,
    ProjectivePoint,
    ProximityMetric,
    SectionGapReport,
    SectionGapRow,
    SumCheck,
    parse_target,
)
from app.services.bundle import get_bundle_algebra
from app.services.curve import get_curve_integrator, jensen_reference
from app.services.pav import zeros_and_poles
from app.utils.arith import GaussianRational, log_fraction, to_fraction
from app.utils.diagnostics import debug
from app.utils.geometry import check_circle_clearance, circle_mean, circle_nodes
from app.utils.polynomial import RationalFunction, reduce_pair

Row = TypeVar("Row")

DEFECT_FLOOR = 1e-6


def _inside(root, r: Fraction) -> bool:
    if root.exact is not None:
        return root.exact.norm() < r * r
    return abs(root.location) < float(r)


def _target_norm(a: Optional[GaussianRational], metric: ProximityMetric) -> float:
    """log‖(1, a)‖ with ∞ = [0 : 1] of norm 1"""
    if a is None:
        return 0.0
    modulus_sq = float(a.norm())
    if metric == ProximityMetric.FS_L2:
        return 0.5 * math.log1p(modulus_sq)
    return max(0.0, 0.5 * math.log(modulus_sq)) if modulus_sq > 0 else 0.0


class NevanlinnaCalculator:
    """N, m and T of rational functions on circles |z| = r"""

    def __init__(self):
        self.curves = get_curve_integrator()
        self.algebra = get_bundle_algebra()
        self.threads = settings.threads

    # -- helpers --------------------------------------------------------

    def _template(self, r, template: Optional[NevanlinnaCurve]) -> NevanlinnaCurve:
        r = to_fraction(r)
        if r <= 0:
            raise ArgumentError("radius must be positive")
        return template.with_radius(r) if template is not None else NevanlinnaCurve(R=r)

    def _shifted(self, f: RationalFunction, a: Optional[GaussianRational]) -> RationalFunction:
        """f − a (f itself at a = ∞); f ≡ a is rejected"""
        if a is None:
            return f
        g = f - RationalFunction.constant(a)
        if g.is_zero():
            raise ArgumentError(f"f is identically equal to the target {a}")
        return g

    def _solutions(self, g: RationalFunction, a: Optional[GaussianRational]):
        """Solutions of f = a: poles of f at a = ∞, zeros of g = f − a otherwise"""
        zeros, poles = zeros_and_poles(g)
        return poles if a is None else zeros

    def _guard(self, curve: NevanlinnaCurve, points, what: str = "solution of f = a") -> None:
        check_circle_clearance(points, float(curve.R), curve.clearance, what=what)

    def _rows(self, compute: Callable[..., Row], items: Sequence) -> List[Row]:
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(compute, items))

    def _radii(self, r_grid: Sequence) -> List[Fraction]:
        radii = sorted({to_fraction(r) for r in r_grid})
        if not radii:
            raise ArgumentError("radius grid is empty")
        if radii[0] <= 0:
            raise ArgumentError("radii must be positive")
        return radii

    # -- counting -------------------------------------------------------

    def counting_N(self, f, a, r, truncation: Optional[int] = None,
                   template: Optional[NevanlinnaCurve] = None) -> float:
        """
        Geometric counting function
        N(r, a) = n(0)·log r + Σ_{0<|z|<r} n(z)·log(r/|z|), multiplicities capped at k

        Args:
            f: Rational function
            a: Target in ℙ¹ (None or "inf" for ∞: poles of f)
            r: Radius
            truncation: k, or None for no truncation
        """
        f, a = RationalFunction.coerce(f), parse_target(a)
        if truncation is not None and truncation < 1:
            raise ArgumentError("truncation must be a positive integer")
        curve = self._template(r, template)
        g = self._shifted(f, a)
        points = self._solutions(g, a)
        self._guard(curve, points)
        R = curve.R
        total = 0.0
        for root in points:
            if not _inside(root, R):
                continue
            weight = root.multiplicity if truncation is None else min(truncation, root.multiplicity)
            if root.exact is not None and root.exact.is_zero():
                total += weight * log_fraction(R)
            elif root.exact is not None:
                total += weight * (log_fraction(R) - 0.5 * log_fraction(root.exact.norm()))
            else:
                total += weight * (log_fraction(R) - math.log(abs(root.location)))
        return total

    def counting_N_classical(self, f, a, r, template: Optional[NevanlinnaCurve] = None) -> float:
        """
        ∫₁^r n(t)/t dt + n(0)·log r, for r ≥ 1

        Agrees with counting_N when no solution other than 0 lies in |z| ≤ 1.
        """
        f, a = RationalFunction.coerce(f), parse_target(a)
        curve = self._template(r, template)
        if curve.R < 1:
            raise ArgumentError("the classical counting function needs r ≥ 1")
        g = self._shifted(f, a)
        points = self._solutions(g, a)
        self._guard(curve, points)
        log_r = log_fraction(curve.R)
        total = 0.0
        for root in points:
            if not _inside(root, curve.R):
                continue
            modulus = abs(root.location)
            if root.exact is not None and root.exact.is_zero():
                total += root.multiplicity * log_r
            else:
                total += root.multiplicity * (log_r - math.log(max(1.0, modulus)))
        return total

    # -- proximity ------------------------------------------------------

    def _proximity_values(self, f: RationalFunction, a: Optional[GaussianRational], zs: np.ndarray,
                          metric: ProximityMetric) -> np.ndarray:
        """Integrand of m(r, a) on the sampled circle"""
        if metric == ProximityMetric.CLASSICAL:
            if a is None:
                return np.maximum(0.0, f.log_abs(zs))
            return np.maximum(0.0, -self._shifted(f, a).log_abs(zs))
        log_f = f.log_abs(zs)
        if metric == ProximityMetric.FS_L2:
            log_point = 0.5 * np.logaddexp(0.0, 2.0 * log_f)
        else:
            log_point = np.maximum(0.0, log_f)
        log_section = np.zeros_like(log_f) if a is None else self._shifted(f, a).log_abs(zs)
        # −log(|s_a(1, f)| / (‖(1, f)‖·‖(1, a)‖))
        return log_point - log_section + _target_norm(a, metric)

    def proximity_m(self, f, a, r, metric: ProximityMetric = ProximityMetric.CLASSICAL,
                    template: Optional[NevanlinnaCurve] = None) -> float:
        """
        Circle mean of log⁺|f| (a = ∞) or log⁺|1/(f − a)|; the Fubini–Study
        metrics use −log of the normalized section s_a pulled back by f
        """
        f, a = RationalFunction.coerce(f), parse_target(a)
        metric = ProximityMetric(metric)
        curve = self._template(r, template)
        g = self._shifted(f, a)
        # log⁺ terms stay bounded at zeros of f unless a = 0
        self._guard(curve, zeros_and_poles(f)[1], what="pole of f")
        if a is not None:
            self._guard(curve, self._solutions(g, a))
        _, zs = circle_nodes(float(curve.R), curve.nodes)
        values = self._proximity_values(f, a, zs, metric)
        if not np.all(np.isfinite(values)):
            raise NumericalGuardError(f"non-finite proximity integrand on |z| = {curve.R}; perturb r")
        return circle_mean(values)

    # -- characteristic -------------------------------------------------

    def characteristic_T(self, f, a=None, r=1, template: Optional[NevanlinnaCurve] = None,
                         metric: ProximityMetric = ProximityMetric.CLASSICAL) -> float:
        """T(r, f; a) = m(r, a) + N(r, a)"""
        return self.proximity_m(f, a, r, metric, template) + self.counting_N(f, a, r, None, template)

    def characteristic_table(self, f, targets: Sequence, r_grid: Sequence, truncation: Optional[int] = None,
                             template: Optional[NevanlinnaCurve] = None,
                             metric: ProximityMetric = ProximityMetric.CLASSICAL,
                             with_fs_height: bool = True) -> CharacteristicReport:
        """
        One row per (radius, target), ordered by radius; guard failures are
        recorded in the row
        """
        f = RationalFunction.coerce(f)
        targets = [parse_target(a) for a in (targets or [None])]
        radii = self._radii(r_grid)
        items = [(r, a) for r in radii for a in targets]

        def row(item: Tuple[Fraction, Optional[GaussianRational]]) -> CharacteristicRow:
            r, a = item
            try:
                N = self.counting_N(f, a, r, None, template)
                N_k = self.counting_N(f, a, r, truncation, template) if truncation else N
                m = self.proximity_m(f, a, r, metric, template)
                T = m + N
                fs_height, gap = None, None
                if with_fs_height and not f.is_constant():
                    report = self.cartan_fs_height([1, f], ArchimedeanShape.MAX, r, template)
                    fs_height, gap = report.value, report.value - T
                return CharacteristicRow(r=r, target=a, N=N, N_k=N_k, m=m, T=T, fs_height=fs_height, gap=gap)
            except NumericalGuardError as e:
                return CharacteristicRow(r=r, target=a, error=str(e))

        rows = self._rows(row, items)
        debug(f"characteristic table for {f}: {len(rows)} rows")
        return CharacteristicReport(function=str(f), truncation=truncation, metric=metric, rows=rows)

    # -- heights of holomorphic curves ----------------------------------

    def _fs_bundle(self, curve: NevanlinnaCurve, ambient, rank: int) -> DiagonalPNF:
        if isinstance(ambient, DiagonalPNF):
            if ambient.rank != rank:
                raise ArgumentError(f"ambient bundle has rank {ambient.rank}, point has {rank} coordinates")
            weights = ambient.weights
            shape = ambient.shape
        else:
            weights = [NevanlinnaWeight() for _ in range(rank)]
            shape = ArchimedeanShape(ambient)
        return DiagonalPNF(curve=curve, weights=weights, shape=shape)

    def cartan_fs_height(self, point, ambient, R, template: Optional[NevanlinnaCurve] = None) -> CartanHeightReport:
        """
        Family height of the holomorphic curve P = [f₀ : f₁] on S_R

        h(P)(R) = ∫ log‖(f₀, f₁)‖ dν − d_R(f_j) for the first nonzero f_j,
        computed on the coprime polynomial representative. Reported with
        T(R, f₁/f₀) and the bound |gap| ≤ (1/2)·log 2 for ℓ², 0 for max.

        Args:
            point: ProjectivePoint or a pair of rational functions
            ambient: ArchimedeanShape ("max" | "l2") or a rank-2 DiagonalPNF on a Nevanlinna curve
            R: Radius
        """
        coords = point.coords if isinstance(point, ProjectivePoint) else [str(c) for c in point]
        if len(coords) != 2:
            raise ArgumentError("family heights are computed for points of P^1")
        f0, f1 = (RationalFunction.coerce(c) for c in coords)
        p0, p1, reduced = reduce_pair(f0, f1)
        g0, g1 = RationalFunction(p0), RationalFunction(p1)
        curve = self._template(R, template)
        b = self._fs_bundle(curve, ambient, 2)

        j, gj = (0, g0) if not g0.is_zero() else (1, g1)
        value = -self.algebra.degree_element(b, [g0, g1]) - self.curves.defect(curve, gj).total

        characteristic, gap, bound = None, None, None
        if not g0.is_zero():
            characteristic = self.characteristic_T(g1 / g0, None, curve.R, template)
            gap = value - characteristic
            bound = 0.5 * math.log(2.0) if b.shape == ArchimedeanShape.L2 else 0.0
        return CartanHeightReport(
            point=[str(g0), str(g1)],
            R=curve.R,
            value=value,
            characteristic=characteristic,
            gap=gap,
            bound=bound,
            reduced=reduced,
        )

    def family_height(self, point, ambient, R_grid: Sequence, template: Optional[NevanlinnaCurve] = None) -> FamilyHeightReport:
        """cartan_fs_height along a radius grid"""
        coords = point.coords if isinstance(point, ProjectivePoint) else [str(c) for c in point]
        radii = self._radii(R_grid)

        def row(R: Fraction) -> CartanHeightReport:
            try:
                return self.cartan_fs_height(coords, ambient, R, template)
            except NumericalGuardError as e:
                return CartanHeightReport(point=coords, R=R, error=str(e))

        rows = self._rows(row, radii)
        gaps = [r.gap for r in rows if r.gap is not None]
        tolerance = 100 * (template.tolerance if template else settings.tolerance)
        constant = (max(gaps) - min(gaps) <= tolerance) if gaps else None
        return FamilyHeightReport(point=coords, rows=rows, constant_gap=constant)

    # -- first main theorem ---------------------------------------------

    def section_reference(self, f: RationalFunction, a1, a2, metric: ProximityMetric) -> float:
        """log|c((s_{a₂}/s_{a₁})∘f, 0)| for normalized sections (s_∞ = x₀)"""
        num = RationalFunction(1) if a2 is None else self._shifted(f, a2)
        den = RationalFunction(1) if a1 is None else self._shifted(f, a1)
        return jensen_reference(num / den) + _target_norm(a1, metric) - _target_norm(a2, metric)

    def fmt_section_gap(self, f, a1, a2, R_grid: Sequence, template: Optional[NevanlinnaCurve] = None,
                        metric: ProximityMetric = ProximityMetric.FS_MAX) -> SectionGapReport:
        """
        T(R, f; a₁) − T(R, f; a₂) per radius against the exact reference
        log|c((s′/s)∘f, 0)|; the identity is exact for Fubini–Study proximity
        """
        f, a1, a2 = RationalFunction.coerce(f), parse_target(a1), parse_target(a2)
        metric = ProximityMetric(metric)
        if f.is_constant():
            raise ArgumentError("f must be nonconstant")
        same = (a1 is None and a2 is None) or (a1 is not None and a2 is not None and a1 == a2)
        reference = 0.0 if same else self.section_reference(f, a1, a2, metric)
        radii = self._radii(R_grid)

        def row(R: Fraction) -> SectionGapRow:
            try:
                if same:
                    difference = 0.0
                else:
                    difference = self.characteristic_T(f, a1, R, template, metric) - \
                        self.characteristic_T(f, a2, R, template, metric)
                return SectionGapRow(R=R, difference=difference, reference=reference, gap=difference - reference)
            except NumericalGuardError as e:
                return SectionGapRow(R=R, reference=reference, error=str(e))

        return SectionGapReport(function=str(f), a1=a1, a2=a2, metric=metric, reference=reference,
                                rows=self._rows(row, radii))

    def defect_estimate(self, f, a, r_grid: Sequence, template: Optional[NevanlinnaCurve] = None) -> DefectEstimate:
        """m(r, a)/T(r, f) per radius; rows with T < 1e-6 are skipped"""
        f, a = RationalFunction.coerce(f), parse_target(a)
        if f.is_constant():
            raise ArgumentError("the defect needs a nonconstant f")
        radii = self._radii(r_grid)

        def row(r: Fraction) -> DefectRow:
            try:
                m = self.proximity_m(f, a, r, ProximityMetric.CLASSICAL, template)
                T = self.characteristic_T(f, None, r, template)
                if T < DEFECT_FLOOR:
                    return DefectRow(r=r, m=m, T=T, skipped=True)
                return DefectRow(r=r, m=m, T=T, ratio=m / T)
            except NumericalGuardError as e:
                return DefectRow(r=r, skipped=True, error=str(e))

        rows = self._rows(row, radii)
        ratios = [r.ratio for r in rows if r.ratio is not None]
        return DefectEstimate(function=str(f), target=a, rows=rows, limit=ratios[-1] if ratios else None)

    def order_estimate(self, f, r_grid: Sequence, template: Optional[NevanlinnaCurve] = None) -> OrderEstimate:
        """Growth of T(r, f) at the largest radius of the grid (r > 1)"""
        f = RationalFunction.coerce(f)
        r = self._radii(r_grid)[-1]
        if r <= 1:
            raise ArgumentError("order estimate needs a radius > 1")
        T = self.characteristic_T(f, None, r, template)
        log_r = log_fraction(r)
        order = math.log(T) / log_r if T > 1 else None
        return OrderEstimate(r=r, T=T, order=order, growth=T / log_r)

    def metric_change_gap(self, f, a, r, template: Optional[NevanlinnaCurve] = None) -> MetricChangeReport:
        """
        T_{fs-max} − T_{fs-l2} at target a against the circle mean of
        log(|s_a|_{l2}/|s_a|_{max})∘f
        """
        f, a = RationalFunction.coerce(f), parse_target(a)
        curve = self._template(r, template)
        difference = self.characteristic_T(f, a, curve.R, template, ProximityMetric.FS_MAX) - \
            self.characteristic_T(f, a, curve.R, template, ProximityMetric.FS_L2)
        _, zs = circle_nodes(float(curve.R), curve.nodes)
        log_f = f.log_abs(zs)
        # log(|s|_l2 / |s|_max) = log‖x‖_max·‖a‖_max − log‖x‖_l2·‖a‖_l2
        ratio = np.maximum(0.0, log_f) - 0.5 * np.logaddexp(0.0, 2.0 * log_f)
        reference = circle_mean(ratio) + _target_norm(a, ProximityMetric.FS_MAX) - \
            _target_norm(a, ProximityMetric.FS_L2)
        return MetricChangeReport(r=curve.R, target=a, difference=difference, reference=reference,
                                  gap=difference - reference)

    def characteristic_sum_check(self, f, g, r, template: Optional[NevanlinnaCurve] = None) -> SumCheck:
        f, g = RationalFunction.coerce(f), RationalFunction.coerce(g)
        T_sum = self.characteristic_T(f + g, None, r, template)
        T_f = self.characteristic_T(f, None, r, template)
        T_g = self.characteristic_T(g, None, r, template)
        slack = T_f + T_g + math.log(2.0) - T_sum
        return SumCheck(r=to_fraction(r), T_sum=T_sum, T_f=T_f, T_g=T_g, slack=slack, holds=slack >= -1e-9)

    def nevanlinna_inequality(self, f, a, r, template: Optional[NevanlinnaCurve] = None) -> CountingBound:
        """
        N(r, a) − T(r, f) ≤ −log|c(f − a, 0)| + log⁺|a| + log 2
        """
        f, a = RationalFunction.coerce(f), parse_target(a)
        if a is None:
            raise ArgumentError("the counting bound is stated for a finite target")
        N = self.counting_N(f, a, r, None, template)
        T = self.characteristic_T(f, None, r, template)
        bound = -jensen_reference(self._shifted(f, a)) + _target_norm(a, ProximityMetric.FS_MAX) + math.log(2.0)
        return CountingBound(r=to_fraction(r), target=a, value=N - T, bound=bound, holds=N - T <= bound + 1e-9)


# Singleton instance
_nevanlinna_calculator_instance: NevanlinnaCalculator = None


def get_nevanlinna_calculator() -> NevanlinnaCalculator:
    """Get singleton Nevanlinna calculator instance"""
    global _nevanlinna_calculator_instance
    if _nevanlinna_calculator_instance is None:
        _nevanlinna_calculator_instance = NevanlinnaCalculator()
    return _nevanlinna_calculator_instance
