"""
Degrees, Harder–Narasimhan flags and heights of closed points
"""

from app.cli.common import make_report, on_template
from app.exceptions import ArgumentError, UnsupportedError
from app.models.bundle import SubspaceBasis
from app.models.curve import NevanlinnaCurve
from app.models.flag import EnumConfig
from app.models.height import FSMetricSpec, ProjectivePoint
from app.models.schemas import DegreeDescriptor, HeightDescriptor, HNDescriptor
from app.services.bundle import get_bundle_algebra
from app.services.heights import describe_metric, get_height_calculator
from app.services.hn import get_slope_analyzer


def _same_curve(descriptor, *bundles) -> None:
    for b in bundles:
        if b is None:
            continue
        if b.curve.label != descriptor.curve.label:
            raise ArgumentError(f"bundle lives on {b.curve.label}, descriptor on {descriptor.curve.label}")


def degree(descriptor: DegreeDescriptor):
    """deg, slope and dominance of a bundle; element, subspace and comparison on request"""
    algebra = get_bundle_algebra()
    template = descriptor.template()
    b = on_template(descriptor.bundle, template)
    other = on_template(descriptor.other, template) if descriptor.other is not None else None
    _same_curve(descriptor, b, other)
    warnings = []

    results = {
        "rank": b.rank,
        "degree": algebra.degree(b),
        "slope": algebra.slope(b),
        "dominance": algebra.dominance_witness(b).model_dump(),
    }

    if descriptor.element is not None:
        results["element_degree"] = algebra.degree_element(b, descriptor.element)
        if isinstance(b.curve, NevanlinnaCurve) and b.rank == 1 and b.weights[0].function.is_constant():
            results["element_report"] = algebra.element_degree_report(b, descriptor.element[0]).model_dump()

    if descriptor.subspace is not None:
        basis = SubspaceBasis.from_vectors(descriptor.subspace)
        results["subspace"] = {
            "dim": basis.dim,
            "saturated": basis.saturated,
            "degree": algebra.subspace_degree(b, basis),
        }

    if other is not None:
        tensor = algebra.tensor_bundle(b, other)
        expected = other.rank * results["degree"] + b.rank * algebra.degree(other)
        combined = algebra.degree(tensor)
        comparison = {
            "degree": algebra.degree(other),
            "tensor_degree": combined,
            "tensor_expected": expected,
            "tensor_residual": combined - expected,
        }
        try:
            comparison["distance"] = algebra.distance_integral(b, other)
        except UnsupportedError as e:
            warnings.append(f"distance: {e}")
        results["other"] = comparison

    return make_report(descriptor, results, warnings)


def hn(descriptor: HNDescriptor):
    """Harder–Narasimhan flag with per-step slopes and its certification"""
    analyzer = get_slope_analyzer()
    b = on_template(descriptor.bundle, descriptor.template())
    _same_curve(descriptor, b)
    cfg = EnumConfig(bound=descriptor.bound, max_candidates=descriptor.max_candidates)
    flag = analyzer.hn_flag(b, cfg)
    additivity = analyzer.subquotient_degrees(b, flag)
    results = {
        "steps": [step.vectors() for step in flag.steps],
        "slopes": flag.slopes,
        "degrees": flag.degrees,
        "semistable": flag.semistable,
        "certification": flag.certification,
        "degree": additivity.degree,
        "residual": additivity.residual,
    }
    warnings = [f"subquotient {i + 1} is not certified semistable"
                for i, ok in enumerate(flag.semistable) if not ok]
    return make_report(descriptor, results, warnings)


def height(descriptor: HeightDescriptor):
    """Fubini–Study height of a closed point; `compare` adds additivity and distance checks"""
    calculator = get_height_calculator()
    point = ProjectivePoint(coords=descriptor.point)
    _same_curve(descriptor, descriptor.metric, descriptor.compare)
    fs_metric = FSMetricSpec(ambient=descriptor.metric)
    report = calculator.fs_height(descriptor.curve, fs_metric, point)
    results = {
        "point": report.point,
        "metric": report.metric,
        "value": report.value,
        "coordinate": report.coordinate,
    }
    warnings = []
    if descriptor.compare is not None:
        check = calculator.height_additivity_check(descriptor.curve, fs_metric, FSMetricSpec(ambient=descriptor.compare),
                                                   point, descriptor.m1, descriptor.m2)
        results["compare"] = describe_metric(descriptor.compare)
        results["additivity"] = check.model_dump()
        if check.distance is None:
            warnings.append("distance between the two metrics is not available for this pair")
    return make_report(descriptor, results, warnings)
