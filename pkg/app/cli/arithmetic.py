"""
Product formula and splitting of places over ℚ and ℚ(√d)
"""

from app.cli.common import make_report
from app.models.curve import QuadraticCurve
from app.models.schemas import CheckProductDescriptor, SplitPlacesDescriptor
from app.services.curve import get_curve_integrator
from app.services.pav import coerce_base_place, get_pav_evaluator


def check_product(descriptor: CheckProductDescriptor):
    """
    Product formula for one element

    On ℚ the check is exact (prime-exponent bookkeeping) and the reported
    total is 0.0 whenever the product is exactly 1.
    """
    integrator = get_curve_integrator()

    if isinstance(descriptor.curve, QuadraticCurve):
        report = integrator.defect_quadratic(descriptor.curve.d, descriptor.value)
        results = {
            "element": report.element,
            "total": report.total,
            "norm": report.norm,
            "norm_defect": report.norm_defect,
            "terms": [t.model_dump() for t in report.terms],
        }
        return make_report(descriptor, results)

    report = integrator.defect_exact(descriptor.value)
    results = {
        "value": report.value,
        "total": 0.0 if report.exact else report.numeric_total,
        "exact": report.exact,
        "exponents": report.exponents,
        "archimedean": report.archimedean,
        "product": report.product,
        "numeric_total": report.numeric_total,
    }
    return make_report(descriptor, results)


def split_places(descriptor: SplitPlacesDescriptor):
    """Places of ℚ(√d) above each requested base place, with weights summing to 1"""
    pav = get_pav_evaluator()
    d = descriptor.curve.d
    places = {}
    for base in descriptor.bases:
        base_place = coerce_base_place(base)
        splits = pav.split_rational_place(d, base_place)
        places[base_place.key] = {
            "places": [
                {
                    "key": s.place.key,
                    "weight": s.weight,
                    "splitting": s.splitting,
                    "local_degree": s.local_degree,
                    "residue_field_size": s.residue_field_size,
                }
                for s in splits
            ],
            "weight_sum": sum(s.weight for s in splits),
        }
    return make_report(descriptor, {"d": d, "bases": places})
