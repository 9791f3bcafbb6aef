"""
Jensen defects, Nevanlinna characteristics and family heights on S_R
"""

from app.cli.common import make_report, row_warnings
from app.exceptions import ArgumentError, NumericalGuardError
from app.models.height import ProximityMetric, format_target
from app.models.schemas import FamilyHeightDescriptor, JensenDescriptor, NevanlinnaDescriptor
from app.services.curve import get_curve_integrator
from app.services.nevanlinna import get_nevanlinna_calculator


def jensen(descriptor: JensenDescriptor):
    """Defect of f on S_R against log|c(f,0)|; a radius grid turns it into a table"""
    integrator = get_curve_integrator()
    curve = descriptor.template()

    if descriptor.radii:
        report = integrator.family_defect(descriptor.function, descriptor.radii, curve)
        results = {
            "function": report.function,
            "reference": report.reference,
            "spread": report.spread,
            "asymptotically_proper": report.asymptotically_proper,
            "rows": [row.model_dump() for row in report.rows],
        }
        rows = [[row.R, row.total, row.reference, row.gap, row.error] for row in report.rows]
        return make_report(descriptor, results, row_warnings(report.rows, "R"),
                           header=["R", "total", "reference", "gap", "error"], rows=rows)

    report = integrator.defect(curve, descriptor.function)
    results = {
        "total": report.total,
        "reference": report.reference,
        "gap": report.gap,
        "discrete_part": report.discrete_part,
        "boundary_part": report.boundary_part,
        "terms": [t.model_dump() for t in report.terms],
    }
    if descriptor.convergence:
        results["convergence"] = integrator.convergence_check(curve, descriptor.function).model_dump()
    return make_report(descriptor, results)


def _characteristic(descriptor: NevanlinnaDescriptor, calculator, radii, curve):
    metric = descriptor.metric or ProximityMetric.CLASSICAL
    report = calculator.characteristic_table(descriptor.function, descriptor.targets, radii,
                                             descriptor.truncation, curve, metric)
    several = len(report.rows) > len(radii)
    header = ["r"] + (["target"] if several else []) + ["N", "N_k", "m", "T", "fs_height", "gap"]
    rows = [
        [row.r] + ([format_target(row.target)] if several else []) +
        [row.N, row.N_k, row.m, row.T, row.fs_height, row.gap]
        for row in report.rows
    ]
    results = {
        "function": report.function,
        "metric": report.metric,
        "truncation": report.truncation,
        "rows": [row.model_dump(exclude_none=True) for row in report.rows],
    }
    warnings = row_warnings(report.rows)
    if radii[-1] > 1 and not descriptor.function.is_constant():
        try:
            results["order"] = calculator.order_estimate(descriptor.function, radii, curve).model_dump()
        except NumericalGuardError as e:
            warnings.append(f"order estimate: {e}")
    return results, warnings, header, rows


def _section_gap(descriptor: NevanlinnaDescriptor, calculator, radii, curve):
    metric = descriptor.metric or ProximityMetric.FS_MAX
    report = calculator.fmt_section_gap(descriptor.function, descriptor.a1, descriptor.a2, radii, curve, metric)
    results = {
        "function": report.function,
        "a1": format_target(report.a1),
        "a2": format_target(report.a2),
        "metric": report.metric,
        "reference": report.reference,
        "rows": [row.model_dump(exclude_none=True) for row in report.rows],
    }
    rows = [[row.R, row.difference, row.reference, row.gap] for row in report.rows]
    return results, row_warnings(report.rows, "R"), ["r", "difference", "reference", "gap"], rows


def _defect(descriptor: NevanlinnaDescriptor, calculator, radii, curve):
    if descriptor.metric not in (None, ProximityMetric.CLASSICAL):
        raise ArgumentError("defect ratios use the classical proximity function")
    report = calculator.defect_estimate(descriptor.function, descriptor.target, radii, curve)
    results = {
        "function": report.function,
        "target": format_target(report.target),
        "limit": report.limit,
        "rows": [row.model_dump(exclude_none=True) for row in report.rows],
    }
    rows = [[row.r, row.m, row.T, row.ratio, row.skipped] for row in report.rows]
    return results, row_warnings(report.rows), ["r", "m", "T", "ratio", "skipped"], rows


MODES = {
    "characteristic": _characteristic,
    "fmt": _section_gap,
    "defect": _defect,
}


def nevanlinna(descriptor: NevanlinnaDescriptor):
    """Characteristic table, first-main-theorem gaps or defect ratios along a radius grid"""
    calculator = get_nevanlinna_calculator()
    curve = descriptor.template()
    radii = sorted(set(descriptor.radii or [curve.R]))
    results, warnings, header, rows = MODES[descriptor.mode](descriptor, calculator, radii, curve)
    return make_report(descriptor, results, warnings, header=header, rows=rows)


def family_height(descriptor: FamilyHeightDescriptor):
    """Height of [f₀ : f₁] per radius, compared with T(R, f₁/f₀)"""
    calculator = get_nevanlinna_calculator()
    curve = descriptor.template()
    radii = descriptor.radii or [curve.R]
    report = calculator.family_height(descriptor.point, descriptor.shape, radii, curve)
    results = {
        "point": report.point,
        "shape": descriptor.shape,
        "constant_gap": report.constant_gap,
        "rows": [row.model_dump(exclude_none=True) for row in report.rows],
    }
    rows = [[row.R, row.value, row.characteristic, row.gap, row.bound] for row in report.rows]
    return make_report(descriptor, results, row_warnings(report.rows, "R"),
                       header=["R", "height", "T", "gap", "bound"], rows=rows)
