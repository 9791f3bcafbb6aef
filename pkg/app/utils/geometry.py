import math
from typing import Iterable, List, Tuple

import numpy as np

from app.exceptions import NumericalGuardError
from app.models.root import ComplexRoot


def circle_nodes(R: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equispaced sampling points on the circle |z| = R

    Args:
        R: Radius
        nodes: Number of trapezoid nodes

    Returns:
        (theta, z) arrays with theta_k = 2πk/nodes and z_k = R·e^{iθ_k}
    """
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    return theta, R * np.exp(1j * theta)


def circle_mean(values: np.ndarray) -> float:
    """Periodic trapezoid rule for the normalized circle integral"""
    values = np.asarray(values, dtype=float)
    return float(np.sum(values) / values.size)


def distance_to_circle(point: complex, R: float) -> float:
    return abs(abs(point) - R)


def check_circle_clearance(
    singular_points: Iterable[ComplexRoot],
    R: float,
    clearance: float,
    what: str = "zero/pole",
) -> None:
    """
    Raise NumericalGuardError if any zero or pole lies within `clearance` of |z| = R
    """
    for point in singular_points:
        gap = distance_to_circle(point.location, R)
        if gap < clearance:
            raise NumericalGuardError(
                f"{what} at {point.location:.6g} lies within {clearance:g} of the circle |z| = {R:g} "
                f"(distance {gap:.3g}); perturb R, e.g. R = {suggest_radius(R, [point])}"
            )


def suggest_radius(R: float, points: Iterable[ComplexRoot]) -> str:
    """A nearby radius clear of every given point, formatted for the message"""
    radii = [abs(p.location) for p in points]
    for factor in (1.01, 0.99, 1.05, 0.95, 1.1):
        candidate = R * factor
        if all(abs(candidate - r) > 1e-3 * max(R, 1.0) for r in radii):
            return f"{candidate:.6g}"
    return f"{R * 1.1:.6g}"


def points_near(points: Iterable[ComplexRoot], node: complex, clearance: float) -> List[ComplexRoot]:
    return [p for p in points if abs(p.location - node) < clearance]


def angle_is_quarter_turn(theta: float) -> bool:
    """True when e^{iθ} is one of 1, i, −1, −i (exactly representable on a rational circle)"""
    k = theta / (math.pi / 2.0)
    return abs(k - round(k)) < 1e-15
