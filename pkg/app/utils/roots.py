"""
Root localization for polynomials over ℚ(i)

Multiplicities come from the exact squarefree decomposition; locations come
from Aberth–Ehrlich iteration on each squarefree factor followed by a Newton
polish. Roots that are Gaussian rationals are confirmed by exact division.
"""

from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from sympy import Poly

from app.config import settings
from app.exceptions import ArgumentError, NumericalGuardError
from app.models.root import ComplexRoot
from app.utils.arith import GaussianRational
from app.utils.diagnostics import debug
from app.utils.polynomial import RationalFunction, poly_coefficients, poly_complex_coefficients, to_poly


# Largest denominator tried when snapping a located root to a Gaussian rational
MAX_CANDIDATE_DENOMINATOR = 10 ** 6


def aberth_ehrlich(coeffs: np.ndarray, tolerance: float, max_iterations: int) -> np.ndarray:
    """
    Simultaneous approximation of all roots of a squarefree polynomial

    Args:
        coeffs: Complex coefficients, highest degree first
        tolerance: Relative step size at which an iterate counts as converged
        max_iterations: Iteration cap

    Returns:
        Array of approximate roots
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    coeffs = coeffs / coeffs[0]
    n = len(coeffs) - 1
    deriv = np.polyder(coeffs)

    # Fujiwara bound puts every root inside this radius
    fujiwara = 2.0 * max(abs(coeffs[k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = max(fujiwara / 2.0, 1e-3)
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)

    scale = np.abs(coeffs)
    for _ in range(max_iterations):
        p = np.polyval(coeffs, z)
        dp = np.polyval(deriv, z)
        dp = np.where(dp == 0, 1e-300, dp)
        ratio = p / dp

        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)

        step = ratio / (1.0 - ratio * sums)
        step = np.where(p == 0, 0.0, step)
        if not np.all(np.isfinite(step)):
            raise NumericalGuardError("Root iteration diverged")
        z = z - step

        magnitude = np.maximum(1.0, np.abs(z))
        residual_scale = np.polyval(scale, np.abs(z))
        residual = np.abs(np.polyval(coeffs, z))
        if np.all(np.abs(step) <= tolerance * magnitude) or np.all(residual <= 1e-15 * residual_scale):
            return z

    raise NumericalGuardError(
        f"Root location did not converge after {max_iterations} iterations (degree {n})"
    )


def newton_polish(coeffs: np.ndarray, z: np.ndarray, tolerance: float, steps: int = 8) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    deriv = np.polyder(coeffs)
    scale = np.abs(coeffs)
    for _ in range(steps):
        p = np.polyval(coeffs, z)
        relative = np.abs(p) / np.maximum(np.polyval(scale, np.abs(z)), 1e-300)
        if np.all(relative <= tolerance):
            break
        dp = np.polyval(deriv, z)
        z = np.where((dp != 0) & (relative > tolerance), z - p / np.where(dp == 0, 1.0, dp), z)
    return z


def gaussian_candidate(z: complex) -> GaussianRational:
    return GaussianRational(
        Fraction.from_float(z.real).limit_denominator(MAX_CANDIDATE_DENOMINATOR),
        Fraction.from_float(z.imag).limit_denominator(MAX_CANDIDATE_DENOMINATOR),
    )


def _pair_conjugates(z: np.ndarray) -> np.ndarray:
    """Make roots of a real polynomial exactly real or exactly conjugate-paired"""
    z = z.copy()
    near_real = np.abs(z.imag) <= 1e-10 * np.maximum(1.0, np.abs(z))
    z[near_real] = z[near_real].real
    upper = [i for i in range(len(z)) if z[i].imag > 0]
    lower = [i for i in range(len(z)) if z[i].imag < 0]
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda k: abs(z[k] - np.conj(z[i])))
        lower.remove(j)
        z[j] = np.conj(z[i])
    return z


def _squarefree_roots(factor: Poly) -> List[Tuple[complex, Optional[GaussianRational]]]:
    coeffs = poly_coefficients(factor)
    if len(coeffs) == 2:
        exact = -coeffs[1] / coeffs[0]
        return [(exact.to_complex(), exact)]

    complex_coeffs = poly_complex_coefficients(factor)
    located = aberth_ehrlich(complex_coeffs, settings.root_tolerance, settings.root_max_iterations)
    located = newton_polish(complex_coeffs, located, settings.root_tolerance)
    if all(c.im == 0 for c in coeffs):
        located = _pair_conjugates(located)

    found = []
    used = set()
    for z in located:
        candidate = gaussian_candidate(complex(z))
        exact = None
        if (candidate.re, candidate.im) not in used and \
                GaussianRational.from_sympy(factor.eval(candidate.to_sympy())).is_zero():
            exact = candidate
            used.add((candidate.re, candidate.im))
        found.append((exact.to_complex() if exact is not None else complex(z), exact))
    return found


def roots(poly) -> List[ComplexRoot]:
    """
    All complex roots of a nonzero polynomial with exact multiplicities

    Args:
        poly: sympy Poly over QQ_I, coefficient list, or a polynomial RationalFunction

    Returns:
        Roots sorted by (real, imag)
    """
    if isinstance(poly, RationalFunction):
        if not poly.is_polynomial():
            raise ArgumentError(f"{poly} is not a polynomial")
        poly = poly.num
    p = to_poly(poly)
    if p.is_zero:
        raise ArgumentError("The zero polynomial has no finite root set")
    if p.degree() == 0:
        return []

    _, factors = p.sqf_list()
    result = []
    for factor, multiplicity in factors:
        if factor.degree() <= 0:
            continue
        for location, exact in _squarefree_roots(factor):
            result.append(ComplexRoot(
                real=location.real,
                imag=location.imag,
                multiplicity=multiplicity,
                exact=exact,
            ))

    debug(f"located {len(result)} distinct roots of degree-{p.degree()} polynomial")

    result.sort(key=lambda r: (round(r.real, 12), round(r.imag, 12)))
    return result
