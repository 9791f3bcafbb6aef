"""
Rational functions in z over the Gaussian rationals ℚ(i)

Numerator and denominator are sympy ``Poly`` objects over ``QQ_I``; every
instance is canonical (coprime, monic denominator, zero is 0/1).
"""

from tokenize import TokenError
from typing import Annotated, List, Tuple

import numpy as np
import sympy
from pydantic import PlainSerializer, PlainValidator
from sympy import Poly, QQ_I
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    rationalize,
    standard_transformations,
)
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

from app.exceptions import ArgumentError
from app.utils.arith import GaussianRational


Z = sympy.Symbol("z")

_TRANSFORMATIONS = standard_transformations + (convert_xor, implicit_multiplication, rationalize)
_LOCALS = {"z": Z, "I": sympy.I, "i": sympy.I}


def to_poly(value) -> Poly:
    """Coerce a sympy expression, coefficient list (highest degree first) or scalar to a Poly over QQ_I"""
    if isinstance(value, Poly):
        return value if value.domain == QQ_I else Poly(value.as_expr(), Z, domain=QQ_I)
    try:
        if isinstance(value, (list, tuple)):
            return Poly([GaussianRational.coerce(c).to_sympy() for c in value], Z, domain=QQ_I)
        if isinstance(value, GaussianRational):
            return Poly(value.to_sympy(), Z, domain=QQ_I)
        return Poly(value, Z, domain=QQ_I)
    except (CoercionFailed, PolynomialError) as e:
        raise ArgumentError(f"Not a polynomial over Q(i) in z: {value}") from e


def poly_coefficients(p: Poly) -> List[GaussianRational]:
    """Exact coefficients, highest degree first"""
    return [GaussianRational.from_sympy(c) for c in p.all_coeffs()]


def poly_complex_coefficients(p: Poly) -> np.ndarray:
    return np.array([complex(c) for c in p.all_coeffs()], dtype=complex)


def strip_root(p: Poly, z0: GaussianRational) -> Tuple[int, Poly]:
    """
    Divide p by (z − z0) as often as it goes exactly

    Returns:
        (multiplicity of z0 in p, quotient)
    """
    linear = Poly(Z - z0.to_sympy(), Z, domain=QQ_I)
    count = 0
    while p.degree() > 0:
        q, r = p.div(linear)
        if not r.is_zero:
            break
        p, count = q, count + 1
    return count, p


class RationalFunction:
    """Element num/den of ℚ(i)(z), kept in canonical form"""

    __slots__ = ("num", "den", "_num_c", "_den_c")

    def __init__(self, num, den=None):
        num = to_poly(num)
        den = to_poly(1 if den is None else den)
        if den.is_zero:
            raise ArgumentError("Rational function with zero denominator")
        if num.is_zero:
            num, den = Poly(0, Z, domain=QQ_I), Poly(1, Z, domain=QQ_I)
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num.quo(g), den.quo(g)
            lc = den.LC()
            num, den = num.quo_ground(lc), den.quo_ground(lc)
        self.num: Poly = num
        self.den: Poly = den
        self._num_c = poly_complex_coefficients(num)
        self._den_c = poly_complex_coefficients(den)

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        """Parse an expression in z with + - * / ^ and parentheses"""
        try:
            expr = parse_expr(text, local_dict=_LOCALS, transformations=_TRANSFORMATIONS)
        except (SyntaxError, TypeError, sympy.SympifyError, TokenError) as e:
            raise ArgumentError(f"Cannot parse rational function '{text}': {e}") from e
        if not expr.free_symbols <= {Z}:
            names = ", ".join(sorted(str(s) for s in expr.free_symbols - {Z}))
            raise ArgumentError(f"Unknown symbol(s) in '{text}': {names}")
        num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
        return cls(num, den)

    @classmethod
    def coerce(cls, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, sympy.Basic) and value.has(Z):
            return cls(*sympy.fraction(sympy.cancel(sympy.together(value))))
        return cls(GaussianRational.coerce(value).to_sympy())

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls(GaussianRational.coerce(value).to_sympy())

    @classmethod
    def identity(cls) -> "RationalFunction":
        return cls(Z)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def degree(self) -> int:
        """max(deg num, deg den), the degree as a map ℙ¹ → ℙ¹"""
        return max(self.num.degree(), self.den.degree(), 0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = RationalFunction.coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        other = RationalFunction.coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalFunction.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ArgumentError("Only integer powers of rational functions are supported")
        if k < 0:
            return RationalFunction(1) / (self ** (-k))
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num.as_expr()), str(self.den.as_expr())))

    # -- evaluation -------------------------------------------------------

    def evaluate(self, zs) -> np.ndarray:
        """Complex values at the points zs (inf/nan at poles)"""
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.polyval(self._num_c, zs) / np.polyval(self._den_c, zs)

    def log_abs(self, zs) -> np.ndarray:
        """log|f| at zs, computed as log|num| − log|den| to avoid overflow"""
        zs = np.asarray(zs, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs(np.polyval(self._num_c, zs))) - np.log(np.abs(np.polyval(self._den_c, zs)))

    def value_at(self, z0) -> GaussianRational:
        """Exact value at a point where f has no pole"""
        z0 = GaussianRational.coerce(z0)
        den = GaussianRational.from_sympy(self.den.eval(z0.to_sympy()))
        if den.is_zero():
            raise ArgumentError(f"{self} has a pole at {z0}")
        return GaussianRational.from_sympy(self.num.eval(z0.to_sympy())) / den

    def zeros(self):
        from app.utils.roots import roots
        return roots(self.num) if self.num.degree() > 0 else []

    def poles(self):
        from app.utils.roots import roots
        return roots(self.den) if self.den.degree() > 0 else []

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def __str__(self) -> str:
        if self.den.degree() == 0:
            return sympy.sstr(self.num.as_expr())
        return f"({sympy.sstr(self.num.as_expr())})/({sympy.sstr(self.den.as_expr())})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def ord_at(f: RationalFunction, z0) -> int:
    """ord(f, z0): multiplicity of z0 in the numerator minus that in the denominator"""
    f = RationalFunction.coerce(f)
    if f.is_zero():
        raise ArgumentError("ord of the zero function is undefined")
    z0 = GaussianRational.coerce(z0)
    zeros, _ = strip_root(f.num, z0)
    poles, _ = strip_root(f.den, z0)
    return zeros - poles


def laurent_leading(f: RationalFunction, z0) -> GaussianRational:
    """c(f, z0): the first non-zero Laurent coefficient of f at z0"""
    f = RationalFunction.coerce(f)
    if f.is_zero():
        raise ArgumentError("Laurent expansion of the zero function is undefined")
    z0 = GaussianRational.coerce(z0)
    _, num = strip_root(f.num, z0)
    _, den = strip_root(f.den, z0)
    at = z0.to_sympy()
    return GaussianRational.from_sympy(num.eval(at)) / GaussianRational.from_sympy(den.eval(at))


def order_and_leading(f: RationalFunction, z0) -> Tuple[int, GaussianRational]:
    return ord_at(f, z0), laurent_leading(f, z0)


def reduce_pair(f0: RationalFunction, f1: RationalFunction) -> Tuple[Poly, Poly, bool]:
    """
    Coprime polynomial representative of the point [f0 : f1]

    Returns:
        (p0, p1, reduced) where reduced is True if the input needed clearing
        of denominators or removal of a common factor
    """
    f0, f1 = RationalFunction.coerce(f0), RationalFunction.coerce(f1)
    if f0.is_zero() and f1.is_zero():
        raise ArgumentError("Projective point with all coordinates zero")
    lcm = f0.den.lcm(f1.den)
    p0 = f0.num * lcm.quo(f0.den)
    p1 = f1.num * lcm.quo(f1.den)
    reduced = lcm.degree() > 0
    g = p0.gcd(p1)
    if g.degree() > 0:
        p0, p1, reduced = p0.quo(g), p1.quo(g), True
    return p0, p1, reduced


RationalFunctionField = Annotated[
    RationalFunction,
    PlainValidator(RationalFunction.coerce),
    PlainSerializer(str, return_type=str),
]
