"""
Exact arithmetic substrate: rationals, Gaussian rationals, quadratic field
elements and p-adic valuations.

Rationals are ``fractions.Fraction``; the value types below are immutable and
safe to share between threads.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Annotated, Iterable, List, Tuple, Union

import sympy
from pydantic import PlainSerializer, PlainValidator
from sympy.ntheory import legendre_symbol

from app.exceptions import ArgumentError


INFINITY = math.inf

RationalLike = Union[int, Fraction, str]


def parse_rational(text: str) -> Fraction:
    """Parse a rational literal such as ``"6/5"``, ``"-3"`` or ``"0.25"``"""
    cleaned = text.strip().replace(" ", "")
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as e:
        raise ArgumentError(f"Invalid rational literal '{text}': {e}") from e


def to_fraction(value) -> Fraction:
    """Coerce ints, strings, floats and sympy rationals to an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ArgumentError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ArgumentError(f"Not a finite number: {value!r}")
        # repr keeps the decimal literal the user wrote (0.1 -> 1/10)
        return Fraction(repr(value))
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise ArgumentError(f"Not a rational number: {value!r}")


def format_rational(value: Fraction) -> str:
    """Serialize as ``a/b`` (or ``a`` for integers)"""
    return str(value)


def log_fraction(value: Fraction) -> float:
    """Natural log of a positive rational without overflowing floats"""
    if value <= 0:
        raise ArgumentError(f"log of non-positive rational {value}")
    return math.log(value.numerator) - math.log(value.denominator)


def is_squarefree(d: int) -> bool:
    if d == 0:
        return False
    return all(e == 1 for e in sympy.factorint(abs(d)).values())


def discriminant(d: int) -> int:
    """Discriminant of ℚ(√d) for squarefree d"""
    return d if d % 4 == 1 else 4 * d


def splitting_type(d: int, p: int) -> str:
    """'split', 'inert' or 'ramified' for the prime p in ℚ(√d)"""
    if discriminant(d) % p == 0:
        return "ramified"
    if p == 2:
        return "split" if d % 8 == 1 else "inert"
    return "split" if legendre_symbol(d % p, p) == 1 else "inert"


def prime_support(values: Iterable[Fraction]) -> List[int]:
    """Sorted primes dividing a numerator or denominator of any nonzero value"""
    primes = set()
    for value in values:
        if value == 0:
            continue
        primes.update(sympy.primefactors(abs(value.numerator)))
        primes.update(sympy.primefactors(value.denominator))
    return sorted(primes)


def padic_valuation(q: RationalLike, p: int) -> Union[int, float]:
    """
    p-adic valuation v_p(q)

    Returns ``INFINITY`` for q = 0, so that |q|_p = p^(-v_p(q)) = 0.
    """
    if not sympy.isprime(p):
        raise ArgumentError(f"{p} is not a prime")
    q = to_fraction(q)
    if q == 0:
        return INFINITY
    return sympy.multiplicity(p, abs(q.numerator)) - sympy.multiplicity(p, q.denominator)


def padic_abs(q: RationalLike, p: int) -> Fraction:
    """|q|_p = p^(-v_p(q)), exact"""
    v = padic_valuation(q, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(1, p ** v) if v >= 0 else Fraction(p ** (-v))


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

_GAUSSIAN_SPLIT = re.compile(r"(?<=[0-9./)])(?=[+-])")


@dataclass(frozen=True)
class GaussianRational:
    """Element re + im·i of ℚ(i)"""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, sympy.Basic):
            return cls.from_sympy(value)
        return cls(to_fraction(value))

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse ``"a/b+c/d i"``, ``"3/4i"``, ``"-i"`` or a plain rational"""
        cleaned = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
        if not cleaned:
            raise ArgumentError("Empty Gaussian rational literal")
        if not cleaned.endswith("i"):
            return cls(parse_rational(cleaned))
        body = cleaned[:-1].rstrip("*")
        parts = _GAUSSIAN_SPLIT.split(body)
        if len(parts) == 1:
            real_text, imag_text = "0", parts[0]
        elif len(parts) == 2:
            real_text, imag_text = parts
        else:
            raise ArgumentError(f"Invalid Gaussian rational literal '{text}'")
        if imag_text in ("", "+"):
            imag_text = "1"
        elif imag_text == "-":
            imag_text = "-1"
        return cls(parse_rational(real_text), parse_rational(imag_text))

    @classmethod
    def from_sympy(cls, expr) -> "GaussianRational":
        expr = sympy.nsimplify(expr) if expr.has(sympy.Float) else expr
        real, imag = sympy.re(expr), sympy.im(expr)
        if not (real.is_Rational and imag.is_Rational):
            raise ArgumentError(f"Not a Gaussian rational: {expr}")
        return cls(to_fraction(real), to_fraction(imag))

    def to_sympy(self):
        return sympy.Rational(self.re.numerator, self.re.denominator) + \
            sympy.I * sympy.Rational(self.im.numerator, self.im.denominator)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|x|² = re² + im²"""
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        n = other.norm()
        num = self * other.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        imag = format_rational(abs(self.im))
        sign = "-" if self.im < 0 else "+"
        if self.re == 0:
            return f"{'-' if self.im < 0 else ''}{imag} i"
        return f"{format_rational(self.re)}{sign}{imag} i"


# ---------------------------------------------------------------------------
# Quadratic fields ℚ(√d)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticElement:
    """Element a + b√d of ℚ(√d), d squarefree"""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", to_fraction(self.a))
        object.__setattr__(self, "b", to_fraction(self.b))

    @classmethod
    def coerce(cls, value, d: int) -> "QuadraticElement":
        if isinstance(value, QuadraticElement):
            if value.d != d:
                raise ArgumentError(f"Element of Q(sqrt({value.d})) used in Q(sqrt({d}))")
            return value
        if isinstance(value, str):
            return cls.parse(value, d)
        if isinstance(value, dict):
            return cls(to_fraction(value.get("a", 0)), to_fraction(value.get("b", 0)), d)
        return cls(to_fraction(value), Fraction(0), d)

    @classmethod
    def parse(cls, text: str, d: int) -> "QuadraticElement":
        """Parse expressions such as ``"(1+sqrt(5))/2"`` or ``"2+i"`` (d = -1)"""
        try:
            expr = sympy.expand(sympy.sympify(text.replace("^", "**"), locals={"i": sympy.I}))
        except (sympy.SympifyError, TypeError) as e:
            raise ArgumentError(f"Cannot parse quadratic element '{text}': {e}") from e
        root = sympy.sqrt(d)
        b = expr.coeff(root)
        a = sympy.expand(expr - b * root)
        if not (a.is_Rational and b.is_Rational):
            raise ArgumentError(f"'{text}' is not an element of Q(sqrt({d}))")
        return cls(to_fraction(a), to_fraction(b), d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def norm(self) -> Fraction:
        """N(a + b√d) = a² − d b²"""
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "QuadraticElement":
        return QuadraticElement(self.a, -self.b, self.d)

    def integral_form(self) -> Tuple[int, int, int]:
        """(A, B, D) with self = (A + B√d)/D and A, B, D integers, D > 0"""
        den = math.lcm(self.a.denominator, self.b.denominator)
        return int(self.a * den), int(self.b * den), den

    def real_embeddings(self) -> Tuple[float, float]:
        """σ₊, σ₋ for d > 0 (√d ↦ ±√d)"""
        s = math.sqrt(self.d)
        return float(self.a) + float(self.b) * s, float(self.a) - float(self.b) * s

    def complex_embedding(self) -> complex:
        """The embedding √d ↦ i√|d| for d < 0"""
        return complex(float(self.a), float(self.b) * math.sqrt(-self.d))

    def _check(self, other) -> "QuadraticElement":
        return QuadraticElement.coerce(other, self.d)

    def __add__(self, other):
        other = self._check(other)
        return QuadraticElement(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return QuadraticElement(self.a * other.a + self.d * self.b * other.b,
                                self.a * other.b + self.b * other.a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * other.conjugate()
        return QuadraticElement(num.a / n, num.b / n, self.d)

    def __str__(self) -> str:
        if self.b == 0:
            return format_rational(self.a)
        return f"{format_rational(self.a)}+{format_rational(self.b)}*sqrt({self.d})"


# ---------------------------------------------------------------------------
# pydantic field types
# ---------------------------------------------------------------------------

RationalField = Annotated[
    Fraction,
    PlainValidator(to_fraction),
    PlainSerializer(format_rational, return_type=str),
]

GaussianField = Annotated[
    GaussianRational,
    PlainValidator(GaussianRational.coerce),
    PlainSerializer(str, return_type=str),
]
