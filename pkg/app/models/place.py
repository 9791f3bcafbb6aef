import math
import re
from enum import Enum
from typing import Annotated, Literal, Optional, Tuple, Union

import sympy
from pydantic import Field, field_validator, model_validator

from app.models.base import DomainModel
from app.utils.arith import GaussianField, GaussianRational, RationalField, format_rational, splitting_type


class PlaceClass(str, Enum):
    """Classification of a pseudo-absolute value by its residue absolute value"""
    ARCHIMEDEAN = "archimedean"
    NON_ARCHIMEDEAN = "non-archimedean"


class RationalFinite(DomainModel):
    """The p-adic place of ℚ"""
    kind: Literal["rational-finite"] = "rational-finite"
    p: int = Field(..., description="Prime number")

    @field_validator("p")
    @classmethod
    def _prime(cls, p: int) -> int:
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not a prime")
        return p

    @property
    def key(self) -> str:
        return f"p={self.p}"


class RationalInfinite(DomainModel):
    """The archimedean place of ℚ"""
    kind: Literal["rational-infinite"] = "rational-infinite"

    @property
    def key(self) -> str:
        return "inf"


BasePlace = Annotated[Union[RationalFinite, RationalInfinite], Field(discriminator="kind")]


class QuadraticPlace(DomainModel):
    """A place of ℚ(√d) above a place of ℚ"""
    kind: Literal["quadratic"] = "quadratic"
    d: int = Field(..., description="Squarefree integer, d ≠ 0, 1")
    base: BasePlace = Field(..., description="Place of ℚ below this place")
    index: int = Field(0, ge=0, description="Which extension above the base (0 or 1)")

    @model_validator(mode="after")
    def _index_in_range(self):
        if isinstance(self.base, RationalInfinite):
            count = 2 if self.d > 0 else 1
        else:
            count = 2 if splitting_type(self.d, self.base.p) == "split" else 1
        if self.index >= count:
            raise ValueError(f"only {count} place(s) of Q(sqrt({self.d})) lie above {self.base.key}")
        return self

    @property
    def key(self) -> str:
        base = "inf" if isinstance(self.base, RationalInfinite) else f"p={self.base.p}"
        return f"quad(d={self.d},{base},#{self.index})"


class NevanlinnaInterior(DomainModel):
    """
    Non-archimedean place of S_R at an interior point z, |z| < R

    ``z`` is exact when the point is a Gaussian rational; otherwise only the
    numerically located ``location`` is known.
    """
    kind: Literal["nev-interior"] = "nev-interior"
    z: Optional[GaussianField] = Field(None, description="Exact point, when representable")
    location: Tuple[float, float] = Field((0.0, 0.0), description="(re, im) of the point")
    R: RationalField = Field(..., description="Radius of the disc")

    @model_validator(mode="before")
    @classmethod
    def _derive_location(cls, data):
        if isinstance(data, dict) and data.get("z") is not None and "location" not in data:
            z = GaussianRational.coerce(data["z"])
            data = {**data, "location": (float(z.re), float(z.im))}
        return data

    @model_validator(mode="after")
    def _inside_disc(self):
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.z is not None:
            if self.z.norm() >= self.R * self.R:
                raise ValueError(f"|z| must be < R (z = {self.z}, R = {self.R})")
        elif math.hypot(*self.location) >= float(self.R):
            raise ValueError("|z| must be < R")
        return self

    @property
    def point(self) -> complex:
        return complex(*self.location)

    @property
    def key(self) -> str:
        if self.z is not None:
            return f"nev-int(z={self.z}, R={format_rational(self.R)})"
        return f"nev-int(z~{self.point:.10g}, R={format_rational(self.R)})"


class NevanlinnaBoundary(DomainModel):
    """Archimedean place of S_R at the boundary point R·e^{iθ}"""
    kind: Literal["nev-boundary"] = "nev-boundary"
    R: RationalField = Field(..., description="Radius of the circle")
    theta: float = Field(0.0, ge=0.0, lt=2 * math.pi, description="Angle of the sampling node")

    @field_validator("R")
    @classmethod
    def _positive(cls, R):
        if R <= 0:
            raise ValueError("R must be positive")
        return R

    @property
    def point(self) -> complex:
        return float(self.R) * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def key(self) -> str:
        return f"nev-bnd(R={format_rational(self.R)})"


Place = Annotated[
    Union[RationalFinite, RationalInfinite, QuadraticPlace, NevanlinnaInterior, NevanlinnaBoundary],
    Field(discriminator="kind"),
]


class WeightedPlace(DomainModel):
    """A place together with its measure weight"""
    place: Place
    weight: float = Field(..., description="Measure of the singleton {place}")

    @property
    def key(self) -> str:
        return self.place.key


class SplitPlace(DomainModel):
    """A place of ℚ(√d) above a place of ℚ with its extension weight [L_x : ℚ_ω]/[L : ℚ]"""
    place: QuadraticPlace
    weight: RationalField
    splitting: Literal["split", "inert", "ramified", "real", "complex"]
    local_degree: int = Field(..., ge=1, le=2)
    residue_field_size: Optional[int] = Field(None, description="Size of the residue field; None at archimedean places")


_QUAD_KEY = re.compile(r"^quad\(d=(-?\d+),(inf|p=(\d+)),#(\d+)\)$")


def parse_place_key(key: str):
    """Place of ℚ or ℚ(√d) from its report key ("p=5", "inf", "quad(d=-1,p=5,#0)")"""
    text = key.strip().replace(" ", "")
    if text == "inf":
        return RationalInfinite()
    if text.startswith("p=") and text[2:].isdigit():
        return RationalFinite(p=int(text[2:]))
    match = _QUAD_KEY.match(text)
    if match:
        d, base_text, p, index = match.groups()
        base = RationalInfinite() if base_text == "inf" else RationalFinite(p=int(p))
        return QuadraticPlace(d=int(d), base=base, index=int(index))
    raise ValueError(f"Unrecognized place key '{key}'")
