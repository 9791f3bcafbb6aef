from enum import Enum
from typing import Annotated, Any, List, Optional

from pydantic import Field, PlainSerializer, PlainValidator, field_validator, model_validator

from app.exceptions import ArgumentError
from app.models.base import DomainModel
from app.models.bundle import Bundle
from app.utils.arith import GaussianRational, QuadraticElement, RationalField, to_fraction
from app.utils.polynomial import RationalFunction


def parse_target(value) -> Optional[GaussianRational]:
    """A point of ℙ¹: None (or "inf") is ∞, anything else a Gaussian rational"""
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() in ("inf", "∞", "infinity"):
        return None
    return GaussianRational.coerce(value)


def format_target(value: Optional[GaussianRational]) -> str:
    return "inf" if value is None else str(value)


Target = Annotated[
    Optional[GaussianRational],
    PlainValidator(parse_target),
    PlainSerializer(format_target, return_type=str),
]


class ProximityMetric(str, Enum):
    """Metric behind the proximity function m(r, a)"""
    CLASSICAL = "classical"
    FS_MAX = "fs-max"
    FS_L2 = "fs-l2"


class ProjectivePoint(DomainModel):
    """
    Homogeneous coordinates [x₀ : ... : x_n]

    Coordinates are kept as text and read in the field of the curve they are
    priced on (ℚ, ℚ(√d) or rational functions in z).
    """
    coords: List[str] = Field(..., min_length=2, description="Homogeneous coordinates")

    @field_validator("coords", mode="before")
    @classmethod
    def _as_text(cls, coords: Any):
        if not isinstance(coords, (list, tuple)):
            raise ValueError("coords must be a list")
        return [c if isinstance(c, str) else str(c) for c in coords]

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def _nonzero(self, values: list, is_zero) -> list:
        if all(is_zero(v) for v in values):
            raise ArgumentError("projective point with all coordinates zero")
        return values

    def rational(self) -> list:
        return self._nonzero([to_fraction(c) for c in self.coords], lambda v: v == 0)

    def quadratic(self, d: int) -> List[QuadraticElement]:
        return self._nonzero([QuadraticElement.coerce(c, d) for c in self.coords], lambda v: v.is_zero())

    def functions(self) -> List[RationalFunction]:
        return self._nonzero([RationalFunction.coerce(c) for c in self.coords], lambda v: v.is_zero())


class FSMetricSpec(DomainModel):
    """Fubini–Study pseudo-metric on O(1) induced by a bundle on K^{n+1}"""
    ambient: Bundle


class HeightReport(DomainModel):
    point: List[str]
    metric: str = Field(..., description="Description of the ambient bundle")
    value: float
    coordinate: int = Field(..., description="Index j of the coordinate used for log|x_j|")


class AdditivityReport(DomainModel):
    """h over m₁·O(1) + m₂·O(1) against m₁h₁ + m₂h₂, and the metric-change bound"""
    m1: int
    m2: int
    h1: float
    h2: float
    combined: float
    expected: float
    residual: float
    difference: float = Field(..., description="|h₁ − h₂|")
    distance: Optional[float] = Field(None, description="∫ d_ω(E₁, E₂) dν")
    bound_holds: Optional[bool] = None


class CharacteristicRow(DomainModel):
    r: RationalField
    target: Target = None
    N: Optional[float] = None
    N_k: Optional[float] = Field(None, description="Truncated counting function")
    m: Optional[float] = None
    T: Optional[float] = None
    fs_height: Optional[float] = None
    gap: Optional[float] = Field(None, description="fs_height − T")
    error: Optional[str] = None

    @model_validator(mode="after")
    def _t_is_m_plus_n(self):
        if None not in (self.T, self.m, self.N) and abs(self.T - (self.m + self.N)) > 1e-12 * max(1.0, abs(self.T)):
            raise ValueError("T must equal m + N")
        return self


class CharacteristicReport(DomainModel):
    function: str
    truncation: Optional[int] = None
    metric: ProximityMetric = ProximityMetric.CLASSICAL
    rows: List[CharacteristicRow]


class CartanHeightReport(DomainModel):
    """Family height of [f₀ : f₁] on S_R compared with T(R, f₁/f₀)"""
    point: List[str]
    R: RationalField
    value: Optional[float] = None
    characteristic: Optional[float] = None
    gap: Optional[float] = None
    bound: Optional[float] = Field(None, description="Norm-comparison bound on |gap|")
    reduced: bool = Field(False, description="Representation was made coprime first")
    error: Optional[str] = None


class FamilyHeightReport(DomainModel):
    point: List[str]
    rows: List[CartanHeightReport]
    constant_gap: Optional[bool] = Field(None, description="Gaps agree across the grid within tolerance")


class SectionGapRow(DomainModel):
    R: RationalField
    difference: Optional[float] = Field(None, description="T(R, f; a₁) − T(R, f; a₂)")
    reference: float = Field(..., description="log|c((s′/s)∘f, 0)|")
    gap: Optional[float] = None
    error: Optional[str] = None


class SectionGapReport(DomainModel):
    function: str
    a1: Target = None
    a2: Target = None
    metric: ProximityMetric
    reference: float
    rows: List[SectionGapRow]


class DefectRow(DomainModel):
    r: RationalField
    m: Optional[float] = None
    T: Optional[float] = None
    ratio: Optional[float] = None
    skipped: bool = False
    error: Optional[str] = None


class DefectEstimate(DomainModel):
    """m(r, a)/T(r, f) along a radius grid; the estimate of δ_f(a) is the last ratio"""
    function: str
    target: Target = None
    rows: List[DefectRow]
    limit: Optional[float] = None


class OrderEstimate(DomainModel):
    r: RationalField
    T: float
    order: Optional[float] = Field(None, description="log T / log r")
    growth: float = Field(..., description="T / log r (tends to deg f for rational f)")


class MetricChangeReport(DomainModel):
    """T_φ − T_φ′ at one target against the circle mean of log(|s|_φ′/|s|_φ)∘f"""
    r: RationalField
    target: Target = None
    difference: float
    reference: float
    gap: float


class SumCheck(DomainModel):
    """T(r, f + g) ≤ T(r, f) + T(r, g) + log 2"""
    r: RationalField
    T_sum: float
    T_f: float
    T_g: float
    slack: float = Field(..., description="T(r,f) + T(r,g) + log 2 − T(r,f+g)")
    holds: bool


class CountingBound(DomainModel):
    """N(r, a) − T(r, f) against its first-main-theorem bound"""
    r: RationalField
    target: Target = None
    value: float
    bound: float
    holds: bool
