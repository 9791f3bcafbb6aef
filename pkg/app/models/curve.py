from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import Field, field_validator, model_validator

from app.config import settings
from app.models.base import DomainModel
from app.utils.arith import RationalField, is_squarefree


class IntegrationConfig(DomainModel):
    """Boundary quadrature settings for a Nevanlinna curve"""
    nodes: int = Field(default_factory=lambda: settings.nodes, description="Trapezoid nodes on the circle")
    clearance: float = Field(default_factory=lambda: settings.clearance, description="Minimum distance of zeros/poles to the circle")
    tolerance: float = Field(default_factory=lambda: settings.tolerance, description="Accepted quadrature error")

    @model_validator(mode="after")
    def _check(self):
        validate_integration(self.nodes, self.clearance, self.tolerance)
        return self


def validate_integration(nodes: int, clearance: float, tolerance: float) -> None:
    if nodes < 16 or nodes & (nodes - 1):
        raise ValueError(f"nodes must be a power of two and at least 16 (got {nodes})")
    if not clearance > 0:
        raise ValueError("clearance must be positive")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")


class RationalCurve(DomainModel):
    """ℚ with one place per prime and the archimedean place, all of mass 1"""
    curve: Literal["rational"] = "rational"

    @property
    def label(self) -> str:
        return "rational"


class QuadraticCurve(DomainModel):
    """ℚ(√d) with the pushforward extension measure"""
    curve: Literal["quadratic"] = "quadratic"
    d: int = Field(..., description="Squarefree integer, d ≠ 0, 1")

    @field_validator("d")
    @classmethod
    def _squarefree(cls, d: int) -> int:
        if d in (0, 1) or not is_squarefree(d):
            raise ValueError(f"d must be squarefree and different from 0 and 1 (got {d})")
        return d

    @property
    def label(self) -> str:
        return f"quadratic(d={self.d})"


class NevanlinnaCurve(DomainModel):
    """S_R: germs of meromorphic functions on the closed disc of radius R"""
    curve: Literal["nevanlinna"] = "nevanlinna"
    R: RationalField = Field(..., description="Radius of the disc")
    nodes: int = Field(default_factory=lambda: settings.nodes)
    clearance: float = Field(default_factory=lambda: settings.clearance)
    tolerance: float = Field(default_factory=lambda: settings.tolerance)

    @model_validator(mode="after")
    def _check(self):
        if self.R <= 0:
            raise ValueError("R must be positive")
        validate_integration(self.nodes, self.clearance, self.tolerance)
        return self

    @property
    def integration(self) -> IntegrationConfig:
        return IntegrationConfig(nodes=self.nodes, clearance=self.clearance, tolerance=self.tolerance)

    def with_radius(self, R) -> "NevanlinnaCurve":
        return NevanlinnaCurve(R=R, nodes=self.nodes, clearance=self.clearance, tolerance=self.tolerance)

    def with_nodes(self, nodes: int) -> "NevanlinnaCurve":
        return NevanlinnaCurve(R=self.R, nodes=nodes, clearance=self.clearance, tolerance=self.tolerance)

    @property
    def label(self) -> str:
        return f"nevanlinna(R={self.R})"


AdelicCurve = Annotated[Union[RationalCurve, QuadraticCurve, NevanlinnaCurve], Field(discriminator="curve")]


class LocalTerm(DomainModel):
    """One summand log|f|_ω · ν({ω}) of a defect integral"""
    place: str = Field(..., description="Place key")
    weight: float = Field(..., description="ν({ω})")
    log_value: float = Field(..., description="log|f|_ω")


class DefectReport(DomainModel):
    """d_S(f) split into its discrete and boundary parts"""
    discrete_part: float
    boundary_part: float
    total: float
    reference: Optional[float] = Field(None, description="Exact value the total should match")
    gap: Optional[float] = Field(None, description="total − reference")
    terms: List[LocalTerm] = Field(default=[], description="Discrete contributions")

    @model_validator(mode="after")
    def _total(self):
        if abs(self.total - (self.discrete_part + self.boundary_part)) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError("total must equal discrete_part + boundary_part")
        return self


class ExactProductReport(DomainModel):
    """Product formula for q ∈ ℚ^× by prime-exponent bookkeeping"""
    value: RationalField
    exponents: Dict[int, int] = Field(..., description="v_p(q) for every prime in the support")
    archimedean: RationalField = Field(..., description="|q|_∞")
    product: RationalField = Field(..., description="|q|_∞ · Π_p |q|_p, equal to 1")
    exact: bool
    numeric_total: float


class QuadraticDefectReport(DomainModel):
    d: int
    element: str
    total: float
    norm: RationalField = Field(..., description="N(f) = a² − d b²")
    norm_defect: float = Field(..., description="(1/2)·d_ℚ(N(f))")
    terms: List[LocalTerm] = Field(default=[])


class FamilyDefectRow(DomainModel):
    R: RationalField
    total: Optional[float] = None
    reference: Optional[float] = None
    gap: Optional[float] = None
    error: Optional[str] = None


class FamilyDefectReport(DomainModel):
    """R ↦ d_{S_R}(f), the witness of asymptotic properness w.r.t. ∼_{O(1)}"""
    function: str
    reference: float = Field(..., description="log|c(f,0)|")
    rows: List[FamilyDefectRow]
    spread: Optional[float] = Field(None, description="max − min of the computed totals")
    asymptotically_proper: bool = Field(..., description="Totals agree with one constant within tolerance")


class ConvergenceReport(DomainModel):
    nodes: int
    gap: float
    gap_doubled: float
    ratio: Optional[float] = Field(None, description="|gap| / |gap_doubled|; None when both vanish")
