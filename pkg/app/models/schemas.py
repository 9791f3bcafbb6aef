from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BeforeValidator, Field, model_validator

from app.config import settings
from app.models.base import DomainModel
from app.models.bundle import ArchimedeanShape, Bundle
from app.models.curve import AdelicCurve, IntegrationConfig, NevanlinnaCurve, QuadraticCurve, RationalCurve
from app.models.height import ProximityMetric
from app.utils.arith import RationalField
from app.utils.polynomial import RationalFunctionField


def _as_text(values: Any):
    if not isinstance(values, (list, tuple)):
        raise ValueError("expected a list")
    return [v if isinstance(v, str) else str(v) for v in values]


Coordinates = Annotated[List[str], BeforeValidator(_as_text)]

ProperCurve = Annotated[Union[RationalCurve, QuadraticCurve], Field(discriminator="curve")]


def _inject_curve(data: Any, *fields: str) -> Any:
    """Bundle blocks without their own curve inherit the descriptor's curve block"""
    if not isinstance(data, dict) or "curve" not in data:
        return data
    data = dict(data)
    for name in fields:
        block = data.get(name)
        if isinstance(block, dict) and block.get("kind", "diagonal") == "diagonal" and "curve" not in block:
            data[name] = {**block, "curve": data["curve"]}
    return data


class _Descriptor(DomainModel):
    integration: Optional[IntegrationConfig] = Field(None, description="Overrides the curve's quadrature settings")

    def template(self) -> Optional[NevanlinnaCurve]:
        """The Nevanlinna curve with the integration block applied"""
        curve = getattr(self, "curve", None)
        if not isinstance(curve, NevanlinnaCurve):
            return None
        if self.integration is None:
            return curve
        return NevanlinnaCurve(R=curve.R, nodes=self.integration.nodes,
                               clearance=self.integration.clearance, tolerance=self.integration.tolerance)


# Request descriptors

class CheckProductDescriptor(_Descriptor):
    """Product formula for one element of ℚ or ℚ(√d)"""
    command: Literal["check-product"]
    curve: ProperCurve = Field(default_factory=RationalCurve)
    value: str = Field(..., description="Element, e.g. \"6/5\" or \"(1+sqrt(5))/2\"")


class JensenDescriptor(_Descriptor):
    """Defect of a rational function on S_R, optionally along a radius grid"""
    command: Literal["jensen"]
    curve: NevanlinnaCurve
    function: RationalFunctionField
    radii: Optional[List[RationalField]] = Field(None, description="Radius grid (CSV output)")
    convergence: bool = Field(False, description="Also report the gap at doubled nodes")


class DegreeDescriptor(_Descriptor):
    """Arakelov degree of a bundle, with optional element, subspace and comparison bundle"""
    command: Literal["degree"]
    curve: AdelicCurve = Field(default_factory=RationalCurve)
    bundle: Bundle
    element: Optional[Coordinates] = Field(None, description="Vector whose degree is reported")
    subspace: Optional[List[List[int]]] = Field(None, description="Spanning vectors (rows) of a subspace")
    other: Optional[Bundle] = Field(None, description="Bundle compared through tensor product and distance")

    @model_validator(mode="before")
    @classmethod
    def _curves(cls, data):
        return _inject_curve(data, "bundle", "other")


class HNDescriptor(_Descriptor):
    """Harder–Narasimhan flag of a bundle"""
    command: Literal["hn"]
    curve: AdelicCurve = Field(default_factory=RationalCurve)
    bundle: Bundle
    bound: int = Field(default_factory=lambda: settings.enum_bound, ge=1, description="Enumeration bound B")
    max_candidates: int = Field(default_factory=lambda: settings.enum_max_candidates, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _curves(cls, data):
        return _inject_curve(data, "bundle")


class HeightDescriptor(_Descriptor):
    """Height of a closed point through the Fubini–Study metric of `metric`"""
    command: Literal["height"]
    curve: ProperCurve = Field(default_factory=RationalCurve)
    point: Coordinates = Field(..., min_length=2)
    metric: Bundle
    compare: Optional[Bundle] = Field(None, description="Second metric for the additivity and distance checks")
    m1: int = Field(1, ge=0)
    m2: int = Field(1, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _curves(cls, data):
        return _inject_curve(data, "metric", "compare")


class NevanlinnaDescriptor(_Descriptor):
    """Characteristic table, section-change gaps or defect ratios along a radius grid"""
    command: Literal["nevanlinna"]
    curve: NevanlinnaCurve
    function: RationalFunctionField
    mode: Literal["characteristic", "fmt", "defect"] = "characteristic"
    radii: Optional[List[RationalField]] = Field(None, description="Radius grid; defaults to the curve's R")
    targets: Coordinates = Field(default=["inf"], description="Targets a for the characteristic table")
    truncation: Optional[int] = Field(None, ge=1, description="k for N_k")
    metric: Optional[ProximityMetric] = Field(None, description="Proximity metric (mode default when omitted)")
    a1: str = "0"
    a2: str = "inf"
    target: str = Field("inf", description="Target of the defect ratios")


class FamilyHeightDescriptor(_Descriptor):
    """Height of the holomorphic curve [f₀ : f₁] along a radius grid"""
    command: Literal["family-height"]
    curve: NevanlinnaCurve
    point: Coordinates = Field(..., min_length=2, max_length=2)
    shape: ArchimedeanShape = ArchimedeanShape.MAX
    radii: Optional[List[RationalField]] = None


class SplitPlacesDescriptor(_Descriptor):
    """Places of ℚ(√d) above given places of ℚ"""
    command: Literal["split-places"]
    curve: QuadraticCurve
    bases: List[Union[int, str]] = Field(default=["inf"], description="Primes or \"inf\"")


ProblemDescriptor = Annotated[
    Union[
        CheckProductDescriptor,
        JensenDescriptor,
        DegreeDescriptor,
        HNDescriptor,
        HeightDescriptor,
        NevanlinnaDescriptor,
        FamilyHeightDescriptor,
        SplitPlacesDescriptor,
    ],
    Field(discriminator="command"),
]


# Response schemas

class Table(DomainModel):
    """CSV hand-off for grid commands"""
    header: List[str]
    rows: List[List[Any]]


class Report(DomainModel):
    """Deterministic result of one descriptor"""
    command: str
    inputs: Dict[str, Any] = Field(..., description="Echo of the validated descriptor")
    results: Dict[str, Any]
    warnings: List[str] = Field(default=[])
    version: str = Field(default_factory=lambda: settings.app_version)
    table: Optional[Table] = Field(None, description="Rows for CSV output")
