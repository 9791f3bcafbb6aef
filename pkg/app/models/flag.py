from typing import List, Literal, Union

from pydantic import Field, model_validator

from app.config import settings
from app.models.base import DomainModel
from app.models.bundle import SubspaceBasis


class EnumConfig(DomainModel):
    """Bounds for the subspace enumeration behind μ_max on lattice-hermitian bundles"""
    bound: int = Field(default_factory=lambda: settings.enum_bound, ge=1,
                       description="Sup-norm cap on generating vectors")
    max_dim: int = Field(default_factory=lambda: settings.enum_max_dim, ge=1, le=6,
                         description="Largest ambient rank enumerated")
    max_candidates: int = Field(default_factory=lambda: settings.enum_max_candidates, ge=1,
                                description="Cap on candidate subspaces evaluated")


class Enumerated(DomainModel):
    """Certificate relative to all subspaces spanned by vectors of sup-norm ≤ bound"""
    enumerated: int = Field(..., ge=1)


Certification = Union[Literal["exact-split"], Enumerated]


class SlopeResult(DomainModel):
    """μ_max together with the greatest maximizer and every enumerated maximizer"""
    value: float
    basis: SubspaceBasis
    maximizers: List[SubspaceBasis] = Field(default=[])
    candidates: int = Field(0, description="Distinct saturated subspaces evaluated")
    certification: Certification


class Flag(DomainModel):
    """
    Harder–Narasimhan flag 0 ⊊ E₁ ⊊ ... ⊊ E_n = E

    degrees[i] and slopes[i] belong to the subquotient E_{i+1}/E_i.
    """
    steps: List[SubspaceBasis] = Field(..., min_length=1)
    slopes: List[float]
    degrees: List[float]
    semistable: List[bool] = Field(..., description="Per-subquotient verdict against the enumerated subspaces")
    certification: Certification

    @model_validator(mode="after")
    def _shape(self):
        dims = [s.dim for s in self.steps]
        if any(a >= b for a, b in zip(dims, dims[1:])):
            raise ValueError(f"flag dimensions must increase strictly (got {dims})")
        if dims[-1] != self.steps[-1].ambient:
            raise ValueError("flag must end at the full space")
        if not (len(self.slopes) == len(self.degrees) == len(self.semistable) == len(self.steps)):
            raise ValueError("one slope, degree and verdict per step")
        if any(a <= b for a, b in zip(self.slopes, self.slopes[1:])):
            raise ValueError(f"flag slopes must decrease strictly (got {self.slopes})")
        return self

    @property
    def dims(self) -> List[int]:
        return [s.dim for s in self.steps]


class SubquotientReport(DomainModel):
    """Additivity of degrees along a flag"""
    degrees: List[float]
    total: float
    degree: float = Field(..., description="deg(E)")
    residual: float = Field(..., description="Σ deg(E_i/E_{i-1}) − deg(E)")
