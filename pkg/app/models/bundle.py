import math
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional, Union

import sympy
from pydantic import BeforeValidator, Field, field_validator, model_validator

from app.exceptions import InfeasibleInputError
from app.models.base import DomainModel
from app.models.place import QuadraticPlace, parse_place_key
from app.models.curve import AdelicCurve, NevanlinnaCurve, QuadraticCurve, RationalCurve
from app.utils.arith import RationalField
from app.utils.lattice import determinant, is_positive_definite, minors_gcd, rank
from app.utils.polynomial import RationalFunctionField


class ArchimedeanShape(str, Enum):
    """Shape of the norm at archimedean places"""
    MAX = "max"
    L2 = "l2"


def _log_weight(value) -> float:
    """Accept floats or closed-form strings such as "-log(2)" """
    if isinstance(value, str):
        try:
            value = float(sympy.sympify(value).evalf())
        except (sympy.SympifyError, TypeError) as e:
            raise ValueError(f"Cannot read log-weight '{value}'") from e
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("log-weights must be finite")
    return value


LogWeight = Annotated[float, BeforeValidator(_log_weight)]


class NevanlinnaWeight(DomainModel):
    """‖e_i‖_ω = |g|_ω at interior places and e^{log_scale}·|g| on the boundary"""
    function: RationalFunctionField = Field("1", description="Rational function g_i")
    log_scale: LogWeight = Field(0.0, description="Archimedean scalar, as a logarithm")

    @field_validator("function")
    @classmethod
    def _nonzero(cls, g):
        if g.is_zero():
            raise ValueError("weight function must be nonzero")
        return g


PlaceWeights = Dict[str, LogWeight]


class DiagonalPNF(DomainModel):
    """
    Pseudo-norm family diagonal in the standard basis

    For RationalCurve/QuadraticCurve each weight is a map place-key → λ_i(ω)
    (zero at unlisted places). For NevanlinnaCurve each weight is a
    NevanlinnaWeight.
    """
    kind: Literal["diagonal"] = "diagonal"
    curve: AdelicCurve = Field(default_factory=RationalCurve)
    weights: List[Annotated[Union[PlaceWeights, NevanlinnaWeight], Field(union_mode="left_to_right")]] = \
        Field(..., min_length=1)
    shape: ArchimedeanShape = Field(ArchimedeanShape.L2, description="Archimedean shape (max or l2)")

    @model_validator(mode="before")
    @classmethod
    def _read_nevanlinna_weights(cls, data):
        # {} and {"log_scale": ...} also parse as place maps
        if not isinstance(data, dict) or not isinstance(data.get("weights"), list):
            return data
        curve = data.get("curve")
        tag = curve.get("curve") if isinstance(curve, dict) else getattr(curve, "curve", None)
        if tag != "nevanlinna":
            return data
        weights = [NevanlinnaWeight.model_validate(w) if isinstance(w, dict) else w for w in data["weights"]]
        return {**data, "weights": weights}

    @model_validator(mode="after")
    def _weights_match_curve(self):
        nevanlinna = isinstance(self.curve, NevanlinnaCurve)
        for i, w in enumerate(self.weights):
            if nevanlinna and not isinstance(w, NevanlinnaWeight):
                raise ValueError(f"weights[{i}] must be a Nevanlinna weight on a Nevanlinna curve")
            if not nevanlinna:
                if isinstance(w, NevanlinnaWeight):
                    raise ValueError(f"weights[{i}] must map place keys to log-weights")
                for key in w:
                    place = parse_place_key(key)
                    if isinstance(self.curve, RationalCurve) and isinstance(place, QuadraticPlace):
                        raise ValueError(f"place {key} does not belong to the rational curve")
                    if isinstance(self.curve, QuadraticCurve) and \
                            not (isinstance(place, QuadraticPlace) and place.d == self.curve.d):
                        raise ValueError(f"place {key} does not belong to {self.curve.label}")
        return self

    @property
    def rank(self) -> int:
        return len(self.weights)

    @classmethod
    def from_degrees(cls, degrees: List[float], shape: ArchimedeanShape = ArchimedeanShape.L2) -> "DiagonalPNF":
        """Diagonal bundle on ℚ with line degrees `degrees` carried by the archimedean place"""
        return cls(curve=RationalCurve(), weights=[{"inf": -float(a)} for a in degrees], shape=shape)


class LatticeHermitianBundle(DomainModel):
    """
    Hermitian adelic vector bundle over ℚ: lattice M·ℤⁿ at every finite
    place and the ℓ² norm with Gram matrix G at the archimedean place
    """
    kind: Literal["lattice-hermitian"] = "lattice-hermitian"
    curve: AdelicCurve = Field(default_factory=RationalCurve)
    lattice_basis: List[List[RationalField]] = Field(..., description="Columns span the lattice")
    gram: List[List[RationalField]] = Field(..., description="Symmetric positive-definite Gram matrix")

    @model_validator(mode="after")
    def _check(self):
        if not isinstance(self.curve, RationalCurve):
            raise ValueError("lattice-hermitian bundles are defined over the rational curve only")
        n = len(self.lattice_basis)
        if n == 0:
            raise ValueError("rank must be positive")
        for name, matrix in (("lattice_basis", self.lattice_basis), ("gram", self.gram)):
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ValueError(f"{name} must be a {n}x{n} matrix")
        if determinant(self.lattice_basis) == 0:
            raise InfeasibleInputError("lattice basis is singular (det M = 0)")
        if not is_positive_definite(self.gram):
            raise InfeasibleInputError("Gram matrix is not symmetric positive definite")
        return self

    @property
    def rank(self) -> int:
        return len(self.lattice_basis)

    @classmethod
    def standard(cls, n: int) -> "LatticeHermitianBundle":
        eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls(lattice_basis=eye, gram=eye)


Bundle = Annotated[Union[DiagonalPNF, LatticeHermitianBundle], Field(discriminator="kind")]


class SubspaceBasis(DomainModel):
    """Integer n×k matrix whose columns span a subspace, in lattice coordinates"""
    matrix: List[List[int]] = Field(..., description="n rows, k columns")
    saturated: bool = Field(False, description="gcd of the k×k minors is 1")

    @model_validator(mode="before")
    @classmethod
    def _saturation_flag(cls, data):
        if isinstance(data, dict) and "matrix" in data:
            matrix = data["matrix"]
            if matrix and matrix[0] and rank(matrix) == len(matrix[0]):
                data = {**data, "saturated": minors_gcd(matrix) == 1}
        return data

    @model_validator(mode="after")
    def _full_rank(self):
        if not self.matrix or not self.matrix[0]:
            raise ValueError("subspace basis must have at least one column")
        if any(len(row) != len(self.matrix[0]) for row in self.matrix):
            raise ValueError("ragged subspace basis")
        if rank(self.matrix) != self.dim:
            raise ValueError("subspace basis is rank-deficient")
        return self

    @classmethod
    def from_vectors(cls, vectors: List[List[int]]) -> "SubspaceBasis":
        """Build from spanning vectors given as rows"""
        return cls(matrix=[list(col) for col in zip(*vectors)])

    @property
    def ambient(self) -> int:
        return len(self.matrix)

    @property
    def dim(self) -> int:
        return len(self.matrix[0])

    def vectors(self) -> List[List[int]]:
        return [list(col) for col in zip(*self.matrix)]


class RestrictionResult(DomainModel):
    """Sub or quotient bundle together with the basis actually used"""
    bundle: Bundle
    basis: SubspaceBasis
    auto_saturated: bool = Field(False, description="Input basis was replaced by its saturation")


class DominanceWitness(DomainModel):
    """Model family dominating a bundle, with the places where the two differ"""
    model: str = Field(..., description="Description of the model pseudo-norm family")
    places: List[str] = Field(default=[], description="Places where the bundle differs from the model")
    distance_integral: float = Field(..., description="∫ d_ω(ξ, model) dν")


class ElementDegreeReport(DomainModel):
    """Arakelov degree of an element, with the stated closed form it is compared against"""
    value: float
    expected: Optional[float] = Field(None, description="−log|c(f,0)| − log‖e‖ (definitional unwinding)")
    stated: Optional[float] = Field(None, description="T(R,f) − log‖e‖")
    residual_expected: Optional[float] = None
    residual_stated: Optional[float] = None
