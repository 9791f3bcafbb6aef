from typing import Optional

from pydantic import Field

from app.models.base import DomainModel
from app.utils.arith import GaussianField


class ComplexRoot(DomainModel):
    """Root of a polynomial with its exact multiplicity"""
    real: float = Field(..., description="Real part of the located root")
    imag: float = Field(..., description="Imaginary part of the located root")
    multiplicity: int = Field(..., ge=1, description="Multiplicity from the squarefree decomposition")
    exact: Optional[GaussianField] = Field(None, description="Exact value when the root is a Gaussian rational")

    @property
    def location(self) -> complex:
        return complex(self.real, self.imag)

    def __abs__(self) -> float:
        return abs(self.location)
