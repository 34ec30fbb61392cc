"""
Stability report schemas.
"""

from enum import Enum
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.equilibrium import EquilibriumPoint


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class ComplexValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    re: float
    im: float

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    @classmethod
    def list_of(cls, values: Sequence[complex]) -> List["ComplexValue"]:
        return [cls.from_complex(v) for v in values]

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


class Resonance(BaseModel):
    """Integer relation k1 w1 + k2 w2 ~ 0 of order |k1| + |k2|."""

    model_config = ConfigDict(frozen=True)

    k1: int
    k2: int
    residual: float
    exact: bool

    @property
    def order(self) -> int:
        return abs(self.k1) + abs(self.k2)

    @property
    def pair(self) -> tuple:
        return (self.k1, self.k2)


class StabilityReport(BaseModel):
    """
    Linear stability of a triangular point.

    `verdict` follows the even characteristic quartic built from E, F, G;
    `eom_eigenvalues` come from the exact velocity-form linearization and
    carry the drag-induced real parts the quartic cannot represent.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    params: Dict[str, float]
    equilibrium: EquilibriumPoint
    model: str = "quartic"
    E: float
    F: float
    G: float
    quartic: List[float]
    roots: List[ComplexValue]
    omega1: Optional[float] = None
    omega2: Optional[float] = None
    discriminant_D: float = Field(serialization_alias="D")
    resonances: List[Resonance] = []
    verdict: Verdict
    eom_eigenvalues: List[ComplexValue] = []
    eom_max_real_part: float = 0.0
    hamiltonian_eigenvalues: List[ComplexValue] = []

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)
