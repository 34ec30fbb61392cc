"""
Equilibrium point schemas.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator


class Branch(str, Enum):
    L4 = "L4"
    L5 = "L5"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.L4 else -1.0


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    REFINED = "refined"


class EquilibriumPoint(BaseModel):
    """Triangular point with its zero-velocity residual."""

    model_config = ConfigDict(frozen=True)

    x_star: float
    y_star: float
    branch: Branch
    residual_norm: float
    method: Method
    iterations: int = 0

    @model_validator(mode="after")
    def _branch_matches_sign(self) -> "EquilibriumPoint":
        if self.y_star * self.branch.sign <= 0:
            raise ValueError(f"y_star={self.y_star} does not lie on branch {self.branch.value}")
        return self

    @property
    def coordinates(self) -> tuple:
        return (self.x_star, self.y_star)
