"""
Series audit schemas.
"""

from typing import Dict, List

from pydantic import BaseModel, ConfigDict

from app.schemas.equilibrium import EquilibriumPoint


class AuditEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    printed: float
    oracle: float
    abs_diff: float
    rel_diff: float
    match: bool


class SeriesAudit(BaseModel):
    """Printed expansion coefficients diffed against the jet expansion."""

    model_config = ConfigDict(frozen=True)

    params: Dict[str, float]
    equilibrium: EquilibriumPoint
    abs_tol: float
    rel_tol: float
    entries: Dict[str, AuditEntry]
    coefficients: Dict[str, AuditEntry]
    matching: List[str]
    mismatching: List[str]
    missing_from_printed: List[str]
    untranscribed: List[str]

    @property
    def mismatch_count(self) -> int:
        return len(self.mismatching) + sum(not e.match for e in self.coefficients.values())

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
