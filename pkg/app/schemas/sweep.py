"""
Parameter-grid schemas for stability maps.
"""

import itertools
import re
from typing import Dict, Iterator, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.exceptions import ParameterError

AxisName = Literal["mu", "q1", "a2", "w1"]
AXIS_NAMES = ("mu", "q1", "a2", "w1")
SWEEP_COLUMNS = ["mu", "q1", "a2", "w1", "verdict", "D", "omega1", "omega2", "n_resonances"]

_AXIS_PATTERN = re.compile(r"^\s*(\w+)\s*=\s*([^:]+):([^:]+):([^:]+)\s*$")


class GridAxis(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: AxisName
    min: float
    max: float
    count: int = Field(ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> "GridAxis":
        if self.min > self.max:
            raise ValueError(f"axis {self.name}: min {self.min} exceeds max {self.max}")
        return self

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.count)


def parse_axis(text: str) -> GridAxis:
    """Parse 'name=min:max:count', e.g. 'mu=0.01:0.05:5'."""
    match = _AXIS_PATTERN.match(text)
    if match is None:
        raise ParameterError(f"grid out of range: expected name=min:max:count, got {text!r}")
    name, lo, hi, count = match.groups()
    try:
        return GridAxis(name=name, min=float(lo), max=float(hi), count=int(count))
    except (ValueError, ValidationError) as exc:
        raise ParameterError(f"grid out of range: {text!r}: {exc}") from exc


class GridSpec(BaseModel):
    """Scanned axes in declaration order plus fixed values for the rest."""

    model_config = ConfigDict(frozen=True)

    axes: List[GridAxis] = Field(min_length=1)
    fixed: Dict[AxisName, float] = {"q1": 1.0, "a2": 0.0, "w1": 0.0}

    @model_validator(mode="after")
    def _disjoint(self) -> "GridSpec":
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"axes must be disjoint, got {names}")
        missing = set(AXIS_NAMES) - set(names) - set(self.fixed)
        if missing:
            raise ValueError(f"no value for unscanned axes {sorted(missing)}")
        return self

    @property
    def size(self) -> int:
        return int(np.prod([axis.count for axis in self.axes]))

    def cells(self) -> Iterator[Dict[str, float]]:
        """Row-major over the axes in declaration order."""
        names = [axis.name for axis in self.axes]
        base = {k: v for k, v in self.fixed.items() if k not in names}
        for combo in itertools.product(*(axis.values() for axis in self.axes)):
            cell = dict(base)
            cell.update({name: float(v) for name, v in zip(names, combo)})
            yield {k: cell[k] for k in AXIS_NAMES}


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    q1: float
    a2: float
    w1: float
    verdict: str
    D: Optional[float] = None
    omega1: Optional[float] = None
    omega2: Optional[float] = None
    n_resonances: Optional[int] = None
    error: Optional[str] = None


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid: GridSpec
    rows: List[SweepRow]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([row.model_dump() for row in self.rows], columns=SWEEP_COLUMNS)
        return frame.astype({"n_resonances": "Int64"})

    def to_csv(self, path_or_buf=None) -> Optional[str]:
        return self.to_frame().to_csv(
            path_or_buf, float_format="%.17g", lineterminator="\n", index=False
        )
