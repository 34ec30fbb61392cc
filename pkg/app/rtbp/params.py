"""
Problem parameters.

Dimensionless units: unit distance between the primaries, unit total mass,
unperturbed unit mean motion. The bigger primary radiates (factor q1), the
smaller one is oblate (A2) and the Poynting-Robertson drag enters through W1.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.exceptions import ParameterError

logger = logging.getLogger(__name__)

# Radiation-to-gravity coefficient for grain radius [cm] times density [g/cm^3].
RADIATION_CONSTANT = 5.6e-5


def mean_motion(a2: float) -> float:
    """Perturbed mean motion n = sqrt(1 + 3/2 A2)."""
    if a2 < 0:
        raise ParameterError(f"a2 out of range: must be >= 0, got {a2}")
    return float(np.sqrt(1.0 + 1.5 * a2))


def radiation_factor(
    grain_radius: float, grain_density: float, efficiency: float = 1.0
) -> float:
    """
    Radiation factor q1 = 1 - (5.6e-5 / (radius * density)) * efficiency.

    The printed source formula is typographically ambiguous about where the
    efficiency factor sits; this grouping is the one adopted throughout.
    """
    if grain_radius <= 0 or grain_density <= 0:
        raise ParameterError("grain radius and density must be > 0")
    if efficiency < 0:
        raise ParameterError("efficiency must be >= 0")
    q1 = 1.0 - RADIATION_CONSTANT / (grain_radius * grain_density) * efficiency
    if q1 <= 0:
        raise ParameterError(f"grain parameters give nonpositive q (q={q1:.6g})")
    return q1


class SystemParams(BaseModel):
    """Validated parameter bundle with eagerly derived n and delta."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mu: float = Field(gt=0.0, le=0.5, description="mass ratio m2/(m1+m2)")
    q1: float = Field(gt=0.0, le=1.0, description="radiation factor of the bigger primary")
    a2: float = Field(default=0.0, ge=0.0, description="oblateness coefficient of the smaller primary")
    w1: float = Field(default=0.0, ge=0.0, description="Poynting-Robertson drag parameter")
    n: float = Field(default=1.0, description="perturbed mean motion (derived)")
    delta: float = Field(default=1.0, description="q1 ** (1/3) (derived)")

    @model_validator(mode="before")
    @classmethod
    def _derive(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            a2 = data.get("a2", 0.0)
            q1 = data.get("q1")
            if isinstance(a2, (int, float)) and a2 >= 0:
                data["n"] = float(np.sqrt(1.0 + 1.5 * a2))
            if isinstance(q1, (int, float)) and q1 > 0:
                data["delta"] = float(np.cbrt(q1))
        return data

    def as_dict(self) -> Dict[str, float]:
        return self.model_dump()

    def replace(self, **changes: float) -> "SystemParams":
        """Re-validated copy with some of mu, q1, a2, w1 changed."""
        values = {"mu": self.mu, "q1": self.q1, "a2": self.a2, "w1": self.w1}
        values.update(changes)
        return make_params(**values)


def make_params(
    mu: float,
    q1: float = 1.0,
    a2: float = 0.0,
    w1: Optional[float] = None,
    cd: Optional[float] = None,
) -> SystemParams:
    """
    Build SystemParams from either a direct W1 or a light-speed constant Cd.

    With Cd the drag parameter is W1 = (1 - mu)(1 - q1) / Cd. Both routes
    construct the model identically, so they agree bit for bit.
    """
    if w1 is not None and cd is not None:
        raise ParameterError("give either w1 or cd, not both")
    if cd is not None:
        if not cd > 0:
            raise ParameterError(f"cd out of range: must be > 0, got {cd}")
        w1 = (1.0 - mu) * (1.0 - q1) / cd
    if w1 is None:
        w1 = 0.0

    try:
        params = SystemParams(mu=mu, q1=q1, a2=a2, w1=w1)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = error["loc"][0] if error["loc"] else "params"
        raise ParameterError(f"{field} out of range: {error['msg']}") from exc

    logger.debug(f"Parameters: {params.as_dict()}")
    return params
