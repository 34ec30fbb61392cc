"""
Response envelope shared by the stability endpoints.
"""

from typing import Dict, Generic, Optional, TypeVar

from pydantic import BaseModel, ConfigDict

DataType = TypeVar("DataType")


class ResponseModel(BaseModel, Generic[DataType]):
    """
    Outcome, summary message and payload of one computation, with the
    validated parameters it ran on (None when no single parameter set applies).
    """

    model_config = ConfigDict(frozen=True)

    success: bool = True
    message: str
    params: Optional[Dict[str, float]] = None
    data: Optional[DataType] = None
    error: Optional[str] = None
