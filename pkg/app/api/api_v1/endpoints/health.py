"""
Health Check Endpoints
API endpoints for monitoring application health and status.
"""

import logging
from datetime import datetime, timezone
from typing import Any, Dict

import numpy as np
import scipy
from fastapi import APIRouter

from app.core.config import settings

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/")
def health_check() -> Dict[str, Any]:
    """
    Basic health check endpoint.
    Returns current application status and the numerical defaults in effect.
    """
    return {
        "status": "healthy",
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "environment": settings.ENVIRONMENT,
        "version": settings.PROJECT_VERSION,
        "debug": settings.DEBUG,
        "numerics": {
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "newton_tol": settings.NEWTON_TOL,
            "marginal_tol": settings.MARGINAL_TOL,
            "integrator_tol": settings.INTEGRATOR_TOL,
        },
    }
