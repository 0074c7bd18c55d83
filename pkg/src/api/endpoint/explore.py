import time
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, HTTPException, Request
from pydantic import BaseModel, Field, field_validator

from src.core.errors import Cpg2kitError
from src.core.logger import logger
from src.core.rate_limit import ANALYSIS_LIMIT, limiter
from src.services.analysis_service import AnalysisService

router = APIRouter()


class ExploreRequest(BaseModel):
    """Request model for bounded exploration."""

    spec: str = Field(..., min_length=1, max_length=100000, description="System in cpg2kit-format 1")
    steps: int = Field(4, ge=0, le=64, description="Largest run length to explore")

    @field_validator("spec")
    def validate_spec(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("System text cannot be empty")
        return v


class ExploreResponse(BaseModel):
    configurations: List[Dict[str, Any]]
    edges: List[List[str]]
    config_count: int
    execution_time_ms: Optional[float] = None


def get_services() -> AnalysisService:
    """Dependency injection for services."""
    from src.main import services  # Import here to avoid circular imports

    if services is None:
        raise RuntimeError("Services not initialized")
    return services


@router.post("/explore")
@limiter.limit(ANALYSIS_LIMIT)
async def explore_endpoint(request: Request, payload: ExploreRequest) -> ExploreResponse:
    """Configurations reachable within a number of steps, with the edges among them."""
    logger.info(f"Received explore request: steps={payload.steps}")
    start_time = time.time()
    try:
        service = get_services()
        result = service.explore(payload.spec, payload.steps)
        execution_time = (time.time() - start_time) * 1000
        return ExploreResponse(
            configurations=service.configurations(result),
            edges=[[str(c), str(label), str(d)] for c, label, d in result.edges],
            config_count=len(result),
            execution_time_ms=round(execution_time, 2),
        )
    except Cpg2kitError as e:
        logger.warning(f"Rejected explore request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Exploration failed: {e}")
        raise HTTPException(status_code=500, detail=f"Exploration failed: {str(e)}")
