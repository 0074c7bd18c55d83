import time
from typing import List, Optional

from fastapi import APIRouter, HTTPException, Request
from pydantic import BaseModel, Field, field_validator

from src.core.errors import Cpg2kitError
from src.core.logger import logger
from src.core.rate_limit import ANALYSIS_LIMIT, limiter
from src.services.analysis_service import AnalysisService

router = APIRouter()

KINDS = ("return", "loop", "high_loop", "low_loop")


class CountRequest(BaseModel):
    """Request model for return and loop counting."""

    spec: str = Field(..., min_length=1, max_length=100000, description="System in cpg2kit-format 1")
    stack: str = Field(..., min_length=1, description="Stack such as [⊥ a]:[⊥ (b,2,1)]")
    threshold: int = Field(1, ge=1, le=64, description="Counts are cut at this value")
    kind: str = Field("return", description="One of return, loop, high_loop, low_loop")

    @field_validator("kind")
    def validate_kind(cls, v: str) -> str:
        if v not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}")
        return v


class CountResponse(BaseModel):
    kind: str
    threshold: int
    exact: bool
    table: List[List]
    execution_time_ms: Optional[float] = None


def get_services() -> AnalysisService:
    """Dependency injection for services."""
    from src.main import services  # Import here to avoid circular imports

    if services is None:
        raise RuntimeError("Services not initialized")
    return services


@router.post("/returns")
@limiter.limit(ANALYSIS_LIMIT)
async def returns_endpoint(request: Request, payload: CountRequest) -> CountResponse:
    """Numbers of returns (or loops) from each state to each state, up to the threshold."""
    logger.info(f"Received count request: kind={payload.kind}, threshold={payload.threshold}")
    start_time = time.time()
    try:
        service = get_services()
        if payload.kind == "return":
            counts = service.count_returns(payload.spec, payload.stack, payload.threshold)
        else:
            counts = service.count_loops(payload.spec, payload.stack, payload.threshold, payload.kind)
        execution_time = (time.time() - start_time) * 1000
        return CountResponse(
            kind=payload.kind,
            threshold=payload.threshold,
            exact=service.exact(payload.spec, payload.threshold),
            table=counts.to_json()["table"],
            execution_time_ms=round(execution_time, 2),
        )
    except Cpg2kitError as e:
        logger.warning(f"Rejected count request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Counting failed: {e}")
        raise HTTPException(status_code=500, detail=f"Counting failed: {str(e)}")
