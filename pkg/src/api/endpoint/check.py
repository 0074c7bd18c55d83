import time
from typing import Optional

from fastapi import APIRouter, HTTPException, Request
from pydantic import BaseModel, Field, field_validator

from src.core.errors import Cpg2kitError
from src.core.logger import logger
from src.core.rate_limit import ANALYSIS_LIMIT, limiter
from src.services.analysis_service import AnalysisService

router = APIRouter()


class CheckRequest(BaseModel):
    """Request model for first-order model checking."""

    spec: str = Field(..., min_length=1, max_length=100000, description="System in cpg2kit-format 1")
    formula: str = Field(..., min_length=1, max_length=4000, description="Sentence in prefix syntax")
    bound: Optional[int] = Field(None, ge=0, le=32, description="Encoding depth for reachability atoms")
    npt: bool = Field(False, description="Check on the nested pushdown tree of a level-1 system")

    @field_validator("formula")
    def validate_formula(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("Formula cannot be empty")
        return v.strip()


class CheckResponse(BaseModel):
    value: bool
    exactness: str
    conclusive: bool
    bound: Optional[int] = None
    execution_time_ms: Optional[float] = None


def get_services() -> AnalysisService:
    """Dependency injection for services."""
    from src.main import services  # Import here to avoid circular imports

    if services is None:
        raise RuntimeError("Services not initialized")
    return services


@router.post("/check")
@limiter.limit(ANALYSIS_LIMIT)
async def check_endpoint(request: Request, payload: CheckRequest) -> CheckResponse:
    """Decide a sentence on the configuration graph, or on the nested pushdown tree."""
    logger.info(f"Received check request: npt={payload.npt}, formula_length={len(payload.formula)}")
    start_time = time.time()
    try:
        service = get_services()
        if payload.npt:
            result = service.npt_check(payload.spec, payload.formula)
            value = result["value"]
            exactness = "bounded" if result["truncated"] else "exact"
            conclusive = not result["truncated"]
            bound = result["max_length"]
        else:
            verdict = service.check(payload.spec, payload.formula, payload.bound)
            value, exactness, conclusive, bound = verdict.value, verdict.exactness, verdict.conclusive, verdict.bound
        execution_time = (time.time() - start_time) * 1000
        return CheckResponse(
            value=value,
            exactness=exactness,
            conclusive=conclusive,
            bound=bound,
            execution_time_ms=round(execution_time, 2),
        )
    except Cpg2kitError as e:
        logger.warning(f"Rejected check request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Check failed: {e}")
        raise HTTPException(status_code=500, detail=f"Check failed: {str(e)}")
