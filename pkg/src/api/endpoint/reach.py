import time
from typing import Optional

from fastapi import APIRouter, HTTPException, Request
from pydantic import BaseModel, Field

from src.core.errors import Cpg2kitError
from src.core.logger import logger
from src.core.rate_limit import ANALYSIS_LIMIT, limiter
from src.services.analysis_service import AnalysisService

router = APIRouter()


class ConfigurationModel(BaseModel):
    state: str = Field(..., min_length=1)
    stack: str = Field(..., min_length=1, description="Stack such as [⊥ a]:[⊥ (b,2,1)]")


class ReachRequest(BaseModel):
    """Request model for configuration reachability."""

    spec: str = Field(..., min_length=1, max_length=100000, description="System in cpg2kit-format 1")
    source: ConfigurationModel
    target: ConfigurationModel


class ReachResponse(BaseModel):
    reachable: bool
    execution_time_ms: Optional[float] = None


def get_services() -> AnalysisService:
    """Dependency injection for services."""
    from src.main import services  # Import here to avoid circular imports

    if services is None:
        raise RuntimeError("Services not initialized")
    return services


@router.post("/reach")
@limiter.limit(ANALYSIS_LIMIT)
async def reach_endpoint(request: Request, payload: ReachRequest) -> ReachResponse:
    logger.info(f"Received reach request: {payload.source.state} -> {payload.target.state}")
    start_time = time.time()
    try:
        service = get_services()
        cps = service.load(payload.spec)
        source = service.configuration(cps, payload.source.state, payload.source.stack)
        target = service.configuration(cps, payload.target.state, payload.target.stack)
        reachable = service.reach(cps, source, target)
        execution_time = (time.time() - start_time) * 1000
        return ReachResponse(reachable=reachable, execution_time_ms=round(execution_time, 2))
    except Cpg2kitError as e:
        logger.warning(f"Rejected reach request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Reachability failed: {e}")
        raise HTTPException(status_code=500, detail=f"Reachability failed: {str(e)}")
