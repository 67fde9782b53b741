from typing import Optional

from fastapi import APIRouter, Query
from fastapi.concurrency import run_in_threadpool
import logging

from app.api.algebra import algebra_error_to_http, depth_query
from app.config import settings
from app.models.verification import Suite
from app.schemas import VerificationSummary
from app.services.verification import run_suite

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/verify", tags=["verification"])


@router.get("/{suite}", response_model=VerificationSummary)
async def verify(
    suite: Suite,
    depth: Optional[int] = depth_query(),
    seed: Optional[int] = Query(None, description="Seed for randomized property checks")
):
    depth = settings.default_depth if depth is None else depth
    seed = settings.default_seed if seed is None else seed
    try:
        result = await run_in_threadpool(run_suite, suite, depth, seed)
        return VerificationSummary.from_domain(result)
    except Exception as e:
        raise algebra_error_to_http(e, f"running suite '{suite.value}'")
