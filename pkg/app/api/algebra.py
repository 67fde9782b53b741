from typing import Literal, Optional, Union

from fastapi import APIRouter, HTTPException, Path, Query, status
from fastapi.concurrency import run_in_threadpool
import logging

from app.config import settings
from app.exceptions import AlgebraError, DepthExceeded, InsufficientPrecision
from app.models.diffpoly import Jet
from app.models.hierarchy import REDUCED, FlowValue
from app.schemas import FlowResponse, FlowValueSchema, OperatorResponse, PsiDOSchema, RelationsResponse, RelationTableSchema
from app.services.hierarchy import get_hierarchy
from app.services.lax import get_relation_table
from app.services.rendering import flow_latex, flow_text, latex_operator, relations_latex, relations_text

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["algebra"])


def depth_query():
    return Query(None, ge=0, le=settings.max_depth, description="Truncation depth K")


def _depth(depth: Optional[int]) -> int:
    return settings.default_depth if depth is None else depth


def _flow_index(value: str) -> Union[int, str]:
    if value == REDUCED:
        return REDUCED
    if value in ("1", "2"):
        return int(value)
    raise ValueError(f"Flow index must be 1, 2 or '{REDUCED}', got '{value}'")


def algebra_error_to_http(e: Exception, action: str) -> HTTPException:
    if isinstance(e, (InsufficientPrecision, DepthExceeded)):
        logger.error(f"Insufficient precision {action}: {e}")
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    if isinstance(e, (AlgebraError, ValueError)):
        logger.error(f"Invalid request {action}: {e}")
        return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    logger.error(f"Error {action}: {e}", exc_info=True)
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=f"Failed {action}")


def _relations(max_index: int, depth: int) -> RelationsResponse:
    if max_index > depth:
        raise DepthExceeded(f"Relations up to index {max_index} need depth {max_index} or more")
    table = get_relation_table(depth)
    return RelationsResponse(
        relations=RelationTableSchema.from_domain(table, max_index),
        text=relations_text(table, max_index),
        latex=relations_latex(table, max_index),
    )


def _operator(kind: str, i: int, n: int, depth: int) -> OperatorResponse:
    hierarchy = get_hierarchy(depth)
    op = hierarchy.compute_A(i, n) if kind == "A" else hierarchy.compute_B(i, n)
    return OperatorResponse(
        kind=kind,
        i=i,
        n=n,
        depth=depth,
        operator=PsiDOSchema.from_domain(op),
        text=str(op),
        latex=latex_operator(op),
    )


def _flow(i: str, n: int, generator: str, depth: int) -> FlowResponse:
    index = _flow_index(i)
    jet = Jet.parse_generator(generator)
    value = get_hierarchy(depth).flow_on_generator(index, n, jet)
    fv = FlowValue(i=index, n=n, values={jet: value})
    return FlowResponse(
        depth=depth,
        flow=FlowValueSchema.from_domain(fv),
        text=flow_text(fv),
        latex=flow_latex(fv),
    )


@router.get("/relations/{max_index}", response_model=RelationsResponse)
async def get_relations(
    max_index: int = Path(..., ge=0),
    depth: Optional[int] = depth_query()
):
    try:
        return await run_in_threadpool(_relations, max_index, _depth(depth))
    except Exception as e:
        raise algebra_error_to_http(e, "computing relations")


@router.get("/operators/{kind}/{i}/{n}", response_model=OperatorResponse)
async def get_operator(
    kind: Literal["A", "B"],
    i: int = Path(..., ge=1, le=2),
    n: int = Path(..., ge=0),
    depth: Optional[int] = depth_query()
):
    try:
        return await run_in_threadpool(_operator, kind, i, n, _depth(depth))
    except Exception as e:
        raise algebra_error_to_http(e, f"computing {kind}_{i},{n}")


@router.get("/flows/{i}/{n}/{generator}", response_model=FlowResponse)
async def get_flow(
    i: str,
    generator: str,
    n: int = Path(..., ge=0),
    depth: Optional[int] = depth_query()
):
    try:
        return await run_in_threadpool(_flow, i, n, generator, _depth(depth))
    except Exception as e:
        label = f"t_{n}" if i == REDUCED else f"t_{i},{n}"
        raise algebra_error_to_http(e, f"computing the {label} flow of {generator}")
