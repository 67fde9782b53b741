"""
Lax series and the relation table they induce.

L_1 = d1 + sum_m d1^(-m-1) v_m d1^(-m), and L_2 is its mirror in d2 and w_l.
The relations d2(v_m) are the symmetric-form coefficients of
X = d1 * [L_1, d1^-1 u], which is self-adjoint of order at most 0.
"""

from __future__ import annotations

import logging
import time
from functools import lru_cache

from app.exceptions import InsufficientPrecision, NotSelfAdjoint
from app.models.diffpoly import DiffPoly, tau_poly
from app.models.hierarchy import LOperator
from app.models.psido import Orientation, PsiDO
from app.services.differential import EMPTY_TABLE, RelationTable
from app.services.operators import commutator, op_mul, sandwich

logger = logging.getLogger(__name__)


def lax_floor(depth: int) -> int:
    """Precision floor of a Lax series truncated after index `depth`."""
    return -(2 * depth + 2)


def lax_generator(which: int, index: int) -> DiffPoly:
    return DiffPoly.v(index) if which == 1 else DiffPoly.w(index)


def build_L(which: int, depth: int, table: RelationTable = EMPTY_TABLE) -> LOperator:
    if which not in (1, 2):
        raise ValueError(f"Lax operator index must be 1 or 2, got {which}")
    if depth < 0:
        raise ValueError(f"Depth must be nonnegative, got {depth}")

    orientation = Orientation.for_axis(which)
    floor = lax_floor(depth)
    op = PsiDO.monomial(orientation, 1).truncate(floor)
    for m in range(depth + 1):
        op = op + sandwich(orientation, -m - 1, lax_generator(which, m), -m, table, floor)
    return LOperator(which=which, depth=depth, op=op)


def symmetric_extract(x: PsiDO, count: int, table: RelationTable = EMPTY_TABLE) -> list[DiffPoly]:
    """Coefficients s_0..s_count of x = sum_m d^-m s_m d^-m."""
    if not x.is_aux_free():
        raise ValueError("Symmetric extraction needs an operator without auxiliary derivatives")
    if x.main_order is not None and x.main_order > 0:
        raise ValueError(f"Symmetric extraction needs order at most 0, got {x.main_order}")
    if x.precision is not None and x.precision > -2 * count:
        raise InsufficientPrecision(
            f"Extracting {count + 1} symmetric coefficients needs precision {-2 * count}, "
            f"operator is known down to {x.precision}"
        )

    cap = x.precision if x.precision is not None else -2 * count - 1
    remainder = x.truncate(cap)
    values: list[DiffPoly] = []
    for m in range(count + 1):
        if m >= 1:
            odd = remainder.coeff_at(-2 * m + 1)
            if odd:
                raise NotSelfAdjoint(f"Coefficient of d^{-2 * m + 1} must vanish, found {odd}")
        s = remainder.coeff_at(-2 * m)
        values.append(s)
        if s:
            remainder = remainder - sandwich(x.orientation, -m, s, -m, table, cap)

    leftover = {key: c for key, c in remainder.terms.items() if key[0] >= -2 * count - 1}
    if leftover:
        main = max(key[0] for key in leftover)
        raise NotSelfAdjoint(f"Reconstruction left a nonzero coefficient at d^{main}")
    return values


def relation_values(which: int, depth: int, table: RelationTable = EMPTY_TABLE) -> list[DiffPoly]:
    """Aux derivatives of the Lax coefficients of side `which`, indices 0..depth."""
    orientation = Orientation.for_axis(which)
    floor = lax_floor(depth)
    lax = build_L(which, depth, table).op
    inverse_u = op_mul(
        PsiDO.monomial(orientation, -1),
        PsiDO.multiplication(orientation, DiffPoly.u()),
        table,
        floor - 2,
    )
    bracket = commutator(lax, inverse_u, table, floor - 1)
    x = op_mul(PsiDO.monomial(orientation, 1), bracket, table, floor)
    return symmetric_extract(x, depth, table)


def build_relation_table(depth: int) -> RelationTable:
    if depth < 0:
        raise ValueError(f"Relation table depth must be nonnegative, got {depth}")
    started = time.perf_counter()
    dv = tuple(relation_values(1, depth))
    dw = tuple(tau_poly(value) for value in dv)
    logger.info(f"Built relation table of depth {depth} in {time.perf_counter() - started:.2f}s")
    return RelationTable(depth=depth, dv=dv, dw=dw)


@lru_cache(maxsize=16)
def get_relation_table(depth: int) -> RelationTable:
    return build_relation_table(depth)
