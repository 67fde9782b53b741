"""
Arithmetic of truncated pseudodifferential operators.

Products use the generalized Leibniz identity
    d^i a = sum_p C(i, p) d^p(a) d^(i-p)
with C(i, p) the binomial coefficient extended to negative i, cut off below
the precision floor of the result.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Optional

from app.exceptions import InsufficientPrecision, NegativeExponent
from app.models.diffpoly import Coefficient, DiffPoly, Monomial, accumulate_product, poly_sum, tau_poly
from app.models.psido import Key, Orientation, PsiDO, max_precision
from app.models.scalar import Scalar
from app.services.differential import RelationTable, derive, derive_jet_chain

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def binomial(k: int, l: int) -> int:
    if l < 0:
        return 0
    if k >= 0:
        return math.comb(k, l)
    sign = -1 if l % 2 else 1
    return sign * math.comb(-k + l - 1, l)


class _DerivativeCache:
    """d_main^p d_aux^q of one coefficient, computed incrementally."""

    def __init__(self, coeff: DiffPoly, orientation: Orientation, table: RelationTable):
        self._values: dict[tuple[int, int], DiffPoly] = {(0, 0): coeff}
        self._main = orientation.main_axis
        self._aux = orientation.aux_axis
        self._table = table

    def get(self, p: int, q: int) -> DiffPoly:
        key = (p, q)
        value = self._values.get(key)
        if value is None:
            if p == 0:
                value = derive(self.get(0, q - 1), self._aux, self._table)
            else:
                value = derive(self.get(p - 1, q), self._main, self._table)
            self._values[key] = value
        return value


def product_precision(p: PsiDO, q: PsiDO) -> Optional[int]:
    candidates = []
    order_p, order_q = p.effective_order, q.effective_order
    if p.precision is not None and order_q is not None:
        candidates.append(p.precision + order_q)
    if q.precision is not None and order_p is not None:
        candidates.append(q.precision + order_p)
    return max(candidates) if candidates else None


def op_add(p: PsiDO, q: PsiDO) -> PsiDO:
    return p + q


def op_mul(p: PsiDO, q: PsiDO, table: RelationTable, precision: Optional[int] = None) -> PsiDO:
    """Product p*q in normal form.

    `precision` caps the result: coefficients below it are not computed. The
    effective floor is the coarser of the cap and the one forced by the
    factors' own precision.
    """
    p._check_orientation(q)
    orientation = p.orientation
    mu = max_precision(product_precision(p, q), precision)

    if mu is None and any(main < 0 for main, _ in p.terms):
        if any(not coeff.is_constant() for coeff in q.terms.values()):
            raise InsufficientPrecision(
                "Product of exact operators has an infinite expansion; pass a precision cap"
            )

    raw: dict[Key, dict[Monomial, Scalar]] = {}
    for (k, l), b in q.terms.items():
        cache = _DerivativeCache(b, orientation, table)
        for (i, j), a in p.terms.items():
            if mu is not None and i + k < mu:
                continue
            for s in range(j + 1):
                if not cache.get(0, s):
                    break
                aux_factor = binomial(j, s)
                t = 0
                while True:
                    main = i - t + k
                    if mu is not None and main < mu:
                        break
                    if i >= 0 and t > i:
                        break
                    derivative = cache.get(t, s)
                    if not derivative:
                        break
                    target = raw.setdefault((main, j - s + l), {})
                    accumulate_product(target, a, derivative, binomial(i, t) * aux_factor)
                    t += 1

    return PsiDO(orientation, {key: DiffPoly(terms) for key, terms in raw.items()}, mu)


def commutator(p: PsiDO, q: PsiDO, table: RelationTable, precision: Optional[int] = None) -> PsiDO:
    return op_mul(p, q, table, precision) - op_mul(q, p, table, precision)


def adjoint(p: PsiDO, table: RelationTable, precision: Optional[int] = None) -> PsiDO:
    """Formal adjoint: d^* = -d on both derivations, a^* = a, (PQ)^* = Q^* P^*.

    Exact operators with negative exponents and nonconstant coefficients need
    an explicit `precision`.
    """
    cap = max_precision(p.precision, precision)
    pieces = []
    for (main, aux), coeff in p.terms.items():
        sign = -1 if (main + aux) % 2 else 1
        pieces.append(
            op_mul(
                PsiDO.monomial(p.orientation, main, aux, sign),
                PsiDO.multiplication(p.orientation, coeff),
                table,
                cap,
            )
        )
    return _sum(pieces, p.orientation, cap)


def split_parts(p: PsiDO) -> tuple[PsiDO, PsiDO]:
    """(P_+, P_-): exponents >= 0 and the strict negative tail."""
    plus = {key: c for key, c in p.terms.items() if key[0] >= 0}
    minus = {key: c for key, c in p.terms.items() if key[0] < 0}
    plus_precision = None if p.precision is None or p.precision <= 0 else p.precision
    return PsiDO(p.orientation, plus, plus_precision), PsiDO(p.orientation, minus, p.precision)


def apply(p: PsiDO, a: Coefficient, table: RelationTable) -> DiffPoly:
    """Act with a differential operator on an element of the algebra."""
    if not p.is_differential():
        raise NegativeExponent(f"Cannot apply an operator of negative order {min(k[0] for k in p.terms)}")
    if p.precision is not None and p.precision > 0:
        raise InsufficientPrecision(f"Operator is only known down to {p.orientation.value}^{p.precision}")
    a = DiffPoly.coerce(a)
    pieces = []
    for (main, aux), coeff in p.terms.items():
        d1, d2 = (main, aux) if p.orientation is Orientation.D1 else (aux, main)
        pieces.append(coeff * derive_jet_chain(a, d1, d2, table))
    return poly_sum(pieces)


def tau_op(p: PsiDO) -> PsiDO:
    """Involution: swap the derivations and map coefficients by tau_poly."""
    return PsiDO(
        p.orientation.flipped,
        {key: tau_poly(coeff) for key, coeff in p.terms.items()},
        p.precision,
    )


def coeff_at(p: PsiDO, main: int, aux: int = 0) -> DiffPoly:
    return p.coeff_at(main, aux)


def reorient(p: PsiDO) -> PsiDO:
    """Rewrite a differential operator with the other derivation as main."""
    if not p.is_differential():
        raise NegativeExponent("Only differential operators can change orientation")
    if p.precision is not None and p.precision > 0:
        raise InsufficientPrecision(f"Operator is only known down to {p.orientation.value}^{p.precision}")
    return PsiDO(p.orientation.flipped, {(aux, main): c for (main, aux), c in p.terms.items()})


def sandwich(
    orientation: Orientation,
    left: int,
    coeff: Coefficient,
    right: int,
    table: RelationTable,
    precision: Optional[int] = None,
) -> PsiDO:
    """d^left * coeff * d^right in normal form."""
    inner_cap = None if precision is None else precision - right
    head = op_mul(
        PsiDO.monomial(orientation, left),
        PsiDO.multiplication(orientation, coeff),
        table,
        inner_cap,
    )
    return op_mul(head, PsiDO.monomial(orientation, right), table, precision)


def is_self_adjoint(p: PsiDO, table: RelationTable) -> bool:
    return p.agrees_with(adjoint(p, table))


def is_skew_adjoint(p: PsiDO, table: RelationTable) -> bool:
    return p.agrees_with(-adjoint(p, table))


def _sum(pieces: list[PsiDO], orientation: Orientation, precision: Optional[int]) -> PsiDO:
    result = PsiDO.zero(orientation, precision)
    for piece in pieces:
        result = result + piece
    return result
