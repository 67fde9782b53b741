from __future__ import annotations

import logging
from dataclasses import dataclass, field

from app.exceptions import DepthExceeded
from app.models.diffpoly import DiffPoly, GeneratorKind, Jet, Monomial, mono_drop, mono_mul
from app.models.scalar import ZERO, Scalar

logger = logging.getLogger(__name__)

AXES = (1, 2)


@dataclass(frozen=True)
class RelationTable:
    """Rewriting rules d2(v_m) and d1(w_l) for m, l <= depth.

    Only the d1-jets of the v's and the d2-jets of the w's are independent
    generators; every other derivative of v or w is rewritten through this
    table. Frozen after construction; the jet-derivative memo is private and
    only ever filled with values that are functions of the frozen fields.
    """

    depth: int
    dv: tuple[DiffPoly, ...]
    dw: tuple[DiffPoly, ...]
    _jet_cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(self.dv) != self.depth + 1 or len(self.dw) != self.depth + 1:
            raise ValueError(
                f"Relation table of depth {self.depth} needs {self.depth + 1} entries per side, "
                f"got {len(self.dv)} and {len(self.dw)}"
            )

    def relation(self, kind: GeneratorKind, index: int) -> DiffPoly:
        if kind == GeneratorKind.U:
            raise ValueError("u has no rewriting rule")
        if index > self.depth:
            side = "d2(v" if kind == GeneratorKind.V else "d1(w"
            raise DepthExceeded(f"{side}{index}) requested from a relation table of depth {self.depth}")
        return self.dv[index] if kind == GeneratorKind.V else self.dw[index]

    def derive_jet(self, jet: Jet, axis: int) -> DiffPoly:
        key = (jet, axis)
        cached = self._jet_cache.get(key)
        if cached is not None:
            return cached

        if axis not in AXES:
            raise ValueError(f"Unknown derivation axis {axis}")

        if jet.kind == GeneratorKind.U:
            result = DiffPoly.from_jet(
                Jet.u(jet.d1 + 1, jet.d2) if axis == 1 else Jet.u(jet.d1, jet.d2 + 1)
            )
        elif jet.kind == GeneratorKind.V:
            if axis == 1:
                result = DiffPoly.from_jet(Jet.v(jet.index, jet.d1 + 1))
            else:
                result = derive_n(self.relation(GeneratorKind.V, jet.index), 1, jet.d1, self)
        else:
            if axis == 2:
                result = DiffPoly.from_jet(Jet.w(jet.index, jet.d2 + 1))
            else:
                result = derive_n(self.relation(GeneratorKind.W, jet.index), 2, jet.d2, self)

        self._jet_cache[key] = result
        return result


EMPTY_TABLE = RelationTable(depth=-1, dv=(), dw=())


def derive(p: DiffPoly, axis: int, table: RelationTable) -> DiffPoly:
    """Apply d1 (axis=1) or d2 (axis=2) by the Leibniz rule."""
    result: dict[Monomial, Scalar] = {}
    for monomial, coeff in p.terms.items():
        for position, (jet, power) in enumerate(monomial):
            image = table.derive_jet(jet, axis)
            if not image.terms:
                continue
            rest = mono_drop(monomial, position)
            factor = coeff * power
            for m2, c2 in image.terms.items():
                key = mono_mul(rest, m2)
                result[key] = result.get(key, ZERO) + factor * c2
    return DiffPoly(result)


def derive_n(p: DiffPoly, axis: int, times: int, table: RelationTable) -> DiffPoly:
    for _ in range(times):
        if not p.terms:
            break
        p = derive(p, axis, table)
    return p


def derive_jet_chain(p: DiffPoly, d1: int, d2: int, table: RelationTable) -> DiffPoly:
    """d1^a d2^b applied to p."""
    return derive_n(derive_n(p, 1, d1, table), 2, d2, table)
