from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from app.models.diffpoly import DiffPoly, GeneratorKind, Jet
from app.models.psido import PsiDO

FlowIndex = Union[int, str]
REDUCED = "reduced"


@dataclass(frozen=True)
class LOperator:
    """Lax series of one side truncated after index `depth`."""

    which: int
    depth: int
    op: PsiDO


@dataclass(frozen=True)
class FlowValue:
    """Values of one evolutionary derivation on the base generators."""

    i: FlowIndex
    n: int
    values: dict[Jet, DiffPoly] = field(default_factory=dict)

    def __getitem__(self, generator: Jet) -> DiffPoly:
        return self.values[generator.base]

    def get(self, generator: Jet):
        return self.values.get(generator.base)

    def max_index(self, kind: GeneratorKind) -> int:
        return max((jet.index for jet in self.values if jet.kind == kind), default=-1)

    def sorted_items(self) -> list[tuple[Jet, DiffPoly]]:
        return sorted(self.values.items())


@dataclass(frozen=True)
class ReductionResult:
    """P = remainder + cofactor * H_a with an aux-free remainder."""

    remainder: PsiDO
    cofactor: PsiDO


@dataclass(frozen=True)
class CommutatorDecomposition:
    """D = p*d1 + q*d2 + a + r*H."""

    p: PsiDO
    q: PsiDO
    a: DiffPoly
    r: PsiDO

    def is_zero(self) -> bool:
        return self.p.is_zero() and self.q.is_zero() and self.a.is_zero() and self.r.is_zero()
