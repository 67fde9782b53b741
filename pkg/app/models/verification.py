from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from app.models.diffpoly import DiffPoly
from app.models.psido import PsiDO

Witness = Union[DiffPoly, PsiDO]


class CheckStatus(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INSUFFICIENT_PRECISION = "insufficient_precision"


class Suite(str, enum.Enum):
    ALL = "all"
    LEMMAS = "lemmas"
    THEOREM = "theorem"
    TAU = "tau"
    NV = "nv"


@dataclass
class CheckReport:
    check_id: str
    params: dict[str, Union[int, str]]
    status: CheckStatus
    depth: int
    witness: Optional[Witness] = None
    message: Optional[str] = None
    elapsed: float = 0.0

    @property
    def sort_key(self) -> tuple:
        # ints before strings, each in its natural order
        return self.check_id, tuple(
            sorted((k, (0, v, "") if isinstance(v, int) else (1, 0, str(v))) for k, v in self.params.items())
        )


@dataclass
class SuiteResult:
    suite: Suite
    depth: int
    reports: list[CheckReport] = field(default_factory=list)

    def count(self, status: CheckStatus) -> int:
        return sum(1 for report in self.reports if report.status == status)

    @property
    def exit_code(self) -> int:
        if self.count(CheckStatus.FAIL):
            return 1
        if self.count(CheckStatus.INSUFFICIENT_PRECISION):
            return 2
        return 0
