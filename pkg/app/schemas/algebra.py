from __future__ import annotations

from fractions import Fraction
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

from app.models.diffpoly import DiffPoly, GeneratorKind, Jet, Monomial, mono_mul
from app.models.hierarchy import FlowValue
from app.models.psido import Orientation, PsiDO
from app.models.scalar import Scalar
from app.models.verification import CheckReport, CheckStatus, SuiteResult
from app.services.differential import RelationTable

Factor = list[Union[str, int]]


class ScalarSchema(BaseModel):
    re: str = Field(..., description="Real part as p/q")
    im: str = Field(..., description="Imaginary part as p/q")

    @classmethod
    def from_domain(cls, value: Scalar) -> ScalarSchema:
        return cls(**value.to_json())

    def to_domain(self) -> Scalar:
        return Scalar(Fraction(self.re), Fraction(self.im))


class MonomialTermSchema(BaseModel):
    c: ScalarSchema
    m: list[Factor] = Field(
        default_factory=list,
        description='Factors ["u", d1, d2, power], ["v", m, d1, 0, power] or ["w", l, 0, d2, power]',
    )


def _factor_to_json(jet: Jet, power: int) -> Factor:
    if jet.kind == GeneratorKind.U:
        return ["u", jet.d1, jet.d2, power]
    return [jet.kind.symbol, jet.index, jet.d1, jet.d2, power]


def _power(factor: Factor, power) -> int:
    if int(power) < 1:
        raise ValueError(f"Factor {factor} must have a positive power")
    return int(power)


def _factor_from_json(factor: Factor) -> tuple[Jet, int]:
    symbol = factor[0]
    if symbol == "u":
        _, d1, d2, power = factor
        return Jet.u(int(d1), int(d2)), _power(factor, power)
    if symbol in ("v", "w"):
        _, index, d1, d2, power = factor
        kind = GeneratorKind.V if symbol == "v" else GeneratorKind.W
        jet = Jet(kind, int(index), int(d1), int(d2))
        if not jet.is_canonical:
            raise ValueError(f"Factor {factor} is not a canonical jet")
        return jet, _power(factor, power)
    raise ValueError(f"Unknown generator symbol '{symbol}'")


class DiffPolySchema(BaseModel):
    terms: list[MonomialTermSchema] = Field(default_factory=list)

    @classmethod
    def from_domain(cls, value: DiffPoly) -> DiffPolySchema:
        return cls(
            terms=[
                MonomialTermSchema(
                    c=ScalarSchema.from_domain(coeff),
                    m=[_factor_to_json(jet, power) for jet, power in monomial],
                )
                for monomial, coeff in value.sorted_terms()
            ]
        )

    def to_domain(self) -> DiffPoly:
        result = DiffPoly()
        for term in self.terms:
            monomial: Monomial = ()
            for factor in term.m:
                monomial = mono_mul(monomial, (_factor_from_json(factor),))
            result = result + DiffPoly({monomial: term.c.to_domain()})
        return result


class OperatorTermSchema(BaseModel):
    main: int
    aux: int = Field(..., ge=0)
    coeff: DiffPolySchema


class PsiDOSchema(BaseModel):
    orientation: Literal["d1", "d2"]
    precision: Optional[int] = Field(None, description="Lowest known main exponent; null when exact")
    terms: list[OperatorTermSchema] = Field(default_factory=list)

    @classmethod
    def from_domain(cls, value: PsiDO) -> PsiDOSchema:
        return cls(
            orientation=value.orientation.value,
            precision=value.precision,
            terms=[
                OperatorTermSchema(main=main, aux=aux, coeff=DiffPolySchema.from_domain(coeff))
                for (main, aux), coeff in value.sorted_terms()
            ],
        )

    def to_domain(self) -> PsiDO:
        terms = {(term.main, term.aux): term.coeff.to_domain() for term in self.terms}
        return PsiDO(Orientation(self.orientation), terms, self.precision)


class RelationTableSchema(BaseModel):
    depth: int = Field(..., ge=0)
    dv: list[DiffPolySchema] = Field(..., description="d2(v_m) for m = 0..depth")
    dw: list[DiffPolySchema] = Field(..., description="d1(w_l) for l = 0..depth")

    @classmethod
    def from_domain(cls, value: RelationTable, max_index: Optional[int] = None) -> RelationTableSchema:
        count = value.depth if max_index is None else max_index
        return cls(
            depth=count,
            dv=[DiffPolySchema.from_domain(p) for p in value.dv[: count + 1]],
            dw=[DiffPolySchema.from_domain(p) for p in value.dw[: count + 1]],
        )

    def to_domain(self) -> RelationTable:
        return RelationTable(
            depth=self.depth,
            dv=tuple(p.to_domain() for p in self.dv),
            dw=tuple(p.to_domain() for p in self.dw),
        )


class FlowValueSchema(BaseModel):
    i: Union[int, Literal["reduced"]]
    n: int = Field(..., ge=0)
    values: dict[str, DiffPolySchema]

    @classmethod
    def from_domain(cls, value: FlowValue) -> FlowValueSchema:
        return cls(
            i=value.i,
            n=value.n,
            values={jet.name: DiffPolySchema.from_domain(p) for jet, p in value.sorted_items()},
        )

    def to_domain(self) -> FlowValue:
        return FlowValue(
            i=self.i,
            n=self.n,
            values={Jet.parse_generator(name): p.to_domain() for name, p in self.values.items()},
        )


class CheckReportSchema(BaseModel):
    check_id: str
    params: dict[str, Union[int, str]]
    status: CheckStatus
    depth: int
    witness: Optional[Union[PsiDOSchema, DiffPolySchema]] = None
    message: Optional[str] = None
    elapsed: Optional[float] = Field(None, description="Wall time in seconds")

    @classmethod
    def from_domain(cls, report: CheckReport, include_timing: bool = True) -> CheckReportSchema:
        witness = None
        if isinstance(report.witness, PsiDO):
            witness = PsiDOSchema.from_domain(report.witness)
        elif isinstance(report.witness, DiffPoly):
            witness = DiffPolySchema.from_domain(report.witness)
        return cls(
            check_id=report.check_id,
            params=report.params,
            status=report.status,
            depth=report.depth,
            witness=witness,
            message=report.message,
            elapsed=report.elapsed if include_timing else None,
        )


class VerificationSummary(BaseModel):
    suite: str
    depth: int
    passed: int
    failed: int
    insufficient_precision: int
    exit_code: int
    reports: list[CheckReportSchema]

    @classmethod
    def from_domain(cls, result: SuiteResult, include_timing: bool = True) -> VerificationSummary:
        return cls(
            suite=result.suite.value,
            depth=result.depth,
            passed=result.count(CheckStatus.PASS),
            failed=result.count(CheckStatus.FAIL),
            insufficient_precision=result.count(CheckStatus.INSUFFICIENT_PRECISION),
            exit_code=result.exit_code,
            reports=[CheckReportSchema.from_domain(r, include_timing) for r in result.reports],
        )


class RelationsResponse(BaseModel):
    relations: RelationTableSchema
    text: str
    latex: str


class OperatorResponse(BaseModel):
    kind: Literal["A", "B"]
    i: int
    n: int
    depth: int
    operator: PsiDOSchema
    text: str
    latex: str


class FlowResponse(BaseModel):
    depth: int
    flow: FlowValueSchema
    text: str
    latex: str
