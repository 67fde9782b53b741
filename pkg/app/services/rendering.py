"""
Text, LaTeX and JSON renderings shared by the command line and the HTTP API.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel

from app.models.diffpoly import DiffPoly, GeneratorKind, Jet, Monomial
from app.models.hierarchy import REDUCED, FlowIndex, FlowValue
from app.models.psido import PsiDO
from app.models.scalar import Scalar
from app.models.verification import CheckStatus, SuiteResult
from app.schemas.algebra import (
    FlowValueSchema,
    PsiDOSchema,
    RelationTableSchema,
    VerificationSummary,
)
from app.services.differential import RelationTable


def to_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json", exclude_none=False), ensure_ascii=False, indent=2)


# LaTeX

def _latex_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return f"{sign}\\frac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def latex_scalar(value: Scalar) -> str:
    if value.is_real:
        return _latex_fraction(value.re)
    imaginary = "i" if value.im == 1 else "-i" if value.im == -1 else f"{_latex_fraction(value.im)}i"
    if not value.re:
        return imaginary
    sign = "" if imaginary.startswith("-") else "+"
    return f"\\left({_latex_fraction(value.re)}{sign}{imaginary}\\right)"


def latex_generator(jet: Jet) -> str:
    if jet.kind == GeneratorKind.U:
        return "u"
    return f"{jet.kind.symbol}_{{{jet.index}}}"


def _latex_partial(axis: int, exponent: int) -> str:
    if exponent == 0:
        return ""
    if exponent == 1:
        return f"\\partial_{axis}"
    return f"\\partial_{axis}^{{{exponent}}}"


def latex_jet(jet: Jet) -> str:
    prefix = _latex_partial(1, jet.d1) + _latex_partial(2, jet.d2)
    name = latex_generator(jet)
    return f"{prefix}({name})" if prefix else name


def latex_monomial(monomial: Monomial) -> str:
    factors = []
    for jet, power in monomial:
        text = latex_jet(jet)
        factors.append(text if power == 1 else f"{text}^{{{power}}}")
    return " ".join(factors)


def latex_poly(p: DiffPoly) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for monomial, coeff in p.sorted_terms():
        body = latex_monomial(monomial)
        negative = coeff.is_real and coeff.re < 0
        magnitude = -coeff if negative else coeff
        if not body:
            text = latex_scalar(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{latex_scalar(magnitude)} {body}"
        if not pieces:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces)


def latex_operator(op: PsiDO) -> str:
    main_axis, aux_axis = op.orientation.main_axis, op.orientation.aux_axis
    pieces = []
    for (main, aux), coeff in op.sorted_terms():
        ops = _latex_partial(main_axis, main) + _latex_partial(aux_axis, aux)
        coeff_text = latex_poly(coeff)
        if not ops:
            pieces.append(f"\\left({coeff_text}\\right)" if len(coeff) > 1 else coeff_text)
        elif coeff == 1:
            pieces.append(ops)
        elif len(coeff) > 1 or coeff_text.startswith("-"):
            pieces.append(f"\\left({coeff_text}\\right) {ops}")
        else:
            pieces.append(f"{coeff_text} {ops}")
    text = " + ".join(pieces) if pieces else "0"
    if op.precision is not None:
        text += f" + O\\left(\\partial_{main_axis}^{{{op.precision - 1}}}\\right)"
    return text


# Documents

def _flow_label(i: FlowIndex, n: int) -> str:
    return f"t_{n}" if i == REDUCED else f"t_{i},{n}"


def relations_text(table: RelationTable, max_index: int) -> str:
    lines = [f"d2(v{m}) = {table.dv[m]}" for m in range(max_index + 1)]
    lines += [f"d1(w{l}) = {table.dw[l]}" for l in range(max_index + 1)]
    return "\n".join(lines)


def relations_latex(table: RelationTable, max_index: int) -> str:
    lines = [f"\\partial_2(v_{{{m}}}) &= {latex_poly(table.dv[m])}" for m in range(max_index + 1)]
    lines += [f"\\partial_1(w_{{{l}}}) &= {latex_poly(table.dw[l])}" for l in range(max_index + 1)]
    return "\\begin{align*}\n" + " \\\\\n".join(lines) + "\n\\end{align*}"


def render_relations(table: RelationTable, max_index: int, fmt: str) -> str:
    if fmt == "json":
        return to_json(RelationTableSchema.from_domain(table, max_index))
    if fmt == "latex":
        return relations_latex(table, max_index)
    return relations_text(table, max_index)


def render_operator(kind: str, i: int, n: int, op: PsiDO, fmt: str) -> str:
    if fmt == "json":
        return to_json(PsiDOSchema.from_domain(op))
    if fmt == "latex":
        return f"{kind}_{{{i},{n}}} = {latex_operator(op)}"
    return f"{kind}[{i},{n}] = {op}"


def flow_text(fv: FlowValue) -> str:
    label = _flow_label(fv.i, fv.n)
    return "\n".join(f"d{jet.name}/d{label} = {value}" for jet, value in fv.sorted_items())


def flow_latex(fv: FlowValue) -> str:
    label = f"t_{{{fv.n}}}" if fv.i == REDUCED else f"t_{{{fv.i},{fv.n}}}"
    lines = [
        f"\\frac{{d{latex_generator(jet)}}}{{d{label}}} &= {latex_poly(value)}"
        for jet, value in fv.sorted_items()
    ]
    return "\\begin{align*}\n" + " \\\\\n".join(lines) + "\n\\end{align*}"


def render_flow(fv: FlowValue, fmt: str) -> str:
    if fmt == "json":
        return to_json(FlowValueSchema.from_domain(fv))
    if fmt == "latex":
        return flow_latex(fv)
    return flow_text(fv)


def _witness_text(witness: Optional[object]) -> str:
    return "" if witness is None else str(witness)


def report_table(result: SuiteResult) -> str:
    rows = [("check", "params", "depth", "status")]
    for report in result.reports:
        params = " ".join(f"{key}={value}" for key, value in report.params.items())
        rows.append((report.check_id, params, str(report.depth), report.status.value))
    widths = [max(len(row[col]) for row in rows) for col in range(4)]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * width for width in widths))

    for report in result.reports:
        if report.status == CheckStatus.FAIL:
            detail = report.message or _witness_text(report.witness)
            lines.append(f"FAIL {report.check_id} {report.params}: {detail}")

    lines.append(
        f"{result.count(CheckStatus.PASS)} passed, {result.count(CheckStatus.FAIL)} failed, "
        f"{result.count(CheckStatus.INSUFFICIENT_PRECISION)} insufficient precision"
    )
    return "\n".join(lines)


def report_latex(result: SuiteResult) -> str:
    rows = [
        f"\\texttt{{{r.check_id.replace('_', chr(92) + '_')}}} & "
        f"{', '.join(f'{k}={v}' for k, v in r.params.items())} & {r.depth} & {r.status.value.replace('_', ' ')} \\\\"
        for r in result.reports
    ]
    return "\\begin{tabular}{llrl}\ncheck & params & depth & status \\\\\n\\hline\n" + "\n".join(rows) + "\n\\end{tabular}"


def render_report(result: SuiteResult, fmt: str) -> str:
    if fmt == "json":
        return to_json(VerificationSummary.from_domain(result, include_timing=False))
    if fmt == "latex":
        return report_latex(result)
    return report_table(result)
