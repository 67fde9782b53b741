"""
Instance-wise verification of the hierarchy identities at finite truncation.

Every check is a pure function of its parameters and the truncation depth.
Shortfalls found while computing are retried once at a deeper truncation;
depth preconditions are reported without a retry.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

from app.config import settings
from app.exceptions import AlgebraError, DepthExceeded, InsufficientPrecision
from app.models.diffpoly import DiffPoly, Jet, tau_poly
from app.models.psido import Orientation, PsiDO
from app.models.scalar import Scalar
from app.models.verification import CheckReport, CheckStatus, Suite, SuiteResult, Witness
from app.services.differential import derive, derive_n
from app.services.hierarchy import Hierarchy, get_hierarchy
from app.services.lax import relation_values
from app.services.operators import adjoint, apply, commutator, op_mul, reorient, split_parts, tau_op
from app.utils.retry import retry_on_insufficient_precision

logger = logging.getLogger(__name__)

Body = Callable[[Hierarchy], tuple[bool, Optional[Witness]]]

DEFAULT_GENERATORS = (Jet.u(), Jet.v(0), Jet.v(1), Jet.w(0), Jet.w(1))
LEMMA_LEVELS = (0, 1, 2)
CURVATURE_LEVELS = (0, 1)
COMMUTING_PAIRS = ((1, 1, 2, 1), (1, 1, 2, 0), (1, 2, 2, 1), (1, 1, 1, 2), (1, 0, 2, 1))

_PROPERTY_JETS = (
    Jet.u(), Jet.u(1, 0), Jet.u(0, 1), Jet.u(1, 1),
    Jet.v(0), Jet.v(0, 1), Jet.v(1),
    Jet.w(0), Jet.w(0, 1), Jet.w(1),
)


@retry_on_insufficient_precision(
    max_attempts=settings.verify_retry_attempts,
    depth_step=settings.verify_retry_depth_step,
)
def _evaluate(body: Body, *, depth: int) -> tuple[bool, Optional[Witness], int]:
    passed, witness = body(get_hierarchy(depth))
    return passed, witness, depth


def run_check(
    check_id: str,
    params: dict,
    depth: int,
    body: Body,
    required_depth: int = 0,
) -> CheckReport:
    started = time.perf_counter()
    logger.info(f"Running {check_id} {params} at depth {depth}")

    if depth < required_depth:
        report = CheckReport(
            check_id=check_id,
            params=params,
            status=CheckStatus.INSUFFICIENT_PRECISION,
            depth=depth,
            message=f"needs depth at least {required_depth}",
        )
    else:
        try:
            passed, witness, used = _evaluate(body, depth=depth)
            report = CheckReport(
                check_id=check_id,
                params=params,
                status=CheckStatus.PASS if passed else CheckStatus.FAIL,
                depth=used,
                witness=None if passed else witness,
            )
        except (InsufficientPrecision, DepthExceeded) as e:
            report = CheckReport(
                check_id=check_id,
                params=params,
                status=CheckStatus.INSUFFICIENT_PRECISION,
                depth=depth,
                message=str(e),
            )
        except AlgebraError as e:
            report = CheckReport(
                check_id=check_id,
                params=params,
                status=CheckStatus.FAIL,
                depth=depth,
                message=f"{type(e).__name__}: {e}",
            )

    report.elapsed = time.perf_counter() - started
    if report.status == CheckStatus.FAIL:
        logger.error(f"{check_id} {params} failed at depth {report.depth}: {report.message or report.witness}")
    else:
        logger.info(f"{check_id} {params}: {report.status.value} ({report.elapsed:.2f}s)")
    return report


def _first_nonzero(*residuals: Witness) -> Optional[Witness]:
    for residual in residuals:
        if not residual.is_zero():
            return residual
    return None


def _verdict(*residuals: Witness) -> tuple[bool, Optional[Witness]]:
    witness = _first_nonzero(*residuals)
    return witness is None, witness


def _in_d1(op: PsiDO) -> PsiDO:
    return op if op.orientation is Orientation.D1 else reorient(op)


def check_lemma2(i: int, n: int, depth: int) -> CheckReport:
    """A_{i,n} d_i^-1 is a self-adjoint differential operator."""

    def body(h: Hierarchy):
        a = h.compute_A(i, n)
        shifted = op_mul(a, PsiDO.monomial(a.orientation, -1), h.table)
        if not shifted.is_differential():
            return False, split_parts(shifted)[1]
        return _verdict(shifted - adjoint(shifted, h.table))

    return run_check("a_operator_symmetry", {"i": i, "n": n}, depth, body, required_depth=n)


def check_lax_symmetry(i: int, n: int, depth: int) -> CheckReport:
    """d_i L_i^(2n+1) is self-adjoint within precision."""

    def body(h: Hierarchy):
        x = op_mul(PsiDO.monomial(Orientation.for_axis(i), 1), h.lax_power(i, 2 * n + 1), h.table)
        return _verdict(x - adjoint(x, h.table))

    return run_check("lax_power_symmetry", {"i": i, "n": n}, depth, body)


def check_lemma3(i: int, n: int, depth: int) -> CheckReport:
    """H A + A^* H = A^*(u), together with the flow of H it induces."""

    def body(h: Hierarchy):
        a = h.compute_A(i, n)
        schrodinger = h.H(a.orientation)
        adj = adjoint(a, h.table)
        potential = PsiDO.multiplication(a.orientation, apply(adj, DiffPoly.u(), h.table))
        intertwining = op_mul(schrodinger, a, h.table) + op_mul(adj, schrodinger, h.table) - potential
        evolution = (
            commutator(a, schrodinger, h.table)
            + potential
            - op_mul(a + adj, schrodinger, h.table)
        )
        return _verdict(intertwining, evolution)

    return run_check("schrodinger_intertwining", {"i": i, "n": n}, depth, body, required_depth=n)


def check_lemma4(i: int, n: int, depth: int) -> CheckReport:
    """d_i B_{i,n} is self-adjoint within precision and B_{i,n} has negative order."""

    def body(h: Hierarchy):
        b = h.compute_B(i, n)
        if b.main_order is not None and b.main_order >= 0:
            return False, split_parts(b)[0]
        x = op_mul(PsiDO.monomial(b.orientation, 1), b, h.table)
        return _verdict(x - adjoint(x, h.table))

    return run_check("b_operator_symmetry", {"i": i, "n": n}, depth, body, required_depth=n)


def check_zero_curvature(i: int, n: int, j: int, m: int, depth: int) -> CheckReport:
    """dA_{i,n}/dt_{j,m} - dA_{j,m}/dt_{i,n} + [A_{i,n}, A_{j,m}] = R H, R skew, R = 0 if i = j."""

    def body(h: Hierarchy):
        first = _in_d1(h.compute_A(i, n))
        second = _in_d1(h.compute_A(j, m))
        curvature = (
            h.evolve_operator(j, m, first)
            - h.evolve_operator(i, n, second)
            + commutator(first, second, h.table)
        )
        parts = h.decompose_commutator(curvature)
        witness = _first_nonzero(parts.p, parts.q, parts.a, parts.r + adjoint(parts.r, h.table))
        if witness is None and i == j and not parts.r.is_zero():
            witness = parts.r
        return witness is None, witness

    params = {"i": i, "n": n, "j": j, "m": m}
    return run_check("zero_curvature", params, depth, body, required_depth=max(n, m))


def check_commutativity(
    i: int,
    n: int,
    j: int,
    m: int,
    depth: int,
    generators: Sequence[Jet] = DEFAULT_GENERATORS,
) -> CheckReport:
    """d/dt_{j,m} d/dt_{i,n} g = d/dt_{i,n} d/dt_{j,m} g on each generator."""

    def body(h: Hierarchy):
        for generator in generators:
            lhs = h.evolve(j, m, h.flow_on_generator(i, n, generator))
            rhs = h.evolve(i, n, h.flow_on_generator(j, m, generator))
            if lhs != rhs:
                return False, lhs - rhs
        return True, None

    params = {"i": i, "n": n, "j": j, "m": m, "generators": ",".join(g.name for g in generators)}
    return run_check("commutativity", params, depth, body, required_depth=max(n, m))


def check_tau(n: int, depth: int) -> CheckReport:
    """The involution maps side 1 to side 2 and fixes the reduced flows."""

    def body(h: Hierarchy):
        residuals = [
            tau_op(h.L(1).op) - h.L(2).op,
            tau_op(h.H(Orientation.D1)) - h.H(Orientation.D2),
            tau_op(h.compute_A(1, n)) - h.compute_A(2, n),
            tau_op(h.compute_B(1, n)) - h.compute_B(2, n),
        ]
        generators = [Jet.u(), Jet.v(0), Jet.w(0)]
        if h.default_max_index(n) >= 1:
            generators += [Jet.v(1), Jet.w(1)]
        for generator in generators:
            residuals.append(
                tau_poly(h.reduced_flow(n, generator)) - h.reduced_flow(n, generator.tau())
            )
        return _verdict(*residuals)

    return run_check("tau_invariance", {"n": n}, depth, body, required_depth=n)


def check_defrel(i: int, depth: int) -> CheckReport:
    """[L_i, d_aux + d_i^-1 u] = 0 down to the Lax precision floor."""

    def body(h: Hierarchy):
        orientation = Orientation.for_axis(i)
        inverse_u = op_mul(
            PsiDO.monomial(orientation, -1),
            PsiDO.multiplication(orientation, DiffPoly.u()),
            h.table,
            h.floor - 2,
        )
        partner = PsiDO.monomial(orientation, 0, 1) + inverse_u
        return _verdict(commutator(h.L(i).op, partner, h.table, h.floor))

    return run_check("defining_relation", {"i": i}, depth, body)


def relation_flow_residuals(h: Hierarchy, i: int, n: int) -> list[DiffPoly]:
    """d/dt(d2 v_m) - d2(dv_m/dt) and d/dt(d1 w_m) - d1(dw_m/dt) for every tabulated m."""
    residuals = []
    for m in range(min(h.default_max_index(n), h.table.depth) + 1):
        residuals.append(h.evolve(i, n, h.table.dv[m]) - derive(h.flow_on_generator(i, n, Jet.v(m)), 2, h.table))
        residuals.append(h.evolve(i, n, h.table.dw[m]) - derive(h.flow_on_generator(i, n, Jet.w(m)), 1, h.table))
    return residuals


def check_relation_flows(i: int, n: int, depth: int) -> CheckReport:
    """The t_{i,n} flow commutes with the rewriting rules of the relation table."""

    def body(h: Hierarchy):
        return _verdict(*relation_flow_residuals(h, i, n))

    return run_check("relation_compatibility", {"i": i, "n": n}, depth, body, required_depth=n)


def check_relation_symmetry(depth: int) -> CheckReport:
    """d1(w_l) computed from L_2 directly equals the mirror of d2(v_l)."""

    def body(h: Hierarchy):
        direct = relation_values(2, h.depth)
        return _verdict(*(computed - mirrored for computed, mirrored in zip(direct, h.table.dw)))

    return run_check("relation_symmetry", {}, depth, body)


def nv_expected(h: Hierarchy) -> dict[str, DiffPoly]:
    """Closed forms of the first reduced flow and of the NV equation."""
    table = h.table
    u, v0, v1, w0 = DiffPoly.u(), DiffPoly.v(0), DiffPoly.v(1), DiffPoly.w(0)

    def d(p: DiffPoly, axis: int, times: int = 1) -> DiffPoly:
        return derive_n(p, axis, times, table)

    flow_u = d(u, 1, 3) + d(u, 2, 3) + 3 * d(v0 * u, 1) + 3 * d(w0 * u, 2)
    flow_v0 = d(v0, 1, 3) + d(v0, 2, 3) + 6 * v0 * d(v0, 1) + 3 * d(u * w0, 1) + 3 * d(v1, 1)
    nv_v = 3 * v0
    nv_vbar = 3 * w0
    return {
        "u": flow_u,
        "v0": flow_v0,
        "w0": tau_poly(flow_v0),
        "nv": d(u, 1, 3) + d(u, 2, 3) + d(u * nv_v, 1) + d(u * nv_vbar, 2),
        "constraint": d(nv_v, 2) - 3 * d(u, 1),
    }


def derive_nv(depth: int) -> CheckReport:
    """The first reduced flow is the Novikov-Veselov equation at zero energy."""

    def body(h: Hierarchy):
        expected = nv_expected(h)
        flow_u = h.reduced_flow(1, Jet.u())
        return _verdict(
            flow_u - expected["u"],
            h.reduced_flow(1, Jet.v(0)) - expected["v0"],
            h.reduced_flow(1, Jet.w(0)) - expected["w0"],
            flow_u - expected["nv"],
            expected["constraint"],
        )

    return run_check("nv_recovery", {}, depth, body, required_depth=1)


def random_poly(rng: random.Random, max_terms: int = 3, max_factors: int = 2) -> DiffPoly:
    result = DiffPoly()
    for _ in range(rng.randint(1, max_terms)):
        term = DiffPoly.constant(Scalar(rng.randint(-3, 3), rng.randint(-1, 1)))
        for _ in range(rng.randint(0, max_factors)):
            term = term * DiffPoly.from_jet(rng.choice(_PROPERTY_JETS))
        result = result + term
    return result


def check_properties(seed: int, depth: int, cases: Optional[int] = None) -> CheckReport:
    """Seeded random instances of the Leibniz, commutation and involution identities."""
    cases = settings.property_cases if cases is None else cases

    def body(h: Hierarchy):
        rng = random.Random(seed)
        table = h.table
        for _ in range(cases):
            p, q = random_poly(rng), random_poly(rng)
            residuals = [
                derive(derive(p, 1, table), 2, table) - derive(derive(p, 2, table), 1, table),
                tau_poly(tau_poly(p)) - p,
                tau_poly(p * q) - tau_poly(p) * tau_poly(q),
                tau_poly(derive(p, 1, table)) - derive(tau_poly(p), 2, table),
            ]
            for axis in (1, 2):
                residuals.append(
                    derive(p * q, axis, table) - derive(p, axis, table) * q - p * derive(q, axis, table)
                )
            witness = _first_nonzero(*residuals)
            if witness is not None:
                return False, witness
        return True, None

    return run_check("properties", {"seed": seed, "cases": cases}, depth, body, required_depth=1)


def suite_checks(suite: Suite, depth: int, seed: int = 0) -> list[Callable[[], CheckReport]]:
    checks: list[Callable[[], CheckReport]] = []
    sides = (1, 2)

    if suite in (Suite.ALL, Suite.LEMMAS):
        for i in sides:
            for n in LEMMA_LEVELS:
                checks.append(partial(check_lemma2, i, n, depth))
                checks.append(partial(check_lax_symmetry, i, n, depth))
                checks.append(partial(check_lemma3, i, n, depth))
                checks.append(partial(check_lemma4, i, n, depth))
                checks.append(partial(check_relation_flows, i, n, depth))
            checks.append(partial(check_defrel, i, depth))
        for (i, n), (j, m) in _curvature_pairs():
            checks.append(partial(check_zero_curvature, i, n, j, m, depth))
        checks.append(partial(check_relation_symmetry, depth))

    if suite in (Suite.ALL, Suite.THEOREM):
        for i, n, j, m in COMMUTING_PAIRS:
            checks.append(partial(check_commutativity, i, n, j, m, depth))

    if suite in (Suite.ALL, Suite.TAU):
        for n in LEMMA_LEVELS:
            checks.append(partial(check_tau, n, depth))

    if suite in (Suite.ALL, Suite.NV):
        checks.append(partial(derive_nv, depth))

    if suite == Suite.ALL:
        checks.append(partial(check_properties, seed, depth))

    return checks


def _curvature_pairs() -> Iterable[tuple[tuple[int, int], tuple[int, int]]]:
    flows = [(i, n) for i in (1, 2) for n in CURVATURE_LEVELS]
    for index, first in enumerate(flows):
        for second in flows[index + 1:]:
            yield first, second


def run_suite(suite: Suite, depth: int, seed: int = 0, workers: Optional[int] = None) -> SuiteResult:
    suite = Suite(suite)
    workers = settings.verify_workers if workers is None else workers
    checks = suite_checks(suite, depth, seed)
    logger.info(f"Running suite '{suite.value}' with {len(checks)} checks at depth {depth} on {workers} worker(s)")

    started = time.perf_counter()
    if workers <= 1:
        reports = [check() for check in checks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(lambda check: check(), checks))

    result = SuiteResult(suite=suite, depth=depth, reports=sorted(reports, key=lambda report: report.sort_key))
    logger.info(
        f"Suite '{suite.value}' finished in {time.perf_counter() - started:.2f}s: "
        f"{result.count(CheckStatus.PASS)} passed, {result.count(CheckStatus.FAIL)} failed, "
        f"{result.count(CheckStatus.INSUFFICIENT_PRECISION)} insufficient precision"
    )
    return result
