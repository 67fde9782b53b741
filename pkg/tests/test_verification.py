import pytest

from app.exceptions import DepthExceeded, InsufficientPrecision, NotSelfAdjoint
from app.models.diffpoly import DiffPoly, Jet, tau_poly
from app.models.verification import CheckReport, CheckStatus, Suite, SuiteResult
from app.services.verification import (
    check_commutativity,
    check_defrel,
    check_lax_symmetry,
    check_lemma2,
    check_lemma3,
    check_lemma4,
    check_properties,
    check_relation_flows,
    check_relation_symmetry,
    check_tau,
    check_zero_curvature,
    derive_nv,
    nv_expected,
    relation_flow_residuals,
    run_check,
    run_suite,
    suite_checks,
)
from app.services.differential import RelationTable
from app.services.hierarchy import Hierarchy
from app.utils.retry import retry_on_insufficient_precision

PASS = CheckStatus.PASS


class TestLemmas:
    @pytest.mark.parametrize("i,n", [(1, 0), (2, 1), (1, 2)])
    def test_a_operator_symmetry(self, i, n):
        report = check_lemma2(i, n, 2)
        assert report.status == PASS
        assert report.check_id == "a_operator_symmetry"
        assert report.params == {"i": i, "n": n}

    @pytest.mark.parametrize("i,n", [(1, 0), (2, 1), (1, 2), (2, 2)])
    def test_schrodinger_intertwining(self, i, n):
        assert check_lemma3(i, n, 2).status == PASS

    @pytest.mark.parametrize("i,n", [(2, 0), (1, 0), (1, 1)])
    def test_b_operator_symmetry(self, i, n):
        assert check_lemma4(i, n, 2).status == PASS

    @pytest.mark.parametrize("i", [1, 2])
    def test_b_operator_symmetry_second_level(self, i):
        report = check_lemma4(i, 2, 6)
        assert report.status == PASS
        assert report.params == {"i": i, "n": 2}

    def test_lax_power_symmetry(self):
        assert check_lax_symmetry(1, 1, 2).status == PASS

    @pytest.mark.parametrize("i", [1, 2])
    def test_defining_relation(self, i):
        assert check_defrel(i, 1).status == PASS
        assert check_defrel(i, 0).status == PASS

    def test_relation_symmetry(self):
        assert check_relation_symmetry(2).status == PASS

    @pytest.mark.parametrize("i,n", [(1, 0), (2, 0), (1, 1), (2, 1)])
    def test_relation_compatibility(self, i, n):
        report = check_relation_flows(i, n, 2)
        assert report.status == PASS
        assert report.check_id == "relation_compatibility"

    def test_relation_compatibility_second_level(self):
        assert check_relation_flows(2, 2, 6).status == PASS

    def test_translation_flow_residuals_vanish(self, hierarchy2):
        assert all(r.is_zero() for r in relation_flow_residuals(hierarchy2, 1, 0))

    def test_flipped_relation_sign_is_caught(self, table2):
        # d2(v1) = d1(u)*v0 - u*d1(v0) instead of u*d1(v0) - d1(u)*v0
        dv = (table2.dv[0], -table2.dv[1], table2.dv[2])
        flipped = Hierarchy(2, table=RelationTable(depth=2, dv=dv, dw=tuple(tau_poly(p) for p in dv)))

        def body(h):
            residuals = relation_flow_residuals(flipped, 1, 1) + relation_flow_residuals(flipped, 2, 1)
            witness = next((r for r in residuals if not r.is_zero()), None)
            return witness is None, witness

        report = run_check("relation_compatibility", {"i": 1, "n": 1}, 2, body)
        assert report.status == CheckStatus.FAIL

    @pytest.mark.parametrize("i,n,j,m", [(1, 1, 2, 0), (1, 0, 1, 1), (1, 1, 2, 1)])
    def test_zero_curvature(self, i, n, j, m):
        assert check_zero_curvature(i, n, j, m, 2).status == PASS

    def test_shallow_depth_is_not_retried(self):
        report = check_lemma2(1, 2, 0)
        assert report.status == CheckStatus.INSUFFICIENT_PRECISION
        assert report.depth == 0
        assert "needs depth at least 2" in report.message


class TestTheorem:
    def test_level_zero_pair(self):
        report = check_commutativity(1, 0, 2, 1, 2, generators=(Jet.u(), Jet.v(0), Jet.w(0)))
        assert report.status == PASS
        assert report.params["generators"] == "u,v0,w0"

    def test_first_mixed_pair(self):
        assert check_commutativity(1, 1, 2, 1, 2).status == PASS

    @pytest.mark.parametrize("i,n,j,m", [(1, 2, 2, 1), (1, 1, 1, 2), (1, 1, 2, 0)])
    def test_higher_pairs(self, i, n, j, m):
        report = check_commutativity(i, n, j, m, 6)
        assert report.status == PASS
        assert report.params["generators"] == "u,v0,v1,w0,w1"


class TestReduction:
    @pytest.mark.parametrize("n", [0, 1])
    def test_tau_invariance(self, n):
        assert check_tau(n, 2).status == PASS

    def test_tau_invariance_second_level(self):
        report = check_tau(2, 6)
        assert report.status == PASS
        assert report.params == {"n": 2}

    def test_nv_recovery(self):
        assert derive_nv(2).status == PASS

    def test_nv_needs_first_level(self):
        assert derive_nv(0).status == CheckStatus.INSUFFICIENT_PRECISION

    def test_constraint_matches_first_relation(self, hierarchy2):
        expected = nv_expected(hierarchy2)
        assert expected["constraint"].is_zero()
        assert expected["u"] == expected["nv"]

    def test_properties(self):
        report = check_properties(seed=0, depth=1, cases=20)
        assert report.status == PASS
        assert report.params == {"seed": 0, "cases": 20}


class TestRunCheck:
    def test_fail_carries_witness(self):
        report = run_check("sample", {"k": 1}, 1, lambda h: (False, DiffPoly.u()))
        assert report.status == CheckStatus.FAIL
        assert report.witness == DiffPoly.u()

    def test_pass_drops_witness(self):
        report = run_check("sample", {}, 1, lambda h: (True, DiffPoly.u()))
        assert report.status == PASS
        assert report.witness is None
        assert report.elapsed >= 0

    def test_algebra_errors_fail(self):
        def body(h):
            raise NotSelfAdjoint("odd slot")

        report = run_check("sample", {}, 1, body)
        assert report.status == CheckStatus.FAIL
        assert report.message == "NotSelfAdjoint: odd slot"

    def test_retries_deeper(self):
        def body(h):
            if h.depth < 3:
                raise InsufficientPrecision("too shallow")
            return True, None

        report = run_check("sample", {}, 1, body)
        assert report.status == PASS
        assert report.depth == 3

    def test_gives_up_after_retry(self):
        def body(h):
            raise DepthExceeded("never enough")

        report = run_check("sample", {}, 1, body)
        assert report.status == CheckStatus.INSUFFICIENT_PRECISION
        assert report.depth == 1
        assert report.message == "never enough"


class TestRetryDecorator:
    def test_deepens_between_attempts(self):
        seen = []

        @retry_on_insufficient_precision(max_attempts=3, depth_step=2)
        def compute(*, depth):
            seen.append(depth)
            if depth < 5:
                raise InsufficientPrecision("shallow")
            return depth

        assert compute(depth=1) == 5
        assert seen == [1, 3, 5]

    def test_reraises_last_error(self):
        @retry_on_insufficient_precision(max_attempts=2)
        def compute(*, depth):
            raise InsufficientPrecision(f"depth {depth}")

        with pytest.raises(InsufficientPrecision, match="depth 2"):
            compute(depth=0)

    def test_other_errors_pass_through(self):
        calls = []

        @retry_on_insufficient_precision()
        def compute(*, depth):
            calls.append(depth)
            raise ValueError("bad input")

        with pytest.raises(ValueError):
            compute(depth=0)
        assert calls == [0]


class TestSuites:
    def test_check_counts(self):
        assert len(suite_checks(Suite.NV, 2)) == 1
        assert len(suite_checks(Suite.THEOREM, 2)) == 5
        assert len(suite_checks(Suite.TAU, 2)) == 3
        # 2 sides x 3 levels x 5 checks, 2 defining relations, 6 curvature pairs, 1 symmetry
        assert len(suite_checks(Suite.LEMMAS, 2)) == 39
        assert len(suite_checks(Suite.ALL, 2)) == 49

    def test_exit_codes(self):
        def report(status):
            return CheckReport(check_id="sample", params={}, status=status, depth=0)

        assert SuiteResult(Suite.ALL, 0, [report(PASS)]).exit_code == 0
        assert SuiteResult(Suite.ALL, 0, [report(PASS), report(CheckStatus.INSUFFICIENT_PRECISION)]).exit_code == 2
        assert SuiteResult(
            Suite.ALL, 0, [report(CheckStatus.FAIL), report(CheckStatus.INSUFFICIENT_PRECISION)]
        ).exit_code == 1

    def test_nv_suite(self):
        result = run_suite(Suite.NV, 2)
        assert result.exit_code == 0
        assert [r.check_id for r in result.reports] == ["nv_recovery"]

    def test_tau_suite_too_shallow(self):
        result = run_suite("tau", 0)
        assert result.suite == Suite.TAU
        assert result.exit_code == 2
        assert result.count(PASS) == 1

    def test_reports_are_sorted(self):
        result = run_suite(Suite.TAU, 1, workers=2)
        assert [r.params["n"] for r in result.reports] == [0, 1, 2]

    def test_integer_params_sort_numerically(self):
        reports = [
            CheckReport(check_id="tau_invariance", params={"n": n}, status=PASS, depth=12) for n in (10, 2, 1)
        ]
        assert [r.params["n"] for r in sorted(reports, key=lambda r: r.sort_key)] == [1, 2, 10]

    def test_full_suite_passes(self):
        result = run_suite(Suite.ALL, 6)
        assert result.exit_code == 0
        assert result.count(PASS) == len(result.reports) == 49
        assert {r.check_id for r in result.reports} >= {"relation_compatibility", "commutativity", "properties"}
