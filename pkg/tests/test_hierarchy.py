import pytest

from app.exceptions import DepthExceeded, InsufficientPrecision, NegativeExponent
from app.models.diffpoly import DiffPoly, Jet, tau_poly
from app.models.hierarchy import REDUCED, FlowValue
from app.models.psido import Orientation, PsiDO
from app.services.differential import EMPTY_TABLE, derive, derive_n
from app.services.hierarchy import Hierarchy, flow_derivation, other_side
from app.services.operators import commutator, op_mul, tau_op

D1 = Orientation.D1
D2 = Orientation.D2


def _chain(factors, table, precision):
    result = PsiDO.identity(D1)
    for factor in factors:
        result = op_mul(result, factor, table, precision)
    return result


def _inverse():
    return PsiDO.monomial(D1, -1)


def _times(coeff):
    return PsiDO.multiplication(D1, coeff)


class TestOperators:
    def test_other_side(self):
        assert other_side(1) == 2
        assert other_side(2) == 1

    def test_a_1_0(self, hierarchy2):
        assert hierarchy2.compute_A(1, 0) == PsiDO.monomial(D1, 1)

    def test_a_2_1(self, hierarchy2, w0):
        a = hierarchy2.compute_A(2, 1)
        assert a == PsiDO(D2, {(3, 0): DiffPoly.one(), (1, 0): 3 * w0})
        assert str(a) == "d2^3 + 3*w0*d2"

    def test_a_1_2(self, hierarchy2, v0):
        a = hierarchy2.compute_A(1, 2)
        assert a.is_exact()
        assert a == PsiDO(
            D1,
            {
                (5, 0): DiffPoly.one(),
                (3, 0): 5 * v0,
                (2, 0): 5 * DiffPoly.v(0, 1),
                (1, 0): 5 * DiffPoly.v(0, 2) + 5 * DiffPoly.v(1) + 10 * v0 ** 2,
            },
        )

    def test_sides_mirror(self, hierarchy2):
        for n in (0, 1, 2):
            assert tau_op(hierarchy2.compute_A(1, n)) == hierarchy2.compute_A(2, n)

    def test_a_needs_enough_depth(self):
        with pytest.raises(InsufficientPrecision):
            Hierarchy(0).compute_A(1, 2)

    def test_bad_arguments(self, hierarchy2):
        with pytest.raises(ValueError):
            Hierarchy(-1)
        with pytest.raises(ValueError):
            hierarchy2.compute_A(1, -1)
        with pytest.raises(ValueError):
            hierarchy2.lax_power(1, 0)

    def test_lax_power_is_cached(self, hierarchy2):
        assert hierarchy2.lax_power(1, 3) is hierarchy2.lax_power(1, 3)

    def test_b_2_0(self, hierarchy2, u):
        b = hierarchy2.compute_B(2, 0)
        expected = -op_mul(PsiDO.monomial(D2, -1), PsiDO.multiplication(D2, u), EMPTY_TABLE, hierarchy2.floor)
        assert b == expected
        assert b.precision == hierarchy2.floor

    def test_b_1_0(self, hierarchy2, u):
        expected = -op_mul(_inverse(), _times(u), EMPTY_TABLE, hierarchy2.floor)
        assert hierarchy2.compute_B(1, 0) == expected

    def test_c_2_0(self, hierarchy2):
        c = hierarchy2.compute_C(2, 0)
        assert c.terms == {(-1, 0): DiffPoly.one()}
        assert c.precision == hierarchy2.floor - 1

    def test_b_1_1(self, hierarchy2, u, w0):
        table = hierarchy2.table
        floor = hierarchy2.floor
        u2 = DiffPoly.u(0, 1)
        expected = (
            -_chain([_inverse(), _times(DiffPoly.u(0, 2) + 3 * u * w0)], table, floor)
            + _chain([_inverse(), _times(u), _inverse(), _times(u2)], table, floor)
            - _chain([_inverse(), _times(u2), _inverse(), _times(u)], table, floor)
            - _chain([_inverse(), _times(u), _inverse(), _times(u), _inverse(), _times(u)], table, floor)
        ).truncate(floor)
        b = hierarchy2.compute_B(1, 1)
        assert b.precision == floor
        assert b.agrees_with(expected)
        assert b.main_order == -1

    def test_b_mirror(self, hierarchy2):
        assert tau_op(hierarchy2.compute_B(1, 1)) == hierarchy2.compute_B(2, 1)

    def test_shallower_b_is_a_truncation(self, hierarchy2):
        deep = hierarchy2.compute_B(1, 1)
        shallow = hierarchy2.compute_B(1, 1, precision=-3)
        assert shallow.precision == -3
        assert shallow == deep.truncate(-3)


class TestReduction:
    def test_aux_free_is_untouched(self, hierarchy2, v0):
        p = PsiDO.monomial(D1, 2) + PsiDO.multiplication(D1, v0)
        result = hierarchy2.reduce_mod_H(p)
        assert result.remainder == p
        assert result.cofactor.is_zero()

    def test_single_peel(self, hierarchy2, u):
        result = hierarchy2.reduce_mod_H(PsiDO.monomial(D1, 0, 1), u, precision=-6)
        assert result.remainder == -op_mul(_inverse(), _times(u), EMPTY_TABLE, -6)
        assert result.cofactor.terms == {(-1, 0): DiffPoly.one()}
        rebuilt = result.remainder + op_mul(result.cofactor, hierarchy2.H(D1, u), hierarchy2.table, -6)
        assert rebuilt.agrees_with(PsiDO.monomial(D1, 0, 1))

    def test_reduction_identity(self, hierarchy2):
        a = PsiDO(D1, {(0, 3): DiffPoly.one(), (0, 1): 3 * DiffPoly.w(0)})
        result = hierarchy2.reduce_mod_H(a, precision=hierarchy2.floor)
        assert result.remainder.is_aux_free()
        rebuilt = result.remainder + op_mul(result.cofactor, hierarchy2.H(D1), hierarchy2.table, hierarchy2.floor)
        assert rebuilt.agrees_with(a)


class TestFlows:
    def test_level_zero_is_differentiation(self, hierarchy2, u, v0, w0):
        for g in (u, v0, w0):
            jet = next(iter(g.generators()))
            assert hierarchy2.flow_on_generator(1, 0, jet) == derive(g, 1, hierarchy2.table)
            assert hierarchy2.flow_on_generator(2, 0, jet) == derive(g, 2, hierarchy2.table)

    def test_u_flows(self, hierarchy2, u, v0, w0):
        t = hierarchy2.table
        assert hierarchy2.flow_on_generator(1, 1, Jet.u()) == DiffPoly.u(3, 0) + 3 * derive(v0 * u, 1, t)
        assert hierarchy2.flow_on_generator(2, 1, Jet.u()) == DiffPoly.u(0, 3) + 3 * derive(w0 * u, 2, t)

    def test_v0_flows(self, hierarchy2, u, v0, w0):
        t = hierarchy2.table
        assert hierarchy2.flow_on_generator(1, 1, Jet.v(0)) == (
            DiffPoly.v(0, 3) + 6 * v0 * DiffPoly.v(0, 1) + 3 * DiffPoly.v(1, 1)
        )
        assert hierarchy2.flow_on_generator(2, 1, Jet.v(0)) == (
            derive_n(v0, 2, 3, t) + 3 * derive(w0 * u, 1, t)
        )

    def test_w0_flows_mirror_v0(self, hierarchy2):
        for i in (1, 2):
            v_flow = hierarchy2.flow_on_generator(i, 1, Jet.v(0))
            assert hierarchy2.flow_on_generator(other_side(i), 1, Jet.w(0)) == tau_poly(v_flow)

    def test_jets_resolve_to_their_generator(self, hierarchy2):
        assert hierarchy2.flow_on_generator(1, 1, Jet.v(0, 2)) == hierarchy2.flow_on_generator(1, 1, Jet.v(0))

    def test_reduced_flows(self, hierarchy2, u, v0, w0):
        t = hierarchy2.table
        assert hierarchy2.flow_on_generator(REDUCED, 0, Jet.u()) == DiffPoly.u(1, 0) + DiffPoly.u(0, 1)
        assert hierarchy2.reduced_flow(1, Jet.u()) == (
            DiffPoly.u(3, 0) + DiffPoly.u(0, 3) + 3 * derive(v0 * u, 1, t) + 3 * derive(w0 * u, 2, t)
        )
        assert hierarchy2.reduced_flow(1, Jet.v(0)) == (
            derive_n(v0, 1, 3, t)
            + derive_n(v0, 2, 3, t)
            + 6 * v0 * derive(v0, 1, t)
            + 3 * derive(u * w0, 1, t)
            + 3 * derive(DiffPoly.v(1), 1, t)
        )

    def test_unknown_index(self, hierarchy2):
        with pytest.raises(ValueError):
            hierarchy2.flow_on_generator(3, 1, Jet.u())

    def test_generator_beyond_depth(self, hierarchy2):
        with pytest.raises(DepthExceeded):
            hierarchy2.flow_on_generator(1, 1, Jet.v(3))

    def test_flow_value(self, hierarchy2):
        fv = hierarchy2.flow_value(1, 1)
        assert fv.max_index(Jet.v(0).kind) == hierarchy2.default_max_index(1) == 1
        assert fv[Jet.v(0, 1)] == hierarchy2.flow_on_generator(1, 1, Jet.v(0))
        assert [jet for jet, _ in fv.sorted_items()] == [Jet.u(), Jet.v(0), Jet.v(1), Jet.w(0), Jet.w(1)]


class TestFlowDerivation:
    def test_commutes_with_derivations(self, hierarchy2):
        t = hierarchy2.table
        fv = hierarchy2.flow_value(1, 1, 0)
        assert flow_derivation(fv, DiffPoly.u(1, 0), t) == derive(fv[Jet.u()], 1, t)

    def test_leibniz(self, hierarchy2, v0):
        fv = hierarchy2.flow_value(2, 1, 0)
        assert flow_derivation(fv, v0 ** 2, hierarchy2.table) == 2 * v0 * fv[Jet.v(0)]

    def test_constants(self, hierarchy2):
        fv = hierarchy2.flow_value(1, 1, 0)
        assert flow_derivation(fv, DiffPoly.constant(7), hierarchy2.table).is_zero()

    def test_missing_generator(self, hierarchy2):
        fv = FlowValue(i=1, n=1, values={Jet.u(): DiffPoly.u(1, 0)})
        with pytest.raises(DepthExceeded):
            flow_derivation(fv, DiffPoly.v(1), hierarchy2.table)

    def test_evolve_at_level_zero(self, hierarchy2, u, v0):
        p = u * DiffPoly.v(0, 1) + v0 ** 2
        assert hierarchy2.evolve(1, 0, p) == derive(p, 1, hierarchy2.table)
        assert hierarchy2.evolve(2, 0, p) == derive(p, 2, hierarchy2.table)

    def test_evolve_operator(self, hierarchy2, v0):
        op = PsiDO.monomial(D1, 3) + PsiDO.monomial(D1, 1, 0, 3 * v0)
        evolved = hierarchy2.evolve_operator(1, 0, op)
        assert evolved == PsiDO.monomial(D1, 1, 0, 3 * DiffPoly.v(0, 1))


class TestDecomposition:
    def test_commuting_derivations(self, hierarchy2):
        d = commutator(PsiDO.monomial(D1, 1), PsiDO.monomial(D1, 0, 1), hierarchy2.table)
        assert hierarchy2.decompose_commutator(d).is_zero()

    def test_a_1_1_against_d2(self, hierarchy2):
        d = commutator(hierarchy2.compute_A(1, 1), PsiDO.monomial(D1, 0, 1), hierarchy2.table)
        parts = hierarchy2.decompose_commutator(d)
        assert parts.p == PsiDO.multiplication(D1, -3 * DiffPoly.u(1, 0))
        assert parts.q.is_zero()
        assert parts.a.is_zero()
        assert parts.r.is_zero()

    def test_schrodinger_is_its_own_cofactor(self, hierarchy2):
        for orientation in (D1, D2):
            parts = hierarchy2.decompose_commutator(hierarchy2.H(orientation))
            assert parts.r == PsiDO.identity(D1)
            assert parts.a.is_zero()
            assert parts.p.is_zero()
            assert parts.q.is_zero()

    def test_pure_parts(self, hierarchy2, u, v0, w0):
        d = PsiDO(D1, {(2, 0): v0, (0, 1): w0, (0, 0): u})
        parts = hierarchy2.decompose_commutator(d)
        assert parts.p == PsiDO(D1, {(1, 0): v0})
        assert parts.q == PsiDO(D2, {(0, 0): w0})
        assert parts.a == u

    def test_preconditions(self, hierarchy2):
        with pytest.raises(NegativeExponent):
            hierarchy2.decompose_commutator(PsiDO.monomial(D1, -1))
        with pytest.raises(InsufficientPrecision):
            hierarchy2.decompose_commutator(PsiDO.monomial(D1, 1, precision=-2))
