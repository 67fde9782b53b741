"""Randomized identities of the coefficient algebra and of operator arithmetic."""

from hypothesis import assume, given, settings, strategies as st

from app.models.diffpoly import DiffPoly, Jet, poly_sum, tau_poly
from app.models.psido import Orientation, PsiDO
from app.models.scalar import Scalar
from app.services.differential import derive
from app.services.lax import get_relation_table
from app.services.operators import adjoint, op_mul, tau_op

TABLE = get_relation_table(1)
PROPERTY_SETTINGS = settings(max_examples=200, deadline=None, derandomize=True)

ALGEBRA_JETS = (
    Jet.u(), Jet.u(1, 0), Jet.u(0, 1),
    Jet.v(0), Jet.v(0, 1), Jet.v(1),
    Jet.w(0), Jet.w(0, 1), Jet.w(1),
)
OPERATOR_JETS = (Jet.u(), Jet.u(1, 0), Jet.v(0), Jet.w(0))

scalars = st.builds(Scalar, st.integers(-3, 3), st.integers(-1, 1))


def _term(parts) -> DiffPoly:
    coeff, jets = parts
    term = DiffPoly.constant(coeff)
    for jet in jets:
        term = term * DiffPoly.from_jet(jet)
    return term


def polys(jets):
    terms = st.tuples(scalars, st.lists(st.sampled_from(jets), max_size=2)).map(_term)
    return st.lists(terms, max_size=3).map(poly_sum)


def operators(precision: int):
    keys = st.tuples(st.integers(precision + 1, 2), st.integers(0, 1))
    return st.dictionaries(keys, polys(OPERATOR_JETS), max_size=3).map(
        lambda terms: PsiDO(Orientation.D1, terms, precision)
    )


class TestAlgebra:
    @PROPERTY_SETTINGS
    @given(polys(ALGEBRA_JETS), polys(ALGEBRA_JETS), st.sampled_from([1, 2]))
    def test_leibniz(self, p, q, axis):
        assert derive(p * q, axis, TABLE) == derive(p, axis, TABLE) * q + p * derive(q, axis, TABLE)

    @PROPERTY_SETTINGS
    @given(polys(ALGEBRA_JETS))
    def test_derivations_commute(self, p):
        assert derive(derive(p, 1, TABLE), 2, TABLE) == derive(derive(p, 2, TABLE), 1, TABLE)

    @PROPERTY_SETTINGS
    @given(polys(ALGEBRA_JETS), st.sampled_from([1, 2]))
    def test_only_scalars_are_constants(self, p, axis):
        nonconstant = DiffPoly({m: c for m, c in p.terms.items() if m})
        assume(not nonconstant.is_zero())
        assert not derive(nonconstant, axis, TABLE).is_zero()
        assert derive(p, axis, TABLE) == derive(nonconstant, axis, TABLE)

    @PROPERTY_SETTINGS
    @given(polys(ALGEBRA_JETS), polys(ALGEBRA_JETS))
    def test_tau(self, p, q):
        assert tau_poly(tau_poly(p)) == p
        assert tau_poly(p * q) == tau_poly(p) * tau_poly(q)
        assert tau_poly(derive(p, 1, TABLE)) == derive(tau_poly(p), 2, TABLE)


class TestOperators:
    @PROPERTY_SETTINGS
    @given(operators(-3), operators(-3), operators(-3))
    def test_associativity(self, p, q, r):
        left = op_mul(op_mul(p, q, TABLE), r, TABLE)
        right = op_mul(p, op_mul(q, r, TABLE), TABLE)
        assert left.agrees_with(right)

    @PROPERTY_SETTINGS
    @given(operators(-3), operators(-3))
    def test_adjoint_reverses_products(self, p, q):
        product = adjoint(op_mul(p, q, TABLE), TABLE)
        reversed_product = op_mul(adjoint(q, TABLE), adjoint(p, TABLE), TABLE)
        assert product.agrees_with(reversed_product)

    @PROPERTY_SETTINGS
    @given(operators(-3))
    def test_adjoint_is_involutive(self, p):
        assert adjoint(adjoint(p, TABLE), TABLE).agrees_with(p)

    @PROPERTY_SETTINGS
    @given(operators(-5), operators(-5))
    def test_precision_is_sound(self, p, q):
        deep = op_mul(p, q, TABLE)
        shallow = op_mul(p.truncate(-3), q.truncate(-3), TABLE)
        if deep.precision is not None and shallow.precision is not None:
            assert shallow.precision >= deep.precision
        assert shallow.agrees_with(deep)

    @PROPERTY_SETTINGS
    @given(operators(-3), operators(-3))
    def test_tau_is_multiplicative(self, p, q):
        assert tau_op(op_mul(p, q, TABLE)) == op_mul(tau_op(p), tau_op(q), TABLE)
