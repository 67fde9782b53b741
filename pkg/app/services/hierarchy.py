"""
Operators and flows of the coupled hierarchy at a fixed truncation depth.
"""

from __future__ import annotations

import logging
import threading
from functools import lru_cache
from typing import Callable, Iterable, Optional, TypeVar

from app.exceptions import DepthExceeded, InsufficientPrecision, NegativeExponent
from app.models.diffpoly import Coefficient, DiffPoly, GeneratorKind, Jet, Monomial, mono_drop, mono_mul
from app.models.hierarchy import REDUCED, CommutatorDecomposition, FlowIndex, FlowValue, LOperator, ReductionResult
from app.models.psido import Orientation, PsiDO
from app.models.scalar import ZERO, Scalar
from app.services.differential import RelationTable, derive_jet_chain
from app.services.lax import build_L, get_relation_table, lax_floor, symmetric_extract
from app.services.operators import adjoint, apply, commutator, op_mul, reorient, split_parts

logger = logging.getLogger(__name__)

T = TypeVar("T")


def other_side(i: int) -> int:
    return 2 if i == 1 else 1


def _at_least_as_deep(known: Optional[int], wanted: int) -> bool:
    return known is None or known <= wanted


def flow_derivation(fv: FlowValue, p: DiffPoly, table: RelationTable) -> DiffPoly:
    """Extend a derivation given on generators to any element of the algebra.

    The derivation commutes with d1 and d2 and obeys the Leibniz rule.
    """
    images: dict[Jet, DiffPoly] = {}
    result: dict[Monomial, Scalar] = {}
    for monomial, coeff in p.terms.items():
        for position, (jet, power) in enumerate(monomial):
            image = images.get(jet)
            if image is None:
                base = fv.get(jet)
                if base is None:
                    raise DepthExceeded(f"Flow value for {jet.name} is not available (t_{fv.i},{fv.n})")
                image = derive_jet_chain(base, jet.d1, jet.d2, table)
                images[jet] = image
            if not image.terms:
                continue
            rest = mono_drop(monomial, position)
            factor = coeff * power
            for m2, c2 in image.terms.items():
                key = mono_mul(rest, m2)
                result[key] = result.get(key, ZERO) + factor * c2
    return DiffPoly(result)


class Hierarchy:
    """Lax operators, A/B operators and flow values built on one relation table."""

    def __init__(self, depth: int, table: Optional[RelationTable] = None):
        if depth < 0:
            raise ValueError(f"Depth must be nonnegative, got {depth}")
        self.depth = depth
        self.floor = lax_floor(depth)
        self.table = table if table is not None else get_relation_table(depth)
        self._cache: dict[tuple, object] = {}
        self._lock = threading.RLock()

    def _cached(self, key: tuple, factory: Callable[[], T]) -> T:
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = factory()
        with self._lock:
            return self._cache.setdefault(key, value)

    def L(self, which: int) -> LOperator:
        return self._cached(("L", which), lambda: build_L(which, self.depth, self.table))

    def H(self, orientation: Orientation, potential: Optional[Coefficient] = None) -> PsiDO:
        return PsiDO.schrodinger(orientation, potential)

    def lax_power(self, which: int, exponent: int) -> PsiDO:
        """L_which^exponent at the precision its factors allow."""
        if exponent < 1:
            raise ValueError(f"Exponent must be positive, got {exponent}")

        def factory() -> PsiDO:
            lax = self.L(which).op
            power = lax
            for _ in range(exponent - 1):
                power = op_mul(power, lax, self.table)
            return power

        return self._cached(("power", which, exponent), factory)

    def compute_A(self, i: int, n: int) -> PsiDO:
        """(L_i^(2n+1))_+ as an exact differential operator in d_i."""
        if n < 0:
            raise ValueError(f"Flow level must be nonnegative, got {n}")

        def factory() -> PsiDO:
            lax = self.L(i).op
            factors = 2 * n + 1
            power = lax
            for k in range(2, factors + 1):
                power = op_mul(power, lax, self.table, -(factors - k))
            if power.precision is not None and power.precision > 0:
                raise InsufficientPrecision(
                    f"A_{i},{n} needs a deeper Lax series than depth {self.depth} "
                    f"(positive part known only down to d{i}^{power.precision})"
                )
            return split_parts(power)[0]

        return self._cached(("A", i, n), factory)

    def reduce_mod_H(
        self,
        p: PsiDO,
        potential: Optional[Coefficient] = None,
        precision: Optional[int] = None,
    ) -> ReductionResult:
        """Split p = r + q*(d1 d2 + a) with r free of the auxiliary derivation."""
        orientation = p.orientation
        schrodinger = self.H(orientation, potential)
        remainder = p.truncate(precision)
        cofactor_terms: dict[tuple[int, int], DiffPoly] = {}

        while not remainder.is_aux_free():
            top = remainder.aux_degree
            step_terms = {
                (main - 1, aux - 1): coeff for (main, aux), coeff in remainder.terms.items() if aux == top
            }
            step_precision = None if remainder.precision is None else remainder.precision - 1
            step = PsiDO(orientation, step_terms, step_precision)
            for key, coeff in step.terms.items():
                cofactor_terms[key] = cofactor_terms[key] + coeff if key in cofactor_terms else coeff
            remainder = remainder - op_mul(step, schrodinger, self.table, remainder.precision)

        cofactor_precision = None if remainder.precision is None else remainder.precision - 1
        return ReductionResult(
            remainder=remainder,
            cofactor=PsiDO(orientation, cofactor_terms, cofactor_precision),
        )

    def _reduced_opposite(self, i: int, n: int, precision: Optional[int]) -> ReductionResult:
        precision = self.floor if precision is None else precision
        key = ("B", i, n)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None and _at_least_as_deep(cached.remainder.precision, precision):
            return ReductionResult(
                remainder=cached.remainder.truncate(precision),
                cofactor=cached.cofactor.truncate(precision - 1),
            )
        opposite = reorient(self.compute_A(other_side(i), n))
        result = self.reduce_mod_H(opposite, DiffPoly.u(), precision)
        logger.debug(f"Reduced A_{other_side(i)},{n} modulo H down to d{i}^{precision}")
        with self._lock:
            current = self._cache.get(key)
            if current is None or not _at_least_as_deep(current.remainder.precision, precision):
                self._cache[key] = result
        return result

    def compute_B(self, i: int, n: int, precision: Optional[int] = None) -> PsiDO:
        """Aux-free remainder of A_(other side),n modulo H, expanded in d_i."""
        return self._reduced_opposite(i, n, precision).remainder

    def compute_C(self, i: int, n: int, precision: Optional[int] = None) -> PsiDO:
        """Cofactor with A_(other side),n = B_i,n + C_i,n * H."""
        return self._reduced_opposite(i, n, precision).cofactor

    def _lax_side(self, i: int, n: int, which: int, count: int) -> list[DiffPoly]:
        """t_{i,n}-derivatives of the coefficients of L_which, indices 0..count."""
        if count > self.depth:
            raise DepthExceeded(
                f"Flow of {'v' if which == 1 else 'w'}{count} needs depth {count}, hierarchy has {self.depth}"
            )
        key = ("side", i, n, which)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None and len(cached) > count:
            return cached[: count + 1]

        orientation = Orientation.for_axis(which)
        cap = -2 * count - 1
        if i == which:
            generator = self.compute_A(which, n)
        else:
            generator = self.compute_B(which, n, cap - 1)
        bracket = commutator(generator, self.L(which).op, self.table, cap)
        x = op_mul(PsiDO.monomial(orientation, 1), bracket, self.table, cap + 1)
        values = symmetric_extract(x, count, self.table)

        with self._lock:
            current = self._cache.get(key)
            if current is None or len(current) < len(values):
                self._cache[key] = values
        return values

    def flow_on_generator(self, i: FlowIndex, n: int, generator: Jet) -> DiffPoly:
        if i == REDUCED:
            return self.reduced_flow(n, generator)
        if i not in (1, 2):
            raise ValueError(f"Flow index must be 1, 2 or '{REDUCED}', got {i!r}")
        generator = generator.base
        if generator.kind == GeneratorKind.U:
            return self._cached(("u", i, n), lambda: self._u_flow(i, n))
        which = 1 if generator.kind == GeneratorKind.V else 2
        return self._lax_side(i, n, which, generator.index)[generator.index]

    def _u_flow(self, i: int, n: int) -> DiffPoly:
        # du/dt = -A^*(u)
        conjugate = adjoint(self.compute_A(i, n), self.table)
        return -apply(conjugate, DiffPoly.u(), self.table)

    def reduced_flow(self, n: int, generator: Jet) -> DiffPoly:
        """d/dt_n = d/dt_{1,n} + d/dt_{2,n}."""
        return self.flow_on_generator(1, n, generator) + self.flow_on_generator(2, n, generator)

    def default_max_index(self, n: int) -> int:
        return self.depth - n

    def flow_value(self, i: FlowIndex, n: int, max_index: Optional[int] = None) -> FlowValue:
        """Values on u and on v_m, w_m for m <= max_index."""
        if max_index is None:
            max_index = self.default_max_index(n)
        generators = [Jet.u()]
        for m in range(max_index + 1):
            generators.extend((Jet.v(m), Jet.w(m)))
        return FlowValue(i=i, n=n, values={g: self.flow_on_generator(i, n, g) for g in generators})

    def flow_value_for(self, i: FlowIndex, n: int, polys: Iterable[DiffPoly]) -> FlowValue:
        """Smallest flow value covering every generator of `polys`."""
        needed = -1
        for poly in polys:
            needed = max(needed, poly.max_index(GeneratorKind.V), poly.max_index(GeneratorKind.W))
        return self.flow_value(i, n, needed)

    def evolve(self, i: FlowIndex, n: int, p: DiffPoly) -> DiffPoly:
        """d p / d t_{i,n} for an arbitrary element p."""
        return flow_derivation(self.flow_value_for(i, n, [p]), p, self.table)

    def evolve_operator(self, i: FlowIndex, n: int, op: PsiDO) -> PsiDO:
        """Coefficientwise t_{i,n}-derivative of an operator."""
        fv = self.flow_value_for(i, n, op.terms.values())
        return op.map_coefficients(lambda coeff: flow_derivation(fv, coeff, self.table))

    def decompose_commutator(self, d: PsiDO, potential: Optional[Coefficient] = None) -> CommutatorDecomposition:
        """Unique d = p*d1 + q*d2 + a + r*H for a differential operator d."""
        if not d.is_differential():
            raise NegativeExponent("Only differential operators can be decomposed along H")
        if not d.is_exact():
            raise InsufficientPrecision("Decomposition needs an exact differential operator")
        if d.orientation is Orientation.D2:
            d = reorient(d)
        schrodinger = self.H(Orientation.D1, potential)
        remainder = d
        r_terms: dict[tuple[int, int], DiffPoly] = {}

        while True:
            mixed = [key for key in remainder.terms if key[0] >= 1 and key[1] >= 1]
            if not mixed:
                break
            main, aux = max(mixed, key=lambda key: (key[0] + key[1], key[0]))
            coeff = remainder.terms[(main, aux)]
            step = PsiDO.monomial(Orientation.D1, main - 1, aux - 1, coeff)
            r_terms[(main - 1, aux - 1)] = r_terms.get((main - 1, aux - 1), DiffPoly()) + coeff
            remainder = remainder - op_mul(step, schrodinger, self.table)

        p_terms = {(main - 1, 0): c for (main, aux), c in remainder.terms.items() if aux == 0 and main >= 1}
        q_terms = {(aux - 1, 0): c for (main, aux), c in remainder.terms.items() if main == 0 and aux >= 1}
        return CommutatorDecomposition(
            p=PsiDO(Orientation.D1, p_terms),
            q=PsiDO(Orientation.D2, q_terms),
            a=remainder.terms.get((0, 0), DiffPoly()),
            r=PsiDO(Orientation.D1, r_terms),
        )


@lru_cache(maxsize=16)
def get_hierarchy(depth: int) -> Hierarchy:
    return Hierarchy(depth)

