"""
Truncated pseudodifferential operators in one main derivation.

An operator is stored coefficient-left as a sparse map
(main exponent, aux exponent) -> DiffPoly, meaning sum c * d_main^i * d_aux^j.
`precision` is the lowest main exponent whose coefficients are known; None
means the operator is exact (there is no unknown tail).
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping, Optional

from app.exceptions import InsufficientPrecision, OrientationMismatch
from app.models.diffpoly import Coefficient, DiffPoly, poly_sum
from app.models.scalar import Number

Key = tuple[int, int]


class Orientation(str, enum.Enum):
    D1 = "d1"
    D2 = "d2"

    @property
    def main_axis(self) -> int:
        return 1 if self is Orientation.D1 else 2

    @property
    def aux_axis(self) -> int:
        return 2 if self is Orientation.D1 else 1

    @property
    def flipped(self) -> Orientation:
        return Orientation.D2 if self is Orientation.D1 else Orientation.D1

    @classmethod
    def for_axis(cls, axis: int) -> Orientation:
        if axis == 1:
            return cls.D1
        if axis == 2:
            return cls.D2
        raise ValueError(f"Unknown derivation axis {axis}")


def max_precision(*values: Optional[int]) -> Optional[int]:
    """Coarsest of several precision floors; None (exact) is the identity."""
    known = [value for value in values if value is not None]
    return max(known) if known else None


class PsiDO:
    __slots__ = ("orientation", "terms", "precision")

    def __init__(
        self,
        orientation: Orientation,
        terms: Optional[Mapping[Key, DiffPoly]] = None,
        precision: Optional[int] = None,
    ):
        self.orientation = Orientation(orientation)
        self.precision = precision
        cleaned: dict[Key, DiffPoly] = {}
        for (main, aux), coeff in (terms or {}).items():
            if aux < 0:
                raise ValueError(f"Auxiliary exponent must be nonnegative, got {aux}")
            if precision is not None and main < precision:
                continue
            if coeff.terms:
                cleaned[(main, aux)] = coeff
        self.terms = cleaned

    @classmethod
    def zero(cls, orientation: Orientation, precision: Optional[int] = None) -> PsiDO:
        return cls(orientation, {}, precision)

    @classmethod
    def monomial(
        cls,
        orientation: Orientation,
        main: int = 0,
        aux: int = 0,
        coeff: Coefficient = 1,
        precision: Optional[int] = None,
    ) -> PsiDO:
        return cls(orientation, {(main, aux): DiffPoly.coerce(coeff)}, precision)

    @classmethod
    def identity(cls, orientation: Orientation) -> PsiDO:
        return cls.monomial(orientation)

    @classmethod
    def multiplication(cls, orientation: Orientation, coeff: Coefficient) -> PsiDO:
        return cls.monomial(orientation, 0, 0, coeff)

    @classmethod
    def schrodinger(cls, orientation: Orientation, potential: Optional[Coefficient] = None) -> PsiDO:
        """d1*d2 + a; the same two terms in either orientation."""
        potential = DiffPoly.u() if potential is None else DiffPoly.coerce(potential)
        return cls(orientation, {(1, 1): DiffPoly.one(), (0, 0): potential})

    @property
    def main_order(self) -> Optional[int]:
        """Largest stored main exponent, None for the zero operator."""
        return max((main for main, _ in self.terms), default=None)

    @property
    def effective_order(self) -> Optional[int]:
        """Main order including the unknown tail below the precision floor."""
        candidates = [value for value in (self.main_order,) if value is not None]
        if self.precision is not None:
            candidates.append(self.precision - 1)
        return max(candidates) if candidates else None

    @property
    def diff_order(self) -> Optional[int]:
        return max((main + aux for main, aux in self.terms), default=None)

    @property
    def aux_degree(self) -> int:
        return max((aux for _, aux in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return self.precision is None

    def is_aux_free(self) -> bool:
        return all(aux == 0 for _, aux in self.terms)

    def is_differential(self) -> bool:
        return all(main >= 0 for main, _ in self.terms)

    def coeff_at(self, main: int, aux: int = 0) -> DiffPoly:
        if self.precision is not None and main < self.precision:
            raise InsufficientPrecision(
                f"Coefficient of {self.orientation.value}^{main} requested below precision {self.precision}"
            )
        return self.terms.get((main, aux), DiffPoly())

    def truncate(self, precision: Optional[int]) -> PsiDO:
        """Forget every coefficient below `precision` (never refines)."""
        return PsiDO(self.orientation, self.terms, max_precision(self.precision, precision))

    def agrees_with(self, other: PsiDO) -> bool:
        """Equality on the exponents both operators know exactly."""
        self._check_orientation(other)
        floor = max_precision(self.precision, other.precision)
        return self.truncate(floor).terms == other.truncate(floor).terms

    def sorted_terms(self) -> list[tuple[Key, DiffPoly]]:
        return sorted(self.terms.items(), key=lambda item: (-item[0][0], item[0][1]))

    def map_coefficients(self, func) -> PsiDO:
        return PsiDO(self.orientation, {key: func(c) for key, c in self.terms.items()}, self.precision)

    def _check_orientation(self, other: PsiDO) -> None:
        if self.orientation != other.orientation:
            raise OrientationMismatch(
                f"Cannot combine operators in {self.orientation.value} and {other.orientation.value}"
            )

    def __neg__(self) -> PsiDO:
        return self.map_coefficients(lambda c: -c)

    def __add__(self, other: PsiDO) -> PsiDO:
        self._check_orientation(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return PsiDO(self.orientation, terms, max_precision(self.precision, other.precision))

    def __sub__(self, other: PsiDO) -> PsiDO:
        return self + (-other)

    def lmul(self, coeff: Coefficient) -> PsiDO:
        """Left multiplication by an element of the coefficient algebra."""
        coeff = DiffPoly.coerce(coeff)
        return self.map_coefficients(lambda c: coeff * c)

    def scale(self, factor: Number) -> PsiDO:
        return self.map_coefficients(lambda c: c.scale(factor))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PsiDO):
            return NotImplemented
        return (
            self.orientation == other.orientation
            and self.precision == other.precision
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.orientation, self.precision, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"PsiDO({self})"

    def __str__(self) -> str:
        name_main = self.orientation.value
        name_aux = self.orientation.flipped.value
        pieces: list[tuple[str, str]] = []
        for (main, aux), coeff in self.sorted_terms():
            ops = [_power(name_main, main), _power(name_aux, aux)]
            ops = [op for op in ops if op]
            coeff_text = str(coeff)
            sign = "+"
            if len(coeff) == 1 and coeff_text.startswith("-"):
                sign, coeff_text = "-", coeff_text[1:]
            if len(coeff) > 1:
                coeff_text = f"({coeff_text})"
            if ops and coeff_text == "1":
                pieces.append((sign, "*".join(ops)))
            else:
                pieces.append((sign, "*".join([coeff_text] + ops)))
        if not pieces:
            text = "0"
        else:
            first_sign, text = pieces[0]
            text = f"-{text}" if first_sign == "-" else text
            for sign, body in pieces[1:]:
                text += f" {sign} {body}"
        if self.precision is not None:
            text += f" + O({name_main}^{self.precision - 1})"
        return text


def _power(name: str, exponent: int) -> str:
    if exponent == 0:
        return ""
    if exponent == 1:
        return name
    return f"{name}^{exponent}"


def op_sum(operators: Iterable[PsiDO], orientation: Orientation) -> PsiDO:
    result = PsiDO.zero(orientation)
    grouped: dict[Key, list[DiffPoly]] = {}
    precision = None
    for operator in operators:
        result._check_orientation(operator)
        precision = max_precision(precision, operator.precision)
        for key, coeff in operator.terms.items():
            grouped.setdefault(key, []).append(coeff)
    return PsiDO(orientation, {key: poly_sum(cs) for key, cs in grouped.items()}, precision)
