"""
Differential polynomials in the canonical jets of u, v_m and w_l.

A polynomial is a sparse map from monomials to exact scalars. Monomials are
sorted tuples of (Jet, power) pairs so that equal polynomials have equal
term dictionaries.
"""

from __future__ import annotations

import enum
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from app.models.scalar import ONE, ZERO, Number, Scalar


class GeneratorKind(enum.IntEnum):
    U = 0
    V = 1
    W = 2

    @property
    def symbol(self) -> str:
        return self.name.lower()


class Jet(NamedTuple):
    kind: GeneratorKind
    index: int
    d1: int
    d2: int

    @classmethod
    def u(cls, d1: int = 0, d2: int = 0) -> Jet:
        return cls(GeneratorKind.U, 0, d1, d2)

    @classmethod
    def v(cls, index: int, d1: int = 0) -> Jet:
        return cls(GeneratorKind.V, index, d1, 0)

    @classmethod
    def w(cls, index: int, d2: int = 0) -> Jet:
        return cls(GeneratorKind.W, index, 0, d2)

    @classmethod
    def parse_generator(cls, name: str) -> Jet:
        name = name.strip().replace("_", "")
        if name == "u":
            return cls.u()
        if len(name) > 1 and name[0] in "vw" and name[1:].isdigit():
            index = int(name[1:])
            return cls.v(index) if name[0] == "v" else cls.w(index)
        raise ValueError(f"Unknown generator '{name}'")

    @property
    def is_canonical(self) -> bool:
        if min(self.index, self.d1, self.d2) < 0:
            return False
        if self.kind == GeneratorKind.V:
            return self.d2 == 0
        if self.kind == GeneratorKind.W:
            return self.d1 == 0
        return self.index == 0

    @property
    def base(self) -> Jet:
        return Jet(self.kind, self.index, 0, 0)

    @property
    def name(self) -> str:
        if self.kind == GeneratorKind.U:
            return "u"
        return f"{self.kind.symbol}{self.index}"

    def tau(self) -> Jet:
        if self.kind == GeneratorKind.U:
            return Jet(GeneratorKind.U, 0, self.d2, self.d1)
        if self.kind == GeneratorKind.V:
            return Jet(GeneratorKind.W, self.index, 0, self.d1)
        return Jet(GeneratorKind.V, self.index, self.d2, 0)

    def __str__(self) -> str:
        prefix = _derivative_prefix(self.d1, self.d2)
        return f"{prefix}({self.name})" if prefix else self.name


def _derivative_prefix(d1: int, d2: int) -> str:
    parts = []
    for axis, count in ((1, d1), (2, d2)):
        if count == 1:
            parts.append(f"d{axis}")
        elif count > 1:
            parts.append(f"d{axis}^{count}")
    return " ".join(parts)


Monomial = tuple[tuple[Jet, int], ...]
UNIT: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for jet, power in b:
        powers[jet] = powers.get(jet, 0) + power
    return tuple(sorted(powers.items()))


def mono_drop(monomial: Monomial, position: int) -> Monomial:
    """Lower the power of one factor by one."""
    jet, power = monomial[position]
    if power == 1:
        return monomial[:position] + monomial[position + 1:]
    return monomial[:position] + ((jet, power - 1),) + monomial[position + 1:]


def mono_tau(monomial: Monomial) -> Monomial:
    return tuple(sorted((jet.tau(), power) for jet, power in monomial))


def mono_str(monomial: Monomial) -> str:
    factors = []
    for jet, power in monomial:
        text = str(jet)
        factors.append(text if power == 1 else f"{text}^{power}")
    return "*".join(factors)


Coefficient = Union[Number, "DiffPoly"]


class DiffPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        cleaned: dict[Monomial, Scalar] = {}
        if terms:
            for monomial, coeff in terms.items():
                if type(coeff) is not Scalar:
                    coeff = Scalar.of(coeff)
                if coeff:
                    cleaned[monomial] = coeff
        self.terms = cleaned

    @classmethod
    def zero(cls) -> DiffPoly:
        return cls()

    @classmethod
    def one(cls) -> DiffPoly:
        return cls({UNIT: ONE})

    @classmethod
    def constant(cls, value: Number) -> DiffPoly:
        return cls({UNIT: Scalar.of(value)})

    @classmethod
    def from_jet(cls, jet: Jet, coeff: Number = 1) -> DiffPoly:
        if not jet.is_canonical:
            raise ValueError(f"Jet {jet!r} is not canonical")
        return cls({((jet, 1),): Scalar.of(coeff)})

    @classmethod
    def u(cls, d1: int = 0, d2: int = 0) -> DiffPoly:
        return cls.from_jet(Jet.u(d1, d2))

    @classmethod
    def v(cls, index: int, d1: int = 0) -> DiffPoly:
        return cls.from_jet(Jet.v(index, d1))

    @classmethod
    def w(cls, index: int, d2: int = 0) -> DiffPoly:
        return cls.from_jet(Jet.w(index, d2))

    @classmethod
    def coerce(cls, value: Coefficient) -> DiffPoly:
        if isinstance(value, DiffPoly):
            return value
        return cls.constant(value)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not monomial for monomial in self.terms)

    @property
    def constant_term(self) -> Scalar:
        return self.terms.get(UNIT, ZERO)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Scalar]]:
        return iter(self.sorted_terms())

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: item[0])

    def jets(self) -> set[Jet]:
        return {jet for monomial in self.terms for jet, _ in monomial}

    def generators(self) -> set[Jet]:
        return {jet.base for jet in self.jets()}

    def max_index(self, kind: GeneratorKind) -> int:
        """Largest index of the given generator kind, -1 when absent."""
        return max((jet.index for jet in self.jets() if jet.kind == kind), default=-1)

    def __neg__(self) -> DiffPoly:
        return DiffPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: Coefficient) -> DiffPoly:
        other = DiffPoly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        result = dict(self.terms)
        for monomial, coeff in other.terms.items():
            result[monomial] = result.get(monomial, ZERO) + coeff
        return DiffPoly(result)

    __radd__ = __add__

    def __sub__(self, other: Coefficient) -> DiffPoly:
        return self + (-DiffPoly.coerce(other))

    def __rsub__(self, other: Coefficient) -> DiffPoly:
        return DiffPoly.coerce(other) - self

    def scale(self, factor: Number) -> DiffPoly:
        factor = Scalar.of(factor)
        if not factor:
            return DiffPoly()
        return DiffPoly({m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other: Coefficient) -> DiffPoly:
        if not isinstance(other, DiffPoly):
            return self.scale(other)
        result: dict[Monomial, Scalar] = {}
        accumulate_product(result, self, other, 1)
        return DiffPoly(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> DiffPoly:
        if exponent < 0:
            raise ValueError("Negative powers are not polynomials")
        result = DiffPoly.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DiffPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Scalar)) or hasattr(other, "denominator"):
            return self.terms == DiffPoly.constant(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"DiffPoly({self})"

    def __str__(self) -> str:
        return format_poly(self)


def accumulate_product(
    target: dict[Monomial, Scalar],
    left: DiffPoly,
    right: DiffPoly,
    factor: Number,
) -> None:
    """Add factor*left*right into a raw term dictionary in place."""
    if not factor:
        return
    for m1, c1 in left.terms.items():
        c1 = c1 * factor
        for m2, c2 in right.terms.items():
            key = mono_mul(m1, m2)
            target[key] = target.get(key, ZERO) + c1 * c2


def poly_add(p: DiffPoly, q: DiffPoly) -> DiffPoly:
    return p + q


def poly_mul(p: DiffPoly, q: DiffPoly) -> DiffPoly:
    return p * q


def poly_sum(polys: Iterable[DiffPoly]) -> DiffPoly:
    result: dict[Monomial, Scalar] = {}
    for poly in polys:
        for monomial, coeff in poly.terms.items():
            result[monomial] = result.get(monomial, ZERO) + coeff
    return DiffPoly(result)


def tau_poly(p: DiffPoly) -> DiffPoly:
    """Swap d1 with d2, v with w, and conjugate the coefficients."""
    return DiffPoly({mono_tau(m): c.conj() for m, c in p.terms.items()})


def format_poly(p: DiffPoly) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for monomial, coeff in p.sorted_terms():
        body = mono_str(monomial)
        if not body:
            text, negative = _format_coefficient(coeff, standalone=True)
        else:
            prefix, negative = _format_coefficient(coeff, standalone=False)
            text = f"{prefix}{body}"
        if not pieces:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces)


def _format_coefficient(coeff: Scalar, standalone: bool) -> tuple[str, bool]:
    if coeff.is_real:
        negative = coeff.re < 0
        magnitude = abs(coeff.re)
        if standalone:
            return str(magnitude), negative
        if magnitude == 1:
            return "", negative
        return f"{magnitude}*", negative
    if standalone:
        return f"({coeff})", False
    return f"({coeff})*", False
