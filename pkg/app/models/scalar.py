from __future__ import annotations

from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, "Scalar"]


class Scalar:
    """Exact Gaussian rational re + i*im.

    Both parts are Fractions, so they are always stored in lowest terms with a
    positive denominator.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, str, Fraction] = 0, im: Union[int, str, Fraction] = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def of(cls, value: Number) -> Scalar:
        if isinstance(value, Scalar):
            return value
        return cls(value)

    @classmethod
    def parse(cls, re: str, im: str = "0") -> Scalar:
        return cls(Fraction(re), Fraction(im))

    @property
    def is_real(self) -> bool:
        return not self.im

    def conj(self) -> Scalar:
        if not self.im:
            return self
        return Scalar(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> Scalar:
        return Scalar(-self.re, -self.im)

    def __add__(self, other: Number) -> Scalar:
        if isinstance(other, Scalar):
            return Scalar(self.re + other.re, self.im + other.im)
        return Scalar(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> Scalar:
        if isinstance(other, Scalar):
            return Scalar(self.re - other.re, self.im - other.im)
        return Scalar(self.re - other, self.im)

    def __rsub__(self, other: Number) -> Scalar:
        return Scalar(other - self.re, -self.im)

    def __mul__(self, other: Number) -> Scalar:
        if isinstance(other, Scalar):
            if not self.im and not other.im:
                return Scalar(self.re * other.re)
            return Scalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return Scalar(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.re == other and not self.im
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imaginary(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{_imaginary(abs(self.im))}"

    def to_json(self) -> dict[str, str]:
        return {"re": _ratio(self.re), "im": _ratio(self.im)}


def _imaginary(value: Fraction) -> str:
    if value == 1:
        return "i"
    if value == -1:
        return "-i"
    return f"{value}i"


def _ratio(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
