"""
Exact scalars, truncated power series over the rationals, and the Chow ring
of projective space Q[H]/(H^{n+1}) with its degree map.

Series arithmetic runs on sympy's ring_series over QQ[x]; coefficients leave
this module as ``fractions.Fraction`` and never as floats.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, List, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_exp, rs_log, rs_mul, rs_pow, rs_series_inversion, rs_trunc
from sympy.polys.rings import PolyElement, ring

from app.utils.errors import DomainError

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]

_RATIONAL_PATTERN = re.compile(r'^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$')


def as_rational(value: Scalar) -> Fraction:
    """Coerce an int or Fraction to a Fraction, refusing floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"expected an exact integer or fraction, got {type(value).__name__}")
    return Fraction(value)


def format_rational(value: Scalar) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    return str(as_rational(value))


def parse_rational(text: str) -> Fraction:
    """Inverse of format_rational. Only integer and "p/q" forms are accepted."""
    match = _RATIONAL_PATTERN.match(str(text))
    if not match:
        raise DomainError(f"not an exact rational: {text!r}")
    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(int(numerator), int(denominator or 1))


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) extended to negative top argument.

    For n < 0 this is the polynomial n(n-1)...(n-k+1)/k!, which is what
    Euler characteristics of negative twists need.
    """
    if k < 0:
        return 0
    numerator = 1
    for i in range(k):
        numerator *= n - i
    return numerator // factorial(k)


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------

SERIES_RING, SERIES_X = ring("x", QQ)


def to_qq(value: Scalar):
    value = as_rational(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True)
class TruncatedSeries:
    """A power series known up to x^order, held as an element of QQ[x] with no term past x^order."""

    element: PolyElement
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise DomainError(f"series order must be non-negative, got {self.order}")
        object.__setattr__(self, 'element', rs_trunc(self.element, SERIES_X, self.order + 1))

    @property
    def precision(self) -> int:
        return self.order + 1

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        return tuple(self[k] for k in range(self.order + 1))

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[Scalar], order: int) -> "TruncatedSeries":
        """Pad with zeros or drop terms so the result has exactly the given order."""
        if order < 0:
            raise DomainError(f"series order must be non-negative, got {order}")
        terms = {(k,): to_qq(c) for k, c in enumerate(coefficients) if k <= order}
        return cls(SERIES_RING.from_dict(terms), order)

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "TruncatedSeries":
        return cls.from_coefficients([value], order)

    @classmethod
    def variable(cls, order: int, scale: Scalar = 1) -> "TruncatedSeries":
        """The series scale * x."""
        return cls.from_coefficients([0, scale], order)

    def __getitem__(self, k: int) -> Fraction:
        if not 0 <= k <= self.order:
            return Fraction(0)
        return from_qq(self.element.get((k,), QQ.zero))

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.element, order)

    def _check_order(self, other: "TruncatedSeries"):
        if self.order != other.order:
            raise DomainError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_order(other)
        return TruncatedSeries(self.element + other.element, self.order)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_order(other)
        return TruncatedSeries(self.element - other.element, self.order)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.element, self.order)

    def __mul__(self, other: Union["TruncatedSeries", Scalar]) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check_order(other)
        return TruncatedSeries(rs_mul(self.element, other.element, SERIES_X, self.precision), self.order)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "TruncatedSeries":
        return TruncatedSeries(self.element * to_qq(factor), self.order)

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if exponent < 0:
            return series_inverse(self) ** (-exponent)
        if exponent == 0:
            return TruncatedSeries.constant(1, self.order)
        return TruncatedSeries(rs_pow(self.element, exponent, SERIES_X, self.precision), self.order)

    def is_zero(self) -> bool:
        return not self.element

    def __repr__(self) -> str:
        terms = [f"{format_rational(c)}*x^{k}" for k, c in enumerate(self.coefficients) if c != 0]
        return f"TruncatedSeries({' + '.join(terms) or '0'}; O(x^{self.order + 1}))"


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_scale(a: TruncatedSeries, factor: Scalar) -> TruncatedSeries:
    return a.scale(factor)


def series_pow(a: TruncatedSeries, exponent: int) -> TruncatedSeries:
    return a ** exponent


def series_truncate(a: TruncatedSeries, order: int) -> TruncatedSeries:
    return a.truncate(order)


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """exp(s) for a series without constant term."""
    if s[0] != 0:
        raise DomainError(f"exp needs a series with zero constant term, got {format_rational(s[0])}")
    if s.is_zero():
        return TruncatedSeries.constant(1, s.order)
    return TruncatedSeries(rs_exp(s.element, SERIES_X, s.precision), s.order)


def series_inverse(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a series with constant term 1."""
    if s[0] != 1:
        raise DomainError(f"inverse needs constant term 1, got {format_rational(s[0])}")
    return TruncatedSeries(rs_series_inversion(s.element, SERIES_X, s.precision), s.order)


def series_log(s: TruncatedSeries) -> TruncatedSeries:
    """log(s) for a series with constant term 1."""
    if s[0] != 1:
        raise DomainError(f"log needs constant term 1, got {format_rational(s[0])}")
    if s.order == 0:
        return TruncatedSeries.constant(0, 0)
    return TruncatedSeries(rs_log(s.element, SERIES_X, s.precision), s.order)


def exp_series(order: int, scale: Scalar = 1) -> TruncatedSeries:
    """exp(scale * x) up to x^order."""
    return series_exp(TruncatedSeries.variable(order, scale))


def todd_series(order: int) -> TruncatedSeries:
    """x/(1 - exp(-x)) up to x^order.

    1 - exp(-x) = x * g(x) with g(x) = sum_k (-1)^k x^k/(k+1)!, so the Todd
    series is the inverse of g.
    """
    if order < 0:
        raise DomainError(f"series order must be non-negative, got {order}")
    g = TruncatedSeries.from_coefficients(
        [Fraction((-1) ** k, factorial(k + 1)) for k in range(order + 1)], order
    )
    return series_inverse(g)


# ---------------------------------------------------------------------------
# Chow ring of P^n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChowClass:
    """An element of Q[H]/(H^{n+1}); parts[k] is the coefficient of H^k (codimension k)."""

    ambient: int
    parts: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.ambient < 1:
            raise DomainError(f"ambient dimension must be positive, got {self.ambient}")
        if len(self.parts) != self.ambient + 1:
            raise DomainError(
                f"a class on P^{self.ambient} has {self.ambient + 1} parts, got {len(self.parts)}"
            )
        object.__setattr__(self, 'parts', tuple(as_rational(p) for p in self.parts))

    @classmethod
    def from_parts(cls, ambient: int, parts: Iterable[Scalar]) -> "ChowClass":
        """Pad with zeros; parts beyond codimension n are dropped (they vanish)."""
        values = [as_rational(p) for p in parts][:ambient + 1]
        values += [Fraction(0)] * (ambient + 1 - len(values))
        return cls(ambient, tuple(values))

    @classmethod
    def unit(cls, ambient: int) -> "ChowClass":
        return cls.from_parts(ambient, [1])

    @classmethod
    def zero(cls, ambient: int) -> "ChowClass":
        return cls.from_parts(ambient, [])

    @classmethod
    def scalar(cls, ambient: int, value: Scalar) -> "ChowClass":
        return cls.from_parts(ambient, [value])

    @classmethod
    def monomial(cls, ambient: int, codim: int, coefficient: Scalar = 1) -> "ChowClass":
        """coefficient * H^codim, which is zero past codimension n."""
        if codim < 0:
            raise DomainError(f"codimension must be non-negative, got {codim}")
        parts = [0] * (ambient + 1)
        if codim <= ambient:
            parts[codim] = coefficient
        return cls.from_parts(ambient, parts)

    @classmethod
    def from_series(cls, ambient: int, s: TruncatedSeries) -> "ChowClass":
        """Substitute x = H into a series; terms past H^n vanish."""
        return cls.from_parts(ambient, s.coefficients)

    def as_series(self) -> TruncatedSeries:
        return TruncatedSeries.from_coefficients(self.parts, self.ambient)

    def __getitem__(self, codim: int) -> Fraction:
        return self.parts[codim] if 0 <= codim <= self.ambient else Fraction(0)

    def _check_ambient(self, other: "ChowClass"):
        if not isinstance(other, ChowClass):
            raise DomainError(f"expected a Chow class, got {type(other).__name__}")
        if self.ambient != other.ambient:
            raise DomainError(f"ambient mismatch: P^{self.ambient} vs P^{other.ambient}")

    def __add__(self, other: "ChowClass") -> "ChowClass":
        self._check_ambient(other)
        return ChowClass(self.ambient, tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __sub__(self, other: "ChowClass") -> "ChowClass":
        return self + (-other)

    def __neg__(self) -> "ChowClass":
        return ChowClass(self.ambient, tuple(-p for p in self.parts))

    def __mul__(self, other: Union["ChowClass", Scalar]) -> "ChowClass":
        if isinstance(other, ChowClass):
            return chow_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "ChowClass":
        factor = as_rational(factor)
        return ChowClass(self.ambient, tuple(factor * p for p in self.parts))

    def __pow__(self, exponent: int) -> "ChowClass":
        if exponent < 0:
            return chow_inverse(self) ** (-exponent)
        return ChowClass.from_series(self.ambient, self.as_series() ** exponent)

    def is_zero(self) -> bool:
        return all(p == 0 for p in self.parts)

    def to_json(self) -> List[str]:
        return [format_rational(p) for p in self.parts]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "ChowClass":
        if not isinstance(data, (list, tuple)) or len(data) < 2:
            raise DomainError("a Chow class is serialized as an array of at least two coefficients")
        return cls(len(data) - 1, tuple(parse_rational(p) for p in data))

    def __str__(self) -> str:
        terms = []
        for k, p in enumerate(self.parts):
            if p == 0:
                continue
            if k == 0:
                terms.append(format_rational(p))
                continue
            monomial = "H" if k == 1 else f"H^{k}"
            coefficient = "" if p == 1 else "-" if p == -1 else f"{format_rational(p)}*"
            terms.append(f"{coefficient}{monomial}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def hyperplane(ambient: int) -> ChowClass:
    """The hyperplane class H on P^n."""
    return ChowClass.monomial(ambient, 1)


def chow_mul(a: ChowClass, b: ChowClass) -> ChowClass:
    """Truncated polynomial product; anything past codimension n is zero."""
    a._check_ambient(b)
    return ChowClass(a.ambient, (a.as_series() * b.as_series()).coefficients)

def chow_add(a: ChowClass, b: ChowClass) -> ChowClass:
    return a + b


def chow_scale(a: ChowClass, factor: Scalar) -> ChowClass:
    return a.scale(factor)


def chow_pow(a: ChowClass, exponent: int) -> ChowClass:
    return a ** exponent



def chow_exp(a: ChowClass) -> ChowClass:
    """exp of a nilpotent class (zero constant part)."""
    return ChowClass.from_series(a.ambient, series_exp(a.as_series()))


def chow_log(a: ChowClass) -> ChowClass:
    return ChowClass.from_series(a.ambient, series_log(a.as_series()))


def chow_inverse(a: ChowClass) -> ChowClass:
    """Inverse of a class whose constant part is 1."""
    return ChowClass.from_series(a.ambient, series_inverse(a.as_series()))


def integral(a: ChowClass) -> Fraction:
    """Degree of the zero-cycle part: the coefficient of the point class H^n."""
    return a.parts[a.ambient]
