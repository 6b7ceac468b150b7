"""Univariate truncated power series over exact rationals.

A series is a dense coefficient vector c0..cN in one commuting variable
(written u, or t when it stands for O^2/m^2 in operator kernels).  The
truncation order is explicit in every value and arithmetic is exact, so
these series are safe to use as coefficient oracles for the operator
expansions elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "RatSeries",
    "ZeroConstantTerm",
    "CompositionOrderViolation",
    "NonSquareConstantTerm",
    "series",
    "constant",
    "variable",
    "one_plus_u",
    "sqrt_series",
    "inv_sqrt_series",
    "inverse",
    "compose",
    "arctan_series",
]


class ZeroConstantTerm(ZeroDivisionError):
    """Inverse or inverse square root of a series with c0 = 0."""


class CompositionOrderViolation(ValueError):
    """compose(f, g) requires g(0) = 0 for the truncation to be exact."""


class NonSquareConstantTerm(ValueError):
    """Square root of a series whose constant term is not a rational square."""


def _coerce(values: Iterable[Fraction | int | str]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True, slots=True)
class RatSeries:
    """Coefficients c0..cN; order_max is N."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", _coerce(self.coeffs))

    @property
    def order_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def truncated(self, order: int) -> "RatSeries":
        if order > self.order_max:
            raise ValueError(f"order {order} exceeds available order {self.order_max}")
        return RatSeries(self.coeffs[: order + 1])

    # Arithmetic keeps the lower of the two orders: coefficients beyond a
    # series' own order are unknown, not zero.
    def _align(self, other: "RatSeries") -> int:
        return min(self.order_max, other.order_max)

    def __add__(self, other: "RatSeries") -> "RatSeries":
        n = self._align(other)
        return RatSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)))

    def __sub__(self, other: "RatSeries") -> "RatSeries":
        n = self._align(other)
        return RatSeries(tuple(self.coeffs[k] - other.coeffs[k] for k in range(n + 1)))

    def __neg__(self) -> "RatSeries":
        return RatSeries(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, RatSeries):
            n = self._align(other)
            out = [Fraction(0)] * (n + 1)
            for i in range(n + 1):
                ci = self.coeffs[i]
                if not ci:
                    continue
                for j in range(n + 1 - i):
                    out[i + j] += ci * other.coeffs[j]
            return RatSeries(tuple(out))
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return RatSeries(tuple(c * f for c in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def derivative(self) -> "RatSeries":
        if self.order_max == 0:
            return RatSeries((Fraction(0),))
        return RatSeries(tuple(k * self.coeffs[k] for k in range(1, self.order_max + 1)))

    def evaluate(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def to_json_obj(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @staticmethod
    def from_json_obj(obj: Sequence[str]) -> "RatSeries":
        return RatSeries(tuple(Fraction(s) for s in obj))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        body = ", ".join(str(c) for c in self.coeffs)
        return f"RatSeries([{body}])"


# -- constructors -------------------------------------------------------------


def series(values: Iterable[Fraction | int | str], order: int | None = None) -> RatSeries:
    """Series from explicit coefficients, zero-padded up to ``order``."""
    coeffs = list(_coerce(values))
    if order is not None:
        if order + 1 < len(coeffs):
            coeffs = coeffs[: order + 1]
        else:
            coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
    return RatSeries(tuple(coeffs))


def constant(value: Fraction | int, order: int) -> RatSeries:
    return series([value], order=order)


def variable(order: int) -> RatSeries:
    return series([0, 1], order=order)


def one_plus_u(order: int) -> RatSeries:
    return series([1, 1], order=order)


# -- functional calculus ------------------------------------------------------


def _fraction_sqrt(c: Fraction) -> Fraction:
    if c < 0:
        raise NonSquareConstantTerm(f"constant term {c} is negative")
    num = math.isqrt(c.numerator)
    den = math.isqrt(c.denominator)
    if num * num != c.numerator or den * den != c.denominator:
        raise NonSquareConstantTerm(f"constant term {c} is not a rational square")
    return Fraction(num, den)


def sqrt_series(s: RatSeries) -> RatSeries:
    """Series r with r*r = s to the truncation order (principal branch)."""
    if not s.coeffs[0]:
        raise ZeroConstantTerm("sqrt of a series with zero constant term")
    r0 = _fraction_sqrt(s.coeffs[0])
    out = [r0]
    for n in range(1, s.order_max + 1):
        acc = s.coeffs[n]
        for i in range(1, n):
            acc -= out[i] * out[n - i]
        out.append(acc / (2 * r0))
    return RatSeries(tuple(out))


def inverse(s: RatSeries) -> RatSeries:
    """Series b with s*b = 1 to the truncation order."""
    if not s.coeffs[0]:
        raise ZeroConstantTerm("inverse of a series with zero constant term")
    b0 = 1 / s.coeffs[0]
    out = [b0]
    for n in range(1, s.order_max + 1):
        acc = Fraction(0)
        for k in range(1, n + 1):
            acc += s.coeffs[k] * out[n - k]
        out.append(-b0 * acc)
    return RatSeries(tuple(out))


def inv_sqrt_series(s: RatSeries) -> RatSeries:
    """Series b with b*b*s = 1 to the truncation order."""
    if not s.coeffs[0]:
        raise ZeroConstantTerm("inverse square root of a series with zero constant term")
    return inverse(sqrt_series(s))


def compose(f: RatSeries, g: RatSeries) -> RatSeries:
    """f(g(u)) to the common truncation order; requires g(0) = 0."""
    if g.coeffs[0]:
        raise CompositionOrderViolation("inner series must have zero constant term")
    n = min(f.order_max, g.order_max)
    gn = RatSeries(g.coeffs[: n + 1])
    acc = constant(f.coeffs[min(n, f.order_max)], n)
    for k in range(min(n, f.order_max) - 1, -1, -1):
        acc = acc * gn + constant(f.coeffs[k], n)
    return acc


def arctan_series(order: int) -> RatSeries:
    out = [Fraction(0)] * (order + 1)
    k = 0
    while 2 * k + 1 <= order:
        out[2 * k + 1] = Fraction((-1) ** k, 2 * k + 1)
        k += 1
    return RatSeries(tuple(out))
