"""Exact Gaussian-rational scalars.

All closed-form data in the workbench (Fourier coefficients, germ
coefficients, chart data) lives in Q(i), the field of Gaussian rationals
a + b*i with a, b rational.  Powers of pi are tracked separately by
:class:`PiScalar` so that volume factors and (2*i*pi)-normalizations stay
symbolic until they cancel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_RatLike = Union[int, Fraction]


class GaussianRational:
    """Exact complex number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re: _RatLike = 0, im: _RatLike = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *args):
        raise AttributeError("GaussianRational is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "GaussianRational":
        return GaussianRational(0, 0)

    @staticmethod
    def one() -> "GaussianRational":
        return GaussianRational(1, 0)

    @staticmethod
    def i() -> "GaussianRational":
        return GaussianRational(0, 1)

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "GaussianRational":
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "GaussianRational":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussianRational.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    # -- predicates / conversions --------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- formatting -----------------------------------------------------

    def __repr__(self) -> str:
        return f"GR({self})"

    def __str__(self) -> str:
        if self.im == 0:
            return _fmt_frac(self.re)
        if self.re == 0:
            return f"{_fmt_frac(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{_fmt_frac(self.re)}{sign}{_fmt_frac(abs(self.im))}i"

    @staticmethod
    def from_str(s: str) -> "GaussianRational":
        """Parse the canonical string form produced by ``str``."""
        s = s.strip().replace(" ", "")
        if not s:
            raise ValueError("empty scalar string")
        if s.endswith("i"):
            body = s[:-1]
            # split a trailing imaginary part off the real part, if any
            for pos in range(len(body) - 1, 0, -1):
                if body[pos] in "+-" and body[pos - 1] not in "+-/e":
                    re_part, im_part = body[:pos], body[pos:]
                    im = Fraction(1) if im_part in ("+",) else (
                        Fraction(-1) if im_part == "-" else Fraction(im_part))
                    return GaussianRational(Fraction(re_part), im)
            if body in ("", "+"):
                return GaussianRational(0, 1)
            if body == "-":
                return GaussianRational(0, -1)
            return GaussianRational(0, Fraction(body))
        return GaussianRational(Fraction(s), 0)


GR = GaussianRational


def gr(re: _RatLike = 0, im: _RatLike = 0) -> GaussianRational:
    return GaussianRational(re, im)


@dataclass(frozen=True)
class PiScalar:
    """A Gaussian rational times an integer power of pi.

    Sums are only defined between equal pi-powers; evaluator pipelines are
    arranged so that pi-powers cancel before scalars reach distribution data,
    and :meth:`as_rational` enforces that.
    """

    coef: GaussianRational
    pi: int = 0

    @staticmethod
    def of(x, pi: int = 0) -> "PiScalar":
        return PiScalar(GaussianRational.coerce(x), pi)

    @staticmethod
    def two_i_pi(power: int = 1) -> "PiScalar":
        """(2*i*pi)**power, kept exact."""
        return PiScalar(GaussianRational(0, 2) ** power, power)

    def __mul__(self, other) -> "PiScalar":
        if isinstance(other, PiScalar):
            return PiScalar(self.coef * other.coef, self.pi + other.pi)
        return PiScalar(self.coef * GaussianRational.coerce(other), self.pi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PiScalar":
        if isinstance(other, PiScalar):
            return PiScalar(self.coef / other.coef, self.pi - other.pi)
        return PiScalar(self.coef / GaussianRational.coerce(other), self.pi)

    def __add__(self, other: "PiScalar") -> "PiScalar":
        if self.coef.is_zero():
            return other
        if other.coef.is_zero():
            return self
        if self.pi != other.pi:
            raise ValueError(f"cannot add pi^{self.pi} to pi^{other.pi}")
        return PiScalar(self.coef + other.coef, self.pi)

    def __neg__(self) -> "PiScalar":
        return PiScalar(-self.coef, self.pi)

    def is_zero(self) -> bool:
        return self.coef.is_zero()

    def as_rational(self) -> GaussianRational:
        """Collapse to a plain Gaussian rational; pi-power must be zero."""
        if not self.coef.is_zero() and self.pi != 0:
            raise ValueError(f"unresolved pi power {self.pi} in scalar {self}")
        return self.coef

    def __complex__(self) -> complex:
        import math
        return complex(self.coef) * math.pi ** self.pi

    def __str__(self) -> str:
        if self.pi == 0:
            return str(self.coef)
        return f"({self.coef})*pi^{self.pi}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s.strip())


def format_rational(x: Fraction) -> str:
    return _fmt_frac(x)


def _fmt_frac(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
