"""Truncated multivariate power series for germ arithmetic.

Coefficients are either exact Gaussian rationals or complex floats carrying a
single error bound for the whole series.  Truncation is by total degree; all
ring operations re-truncate so the order is an invariant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Union

from .scalars import GR, GaussianRational

Coeff = Union[GaussianRational, complex]


class PowerSeries:
    """Polynomial jet sum_a c_a Y^a, |a| <= order, over Q(i) or complex."""

    __slots__ = ("nvars", "order", "coeffs", "exact", "err")

    def __init__(self, nvars: int, order: int, coeffs: dict | None = None,
                 exact: bool = True, err: float = 0.0):
        self.nvars = nvars
        self.order = order
        self.exact = exact
        self.err = err
        self.coeffs: dict[tuple[int, ...], Coeff] = {}
        if coeffs:
            for k, v in coeffs.items():
                if sum(k) <= order:
                    self._put(tuple(k), v)

    def _put(self, key: tuple[int, ...], val: Coeff):
        if isinstance(val, GaussianRational) and val.is_zero():
            self.coeffs.pop(key, None)
        elif not isinstance(val, GaussianRational) and val == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = val

    # -- constructors ---------------------------------------------------

    @staticmethod
    def constant(c, nvars: int, order: int) -> "PowerSeries":
        if isinstance(c, (int, Fraction)):
            c = GR(c)
        exact = isinstance(c, GaussianRational)
        s = PowerSeries(nvars, order, exact=exact)
        key = (0,) * nvars
        s._put(key, c)
        return s

    @staticmethod
    def variable(i: int, nvars: int, order: int) -> "PowerSeries":
        s = PowerSeries(nvars, order)
        if order >= 1:
            key = tuple(1 if j == i else 0 for j in range(nvars))
            s._put(key, GR(1))
        return s

    @staticmethod
    def exponential(scale, var: int, nvars: int, order: int) -> "PowerSeries":
        """exp(scale * Y_var); coefficients scale^k / k!."""
        if isinstance(scale, (int, Fraction)):
            scale = GR(scale)
        exact = isinstance(scale, GaussianRational)
        s = PowerSeries(nvars, order, exact=exact)
        term: Coeff = GR(1) if exact else complex(1)
        fact = 1
        for k in range(order + 1):
            key = tuple(k if j == var else 0 for j in range(nvars))
            if k > 0:
                fact *= k
            val = term / fact if not exact else term * GR(Fraction(1, fact))
            s._put(key, val)
            term = term * scale
        return s

    # -- numeric conversion ----------------------------------------------

    def to_numeric(self, extra_err: float = 0.0) -> "PowerSeries":
        out = PowerSeries(self.nvars, self.order, exact=False,
                          err=self.err + extra_err)
        for k, v in self.coeffs.items():
            out._put(k, complex(v))
        return out

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, other: "PowerSeries") -> tuple["PowerSeries", "PowerSeries"]:
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        order = min(self.order, other.order)
        a, b = self.truncate(order), other.truncate(order)
        if a.exact != b.exact:
            a, b = a.to_numeric(), b.to_numeric()
        return a, b

    def truncate(self, order: int) -> "PowerSeries":
        if order >= self.order:
            return self
        return PowerSeries(self.nvars, order,
                           {k: v for k, v in self.coeffs.items() if sum(k) <= order},
                           exact=self.exact, err=self.err)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        a, b = self._aligned(other)
        out = PowerSeries(a.nvars, a.order, dict(a.coeffs), a.exact, a.err + b.err)
        for k, v in b.coeffs.items():
            cur = out.coeffs.get(k)
            out._put(k, v if cur is None else cur + v)
        return out

    def __neg__(self) -> "PowerSeries":
        return self.scale(GR(-1))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + (-other)

    def scale(self, c) -> "PowerSeries":
        if isinstance(c, (int, Fraction)):
            c = GR(c)
        if isinstance(c, GaussianRational) and not self.exact:
            c = complex(c)
        exact = self.exact and isinstance(c, GaussianRational)
        out = PowerSeries(self.nvars, self.order, exact=exact,
                          err=self.err * (abs(complex(c)) if not exact else 1.0))
        for k, v in self.coeffs.items():
            out._put(k, v * c if exact else complex(v) * complex(c))
        return out

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        a, b = self._aligned(other)
        out = PowerSeries(a.nvars, a.order, exact=a.exact)
        for k1, v1 in a.coeffs.items():
            for k2, v2 in b.coeffs.items():
                key = tuple(x + y for x, y in zip(k1, k2))
                if sum(key) > a.order:
                    continue
                cur = out.coeffs.get(key)
                prod = v1 * v2
                out._put(key, prod if cur is None else cur + prod)
        if not a.exact:
            na = sum(abs(complex(v)) for v in a.coeffs.values())
            nb = sum(abs(complex(v)) for v in b.coeffs.values())
            out.err = a.err * nb + b.err * na + a.err * b.err
        return out

    def inverse(self) -> "PowerSeries":
        """Multiplicative inverse; constant term must be invertible."""
        c0 = self.coeffs.get((0,) * self.nvars)
        if c0 is None or (isinstance(c0, GaussianRational) and c0.is_zero()) or c0 == 0:
            raise ZeroDivisionError("series has zero constant term")
        inv0 = c0.inverse() if isinstance(c0, GaussianRational) else 1.0 / c0
        one = PowerSeries.constant(GR(1) if self.exact else complex(1),
                                   self.nvars, self.order)
        rest = (self - PowerSeries.constant(c0, self.nvars, self.order)).scale(inv0)
        # 1/(1+r) = sum_k (-r)^k; r has positive valuation so this terminates
        out = one
        power = one
        sign = 1
        for _ in range(self.order):
            power = power * rest
            sign = -sign
            if not power.coeffs and power.err == 0:
                break
            out = out + power.scale(GR(sign) if self.exact else complex(sign))
        out = out.scale(inv0)
        if not self.exact:
            out.err = self.err * 4.0 * max(1.0, abs(complex(inv0))) ** 2
        return out

    def __pow__(self, n: int) -> "PowerSeries":
        if n < 0:
            return self.inverse() ** (-n)
        out = PowerSeries.constant(GR(1) if self.exact else complex(1),
                                   self.nvars, self.order)
        for _ in range(n):
            out = out * self
        return out

    # -- queries -----------------------------------------------------------

    def coeff(self, key: tuple[int, ...]) -> Coeff:
        missing = GR(0) if self.exact else complex(0)
        return self.coeffs.get(tuple(key), missing)

    def constant_term(self) -> Coeff:
        return self.coeff((0,) * self.nvars)

    def valuation(self) -> int | None:
        """Smallest total degree with a nonzero coefficient, or None if zero."""
        if not self.coeffs:
            return None
        return min(sum(k) for k in self.coeffs)

    def shift_down(self, m: int) -> "PowerSeries":
        """Divide by Y^m in a single variable series (valuations permitting)."""
        if self.nvars != 1:
            raise ValueError("shift_down is single-variable only")
        out = PowerSeries(1, self.order - m, exact=self.exact, err=self.err)
        for (k,), v in self.coeffs.items():
            if k < m:
                raise ZeroDivisionError("series not divisible by Y^m")
            out._put((k - m,), v)
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return not self.coeffs
        return all(abs(complex(v)) <= tol + self.err for v in self.coeffs.values())

    def eval(self, point: list[complex]) -> complex:
        total = 0j
        for k, v in self.coeffs.items():
            term = complex(v)
            for x, e in zip(point, k):
                term *= x ** e
            total += term
        return total

    def max_coeff_delta(self, other: "PowerSeries") -> float:
        """Sup over shared orders of |self_a - other_a|."""
        order = min(self.order, other.order)
        keys = {k for k in self.coeffs if sum(k) <= order}
        keys |= {k for k in other.coeffs if sum(k) <= order}
        worst = 0.0
        for k in keys:
            worst = max(worst, abs(complex(self.coeff(k)) - complex(other.coeff(k))))
        return worst

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        if self.exact and other.exact:
            order = min(self.order, other.order)
            return self.truncate(order).coeffs == other.truncate(order).coeffs
        return self.max_coeff_delta(other) <= self.err + other.err

    def __repr__(self) -> str:
        terms = []
        for k in sorted(self.coeffs, key=lambda kk: (sum(kk), kk)):
            mono = "*".join(f"Y{i}^{e}" for i, e in enumerate(k) if e) or "1"
            terms.append(f"({self.coeffs[k]})*{mono}")
        body = " + ".join(terms) if terms else "0"
        return f"<series[{self.nvars}v,o{self.order}] {body}>"


def geometric_series_coeffs(poly: list[GaussianRational]) -> list[tuple[int, GaussianRational]]:
    """Express p(n) = sum_j b_j * C(n+j, j) exactly.

    Returns [(j, b_j)] so that sum_{n>=0} p(n) x^n = sum_j b_j / (1-x)^{j+1}.
    """
    p = [GaussianRational.coerce(c) for c in poly]
    while p and p[-1].is_zero():
        p.pop()
    out: list[tuple[int, GaussianRational]] = []
    while p:
        deg = len(p) - 1
        # C(n+j, j) has degree j with leading coefficient 1/j!
        b = p[deg] * GR(Fraction(math.factorial(deg)))
        basis = _binomial_poly(deg)
        p = [c - b * basis[k] if k < len(basis) else c for k, c in enumerate(p)]
        out.append((deg, b))
        while p and p[-1].is_zero():
            p.pop()
    return out


def _binomial_poly(j: int) -> list[GaussianRational]:
    """Coefficients of C(n+j, j) as a polynomial in n (index = power of n)."""
    coeffs = [GR(1)]
    for m in range(1, j + 1):
        # multiply by (n+m)/m
        nxt = [GR(0)] * (len(coeffs) + 1)
        inv_m = GR(Fraction(1, m))
        for p, c in enumerate(coeffs):
            nxt[p] = nxt[p] + c            # (m/m) * c * n^p
            nxt[p + 1] = nxt[p + 1] + c * inv_m
        coeffs = nxt
    return coeffs
