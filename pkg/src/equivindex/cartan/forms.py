"""Grassmann-algebra forms over a chart's coefficient ring.

A form is a map from sorted tuples of odd-generator indices (one generator
per even coordinate) to ring expressions.  The equivariant differential is
D = d - iota(VX) with VX taken from the chart's action table.
"""

from __future__ import annotations

from typing import Iterable

from ..scalars import GR
from .ring import Expr, Ring


class ReductionUnavailable(ValueError):
    """The requested symbolic reduction does not match a supported normal form."""


class Form:
    """Z2-graded differential form with Expr coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict[tuple[int, ...], Expr] | None = None):
        self.ring = ring
        self.terms: dict[tuple[int, ...], Expr] = {}
        if terms:
            for mono, coef in terms.items():
                if not coef.is_zero():
                    self.terms[tuple(mono)] = coef

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(ring: Ring) -> "Form":
        return Form(ring)

    @staticmethod
    def function(coef: Expr) -> "Form":
        return Form(coef.ring, {(): coef})

    @staticmethod
    def one_form(ring: Ring, coeffs: dict[str, Expr]) -> "Form":
        terms = {}
        for name, coef in coeffs.items():
            idx = ring.coords.index(name)
            terms[(idx,)] = coef
        return Form(ring, terms)

    def d_coord(self, name: str) -> "Form":
        idx = self.ring.coords.index(name)
        return Form(self.ring, {(idx,): self.ring.scalar(1)})

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "Form") -> "Form":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Form(self.ring, out)

    def __neg__(self) -> "Form":
        return Form(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        return Form(self.ring, {m: coef.scale(c) for m, coef in self.terms.items()})

    def mul_expr(self, e: Expr) -> "Form":
        return Form(self.ring, {m: coef * e for m, coef in self.terms.items()})

    def wedge(self, other: "Form") -> "Form":
        out: dict[tuple[int, ...], Expr] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                merged = _wedge_monomials(m1, m2)
                if merged is None:
                    continue
                mono, sign = merged
                coef = c1 * c2
                if sign < 0:
                    coef = -coef
                out[mono] = out[mono] + coef if mono in out else coef
        return Form(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, Form):
            return self.wedge(other)
        if isinstance(other, Expr):
            return self.mul_expr(other)
        return self.scale(other)

    # -- calculus -------------------------------------------------------------------

    def d(self) -> "Form":
        """Exterior differential with the bump chain rule."""
        out = Form.zero(self.ring)
        for mono, coef in self.terms.items():
            for i, name in enumerate(self.ring.coords):
                dc = coef.diff(name)
                if dc.is_zero():
                    continue
                merged = _wedge_monomials((i,), mono)
                if merged is None:
                    continue
                new_mono, sign = merged
                add = dc if sign > 0 else -dc
                out = out + Form(self.ring, {new_mono: add})
        return out

    def iota(self, vx: list[dict[int, Expr]]) -> "Form":
        """Contraction with VX = sum_j X_j VX_j; vx[j] maps coord index to
        the vector-field coefficient."""
        out = Form.zero(self.ring)
        for j, table in enumerate(vx):
            xj = self.ring.param(j)
            for mono, coef in self.terms.items():
                for pos, idx in enumerate(mono):
                    if idx not in table:
                        continue
                    c = table[idx]
                    if c.is_zero():
                        continue
                    rest = mono[:pos] + mono[pos + 1:]
                    term = coef * c * xj
                    if pos % 2 == 1:
                        term = -term
                    out = out + Form(self.ring, {rest: term})
        return out

    def equivariant_d(self, vx: list[dict[int, Expr]]) -> "Form":
        return self.d() - self.iota(vx)

    def lie_derivative(self, vx: list[dict[int, Expr]]) -> "Form":
        return self.d().iota(vx) + self.iota(vx).d()

    # -- queries --------------------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def component(self, mono: Iterable[int]) -> Expr:
        return self.terms.get(tuple(mono), self.ring.zero())

    def max_degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def degree_part(self, k: int) -> "Form":
        return Form(self.ring, {m: c for m, c in self.terms.items() if len(m) == k})

    def parity_split(self) -> tuple["Form", "Form"]:
        even = Form(self.ring, {m: c for m, c in self.terms.items() if len(m) % 2 == 0})
        odd = Form(self.ring, {m: c for m, c in self.terms.items() if len(m) % 2 == 1})
        return even, odd

    def pretty(self) -> str:
        """Canonical text normal form for golden tests."""
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            coef = self.terms[mono]
            gens = "^".join(f"d{self.ring.coords[i]}" for i in mono) or "1"
            bits.append(f"[{gens}] {coef!r}")
        return "\n".join(bits)

    def __repr__(self) -> str:
        return f"<form {self.pretty()}>"


def _wedge_monomials(m1: tuple[int, ...], m2: tuple[int, ...]):
    """Sorted concatenation with Koszul sign; None if a generator repeats."""
    if set(m1) & set(m2):
        return None
    merged = list(m1) + list(m2)
    # insertion sort counting transpositions
    sign = 1
    arr = merged[:]
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return tuple(arr), sign
