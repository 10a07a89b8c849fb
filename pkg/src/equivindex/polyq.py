"""Dense univariate polynomials over the Gaussian rationals.

Coefficient lists are index-by-power tuples; these helpers back the exact
density calculus and the ray coefficient polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import GR, GaussianRational

Poly = tuple[GaussianRational, ...]


def poly(coeffs: Sequence) -> Poly:
    out = [GaussianRational.coerce(c) if not isinstance(c, GaussianRational) else c
           for c in coeffs]
    while out and out[-1].is_zero():
        out.pop()
    return tuple(out)


def poly_zero() -> Poly:
    return ()


def poly_is_zero(p: Poly) -> bool:
    return len(p) == 0


def poly_deg(p: Poly) -> int:
    return len(p) - 1


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else GR(0)
        b = q[k] if k < len(q) else GR(0)
        out.append(a + b)
    return poly(out)


def poly_neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def poly_scale(p: Poly, c) -> Poly:
    c = GaussianRational.coerce(c)
    if c.is_zero():
        return ()
    return poly(tuple(a * c for a in p))


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [GR(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return poly(out)


def poly_eval(p: Poly, x) -> GaussianRational:
    acc = GR(0)
    for c in reversed(p):
        acc = acc * GaussianRational.coerce(x) + c
    return acc


def poly_shift(p: Poly, a) -> Poly:
    """p(x + a) by Horner expansion."""
    a = GaussianRational.coerce(a)
    out: Poly = ()
    for c in reversed(p):
        out = poly_add(poly_mul(out, poly((a, GR(1)))), poly((c,)))
    return out


def poly_compose_linear(p: Poly, a, b) -> Poly:
    """p(a + b*x)."""
    a = GaussianRational.coerce(a)
    b = GaussianRational.coerce(b)
    out: Poly = ()
    lin = poly((a, b))
    for c in reversed(p):
        out = poly_add(poly_mul(out, lin), poly((c,)))
    return out


def poly_diff(p: Poly) -> Poly:
    return poly(tuple(p[k] * k for k in range(1, len(p))))


def poly_integrate(p: Poly) -> Poly:
    """Antiderivative with zero constant term."""
    return poly((GR(0),) + tuple(p[k] * GR(Fraction(1, k + 1)) for k in range(len(p))))


def poly_definite(p: Poly, a, b) -> GaussianRational:
    prim = poly_integrate(p)
    return poly_eval(prim, b) - poly_eval(prim, a)


def poly_interpolate(points: Sequence[tuple[Fraction, GaussianRational]]) -> Poly:
    """Lagrange interpolation through exact sample points."""
    out: Poly = ()
    xs = [Fraction(x) for x, _ in points]
    for i, (xi, yi) in enumerate(points):
        term: Poly = (GaussianRational.coerce(yi),)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            denom = GR(xi - xj)
            term = poly_mul(term, poly_scale(poly((GR(-xj), GR(1))), denom.inverse()))
        out = poly_add(out, term)
    return out


def poly_str(p: Poly, var: str = "x") -> str:
    if not p:
        return "0"
    parts = []
    for k, c in enumerate(p):
        if c.is_zero():
            continue
        if k == 0:
            parts.append(f"{c}")
        elif k == 1:
            parts.append(f"({c})*{var}")
        else:
            parts.append(f"({c})*{var}^{k}")
    return " + ".join(parts)
