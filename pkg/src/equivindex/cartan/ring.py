"""Commutative coefficient ring for chart computations.

Monomials are built from a small alphabet of atoms:

  ('coord', name)        even chart coordinate (exponents may go negative
                         only inside certificate computations)
  ('param', j)           equivariant parameter, exponents in Z
  ('bump', bid, r, key)  r-th derivative of the formal bump g_bid at the
                         registered argument u_key
  ('uarg', key)          the registered scalar u_key as an invertible atom
  ('gauss', key)         exp(-t^2 * u_key)
  ('tvar',)              transgression parameter t
  ('pi',)                the constant pi
  ('phexp', vec)         exp(i * sum_j vec_j * X_j), vec rational

Scalars are Gaussian rationals.  Products merge phase exponentials and
reduce coordinate polynomials against inverse powers of registered u
arguments, so identities like u * u^{-1} = 1 hold with u expanded or not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from ..scalars import GR, GaussianRational

Atom = tuple
Monomial = tuple[tuple[Atom, int], ...]


class NonIntegrable(ValueError):
    """A fiber-integration rule is missing for a surviving term."""


@dataclass
class UArg:
    """Registered bump/Gaussian argument: an even polynomial in block coords."""

    key: str
    coords: tuple[str, ...]
    expanded: "Expr"


class Ring:
    """Coefficient ring attached to a chart's coordinates and parameters."""

    def __init__(self, coords: Iterable[str], nparams: int):
        self.coords = tuple(coords)
        self.nparams = nparams
        self.uargs: dict[str, UArg] = {}

    # -- constructors ------------------------------------------------------

    def zero(self) -> "Expr":
        return Expr(self, {})

    def scalar(self, c) -> "Expr":
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return self.zero()
        return Expr(self, {(): c})

    def coord(self, name: str, power: int = 1) -> "Expr":
        if name not in self.coords:
            raise KeyError(f"unknown coordinate {name!r}")
        return Expr(self, {((("coord", name), power),): GR(1)})

    def param(self, j: int, power: int = 1) -> "Expr":
        return Expr(self, {((("param", j), power),): GR(1)})

    def tvar(self, power: int = 1) -> "Expr":
        return Expr(self, {((("tvar",), power),): GR(1)})

    def pi(self, power: int = 1) -> "Expr":
        return Expr(self, {((("pi",), power),): GR(1)})

    def bump(self, bid: str, r: int, key: str) -> "Expr":
        if key not in self.uargs:
            raise KeyError(f"unregistered bump argument {key!r}")
        return Expr(self, {((("bump", bid, r, key), 1),): GR(1)})

    def uatom(self, key: str, power: int = 1) -> "Expr":
        if key not in self.uargs:
            raise KeyError(f"unregistered argument {key!r}")
        return Expr(self, {((("uarg", key), power),): GR(1)})

    def gauss(self, key: str) -> "Expr":
        if key not in self.uargs:
            raise KeyError(f"unregistered argument {key!r}")
        return Expr(self, {((("gauss", key), 1),): GR(1)})

    def phase(self, vec: Iterable[Fraction]) -> "Expr":
        v = tuple(Fraction(x) for x in vec)
        if all(x == 0 for x in v):
            return self.scalar(1)
        return Expr(self, {((("phexp", v), 1),): GR(1)})

    def register_uarg(self, key: str, coords: Iterable[str],
                      expanded: "Expr") -> None:
        self.uargs[key] = UArg(key, tuple(coords), expanded)

    def from_poly_dict(self, d: dict) -> "Expr":
        """Build an expression from {((coord_name, exp), ...): scalar}."""
        terms = {}
        for mono, c in d.items():
            key = tuple(sorted(((("coord", n), e) for n, e in mono)))
            terms[key] = GaussianRational.coerce(c)
        return Expr(self, terms)


class Expr:
    """Finite Gaussian-rational combination of monomials over a ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict[Monomial, GaussianRational]):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    # -- basic algebra -----------------------------------------------------

    def __add__(self, other: "Expr") -> "Expr":
        out = dict(self.terms)
        for m, c in other.terms.items():
            cur = out.get(m)
            out[m] = c if cur is None else cur + c
        return Expr(self.ring, out)

    def __neg__(self) -> "Expr":
        return Expr(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def scale(self, c) -> "Expr":
        c = GaussianRational.coerce(c)
        return Expr(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other: "Expr") -> "Expr":
        out: dict[Monomial, GaussianRational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _merge_monomials(m1, m2)
                c = c1 * c2
                cur = out.get(m)
                out[m] = c if cur is None else cur + c
        return Expr(self.ring, out)._reduce_uinv()

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    # -- uarg reduction ------------------------------------------------------

    def _reduce_uinv(self) -> "Expr":
        """Divide coordinate polynomials against inverse powers of u args.

        Terms carrying ('uarg', key)^(-k) have their coordinate part reduced
        modulo the expanded polynomial of u, which cancels u * u^{-1} = 1 even
        when u appears expanded.  Reduction is by leading monomial, so normal
        forms are canonical.
        """
        if not any(atom[0] == "uarg" and e < 0 for m in self.terms for atom, e in m):
            return self
        work = dict(self.terms)
        out: dict[Monomial, GaussianRational] = {}
        guard = 0
        while work:
            guard += 1
            if guard > 200000:
                raise RuntimeError("uarg reduction did not terminate")
            m, c = work.popitem()
            hit = None
            for atom, e in m:
                if atom[0] == "uarg" and e < 0:
                    u = self.ring.uargs[atom[1]]
                    step = _divide_step(m, c, u, self.ring)
                    if step is not None:
                        hit = step
                        break
            if hit is None:
                cur = out.get(m)
                out[m] = c if cur is None else cur + c
                if out[m].is_zero():
                    del out[m]
            else:
                for m2, c2 in hit.items():
                    cur = work.get(m2)
                    work[m2] = c2 if cur is None else cur + c2
                    if work[m2].is_zero():
                        del work[m2]
        return Expr(self.ring, out)

    # -- calculus ---------------------------------------------------------------

    def diff(self, coord: str) -> "Expr":
        """Partial derivative; bump and Gaussian atoms follow the chain rule."""
        ring = self.ring
        total = ring.zero()
        for m, c in self.terms.items():
            for idx, (atom, e) in enumerate(m):
                kind = atom[0]
                lowered = m[:idx] + ((atom, e - 1),) + m[idx + 1:]
                rest = tuple(ae for ae in lowered if ae[1] != 0)
                base = Expr(ring, {rest: c * GR(e)})
                if kind == "coord":
                    if atom[1] == coord:
                        total = total + base
                elif kind == "bump":
                    _, bid, r, key = atom
                    du = ring.uargs[key].expanded.diff(coord)
                    if not du.is_zero():
                        chain = Expr(ring, {((("bump", bid, r + 1, key), 1),): GR(1)})
                        total = total + base * chain * du
                elif kind == "gauss":
                    key = atom[1]
                    du = ring.uargs[key].expanded.diff(coord)
                    if not du.is_zero():
                        # d/dx exp(-t^2 u)^e = -e t^2 du * (same monomial)
                        full = Expr(ring, {m: c * GR(-e)})
                        total = total + full * du * ring.tvar(2)
                elif kind == "uarg":
                    key = atom[1]
                    du = ring.uargs[key].expanded.diff(coord)
                    if not du.is_zero():
                        total = total + base * du
                # param, tvar, pi, phexp are coordinate-independent
        return total._reduce_uinv()

    def subst_param_zero(self) -> "Expr":
        """Set all parameters and phases to their X = 0 values."""
        out: dict[Monomial, GaussianRational] = {}
        for m, c in self.terms.items():
            keep = []
            dead = False
            for atom, e in m:
                if atom[0] == "param":
                    dead = True
                    break
                if atom[0] == "phexp":
                    continue
                keep.append((atom, e))
            if dead:
                continue
            key = tuple(sorted(keep))
            out[key] = out.get(key, GR(0)) + c
        return Expr(self.ring, out)

    # -- queries -------------------------------------------------------------------

    def coefficient_of_monomial(self, m: Monomial) -> GaussianRational:
        return self.terms.get(tuple(sorted(m)), GR(0))

    def evaluate(self, coord_vals: dict[str, complex], param_vals: list[complex],
                 t_val: float = 0.0, bumps: Optional[dict[str, Callable]] = None,
                 pi_val: float = 3.141592653589793) -> complex:
        """Numeric evaluation; bumps maps bump id -> callable(r, u)."""
        total = 0j
        for m, c in self.terms.items():
            val = complex(c)
            for atom, e in m:
                kind = atom[0]
                if kind == "coord":
                    val *= coord_vals[atom[1]] ** e
                elif kind == "param":
                    val *= param_vals[atom[1]] ** e
                elif kind == "tvar":
                    val *= t_val ** e
                elif kind == "pi":
                    val *= pi_val ** e
                elif kind == "phexp":
                    import cmath
                    phase = sum(float(cj) * param_vals[j] for j, cj in enumerate(atom[1]))
                    val *= cmath.exp(1j * phase) ** e
                elif kind == "uarg":
                    u = self.ring.uargs[atom[1]].expanded.evaluate(
                        coord_vals, param_vals, t_val, bumps, pi_val)
                    val *= u ** e
                elif kind == "gauss":
                    import cmath
                    u = self.ring.uargs[atom[1]].expanded.evaluate(
                        coord_vals, param_vals, t_val, bumps, pi_val)
                    val *= cmath.exp(-t_val * t_val * u) ** e
                elif kind == "bump":
                    _, bid, r, key = atom
                    u = self.ring.uargs[key].expanded.evaluate(
                        coord_vals, param_vals, t_val, bumps, pi_val)
                    val *= bumps[bid](r, u.real) ** e
                else:
                    raise NonIntegrable(f"cannot evaluate atom {atom}")
            total += val
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=_mono_sort_key):
            c = self.terms[m]
            factors = []
            for atom, e in m:
                name = _atom_name(atom)
                factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors) if factors else "1"
            bits.append(f"({c})*{body}")
        return " + ".join(bits)


def _mono_sort_key(m: Monomial):
    return tuple((a[0], str(a[1:]), e) for a, e in m)


def _atom_name(atom: Atom) -> str:
    kind = atom[0]
    if kind == "coord":
        return atom[1]
    if kind == "param":
        return f"X{atom[1]}"
    if kind == "tvar":
        return "t"
    if kind == "pi":
        return "pi"
    if kind == "bump":
        primes = "'" * atom[2]
        return f"g{primes}({atom[3]})" if atom[1] == "g" else f"{atom[1]}{primes}({atom[3]})"
    if kind == "uarg":
        return f"[{atom[1]}]"
    if kind == "gauss":
        return f"exp(-t^2 {atom[1]})"
    if kind == "phexp":
        parts = "+".join(f"{c}X{j}" for j, c in enumerate(atom[1]) if c)
        return f"e^(i({parts}))"
    return str(atom)


def _merge_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    acc: dict[Atom, int] = {}
    phvec = None
    for atom, e in list(m1) + list(m2):
        if atom[0] == "phexp":
            vec = tuple(Fraction(x) * e for x in atom[1])
            phvec = vec if phvec is None else tuple(a + b for a, b in zip(phvec, vec))
        else:
            acc[atom] = acc.get(atom, 0) + e
    if phvec is not None and any(x != 0 for x in phvec):
        acc[("phexp", phvec)] = 1
    return tuple(sorted(((a, e) for a, e in acc.items() if e != 0)))


def _divide_step(m: Monomial, c: GaussianRational, u: UArg, ring: Ring):
    """One reduction step of the coordinate part of (m, c) against u.

    If the coordinate monomial is divisible by the leading monomial of the
    expanded u, rewrite  P*u^{-k} = (P/lt(u)) * (u - tail) * u^{-k} ... i.e.
    return replacement terms; otherwise None.
    """
    exp_terms = u.expanded.terms
    if not exp_terms:
        return None
    # leading coordinate monomial of u by the canonical sort
    lead = max(exp_terms, key=_mono_sort_key)
    lead_coeff = exp_terms[lead]
    coords_needed = {atom: e for atom, e in lead if atom[0] == "coord"}
    mono = dict(m)
    for atom, e in coords_needed.items():
        if mono.get(atom, 0) < e:
            return None
    # quotient monomial q = m / lt(u)
    q = dict(mono)
    for atom, e in coords_needed.items():
        q[atom] -= e
        if q[atom] == 0:
            del q[atom]
    # bump the uarg exponent by +1 (one factor of u consumed)
    ukey = ("uarg", u.key)
    out: dict[Monomial, GaussianRational] = {}
    q_up = dict(q)
    q_up[ukey] = q_up.get(ukey, 0) + 1
    if q_up.get(ukey, 0) == 0:
        del q_up[ukey]
    base_c = c / lead_coeff
    key_up = tuple(sorted(q_up.items()))
    out[key_up] = out.get(key_up, GR(0)) + base_c
    # subtract tail * quotient at the original u power
    for mono_u, cu in exp_terms.items():
        if mono_u == lead:
            continue
        merged = _merge_monomials(tuple(sorted(q.items())), mono_u)
        out[merged] = out.get(merged, GR(0)) - base_c * cu
    return out
