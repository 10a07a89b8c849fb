"""Lie-algebra-side generalized densities: atoms, combs and polynomial pieces.

A :class:`GeneralizedDensity` represents a distribution f(x) on the real line
built from Dirac atoms, arithmetic-progression combs with polynomial masses,
and piecewise-polynomial densities.  Products of group-side generalized
functions correspond to convolutions of these densities, and the smooth
prefactors appearing in index computations act by shifts, finite differences
and interval (de)convolutions, all in exact rational arithmetic.

Conventions:
  * combs carry mass p(n) at x = anchor + n*spacing over an n-range that is
    bounded below, bounded above, or all of Z;
  * pieces carry density p(x) on an interval, a ray or the full line;
  * every comb or ray has one-sided or full support -- mixed tails that would
    defeat deconvolution are rejected at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .polyq import (Poly, poly, poly_add, poly_compose_linear, poly_definite,
                    poly_deg, poly_diff, poly_eval, poly_interpolate,
                    poly_is_zero, poly_mul, poly_neg, poly_scale, poly_shift)
from .scalars import GR, GaussianRational


class ConvolutionDiverges(ValueError):
    """Both operands have two-sided unbounded support."""


class NoCombSolution(ValueError):
    """Interval deconvolution target is not in the image."""


class NoClosedForm(ValueError):
    """Result exists but leaves the supported closed-form class."""


class WindowViolation(ValueError):
    """Test function support exceeds the validity window."""


@dataclass(frozen=True)
class DAtom:
    pos: Fraction
    mass: GaussianRational


@dataclass(frozen=True)
class DComb:
    """Masses p(n) at anchor + n*spacing for n in [n0, n1] (None = unbounded)."""

    anchor: Fraction
    spacing: Fraction
    n0: Optional[int]
    n1: Optional[int]
    poly: Poly

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("comb spacing must be positive")

    def position(self, n: int) -> Fraction:
        return self.anchor + n * self.spacing

    def mass(self, n: int) -> GaussianRational:
        if self.n0 is not None and n < self.n0:
            return GR(0)
        if self.n1 is not None and n > self.n1:
            return GR(0)
        return poly_eval(self.poly, n)

    def residue(self) -> Fraction:
        return self.anchor % self.spacing

    def rebased(self) -> "DComb":
        """Shift the index so the anchor is the residue in [0, spacing)."""
        r = self.residue()
        k0 = (self.anchor - r) / self.spacing
        assert k0.denominator == 1
        k0 = int(k0)
        if k0 == 0:
            return self
        return DComb(r, self.spacing,
                     None if self.n0 is None else self.n0 + k0,
                     None if self.n1 is None else self.n1 + k0,
                     poly_shift(self.poly, -k0))


@dataclass(frozen=True)
class DPiece:
    """Density poly(x) on [lo, hi]; None endpoints mean an unbounded side."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    poly: Poly

    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    def contains(self, x: Fraction) -> bool:
        return ((self.lo is None or x >= self.lo)
                and (self.hi is None or x <= self.hi))

    def density(self, x: Fraction) -> GaussianRational:
        return poly_eval(self.poly, x) if self.contains(x) else GR(0)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class GeneralizedDensity:
    """Finite sum of atoms, combs and pieces; immutable after construction."""

    __slots__ = ("atoms", "combs", "pieces")

    def __init__(self, atoms: Iterable[DAtom] = (), combs: Iterable[DComb] = (),
                 pieces: Iterable[DPiece] = ()):
        a, c, p = self._canonical(atoms, combs, pieces)
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "combs", c)
        object.__setattr__(self, "pieces", p)

    def __setattr__(self, *args):
        raise AttributeError("GeneralizedDensity is immutable")

    # -- construction helpers -------------------------------------------

    @staticmethod
    def zero() -> "GeneralizedDensity":
        return GeneralizedDensity()

    @staticmethod
    def delta(pos=0, mass=1) -> "GeneralizedDensity":
        return GeneralizedDensity(atoms=[DAtom(_frac(pos), GaussianRational.coerce(mass))])

    @staticmethod
    def indicator(lo, hi, scale=1) -> "GeneralizedDensity":
        return GeneralizedDensity(pieces=[DPiece(_frac(lo), _frac(hi),
                                                 poly([GaussianRational.coerce(scale)]))])

    @staticmethod
    def ray(lo, coeffs: Sequence = (1,)) -> "GeneralizedDensity":
        return GeneralizedDensity(pieces=[DPiece(_frac(lo), None, poly(coeffs))])

    @staticmethod
    def full_line(coeffs: Sequence = (1,)) -> "GeneralizedDensity":
        return GeneralizedDensity(pieces=[DPiece(None, None, poly(coeffs))])

    @staticmethod
    def comb(anchor, spacing, n0: Optional[int], n1: Optional[int],
             coeffs: Sequence = (1,)) -> "GeneralizedDensity":
        return GeneralizedDensity(combs=[DComb(_frac(anchor), _frac(spacing),
                                               n0, n1, poly(coeffs))])

    @staticmethod
    def _canonical(atoms, combs, pieces):
        # bounded combs become atoms; merge atoms; sort everything
        atom_map: dict[Fraction, GaussianRational] = {}
        comb_out: list[DComb] = []
        for cb in combs:
            if poly_is_zero(cb.poly):
                continue
            if cb.n0 is not None and cb.n1 is not None:
                for n in range(cb.n0, cb.n1 + 1):
                    m = cb.mass(n)
                    if not m.is_zero():
                        pos = cb.position(n)
                        atom_map[pos] = atom_map.get(pos, GR(0)) + m
            else:
                comb_out.append(cb.rebased())
        for at in atoms:
            if not at.mass.is_zero():
                atom_map[at.pos] = atom_map.get(at.pos, GR(0)) + at.mass
        atom_out = tuple(DAtom(p, m) for p, m in sorted(atom_map.items())
                         if not m.is_zero())

        piece_map: list[DPiece] = []
        for pc in pieces:
            if poly_is_zero(pc.poly):
                continue
            if pc.lo is not None and pc.hi is not None and pc.lo >= pc.hi:
                continue
            piece_map.append(pc)
        # resolve overlaps into disjoint spans with summed polynomials
        resolved: list[DPiece] = []
        if piece_map:
            cuts = sorted({pc.lo for pc in piece_map if pc.lo is not None}
                          | {pc.hi for pc in piece_map if pc.hi is not None})
            spans: list[tuple[Optional[Fraction], Optional[Fraction]]] = []
            if not cuts:
                spans.append((None, None))
            else:
                if any(pc.lo is None for pc in piece_map):
                    spans.append((None, cuts[0]))
                spans.extend(zip(cuts, cuts[1:]))
                if any(pc.hi is None for pc in piece_map):
                    spans.append((cuts[-1], None))
            for lo, hi in spans:
                probe = _region_probe(lo, hi)
                total: Poly = ()
                for pc in piece_map:
                    if pc.contains(probe):
                        total = poly_add(total, pc.poly)
                if not poly_is_zero(total):
                    resolved.append(DPiece(lo, hi, total))
        # merge adjacent spans carrying identical polynomials
        merged: list[DPiece] = []
        for pc in resolved:
            if (merged and merged[-1].poly == pc.poly
                    and merged[-1].hi is not None and pc.lo is not None
                    and merged[-1].hi == pc.lo):
                merged[-1] = DPiece(merged[-1].lo, pc.hi, pc.poly)
            else:
                merged.append(pc)

        comb_out.sort(key=lambda cb: (cb.spacing, cb.residue(), cb.n0 is None,
                                      cb.n0 or 0, cb.n1 is None, cb.n1 or 0))
        return atom_out, tuple(comb_out), tuple(merged)

    # -- linear structure --------------------------------------------------

    def __add__(self, other: "GeneralizedDensity") -> "GeneralizedDensity":
        return GeneralizedDensity(self.atoms + other.atoms,
                                  self.combs + other.combs,
                                  self.pieces + other.pieces)

    def __neg__(self) -> "GeneralizedDensity":
        return self.scale(GR(-1))

    def __sub__(self, other: "GeneralizedDensity") -> "GeneralizedDensity":
        return self + (-other)

    def scale(self, c) -> "GeneralizedDensity":
        c = GaussianRational.coerce(c)
        if c.is_zero():
            return GeneralizedDensity()
        return GeneralizedDensity(
            [DAtom(a.pos, a.mass * c) for a in self.atoms],
            [DComb(cb.anchor, cb.spacing, cb.n0, cb.n1, poly_scale(cb.poly, c))
             for cb in self.combs],
            [DPiece(pc.lo, pc.hi, poly_scale(pc.poly, c)) for pc in self.pieces])

    def shift(self, c) -> "GeneralizedDensity":
        """Translate the density by +c."""
        c = _frac(c)
        return GeneralizedDensity(
            [DAtom(a.pos + c, a.mass) for a in self.atoms],
            [DComb(cb.anchor + c, cb.spacing, cb.n0, cb.n1, cb.poly)
             for cb in self.combs],
            [DPiece(None if pc.lo is None else pc.lo + c,
                    None if pc.hi is None else pc.hi + c, pc.poly)
             for pc in self.pieces])

    def derivative(self) -> "GeneralizedDensity":
        """d/dx.  Supported for piece-only densities without jumps at infinity;
        interior jumps become atoms (distributional derivative)."""
        if self.atoms or self.combs:
            raise NoClosedForm("derivative of atoms/combs leaves the class")
        atoms: list[DAtom] = []
        pieces: list[DPiece] = []
        for pc in self.pieces:
            pieces.append(DPiece(pc.lo, pc.hi, poly_diff(pc.poly)))
            if pc.lo is not None:
                atoms.append(DAtom(pc.lo, poly_eval(pc.poly, pc.lo)))
            if pc.hi is not None:
                atoms.append(DAtom(pc.hi, -poly_eval(pc.poly, pc.hi)))
        return GeneralizedDensity(atoms, (), pieces)

    # -- support information -----------------------------------------------

    def is_zero(self) -> bool:
        if not self.atoms and not self.pieces and not self.combs:
            return True
        if self._pieces_nonzero():
            return False
        # fold atoms into comb lattice classes so exact cancellations count
        classes = self._comb_classes()
        corrections: dict[tuple[Fraction, Fraction], dict[int, GaussianRational]] = {}
        for at in self.atoms:
            hit = None
            for spacing, residue in classes:
                q = (at.pos - residue) / spacing
                if q.denominator == 1:
                    hit = (spacing, residue)
                    corrections.setdefault(hit, {})
                    corrections[hit][int(q)] = corrections[hit].get(int(q), GR(0)) + at.mass
                    break
            if hit is None:
                return False  # merged nonzero atom with nothing to cancel it
        for key, group in classes.items():
            if not _comb_class_is_zero(group, corrections.get(key, {})):
                return False
        return True

    def _pieces_nonzero(self) -> bool:
        # canonicalization resolves pieces into disjoint nonzero spans
        return bool(self.pieces)

    def _comb_classes(self) -> dict[tuple[Fraction, Fraction], list[DComb]]:
        out: dict[tuple[Fraction, Fraction], list[DComb]] = {}
        for cb in self.combs:
            out.setdefault((cb.spacing, cb.residue()), []).append(cb)
        return out

    def equals(self, other: "GeneralizedDensity") -> bool:
        return (self - other).is_zero()

    def support_min(self) -> Optional[Fraction]:
        """Greatest lower bound of the support, or None when unbounded below."""
        lows: list[Fraction] = [a.pos for a in self.atoms]
        for cb in self.combs:
            if cb.n0 is None:
                return None
            lows.append(cb.position(cb.n0))
        for pc in self.pieces:
            if pc.lo is None:
                return None
            lows.append(pc.lo)
        return min(lows) if lows else Fraction(0)

    def bounded_below(self) -> bool:
        return self.support_min() is not None

    def density_at(self, x: Fraction) -> GaussianRational:
        """Continuous-part density at a generic (non-breakpoint) x."""
        total = GR(0)
        for pc in self.pieces:
            if pc.contains(x):
                total = total + poly_eval(pc.poly, x)
        return total

    def mass_at(self, x: Fraction) -> GaussianRational:
        total = GR(0)
        for a in self.atoms:
            if a.pos == x:
                total = total + a.mass
        for cb in self.combs:
            n = (x - cb.anchor) / cb.spacing
            if n.denominator == 1:
                total = total + cb.mass(int(n))
        return total

    # -- convolution ---------------------------------------------------------

    def convolve(self, other: "GeneralizedDensity") -> "GeneralizedDensity":
        parts: list[GeneralizedDensity] = []
        for a in self.atoms:
            parts.append(other.shift(a.pos).scale(a.mass))
        for a in other.atoms:
            rest = GeneralizedDensity((), self.combs, self.pieces)
            parts.append(rest.shift(a.pos).scale(a.mass))
        for cb in self.combs:
            for pc in other.pieces:
                parts.append(_convolve_comb_piece(cb, pc))
            for cb2 in other.combs:
                parts.append(_convolve_comb_comb(cb, cb2))
        for cb in other.combs:
            for pc in self.pieces:
                parts.append(_convolve_comb_piece(cb, pc))
        for p1 in self.pieces:
            for p2 in other.pieces:
                parts.append(_convolve_piece_piece(p1, p2))
        total = GeneralizedDensity()
        for part in parts:
            total = total + part
        return total

    # -- interval deconvolution ----------------------------------------------

    def deconvolve_interval(self, a, b) -> "GeneralizedDensity":
        """Solve u * 1_[a,b] = self for u, exactly."""
        a, b = _frac(a), _frac(b)
        if b <= a:
            raise ValueError("interval must have positive length")
        try:
            u = _deconvolve(self, a, b)
            check = u.convolve(GeneralizedDensity.indicator(a, b))
        except NoClosedForm as exc:
            raise NoCombSolution(f"target outside the deconvolvable class: {exc}")
        if not check.equals(self):
            raise NoCombSolution("round-trip verification failed")
        return u

    # -- pairing ----------------------------------------------------------------

    def pair(self, phi, window: Optional[Fraction] = None,
             tol: float = 1e-12) -> tuple[complex, float]:
        """Pair the transform sum/integral f(x) phi_hat(x) dx numerically.

        Returns (value, error_bound).  phi must expose hat(x) and
        hat_abs_bound(x); window enforcement is the caller's concern for
        group-side semantics and is checked here when given.
        """
        if window is not None:
            rad = getattr(phi, "support_radius", None)
            if rad is not None and rad > float(window):
                raise WindowViolation(
                    f"test function support {rad} exceeds window {float(window)}")
        val = 0.0 + 0.0j
        err = 0.0
        for at in self.atoms:
            val += complex(at.mass) * phi.hat(float(at.pos))
        for cb in self.combs:
            v, e = _pair_comb(cb, phi, tol)
            val += v
            err += e
        for pc in self.pieces:
            v, e = _pair_piece(pc, phi, tol)
            val += v
            err += e
        return val, err

    # -- misc -------------------------------------------------------------------

    def __repr__(self) -> str:
        bits = []
        for a in self.atoms:
            bits.append(f"({a.mass})d[{a.pos}]")
        for cb in self.combs:
            rng = f"{'-inf' if cb.n0 is None else cb.n0}..{'inf' if cb.n1 is None else cb.n1}"
            bits.append(f"comb(a={cb.anchor},d={cb.spacing},n={rng},p={list(cb.poly)})")
        for pc in self.pieces:
            lo = "-inf" if pc.lo is None else pc.lo
            hi = "inf" if pc.hi is None else pc.hi
            bits.append(f"piece[{lo},{hi}]({list(pc.poly)})")
        return "<density " + (" + ".join(bits) if bits else "0") + ">"


def _comb_class_is_zero(group: list[DComb],
                        corrections: dict[int, GaussianRational]) -> bool:
    """Total mass function of one lattice class vanishes identically."""
    events: set[int] = set()
    maxdeg = 0
    for cb in group:
        maxdeg = max(maxdeg, poly_deg(cb.poly))
        if cb.n0 is not None:
            events.add(cb.n0)
        if cb.n1 is not None:
            events.add(cb.n1 + 1)
    for n in corrections:
        events.add(n)
        events.add(n + 1)
    ev = sorted(events)
    intervals: list[tuple[Optional[int], Optional[int]]] = []
    if not ev:
        intervals.append((None, None))
    else:
        intervals.append((None, ev[0] - 1))
        for a2, b2 in zip(ev, ev[1:]):
            intervals.append((a2, b2 - 1))
        intervals.append((ev[-1], None))
    for lo, hi in intervals:
        if lo is not None and hi is not None and lo > hi:
            continue
        total: Poly = ()
        for cb in group:
            lo_ok = (cb.n0 is None) or (lo is not None and lo >= cb.n0)
            hi_ok = (cb.n1 is None) or (hi is not None and hi <= cb.n1)
            if lo_ok and hi_ok:
                total = poly_add(total, cb.poly)
        if lo is not None and hi is not None and hi - lo <= maxdeg:
            for n in range(lo, hi + 1):
                val = poly_eval(total, n) + corrections.get(n, GR(0))
                if not val.is_zero():
                    return False
        else:
            if not poly_is_zero(total):
                return False
    return True


# -- piece * piece ---------------------------------------------------------------


def _convolve_piece_piece(p1: DPiece, p2: DPiece) -> GeneralizedDensity:
    if not p1.bounded() and not p2.bounded():
        # same-side rays convolve; opposite-side or full-line pairs diverge
        one_sided_1 = (p1.lo is None) != (p1.hi is None)
        one_sided_2 = (p2.lo is None) != (p2.hi is None)
        same_side = one_sided_1 and one_sided_2 and (
            (p1.lo is None) == (p2.lo is None))
        full_vs_bounded = False
        if not same_side and not full_vs_bounded:
            raise ConvolutionDiverges(
                "both supports unbounded on incompatible sides")
    if p2.bounded() and not p1.bounded():
        p1, p2 = p2, p1  # make p1 the bounded one when possible
    # integration variable tau runs over p1's support; x - tau over p2's
    # t_lo(x) = max(p1.lo, x - p2.hi), t_hi(x) = min(p1.hi, x - p2.lo)
    cuts: set[Fraction] = set()
    for e1 in (p1.lo, p1.hi):
        for e2 in (p2.lo, p2.hi):
            if e1 is not None and e2 is not None:
                cuts.add(e1 + e2)
    cut_list = sorted(cuts)
    regions: list[tuple[Optional[Fraction], Optional[Fraction]]] = []
    if not cut_list:
        regions.append((None, None))
    else:
        regions.append((None, cut_list[0]))
        for lo, hi in zip(cut_list, cut_list[1:]):
            regions.append((lo, hi))
        regions.append((cut_list[-1], None))
    out: list[DPiece] = []
    for lo, hi in regions:
        probe = _region_probe(lo, hi)
        tlo = _bound_max(p1.lo, None if p2.hi is None else probe - p2.hi)
        thi = _bound_min(p1.hi, None if p2.lo is None else probe - p2.lo)
        if tlo is None and thi is None:
            raise ConvolutionDiverges("unbounded integration range")
        # symbolic bounds as linear polynomials in x
        blo = _bound_expr(p1.lo, p2.hi, probe, lower=True)
        bhi = _bound_expr(p1.hi, p2.lo, probe, upper=True)
        if blo is None or bhi is None:
            continue
        lo_val = poly_eval(blo, probe).re
        hi_val = poly_eval(bhi, probe).re
        if lo_val >= hi_val:
            continue
        res = _integrate_product(p1.poly, p2.poly, blo, bhi)
        if not poly_is_zero(res):
            out.append(DPiece(lo, hi, res))
    return GeneralizedDensity(pieces=out)


def _region_probe(lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _bound_max(c: Optional[Fraction], v: Optional[Fraction]) -> Optional[Fraction]:
    vals = [x for x in (c, v) if x is not None]
    return max(vals) if vals else None


def _bound_min(c: Optional[Fraction], v: Optional[Fraction]) -> Optional[Fraction]:
    vals = [x for x in (c, v) if x is not None]
    return min(vals) if vals else None


def _bound_expr(const_bound: Optional[Fraction], other_edge: Optional[Fraction],
                probe: Fraction, lower: bool = False, upper: bool = False) -> Optional[Poly]:
    """Active integration bound near the probe, as a polynomial in x.

    The lower bound is max(p1.lo, x - p2.hi); the upper is min(p1.hi, x - p2.lo).
    Within a region the active branch is constant, so compare at the probe.
    """
    cand: list[tuple[Fraction, Poly]] = []
    if const_bound is not None:
        cand.append((const_bound, poly([GR(const_bound)])))
    if other_edge is not None:
        cand.append((probe - other_edge, poly([GR(-other_edge), GR(1)])))
    if not cand:
        return None
    if lower:
        return max(cand, key=lambda t: t[0])[1]
    return min(cand, key=lambda t: t[0])[1]


def _integrate_product(p: Poly, q: Poly, blo: Poly, bhi: Poly) -> Poly:
    """integral over tau in [blo(x), bhi(x)] of p(tau) q(x - tau) dtau, as Poly in x."""
    # bivariate: coefficients of tau^k are polynomials in x
    biv: dict[int, Poly] = {}
    for j, qc in enumerate(q):
        # q_j (x - tau)^j  = q_j sum_m C(j,m) x^(j-m) (-tau)^m
        for m in range(j + 1):
            c = qc * GR(_binom(j, m)) * GR((-1) ** m)
            xpart = poly([GR(0)] * (j - m) + [c])
            biv[m] = poly_add(biv.get(m, ()), xpart)
    prod: dict[int, Poly] = {}
    for k, pc in enumerate(p):
        for m, xpoly in biv.items():
            prod[k + m] = poly_add(prod.get(k + m, ()), poly_scale(xpoly, pc))
    # antiderivative in tau: tau^(k+1)/(k+1); evaluate at tau = bhi(x), blo(x)
    out: Poly = ()
    for k, xpoly in prod.items():
        inv = GR(Fraction(1, k + 1))
        hi_pow = _poly_power(bhi, k + 1)
        lo_pow = _poly_power(blo, k + 1)
        diff = poly_add(hi_pow, poly_neg(lo_pow))
        out = poly_add(out, poly_scale(poly_mul(xpoly, diff), inv))
    return out


def _poly_power(p: Poly, n: int) -> Poly:
    out = poly([GR(1)])
    for _ in range(n):
        out = poly_mul(out, p)
    return out


def _binom(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)


# -- comb * piece -----------------------------------------------------------------


def _convolve_comb_comb(c1: DComb, c2: DComb) -> GeneralizedDensity:
    raise NoClosedForm("comb * comb convolution is outside the supported class")


def _convolve_comb_piece(cb: DComb, pc: DPiece) -> GeneralizedDensity:
    """Exact convolution of a comb with a bounded piece via sample-and-fit."""
    if not pc.bounded():
        raise NoClosedForm("comb * unbounded piece is outside the supported class")
    d = cb.spacing
    width = pc.hi - pc.lo
    deg_fit = poly_deg(cb.poly) + poly_deg(pc.poly) + 1

    def value_at(x: Fraction) -> GaussianRational:
        # sum over n with x - position(n) in [lo, hi]
        n_hi = (x - pc.lo - cb.anchor) / d
        n_lo = (x - pc.hi - cb.anchor) / d
        n_min = _ceil_frac(n_lo)
        n_max = _floor_frac(n_hi)
        total = GR(0)
        for n in range(n_min, n_max + 1):
            m = cb.mass(n)
            if not m.is_zero():
                total = total + m * poly_eval(pc.poly, x - cb.position(n))
        return total

    # transient region: a few periods around each comb endpoint
    periods = int(_ceil_frac(width / d)) + 2
    out_pieces: list[DPiece] = []

    if cb.n0 is None and cb.n1 is None:
        fitted = _fit_global(value_at, Fraction(0), d, deg_fit)
        if fitted is None:
            raise NoClosedForm("full comb * piece is not polynomial")
        return GeneralizedDensity(pieces=[DPiece(None, None, fitted)])

    if cb.n0 is not None and cb.n1 is None:
        start = cb.position(cb.n0) + pc.lo
        tail_from = start + (periods + poly_deg(cb.poly) + 2) * d
        cells = _fit_cells(value_at, start, tail_from, d, deg_fit)
        tail = _fit_tail(value_at, tail_from, d, deg_fit)
        out_pieces = cells + [DPiece(tail_from, None, tail)] if not poly_is_zero(tail) else cells
        if poly_is_zero(tail):
            out_pieces = cells
        return GeneralizedDensity(pieces=out_pieces)

    # bounded above: mirror of the previous case
    end = cb.position(cb.n1) + pc.hi
    tail_to = end - (periods + poly_deg(cb.poly) + 2) * d
    cells = _fit_cells(value_at, tail_to, end, d, deg_fit)
    tail = _fit_tail(value_at, tail_to, -d, deg_fit)
    out_pieces = list(cells)
    if not poly_is_zero(tail):
        out_pieces.append(DPiece(None, tail_to, tail))
    return GeneralizedDensity(pieces=out_pieces)


def _sample_points(lo: Fraction, hi: Fraction, count: int) -> list[Fraction]:
    """Deterministic rational samples in (lo, hi) avoiding simple breakpoints."""
    pts = []
    span = hi - lo
    for j in range(count):
        pts.append(lo + span * Fraction(2 * j + 1, 2 * count) + span / Fraction(997))
    return [p for p in pts if lo < p < hi]


def _fit_cells(value_at, start: Fraction, stop: Fraction, d: Fraction,
               deg: int) -> list[DPiece]:
    """Fit exact polynomials on each lattice cell of [start, stop]."""
    cells: list[DPiece] = []
    x = start
    while x < stop:
        hi = min(x + d, stop)
        pts = _sample_points(x, hi, deg + 2)
        samples = [(p, value_at(p)) for p in pts]
        fit = poly_interpolate(samples)
        for p in _sample_points(x, hi, deg + 5)[deg + 2:]:
            if poly_eval(fit, p) != value_at(p):
                raise NoClosedForm("cell density is not polynomial")
        if not poly_is_zero(fit):
            cells.append(DPiece(x, hi, fit))
        x = hi
    return cells


def _fit_tail(value_at, tail_from: Fraction, d: Fraction, deg: int) -> Poly:
    """Fit one polynomial across several periods beyond tail_from; verify."""
    pts: list[Fraction] = []
    step = d / (deg + 3)
    x = tail_from + abs(d) / 7 if d > 0 else tail_from - abs(d) / 7
    for j in range((deg + 3) * 3):
        pts.append(x + j * step)
    samples = [(p, value_at(p)) for p in pts[: deg + 2]]
    fit = poly_interpolate(samples)
    for p in pts[deg + 2:]:
        if poly_eval(fit, p) != value_at(p):
            raise NoClosedForm("tail is not polynomial (periodic residue)")
    return fit


def _fit_global(value_at, anchor: Fraction, d: Fraction, deg: int) -> Optional[Poly]:
    pts = [anchor + j * d / (deg + 3) + d / 11 for j in range(-(deg + 3), 2 * (deg + 3))]
    samples = [(p, value_at(p)) for p in pts[: deg + 2]]
    fit = poly_interpolate(samples)
    for p in pts[deg + 2:]:
        if poly_eval(fit, p) != value_at(p):
            return None
    return fit


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


# -- deconvolution -----------------------------------------------------------------


def _deconvolve(target: GeneralizedDensity, a: Fraction, b: Fraction) -> GeneralizedDensity:
    d = b - a
    if target.is_zero():
        return GeneralizedDensity()
    if target.atoms or target.combs:
        raise NoCombSolution("atoms/combs in the target require dipole solutions")

    full = [pc for pc in target.pieces if pc.lo is None and pc.hi is None]
    rest = [pc for pc in target.pieces if not (pc.lo is None and pc.hi is None)]
    if full and rest:
        raise NoCombSolution("mixed full-line and bounded targets unsupported")
    if full:
        total: Poly = ()
        for pc in full:
            total = poly_add(total, pc.poly)
        return GeneralizedDensity(pieces=[DPiece(None, None,
                                                 _solve_tail_poly(total, a, b))])

    if not target.bounded_below():
        raise NoCombSolution("target must be bounded below (or full-line)")

    # peel polynomial ray tails first, then march the bounded remainder
    rays = [pc for pc in target.pieces if pc.hi is None]
    if rays:
        solution = GeneralizedDensity()
        remainder = target
        for ray_pc in rays:
            q = _solve_tail_poly(ray_pc.poly, a, b)
            u_tail = GeneralizedDensity(pieces=[DPiece(ray_pc.lo - b, None, q)])
            solution = solution + u_tail
            remainder = remainder - u_tail.convolve(GeneralizedDensity.indicator(a, b))
        return solution + _deconvolve(remainder, a, b)

    return _deconvolve_bounded(target, a, b)


def _solve_tail_poly(p: Poly, a: Fraction, b: Fraction) -> Poly:
    """Polynomial q with (q * 1_[a,b])(x) = Q(x-a) - Q(x-b) = p(x), Q' = q."""
    # The map q -> difference is degree-preserving and triangular; solve by
    # matching coefficients from the top down.
    from .polyq import poly_integrate
    deg = poly_deg(p)
    coeffs = [GR(0)] * (deg + 1)
    residual = p
    for k in range(deg, -1, -1):
        lead = residual[k] if k <= poly_deg(residual) else GR(0)
        # contribution of q = x^k: F(x) = ((x-a)^{k+1} - (x-b)^{k+1})/(k+1)
        base = poly_scale(
            poly_add(_poly_power(poly((GR(-a), GR(1))), k + 1),
                     poly_neg(_poly_power(poly((GR(-b), GR(1))), k + 1))),
            GR(Fraction(1, k + 1)))
        base_lead = base[k]
        c = lead / base_lead
        coeffs[k] = c
        residual = poly_add(residual, poly_neg(poly_scale(base, c)))
    if not poly_is_zero(residual):
        raise NoCombSolution("tail polynomial solve failed")
    return poly(coeffs)


def _deconvolve_bounded(target: GeneralizedDensity, a: Fraction, b: Fraction) -> GeneralizedDensity:
    """March u(x) = T'(x+a) + u(x-d) from the left edge of a bounded target."""
    d = b - a
    dT = target.derivative()
    # u = sum_{j>=0} shift_{-a+jd} dT; jumps become one-sided combs, interior
    # derivative pieces telescope through the comb*piece machinery
    out = GeneralizedDensity()
    for at in dT.atoms:
        out = out + GeneralizedDensity.comb(at.pos - a, d, 0, None, [at.mass])
    spread = GeneralizedDensity(pieces=dT.pieces)
    if spread.pieces:
        carrier = DComb(-a, d, 0, None, poly([GR(1)]))
        for pc in spread.pieces:
            out = out + _convolve_comb_piece(carrier, pc)
    return out


# -- pairing helpers -----------------------------------------------------------------


def _pair_comb(cb: DComb, phi, tol: float) -> tuple[complex, float]:
    if cb.n0 is None and cb.n1 is None:
        lo_hint, hi_hint = phi.hat_support_hint(tol)
        n_lo = _ceil_frac((Fraction(lo_hint).limit_denominator(10**6) - cb.anchor) / cb.spacing) - 2
        n_hi = _floor_frac((Fraction(hi_hint).limit_denominator(10**6) - cb.anchor) / cb.spacing) + 2
    elif cb.n0 is not None:
        n_lo = cb.n0
        _, hi_hint = phi.hat_support_hint(tol)
        n_hi = max(n_lo, _floor_frac((Fraction(hi_hint).limit_denominator(10**6) - cb.anchor) / cb.spacing) + 2)
    else:
        n_hi = cb.n1
        lo_hint, _ = phi.hat_support_hint(tol)
        n_lo = min(n_hi, _ceil_frac((Fraction(lo_hint).limit_denominator(10**6) - cb.anchor) / cb.spacing) - 2)
    val = 0j
    for n in range(n_lo, n_hi + 1):
        m = cb.mass(n)
        if not m.is_zero():
            val += complex(m) * phi.hat(float(cb.position(n)))
    err = phi.hat_tail_bound(float(cb.position(n_hi)), float(cb.spacing),
                             poly_deg(cb.poly))
    err += phi.hat_tail_bound(-float(cb.position(n_lo)), float(cb.spacing),
                              poly_deg(cb.poly))
    return val, err


def _pair_piece(pc: DPiece, phi, tol: float) -> tuple[complex, float]:
    lo_hint, hi_hint = phi.hat_support_hint(tol)
    lo = float(pc.lo) if pc.lo is not None else lo_hint
    hi = float(pc.hi) if pc.hi is not None else hi_hint
    if hi <= lo:
        return 0j, 0.0
    # composite Gauss-Legendre
    import numpy as np
    nodes, weights = np.polynomial.legendre.leggauss(48)
    segments = max(8, int(hi - lo))
    total = 0j
    edges = np.linspace(lo, hi, segments + 1)
    cpoly = [complex(c) for c in pc.poly]
    for s0, s1 in zip(edges[:-1], edges[1:]):
        mid, half = (s0 + s1) / 2, (s1 - s0) / 2
        for t, w in zip(nodes, weights):
            x = mid + half * t
            dens = 0j
            for c in reversed(cpoly):
                dens = dens * x + c
            total += w * half * dens * phi.hat(x)
    err = 0.0
    if pc.lo is None:
        err += phi.hat_tail_bound(-lo, 1.0, poly_deg(pc.poly))
    if pc.hi is None:
        err += phi.hat_tail_bound(hi, 1.0, poly_deg(pc.poly))
    return total, err + 1e-10 * (1 + abs(total))
