"""Invariant generalized functions on tori and cyclic groups.

A :class:`FourierDistribution` stores exact Fourier data as a finite sum of
tensor generators over the group's slots (one slot per circle factor, one per
cyclic factor).  Slot generators are sparse atom tables, geometric rays with
polynomial coefficients, or the full comb with all coefficients 1.  Germ
restriction resums rays through their rational generating functions, exactly
at fourth roots of unity and with certified floating error elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .densities import DComb, GeneralizedDensity, WindowViolation
from .groups import (GroupDescriptor, GroupElement, InvalidWeight, Weight,
                     phase_to_scalar)
from .polyq import (Poly, poly, poly_add, poly_compose_linear, poly_deg,
                    poly_eval, poly_is_zero, poly_scale, poly_shift)
from .scalars import GR, GaussianRational
from .series import PowerSeries, geometric_series_coeffs


class GermSingular(ValueError):
    """Resummed generating function is singular at the requested point."""


# ---------------------------------------------------------------------------
# trig polynomials (R(K) elements)
# ---------------------------------------------------------------------------


class TrigPolynomial:
    """Finite character sum: map Weight -> Gaussian rational, zero-free."""

    __slots__ = ("group", "terms")

    def __init__(self, group: GroupDescriptor, terms: dict[Weight, GaussianRational]):
        self.group = group
        self.terms = {w: c for w, c in terms.items() if not c.is_zero()}

    @staticmethod
    def monomial(group: GroupDescriptor, comps: Sequence[int], coeff=1) -> "TrigPolynomial":
        return TrigPolynomial(group, {group.weight(comps): GaussianRational.coerce(coeff)})

    @staticmethod
    def one(group: GroupDescriptor) -> "TrigPolynomial":
        return TrigPolynomial(group, {group.zero_weight(): GR(1)})

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, GR(0)) + c
        return TrigPolynomial(self.group, out)

    def __neg__(self) -> "TrigPolynomial":
        return TrigPolynomial(self.group, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out: dict[Weight, GaussianRational] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = self.group.weight([a + b for a, b in zip(w1.components, w2.components)])
                out[w] = out.get(w, GR(0)) + c1 * c2
        return TrigPolynomial(self.group, out)

    def coefficient_sum(self) -> GaussianRational:
        total = GR(0)
        for c in self.terms.values():
            total = total + c
        return total


# ---------------------------------------------------------------------------
# slot generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlotAtoms:
    """Sparse coefficient table on one slot (torus: Z; cyclic: residues)."""

    entries: tuple[tuple[int, GaussianRational], ...]

    @staticmethod
    def of(table: dict[int, GaussianRational]) -> "SlotAtoms":
        return SlotAtoms(tuple(sorted((k, v) for k, v in table.items() if not v.is_zero())))

    def coeff(self, k: int) -> GaussianRational:
        for kk, v in self.entries:
            if kk == k:
                return v
        return GR(0)

    def table(self) -> dict[int, GaussianRational]:
        return dict(self.entries)


@dataclass(frozen=True)
class SlotRay:
    """sum_{n>=0} p(n) z^{offset + n*step} on a torus slot; step != 0."""

    offset: int
    step: int
    poly: Poly

    def __post_init__(self):
        if self.step == 0:
            raise ValueError("ray step must be nonzero")

    def coeff(self, k: int) -> GaussianRational:
        n, r = divmod(k - self.offset, self.step)
        if self.step < 0:
            n, r = divmod(self.offset - k, -self.step)
        if r != 0 or n < 0:
            return GR(0)
        return poly_eval(self.poly, n)


@dataclass(frozen=True)
class SlotFull:
    """All coefficients 1 on the slot (full comb / full cyclic sum)."""

    def coeff(self, k: int) -> GaussianRational:
        return GR(1)


SlotGen = Union[SlotAtoms, SlotRay, SlotFull]


@dataclass(frozen=True)
class TensorPart:
    scalar: GaussianRational
    slots: tuple[SlotGen, ...]

    def coeff(self, comps: Sequence[int]) -> GaussianRational:
        total = self.scalar
        for gen, k in zip(self.slots, comps):
            if total.is_zero():
                return GR(0)
            total = total * gen.coeff(k)
        return total


# ---------------------------------------------------------------------------
# the distribution class
# ---------------------------------------------------------------------------


class FourierDistribution:
    """Finite sum of tensor generators over the group's slots."""

    __slots__ = ("group", "parts")

    def __init__(self, group: GroupDescriptor, parts: Iterable[TensorPart] = ()):
        self.group = group
        cleaned = []
        for p in parts:
            if p.scalar.is_zero() or len(p.slots) != group.nslots:
                if len(p.slots) != group.nslots and not p.scalar.is_zero():
                    raise ValueError("tensor part does not match group slots")
                continue
            if any(isinstance(g, SlotAtoms) and not g.entries for g in p.slots):
                continue
            if any(isinstance(g, SlotRay) and poly_is_zero(g.poly) for g in p.slots):
                continue
            for slot_idx, g in enumerate(p.slots):
                if isinstance(g, SlotRay) and group.slot_order(slot_idx) is not None:
                    raise ValueError("rays are not allowed on cyclic slots")
            cleaned.append(p)
        self.parts = tuple(cleaned)

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(group: GroupDescriptor) -> "FourierDistribution":
        return FourierDistribution(group, ())

    @staticmethod
    def delta_identity(group: GroupDescriptor) -> "FourierDistribution":
        return FourierDistribution(
            group, [TensorPart(GR(1), tuple(SlotFull() for _ in range(group.nslots)))])

    @staticmethod
    def from_atoms(group: GroupDescriptor,
                   table: dict[Weight, GaussianRational]) -> "FourierDistribution":
        parts = []
        for w, c in table.items():
            if c.is_zero():
                continue
            slots = tuple(SlotAtoms.of({k: GR(1)}) for k in w.components)
            parts.append(TensorPart(c, slots))
        d = FourierDistribution(group, parts)
        return d.normalize()

    @staticmethod
    def ray(group: GroupDescriptor, offset: int, step: int,
            coeffs: Sequence, slot: int = 0) -> "FourierDistribution":
        if group.slot_order(slot) is not None:
            raise ValueError("ray slot must be a torus slot")
        slots: list[SlotGen] = []
        for j in range(group.nslots):
            if j == slot:
                slots.append(SlotRay(offset, step, poly(coeffs)))
            else:
                slots.append(SlotAtoms.of({0: GR(1)}))
        return FourierDistribution(group, [TensorPart(GR(1), tuple(slots))])

    @staticmethod
    def constant_one(group: GroupDescriptor) -> "FourierDistribution":
        """The constant function 1 on the group (single atom at weight 0)."""
        return FourierDistribution.from_atoms(group, {group.zero_weight(): GR(1)})

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "FourierDistribution") -> "FourierDistribution":
        if self.group != other.group:
            raise InvalidWeight("group mismatch in distribution sum")
        return FourierDistribution(self.group, self.parts + other.parts)

    def scale(self, c) -> "FourierDistribution":
        c = GaussianRational.coerce(c)
        return FourierDistribution(
            self.group, [TensorPart(p.scalar * c, p.slots) for p in self.parts])

    def __neg__(self):
        return self.scale(GR(-1))

    def __sub__(self, other):
        return self + (-other)

    # -- coefficients ---------------------------------------------------------

    def coeff(self, w: Weight | Sequence[int]) -> GaussianRational:
        if not isinstance(w, Weight):
            w = self.group.weight(list(w))
        comps = w.components
        if len(comps) != self.group.nslots:
            raise InvalidWeight("weight rank mismatch")
        total = GR(0)
        for p in self.parts:
            total = total + p.coeff(comps)
        return total

    def coefficients_window(self, radius: int) -> dict[Weight, GaussianRational]:
        out = {}
        for w in self.group.weights_window(radius):
            c = self.coeff(w)
            if not c.is_zero():
                out[w] = c
        return out

    def equals_on_window(self, other: "FourierDistribution", radius: int) -> bool:
        for w in self.group.weights_window(radius):
            if self.coeff(w) != other.coeff(w):
                return False
        return True

    # -- module structure -------------------------------------------------------

    def mul_by_trigpoly(self, p: TrigPolynomial) -> "FourierDistribution":
        """Coefficientwise convolution by a finite character sum."""
        if p.group != self.group:
            raise InvalidWeight("trig polynomial group mismatch")
        new_parts: list[TensorPart] = []
        for w, c in p.terms.items():
            shift = w.components
            for part in self.parts:
                slots: list[SlotGen] = []
                scalar = part.scalar * c
                for j, gen in enumerate(part.slots):
                    s = shift[j]
                    order = self.group.slot_order(j)
                    if isinstance(gen, SlotFull):
                        slots.append(gen)  # translation invariant
                    elif isinstance(gen, SlotAtoms):
                        if order is None:
                            slots.append(SlotAtoms.of({k + s: v for k, v in gen.entries}))
                        else:
                            slots.append(SlotAtoms.of({(k + s) % order: v for k, v in gen.entries}))
                    else:
                        slots.append(SlotRay(gen.offset + s, gen.step, gen.poly))
                new_parts.append(TensorPart(scalar, tuple(slots)))
        return FourierDistribution(self.group, new_parts).normalize()

    def external_product(self, other: "FourierDistribution") -> "FourierDistribution":
        """Distribution on the product group with factorized coefficients."""
        g1, g2 = self.group, other.group
        group = g1.product(g2)
        parts = []
        for p1 in self.parts:
            t1 = p1.slots[: g1.torus_rank]
            c1 = p1.slots[g1.torus_rank:]
            for p2 in other.parts:
                t2 = p2.slots[: g2.torus_rank]
                c2 = p2.slots[g2.torus_rank:]
                parts.append(TensorPart(p1.scalar * p2.scalar, t1 + t2 + c1 + c2))
        return FourierDistribution(group, parts)

    # -- normalization ------------------------------------------------------------

    def normalize(self) -> "FourierDistribution":
        """Merge atoms, merge congruent rays, fold Full multiples."""
        if self.group.nslots != 1 or self.group.torus_rank != 1:
            return self._normalize_generic()
        atoms: dict[int, GaussianRational] = {}
        rays: list[tuple[int, int, Poly]] = []
        full = GR(0)
        for part in self.parts:
            gen = part.slots[0]
            if isinstance(gen, SlotFull):
                full = full + part.scalar
            elif isinstance(gen, SlotAtoms):
                for k, v in gen.entries:
                    atoms[k] = atoms.get(k, GR(0)) + v * part.scalar
            else:
                rays.append((gen.offset, gen.step, poly_scale(gen.poly, part.scalar)))
        merged_rays = _merge_rays(rays, atoms)
        parts = []
        if not full.is_zero():
            parts.append(TensorPart(full, (SlotFull(),)))
        atoms = {k: v for k, v in atoms.items() if not v.is_zero()}
        if atoms:
            parts.append(TensorPart(GR(1), (SlotAtoms.of(atoms),)))
        for off, step, p in merged_rays:
            parts.append(TensorPart(GR(1), (SlotRay(off, step, p),)))
        return FourierDistribution(self.group, parts)

    def _normalize_generic(self) -> "FourierDistribution":
        # merge structurally identical parts
        acc: dict[tuple, GaussianRational] = {}
        for part in self.parts:
            acc[part.slots] = acc.get(part.slots, GR(0)) + part.scalar
        return FourierDistribution(
            self.group,
            [TensorPart(c, slots) for slots, c in acc.items() if not c.is_zero()])

    # -- density conversion --------------------------------------------------------

    def to_density_germ(self, window: Fraction | None = None) -> GeneralizedDensity:
        """Comb representation sum_k coeff(k) delta(x-k), valid on (-2pi, 2pi).

        Rank-1 torus groups only; the window is fixed by the construction and
        recorded by the caller.
        """
        if self.group.torus_rank != 1 or self.group.cyclic_orders:
            raise InvalidWeight("density germs require a rank-1 torus group")
        out = GeneralizedDensity()
        for part in self.parts:
            gen = part.slots[0]
            if isinstance(gen, SlotFull):
                out = out + GeneralizedDensity.comb(0, 1, None, None, [part.scalar])
            elif isinstance(gen, SlotAtoms):
                for k, v in gen.entries:
                    out = out + GeneralizedDensity.delta(k, v * part.scalar)
            else:
                p = poly_scale(gen.poly, part.scalar)
                if gen.step > 0:
                    out = out + GeneralizedDensity.comb(gen.offset, gen.step, 0, None, p)
                else:
                    # positions offset + n*step descending; reindex m = -n
                    q = poly_compose_linear(p, 0, -1)
                    out = out + GeneralizedDensity.comb(gen.offset, -gen.step, None, 0, q)
        return out

    @staticmethod
    def from_density(density: GeneralizedDensity,
                     group: GroupDescriptor) -> "FourierDistribution":
        """Inverse of the window identification, for lattice-supported densities.

        Full-line polynomial pieces are folded in through the window
        equivalence with polynomial combs.
        """
        if group.torus_rank != 1 or group.cyclic_orders:
            raise InvalidWeight("density conversion requires a rank-1 torus group")
        parts: list[TensorPart] = []
        atoms: dict[int, GaussianRational] = {}
        for at in density.atoms:
            if at.pos.denominator != 1:
                raise ValueError(f"atom at non-lattice position {at.pos}")
            atoms[int(at.pos)] = atoms.get(int(at.pos), GR(0)) + at.mass
        full_poly: Poly = ()
        for pc in density.pieces:
            if pc.lo is None and pc.hi is None:
                full_poly = poly_add(full_poly, pc.poly)
            else:
                raise ValueError("bounded pieces have no lattice identification")
        combs = list(density.combs)
        if not poly_is_zero(full_poly):
            combs.append(DComb(Fraction(0), Fraction(1), None, None, full_poly))
        for cb in combs:
            if cb.anchor.denominator != 1 or cb.spacing.denominator != 1:
                raise ValueError("comb lattice is not integral")
            a0, d = int(cb.anchor), int(cb.spacing)
            if cb.n0 is None and cb.n1 is None:
                if poly_deg(cb.poly) == 0 and d == 1:
                    parts.append(TensorPart(cb.poly[0], (SlotFull(),)))
                else:
                    parts.append(TensorPart(GR(1), (SlotRay(a0, d, cb.poly),)))
                    q = poly_compose_linear(cb.poly, -1, -1)
                    parts.append(TensorPart(GR(1), (SlotRay(a0 - d, -d, q),)))
            elif cb.n0 is not None:
                q = poly_shift(cb.poly, cb.n0)
                parts.append(TensorPart(GR(1), (SlotRay(a0 + cb.n0 * d, d, q),)))
            else:
                q = poly_compose_linear(cb.poly, cb.n1, -1)
                parts.append(TensorPart(GR(1), (SlotRay(a0 + cb.n1 * d, -d, q),)))
        out = FourierDistribution(group, parts)
        if atoms:
            out = out + FourierDistribution(
                group, [TensorPart(GR(1), (SlotAtoms.of(atoms),))])
        return out.normalize()

    # -- germ restriction -------------------------------------------------------------

    def restrict_germ(self, point: GroupElement, order: int = 8) -> "Germ":
        """Taylor germ of Theta(point * exp(iY)) in the torus directions Y.

        Points whose resummed generating function is distribution-valued (the
        full comb at its base point, ray poles on compatible lattices) return
        a flagged distributional germ carrying the distribution itself.
        """
        nvars = self.group.torus_rank
        exact = point.is_exact_point()
        if nvars == 1 and not self.group.cyclic_orders:
            return self._restrict_rank1(point, order, exact)
        total = PowerSeries(nvars, order, exact=exact)
        distributional = False
        for part in self.parts:
            factor = PowerSeries.constant(part.scalar, nvars, order)
            dead = False
            for j, gen in enumerate(part.slots):
                sl = self._slot_germ(gen, j, point, order, nvars)
                if sl == "distributional":
                    distributional = True
                    dead = True
                    break
                if sl is None:
                    dead = True
                    break
                factor = factor * sl
            if dead:
                continue
            total = total + factor
        if distributional:
            return Germ(point, order, None, kind="distributional",
                        exact=exact, err=0.0, reference=self,
                        note="distribution-valued germ at base point")
        return Germ(point, order, total, kind="taylor", exact=total.exact,
                    err=total.err)

    def _slot_germ(self, gen: SlotGen, slot: int, point: GroupElement,
                   order: int, nvars: int):
        """Germ factor of one slot; None = identically zero part,
        'distributional' = full comb at its base point."""
        group = self.group
        m = group.slot_order(slot)
        if m is not None:
            r = point.cyclic[slot - group.torus_rank]
            if isinstance(gen, SlotFull):
                if r % m == 0:
                    return PowerSeries.constant(GR(m), nvars, order)
                return None
            total = None
            acc = GR(0)
            numeric = 0j
            exact_ok = True
            for k, v in gen.entries:
                z = phase_to_scalar(Fraction(r * k, m))
                if isinstance(z, GaussianRational):
                    acc = acc + v * z
                else:
                    exact_ok = False
                    numeric += complex(v) * z
            if exact_ok:
                if acc.is_zero():
                    return None
                return PowerSeries.constant(acc, nvars, order)
            val = complex(acc) + numeric
            if val == 0:
                return None
            return PowerSeries.constant(val, nvars, order)
        # torus slot
        angle = point.angles[slot]
        if isinstance(gen, SlotFull):
            if angle == 0:
                return "distributional"
            return None
        sub = FourierDistribution(
            GroupDescriptor(1), [TensorPart(GR(1), (gen,))])
        g1 = sub._restrict_rank1(GroupElement((angle,)), order, (4 * angle).denominator == 1)
        if g1.kind != "taylor":
            return "distributional"
        return _embed_series(g1.series, slot, nvars)

    def _restrict_rank1(self, point: GroupElement, order: int, exact: bool) -> "Germ":
        angle = point.angles[0]
        full_scalar = GR(0)
        num: dict[int, GaussianRational] = {}
        den: dict[int, GaussianRational] = {0: GR(1)}
        have_rational = False
        for part in self.parts:
            gen = part.slots[0]
            if isinstance(gen, SlotFull):
                full_scalar = full_scalar + part.scalar
                continue
            n_p, d_p = _slot_gf(gen, part.scalar)
            num, den = _ratsum(num, den, n_p, d_p)
            have_rational = True
        if not full_scalar.is_zero() and angle == 0:
            return Germ(point, order, None, kind="distributional", exact=exact,
                        err=0.0, reference=self, note="delta comb at base point")
        if not have_rational or not num:
            series = PowerSeries(1, order, exact=exact)
            return Germ(point, order, series, kind="taylor", exact=exact, err=0.0)
        pad = _lpoly_span(den)
        num_s = _lpoly_series(num, angle, order + pad, exact)
        den_s = _lpoly_series(den, angle, order + pad, exact)
        vd = den_s.valuation()
        if vd is None:
            raise GermSingular("denominator series vanished identically")
        if num_s.is_zero(tol=1e-18 if not exact else 0.0):
            return Germ(point, order, PowerSeries(1, order, exact=exact),
                        kind="taylor", exact=exact, err=num_s.err)
        vn = num_s.valuation()
        if vn is None or vn < vd:
            return Germ(point, order, None, kind="distributional", exact=exact,
                        err=0.0, reference=self,
                        note=f"pole of order {vd - (vn or 0)} at base point")
        series = num_s.shift_down(vd) * den_s.shift_down(vd).inverse()
        series = series.truncate(order)
        return Germ(point, order, series, kind="taylor", exact=series.exact,
                    err=series.err)

    # -- growth certification ------------------------------------------------------------

    def check_growth(self, C: Fraction, N: int, probe_radius: int) -> bool:
        """|coeff(k)| <= C (1+|k|)^N on the window, symbolic tails included."""
        C = Fraction(C)
        for part in self.parts:
            degree = 0
            for gen in part.slots:
                if isinstance(gen, SlotRay):
                    degree += poly_deg(gen.poly)
            if degree > N:
                return False
        for w in self.group.weights_window(probe_radius):
            c = self.coeff(w)
            bound = C * (1 + w.sup_norm()) ** N
            if c.abs2() > bound * bound:
                return False
        return True

    # -- serialization ---------------------------------------------------------------------

    def to_json(self) -> dict:
        parts_json = []
        for part in self.parts:
            parts_json.append(_part_to_json(part, self.group))
        return {"group": self.group.to_json(), "parts": parts_json}

    @staticmethod
    def from_json(obj: dict) -> "FourierDistribution":
        group = GroupDescriptor.from_json(obj["group"])
        parts: list[TensorPart] = []
        for p in obj.get("parts", []):
            if p.get("kind") == "atoms":
                for entry in p["atoms"]:
                    w = group.weight(entry["weight"])
                    slots = tuple(SlotAtoms.of({k: GR(1)}) for k in w.components)
                    parts.append(TensorPart(GaussianRational.from_str(entry["value"]), slots))
            else:
                parts.append(_part_from_json(p, group))
        return FourierDistribution(group, parts).normalize()

    def __repr__(self) -> str:
        names = []
        for part in self.parts:
            slot_desc = []
            for gen in part.slots:
                if isinstance(gen, SlotFull):
                    slot_desc.append("full")
                elif isinstance(gen, SlotAtoms):
                    slot_desc.append(f"atoms{dict((k, str(v)) for k, v in gen.entries)}")
                else:
                    slot_desc.append(f"ray(o={gen.offset},d={gen.step},p={[str(c) for c in gen.poly]})")
            names.append(f"({part.scalar})*" + "x".join(slot_desc))
        return "<fourier " + (" + ".join(names) if names else "0") + ">"


# ---------------------------------------------------------------------------
# germs and gluing
# ---------------------------------------------------------------------------


@dataclass
class Germ:
    """Jet of an invariant generalized function at a rational rotation."""

    point: GroupElement
    order: int
    series: Optional[PowerSeries]
    kind: str = "taylor"  # 'taylor' | 'distributional'
    exact: bool = True
    err: float = 0.0
    reference: Optional[FourierDistribution] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "point": [str(a) for a in self.point.angles] + [str(r) for r in self.point.cyclic],
            "order": self.order,
            "kind": self.kind,
            "exact": self.exact,
        }
        if self.kind == "taylor" and self.series is not None:
            terms = []
            for key in sorted(self.series.coeffs, key=lambda k: (sum(k), k)):
                val = self.series.coeffs[key]
                terms.append({"exponents": list(key), "value": str(val)})
            out["series"] = terms
            if not self.exact:
                out["error_bound"] = self.err
        else:
            out["note"] = self.note
        return out


@dataclass
class GlueEntry:
    point: GroupElement
    kind: str
    residual: float
    passed: bool
    note: str = ""


@dataclass
class GlueReport:
    entries: list[GlueEntry] = field(default_factory=list)
    window: int = 16

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self) -> dict:
        return {
            "pass": self.ok,
            "entries": [
                {"point": str(e.point), "kind": e.kind, "residual": e.residual,
                 "pass": e.passed, "note": e.note}
                for e in self.entries
            ],
        }


def glue(germs: Sequence[Germ], candidate: FourierDistribution, order: int = 8,
         tol: float = 1e-9, window: int = 16) -> GlueReport:
    """Check the candidate restricts to every supplied germ.

    Taylor germs compare coefficientwise; distributional germs compare the
    reference distributions on a coefficient window.  Mismatches become report
    entries, never exceptions.
    """
    report = GlueReport(window=window)
    for germ in germs:
        try:
            got = candidate.restrict_germ(germ.point, order=min(order, germ.order))
        except GermSingular as exc:
            report.entries.append(GlueEntry(germ.point, "error", float("inf"),
                                            False, str(exc)))
            continue
        if germ.kind == "taylor" and got.kind == "taylor":
            residual = got.series.max_coeff_delta(germ.series)
            budget = germ.err + got.err + (0.0 if (germ.exact and got.exact) else tol)
            report.entries.append(GlueEntry(germ.point, "taylor", residual,
                                            residual <= budget))
        elif germ.kind == "distributional" and got.kind == "distributional":
            ref = germ.reference
            worst = 0.0
            okay = True
            if ref is not None:
                for w in candidate.group.weights_window(window):
                    delta = (candidate.coeff(w) - ref.coeff(w)).abs2()
                    worst = max(worst, float(delta))
                    if delta != 0:
                        okay = False
            report.entries.append(GlueEntry(germ.point, "distributional",
                                            worst, okay, germ.note))
        else:
            report.entries.append(GlueEntry(
                germ.point, "mismatch", float("inf"), False,
                f"expected {germ.kind} germ, candidate gave {got.kind}"))
    return report


# ---------------------------------------------------------------------------
# pairing against test functions
# ---------------------------------------------------------------------------


def pair(obj, phi, window: Fraction | None = None, tol: float = 1e-12):
    """Pair a distribution or density with a test function on the Lie algebra.

    Returns (value, error_bound).  For a rank-1 FourierDistribution this is
    sum_k coeff(k) phi_hat(k) through the density representation.
    """
    if isinstance(obj, FourierDistribution):
        density = obj.to_density_germ()
        return density.pair(phi, window=window, tol=tol)
    if isinstance(obj, GeneralizedDensity):
        return obj.pair(phi, window=window, tol=tol)
    raise TypeError("pair expects a FourierDistribution or GeneralizedDensity")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _merge_rays(rays: list[tuple[int, int, Poly]],
                atoms: dict[int, GaussianRational]) -> list[tuple[int, int, Poly]]:
    """Merge rays with common step and congruent offsets; spill prefix atoms."""
    groups: dict[tuple[int, int], list[tuple[int, Poly]]] = {}
    for off, step, p in rays:
        if poly_is_zero(p):
            continue
        groups.setdefault((step, off % abs(step)), []).append((off, p))
    out: list[tuple[int, int, Poly]] = []
    for (step, _res), members in sorted(groups.items()):
        if len(members) == 1:
            off, p = members[0]
            out.append((off, step, p))
            continue
        sign = 1 if step > 0 else -1
        anchor = max(m[0] * sign for m in members) * sign
        # tail polynomial in n relative to the anchor
        tail: Poly = ()
        for off, p in members:
            shift = (anchor - off) // step  # >= 0 by anchor choice
            tail = poly_add(tail, poly_shift(p, shift))
        # prefix atoms for lattice points before the anchor
        for off, p in members:
            k = off
            n = 0
            while (k - anchor) * sign < 0:
                atoms[k] = atoms.get(k, GR(0)) + poly_eval(p, n)
                n += 1
                k += step
        if not poly_is_zero(tail):
            out.append((anchor, step, tail))
    return out


def _slot_gf(gen: SlotGen, scalar: GaussianRational):
    """Laurent rational generating function (num, den) of one torus slot."""
    if isinstance(gen, SlotAtoms):
        return ({k: v * scalar for k, v in gen.entries}, {0: GR(1)})
    if isinstance(gen, SlotRay):
        d = gen.step
        basis = geometric_series_coeffs(list(gen.poly))
        J = max((j for j, _ in basis), default=0)
        # common denominator (1 - z^d)^(J+1)
        den = _lpoly_power(_lpoly_sub({0: GR(1)}, {d: GR(1)}), J + 1)
        num: dict[int, GaussianRational] = {}
        for j, b in basis:
            term = _lpoly_power(_lpoly_sub({0: GR(1)}, {d: GR(1)}), J - j)
            term = _lpoly_scale(term, b * scalar)
            num = _lpoly_add(num, term)
        num = _lpoly_mul(num, {gen.offset: GR(1)})
        return (num, den)
    raise ValueError("full slots have no rational generating function")


def _lpoly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, GR(0)) + v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _lpoly_sub(a: dict, b: dict) -> dict:
    return _lpoly_add(a, {k: -v for k, v in b.items()})


def _lpoly_scale(a: dict, c: GaussianRational) -> dict:
    if c.is_zero():
        return {}
    return {k: v * c for k, v in a.items()}


def _lpoly_mul(a: dict, b: dict) -> dict:
    out: dict[int, GaussianRational] = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            k = k1 + k2
            out[k] = out.get(k, GR(0)) + v1 * v2
    return {k: v for k, v in out.items() if not v.is_zero()}


def _lpoly_power(a: dict, n: int) -> dict:
    out = {0: GR(1)}
    for _ in range(n):
        out = _lpoly_mul(out, a)
    return out


def _lpoly_span(a: dict) -> int:
    if not a:
        return 0
    return max(abs(k) for k in a) + 1


def _ratsum(n1: dict, d1: dict, n2: dict, d2: dict):
    num = _lpoly_add(_lpoly_mul(n1, d2), _lpoly_mul(n2, d1))
    den = _lpoly_mul(d1, d2)
    return num, den


def _lpoly_series(p: dict, angle: Fraction, order: int, exact: bool) -> PowerSeries:
    """Series in Y of sum_k p_k (s e^{iY})^k at s = e^{2 pi i angle}."""
    total = PowerSeries(1, order, exact=exact)
    for k, c in p.items():
        s_k = phase_to_scalar(angle * k)
        if exact and not isinstance(s_k, GaussianRational):
            raise GermSingular("exact germ requested at a non-exact point")
        coeff = c * s_k if isinstance(s_k, GaussianRational) else complex(c) * s_k
        e = PowerSeries.exponential(GR(0, k), 0, 1, order)
        if not exact:
            e = e.to_numeric(extra_err=1e-17 * abs(k) ** max(order, 1) if k else 0.0)
        total = total + e.scale(coeff)
    if not exact:
        total.err += 1e-15 * (1 + len(p))
    return total


def _embed_series(s: PowerSeries, var: int, nvars: int) -> PowerSeries:
    out = PowerSeries(nvars, s.order, exact=s.exact, err=s.err)
    for (k,), v in s.coeffs.items():
        key = tuple(k if j == var else 0 for j in range(nvars))
        out.coeffs[key] = v
    return out


def _part_to_json(part: TensorPart, group: GroupDescriptor) -> dict:
    gens = part.slots
    if all(isinstance(g, SlotFull) for g in gens) and part.scalar.is_one():
        return {"kind": "delta"}
    ray_slots = [j for j, g in enumerate(gens) if isinstance(g, SlotRay)]
    atom_slots = [j for j, g in enumerate(gens) if isinstance(g, SlotAtoms)]
    if len(ray_slots) == 1 and len(atom_slots) == len(gens) - 1 and all(
            len(gens[j].entries) == 1 and gens[j].entries[0][1].is_one()
            for j in atom_slots):
        j = ray_slots[0]
        ray: SlotRay = gens[j]
        offset = [0] * group.nslots
        step = [0] * group.nslots
        for aj in atom_slots:
            offset[aj] = gens[aj].entries[0][0]
        offset[j] = ray.offset
        step[j] = ray.step
        return {"kind": "ray", "scalar": str(part.scalar), "offset": offset,
                "step": step, "poly": [str(c) for c in ray.poly]}
    if not ray_slots and len(atom_slots) == len(gens):
        # expand the finite tensor product into explicit atoms
        table: dict[tuple[int, ...], GaussianRational] = {(): part.scalar}
        for g in gens:
            nxt = {}
            for key, val in table.items():
                for k, v in g.entries:
                    nxt[key + (k,)] = val * v
            table = nxt
        return {"kind": "atoms",
                "atoms": [{"weight": list(k), "value": str(v)}
                          for k, v in sorted(table.items())]}
    return {
        "kind": "tensor",
        "scalar": str(part.scalar),
        "factors": [_slot_to_json(g) for g in gens],
    }


def _slot_to_json(g: SlotGen) -> dict:
    if isinstance(g, SlotFull):
        return {"kind": "full"}
    if isinstance(g, SlotAtoms):
        return {"kind": "atoms1d", "entries": [[k, str(v)] for k, v in g.entries]}
    return {"kind": "ray1d", "offset": g.offset, "step": g.step,
            "poly": [str(c) for c in g.poly]}


def _slot_from_json(obj: dict) -> SlotGen:
    kind = obj["kind"]
    if kind == "full":
        return SlotFull()
    if kind == "atoms1d":
        return SlotAtoms.of({int(k): GaussianRational.from_str(v)
                             for k, v in obj["entries"]})
    if kind == "ray1d":
        return SlotRay(int(obj["offset"]), int(obj["step"]),
                       poly([GaussianRational.from_str(c) for c in obj["poly"]]))
    raise ValueError(f"unknown slot generator kind {kind!r}")


def _part_from_json(obj: dict, group: GroupDescriptor) -> TensorPart:
    kind = obj["kind"]
    if kind == "delta":
        return TensorPart(GR(1), tuple(SlotFull() for _ in range(group.nslots)))
    if kind == "ray":
        step = obj["step"]
        nz = [j for j, s in enumerate(step) if s != 0]
        if len(nz) != 1:
            raise ValueError("vector rays must have a single stepping slot")
        j = nz[0]
        slots: list[SlotGen] = []
        for slot_idx in range(group.nslots):
            if slot_idx == j:
                slots.append(SlotRay(int(obj["offset"][slot_idx]), int(step[slot_idx]),
                                     poly([GaussianRational.from_str(c) for c in obj["poly"]])))
            else:
                slots.append(SlotAtoms.of({int(obj["offset"][slot_idx]): GR(1)}))
        return TensorPart(GaussianRational.from_str(obj.get("scalar", "1")), tuple(slots))
    if kind == "tensor":
        return TensorPart(GaussianRational.from_str(obj.get("scalar", "1")),
                          tuple(_slot_from_json(f) for f in obj["factors"]))
    raise ValueError(f"unknown part kind {kind!r}")
