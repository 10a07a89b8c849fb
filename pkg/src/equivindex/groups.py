"""Group descriptors, weight lattices and exact group elements.

The groups handled by the workbench are products of a torus T^n and finite
cyclic factors Z_m.  Characters are indexed by :class:`Weight` (an integer
vector for the torus slots plus residues for the cyclic slots).  Group
elements carry rational rotation angles, measured in full turns, so that
character values at fourth roots of unity stay in Q(i).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .scalars import GR, GaussianRational


@dataclass(frozen=True)
class GroupDescriptor:
    torus_rank: int
    cyclic_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.torus_rank < 0:
            raise ValueError("torus rank must be >= 0")
        object.__setattr__(self, "cyclic_orders", tuple(int(m) for m in self.cyclic_orders))
        for m in self.cyclic_orders:
            if m < 2:
                raise ValueError("cyclic orders must be >= 2")

    @property
    def nslots(self) -> int:
        return self.torus_rank + len(self.cyclic_orders)

    def slot_order(self, slot: int) -> int | None:
        """Order of the cyclic factor at this slot, or None for a torus slot."""
        if slot < self.torus_rank:
            return None
        return self.cyclic_orders[slot - self.torus_rank]

    def weight(self, comps: Sequence[int]) -> "Weight":
        comps = list(int(c) for c in comps)
        if len(comps) != self.nslots:
            raise InvalidWeight(
                f"weight length {len(comps)} does not match group with {self.nslots} slots")
        t = tuple(comps[: self.torus_rank])
        c = tuple(comps[self.torus_rank + j] % m for j, m in enumerate(self.cyclic_orders))
        return Weight(t, c)

    def zero_weight(self) -> "Weight":
        return Weight((0,) * self.torus_rank, (0,) * len(self.cyclic_orders))

    def identity(self) -> "GroupElement":
        return GroupElement((Fraction(0),) * self.torus_rank,
                            (0,) * len(self.cyclic_orders))

    def element(self, angles: Sequence[Union[Fraction, int, str]] = (),
                cyclic: Sequence[int] = ()) -> "GroupElement":
        """Element from rotation angles (fractions of a full turn) and residues."""
        a = tuple(Fraction(x) % 1 for x in angles)
        c = tuple(int(r) % m for r, m in zip(cyclic, self.cyclic_orders))
        if len(a) != self.torus_rank or len(c) != len(self.cyclic_orders):
            raise ValueError("element components do not match group")
        return GroupElement(a, c)

    def product(self, other: "GroupDescriptor") -> "GroupDescriptor":
        return GroupDescriptor(self.torus_rank + other.torus_rank,
                               self.cyclic_orders + other.cyclic_orders)

    def weights_window(self, radius: int) -> Iterable["Weight"]:
        """All weights with sup-norm <= radius on torus slots (full cyclic range)."""
        def torus_axis():
            return range(-radius, radius + 1)

        def rec(slot: int, acc: list[int]):
            if slot == self.nslots:
                yield self.weight(acc)
                return
            rng = torus_axis() if slot < self.torus_rank else range(self.cyclic_orders[slot - self.torus_rank])
            for v in rng:
                acc.append(v)
                yield from rec(slot + 1, acc)
                acc.pop()

        yield from rec(0, [])

    def to_json(self) -> dict:
        return {"rank": self.torus_rank, "cyclic": list(self.cyclic_orders)}

    @staticmethod
    def from_json(obj: dict) -> "GroupDescriptor":
        return GroupDescriptor(int(obj["rank"]), tuple(obj.get("cyclic", ())))


class InvalidWeight(ValueError):
    """Weight incompatible with the group descriptor."""


@dataclass(frozen=True)
class Weight:
    torus: tuple[int, ...]
    cyclic: tuple[int, ...] = ()

    @property
    def components(self) -> tuple[int, ...]:
        return self.torus + self.cyclic

    def sup_norm(self) -> int:
        return max((abs(c) for c in self.torus), default=0)

    def concat(self, other: "Weight") -> "Weight":
        return Weight(self.torus + other.torus, self.cyclic + other.cyclic)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class GroupElement:
    """Rational rotation: angles are fractions of a full turn, reduced mod 1."""

    angles: tuple[Fraction, ...]
    cyclic: tuple[int, ...] = ()

    def is_identity(self) -> bool:
        return all(a == 0 for a in self.angles) and all(r == 0 for r in self.cyclic)

    def phase(self, w: Weight, orders: Sequence[int] = ()) -> Fraction:
        """Total phase of the character at this element, as a fraction of a turn."""
        q = sum((a * k for a, k in zip(self.angles, w.torus)), Fraction(0))
        for r, k, m in zip(self.cyclic, w.cyclic, orders):
            q += Fraction(r * k, m)
        return q % 1

    def char(self, w: Weight, orders: Sequence[int] = ()):
        """Character value exp(2*pi*i*phase).

        Returns a GaussianRational when the phase is a multiple of a quarter
        turn, otherwise a complex float.
        """
        q = self.phase(w, orders)
        return phase_to_scalar(q)

    def is_exact_point(self) -> bool:
        """True when every character value is a fourth root of unity times Q(i)."""
        return all((4 * a).denominator == 1 for a in self.angles)

    def __str__(self) -> str:
        parts = [str(a) for a in self.angles] + [f"[{r}]" for r in self.cyclic]
        return "(" + ",".join(parts) + ")"


_QUARTER_TABLE = {
    Fraction(0): GR(1, 0),
    Fraction(1, 4): GR(0, 1),
    Fraction(1, 2): GR(-1, 0),
    Fraction(3, 4): GR(0, -1),
}


def phase_to_scalar(q: Fraction):
    """exp(2*pi*i*q) as GaussianRational for quarter turns, complex otherwise."""
    q = q % 1
    hit = _QUARTER_TABLE.get(q)
    if hit is not None:
        return hit
    return cmath.exp(2j * cmath.pi * float(q))


def char_value(group: GroupDescriptor, elt: GroupElement, w: Weight):
    return elt.char(w, group.cyclic_orders)


def scalar_is_exact(x) -> bool:
    return isinstance(x, GaussianRational)
