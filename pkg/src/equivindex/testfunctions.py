"""Named analytic test-function families with closed-form transforms.

Each family exposes phi(theta) on the Lie algebra, its transform
phi_hat(x) = integral phi(theta) exp(i x theta) dtheta, and tail bounds for
truncating lattice sums.  Families used against density windows keep their
support inside (-2*pi, 2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class GaussianFamily:
    """phi(theta) = exp(-theta^2 / (2 sigma^2)); transform is again Gaussian."""

    sigma: float = 1.0
    name: str = "gaussian"

    @property
    def support_radius(self):
        return None  # rapidly decaying, treated as window-compliant

    def value(self, theta: float) -> float:
        return math.exp(-theta * theta / (2 * self.sigma ** 2))

    def hat(self, x: float) -> float:
        return self.sigma * math.sqrt(2 * math.pi) * math.exp(-self.sigma ** 2 * x * x / 2)

    def hat_support_hint(self, tol: float) -> tuple[float, float]:
        r = math.sqrt(max(1.0, -2 * math.log(max(tol, 1e-300)))) / self.sigma + 1
        return (-r, r)

    def hat_tail_bound(self, start: float, spacing: float, deg: int) -> float:
        if start <= 0:
            start = spacing
        s = self.sigma
        val = s * math.sqrt(2 * math.pi) * math.exp(-s * s * start * start / 2)
        return val * (1 + start) ** deg * 4 / max(spacing, 1e-9)


@dataclass(frozen=True)
class HannFamily:
    """Raised-cosine bump on [-L, L]; transform decays like x^-3."""

    L: float = 5.0
    name: str = "hann"

    @property
    def support_radius(self):
        return self.L

    def value(self, theta: float) -> float:
        if abs(theta) >= self.L:
            return 0.0
        return 0.5 * (1 + math.cos(math.pi * theta / self.L))

    def hat(self, x: float) -> float:
        a = math.pi / self.L
        if abs(x) < 1e-7 or abs(abs(x) - a) < 1e-7:
            # removable points: quadrature fallback on the series
            return self._hat_series(x)
        return a * a * math.sin(self.L * x) / (x * (a * a - x * x))

    def _hat_series(self, x: float) -> float:
        total = 0.0
        n = 400
        h = 2 * self.L / n
        for k in range(n + 1):
            th = -self.L + k * h
            w = 1.0 if 0 < k < n else 0.5
            total += w * self.value(th) * math.cos(x * th)
        return total * h

    def hat_support_hint(self, tol: float) -> tuple[float, float]:
        a = math.pi / self.L
        r = (a * a / max(tol, 1e-300)) ** (1.0 / 3.0) + 4
        return (-r, r)

    def hat_tail_bound(self, start: float, spacing: float, deg: int) -> float:
        a = math.pi / self.L
        start = max(abs(start), 2 * a)
        if deg >= 2:
            return math.inf
        # sum |x|^deg * a^2/|x|^3 <= a^2 * integral comparison
        return a * a * (start ** (deg - 2)) / max(spacing, 1e-9) / max(1, 2 - deg)


@dataclass(frozen=True)
class BSplineFamily:
    """Cubic B-spline bump on [-2h, 2h]; transform is h*sinc^4, decay x^-4."""

    h: float = 2.0
    name: str = "bspline3"

    @property
    def support_radius(self):
        return 2 * self.h

    def value(self, theta: float) -> float:
        t = theta / self.h + 2.0
        if t < 0 or t > 4:
            return 0.0
        if t <= 1:
            return t ** 3 / 6
        if t <= 2:
            return (-3 * t ** 3 + 12 * t * t - 12 * t + 4) / 6
        if t <= 3:
            return (3 * t ** 3 - 24 * t * t + 60 * t - 44) / 6
        return (4 - t) ** 3 / 6

    def hat(self, x: float) -> float:
        u = self.h * x / 2
        if abs(u) < 1e-6:
            s = 1 - u * u / 6
        else:
            s = math.sin(u) / u
        return self.h * s ** 4

    def hat_support_hint(self, tol: float) -> tuple[float, float]:
        r = (self.h / max(tol, 1e-300)) ** 0.25 * 2 / self.h + 4
        return (-r, r)

    def hat_tail_bound(self, start: float, spacing: float, deg: int) -> float:
        start = max(abs(start), 1.0)
        if deg >= 3:
            return math.inf
        c = self.h * (2 / self.h) ** 4
        return c * start ** (deg - 3) / max(spacing, 1e-9) / max(1, 3 - deg)


def default_families() -> list:
    return [GaussianFamily(sigma=1.0), HannFamily(L=5.0), BSplineFamily(h=2.0)]


def family_by_name(name: str, **kwargs):
    table = {"gaussian": GaussianFamily, "hann": HannFamily, "bspline3": BSplineFamily}
    if name not in table:
        raise ValueError(f"unknown test function family '{name}'")
    return table[name](**kwargs)
