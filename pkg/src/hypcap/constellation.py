"""Disk configurations and the generators for the experiment families.

A constellation is a finite list of hyperbolic disks together with the
minimal boundary separation delta used by feasibility checks and by the
optimizer.  Generators build the families studied in the experiments:
collinear chains on a diameter, disks mounted on a concentric circle,
the twelve permutation classes of four radii, equally-sized rings, and
the path of a disk rolling over a fixed chain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from scipy.optimize import brentq

from .hypgeo import (
    EuclideanDisk,
    HyperbolicDisk,
    euc_to_hyp,
    hyp_circle_intersection,
    hyp_distance,
    hyp_to_euc,
)

__all__ = [
    "Constellation",
    "Violation",
    "validate",
    "collinear_chain",
    "circle_mounted",
    "permutation_family",
    "er_config",
    "RollingPath",
    "RollingPathError",
    "rolling_path",
]


@dataclass(frozen=True)
class Violation:
    """One violated separation constraint: margin = rho - r_i - r_j - delta < 0."""

    i: int
    j: int
    margin: float


@dataclass(frozen=True)
class Constellation:
    disks: tuple[HyperbolicDisk, ...]
    delta: float = 0.02
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "disks", tuple(self.disks))
        if len(self.disks) == 0:
            raise ValueError("constellation needs at least one disk")
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.disks)

    @property
    def centers(self) -> tuple[complex, ...]:
        return tuple(d.center for d in self.disks)

    @property
    def radii(self) -> tuple[float, ...]:
        return tuple(d.radius for d in self.disks)

    def with_centers(self, centers: Sequence[complex]) -> "Constellation":
        if len(centers) != self.m:
            raise ValueError("center count mismatch")
        disks = tuple(
            HyperbolicDisk(center=complex(z), radius=d.radius) for z, d in zip(centers, self.disks)
        )
        return replace(self, disks=disks)

    def to_dict(self) -> dict:
        return {
            "geometry": "hyperbolic",
            "delta": self.delta,
            "disks": [
                {"center": [d.center.real, d.center.imag], "radius": d.radius} for d in self.disks
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Constellation":
        geometry = data.get("geometry", "hyperbolic")
        if geometry not in ("hyperbolic", "euclidean"):
            raise ValueError(f"unknown geometry {geometry!r}")
        delta = float(data.get("delta", 0.02))
        disks = []
        for entry in data["disks"]:
            x, y = entry["center"]
            z = complex(float(x), float(y))
            r = float(entry["radius"])
            if geometry == "euclidean":
                disks.append(euc_to_hyp(EuclideanDisk(center=z, radius=r)))
            else:
                disks.append(HyperbolicDisk(center=z, radius=r))
        return cls(disks=tuple(disks), delta=delta, label=str(data.get("label", "")))


def pair_margins(c: Constellation, delta: float | None = None) -> list[tuple[int, int, float]]:
    """Separation margins rho(z_i, z_j) - r_i - r_j - delta for all pairs i < j."""
    if delta is None:
        delta = c.delta
    out = []
    for i in range(c.m):
        for j in range(i + 1, c.m):
            di, dj = c.disks[i], c.disks[j]
            margin = hyp_distance(di.center, dj.center) - di.radius - dj.radius - delta
            out.append((i, j, margin))
    return out


def validate(c: Constellation, delta: float | None = None, tol: float = 1e-12) -> list[Violation]:
    """Violated separation constraints; empty list means feasible.

    Margins above -tol pass, so configurations placed at the separation
    limit by a root-find still validate.
    """
    return [Violation(i, j, g) for i, j, g in pair_margins(c, delta) if g < -tol]


def _chain_positions(radii: Sequence[float], d: float) -> list[float]:
    pos = [0.0]
    for r_prev, r_next in itertools.pairwise(radii):
        pos.append(pos[-1] + r_prev + r_next + d)
    return pos


def collinear_chain(radii: Sequence[float], d: float, anchor: int = 0) -> Constellation:
    """Chain of disks on the real diameter with uniform boundary gap d.

    Consecutive hyperbolic center distances are r_i + r_{i+1} + d; the
    disk at `anchor` is centered at the origin and the others extend
    along the positive/negative real axis in list order.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0.0 for r in radii):
        raise ValueError("radii must be positive")
    if d < 0.0:
        raise ValueError("gap must be nonnegative")
    if not 0 <= anchor < len(radii):
        raise ValueError("anchor index out of range")
    pos = _chain_positions(radii, d)
    shift = pos[anchor]
    disks = tuple(
        HyperbolicDisk(center=complex(math.tanh((p - shift) / 2.0)), radius=r)
        for p, r in zip(pos, radii)
    )
    return Constellation(disks=disks, delta=d)


def circle_mounted(
    radii: Sequence[float], angles: Sequence[float], circle_radius: float = 0.5, delta: float = 0.02
) -> Constellation:
    """Disks with hyperbolic centers on the circle |z| = circle_radius."""
    if len(radii) != len(angles):
        raise ValueError("radii and angles must have equal length")
    if not 0.0 < circle_radius < 1.0:
        raise ValueError("circle_radius must lie in (0, 1)")
    disks = tuple(
        HyperbolicDisk(center=circle_radius * complex(math.cos(a), math.sin(a)), radius=float(r))
        for r, a in zip(radii, angles)
    )
    return Constellation(disks=disks, delta=delta)


def _angle_step(circle_radius: float, target: float) -> float:
    # rho between two points on |z|=R at angular separation x, increasing on (0, pi]
    def f(x: float) -> float:
        p = circle_radius * complex(math.cos(x), math.sin(x))
        return hyp_distance(complex(circle_radius), p) - target

    if f(math.pi) < 0.0:
        raise ValueError("requested separation does not fit on the circle")
    return brentq(f, 1e-12, math.pi, xtol=1e-15, rtol=8.9e-16)


def permutation_family(
    sorted_radii: Sequence[float], layout: str, delta: float = 0.02
) -> list[Constellation]:
    """The twelve orderings of four disks, up to reversal.

    sorted_radii must be descending; the disks are labeled A, B, C, D by
    size rank and each class label is the lexicographically smaller of a
    word and its reversal.  layout "diameter" chains the disks on the
    real axis with gap delta; layout "circle" places them consecutively
    on |z| = 1/2 with boundary separation delta.
    """
    radii = [float(r) for r in sorted_radii]
    if len(radii) != 4:
        raise ValueError("need exactly four radii")
    if any(a < b for a, b in itertools.pairwise(radii)):
        raise ValueError("radii must be sorted in descending order")
    if layout not in ("diameter", "circle"):
        raise ValueError(f"unknown layout {layout!r}")

    letters = "ABCD"
    seen: set[str] = set()
    out: list[Constellation] = []
    for perm in itertools.permutations(range(4)):
        word = "".join(letters[k] for k in perm)
        canon = min(word, word[::-1])
        if canon in seen:
            continue
        seen.add(canon)
        order = [letters.index(ch) for ch in canon]
        perm_radii = [radii[k] for k in order]
        if layout == "diameter":
            c = collinear_chain(perm_radii, delta)
        else:
            angles = [0.0]
            for r_prev, r_next in itertools.pairwise(perm_radii):
                angles.append(angles[-1] + _angle_step(0.5, r_prev + r_next + delta))
            c = circle_mounted(perm_radii, angles, 0.5, delta=delta)
        out.append(replace(c, delta=delta, label=canon))
    assert len(out) == 12
    return out


def _ring_modulus(angle: float, target: float) -> float:
    # |center| e for points on the rays 0 and `angle` at pairwise rho = target
    def f(e: float) -> float:
        return hyp_distance(complex(e), e * complex(math.cos(angle), math.sin(angle))) - target

    return brentq(f, 1e-12, 1.0 - 1e-12, xtol=1e-15, rtol=8.9e-16)


def er_config(m: int, r: float, case: str | None = None, gap: float = 0.02) -> Constellation:
    """Cluster of m equal disks of hyperbolic radius r at boundary gap `gap`.

    m=2: centers on the real axis symmetric about 0.  m=3: equilateral.
    m=4 case "I": ring on the four half-axes with adjacent separation
    gap.  m=4 case "II": the equilateral triple on the rays 0, 2pi/3,
    4pi/3 plus a fourth disk in the outer pocket on the ray pi/3; five
    of the six pairs sit at separation exactly gap, so this is the
    maximal-contact cluster and has the smaller capacity of the two.
    """
    if r <= 0.0 or gap <= 0.0:
        raise ValueError("radius and gap must be positive")
    target = 2.0 * r + gap
    if m == 2:
        e = math.tanh(target / 4.0)
        centers = [complex(-e), complex(e)]
    elif m == 3:
        e = _ring_modulus(2.0 * math.pi / 3.0, target)
        centers = [e * complex(math.cos(2.0 * math.pi * k / 3.0), math.sin(2.0 * math.pi * k / 3.0)) for k in range(3)]
    elif m == 4:
        if case == "I":
            e = _ring_modulus(math.pi / 2.0, target)
            angles = [0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0]
            centers = [e * complex(math.cos(a), math.sin(a)) for a in angles]
        elif case == "II":
            e = _ring_modulus(2.0 * math.pi / 3.0, target)
            x = complex(e)

            # pocket disk on the pi/3 ray at center distance `target` from
            # the triple disks on the rays 0 and 2pi/3 (mirror symmetry)
            def f(b: float) -> float:
                return hyp_distance(x, b * complex(math.cos(math.pi / 3.0), math.sin(math.pi / 3.0))) - target

            b = brentq(f, 1e-12, 1.0 - 1e-12, xtol=1e-15, rtol=8.9e-16)
            angles = [0.0, math.pi / 3.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0]
            moduli = [e, b, e, e]
            centers = [mod * complex(math.cos(a), math.sin(a)) for mod, a in zip(moduli, angles)]
        else:
            raise ValueError("m=4 needs case 'I' or 'II'")
    else:
        raise ValueError("m must be 2, 3 or 4")
    disks = tuple(HyperbolicDisk(center=z, radius=r) for z in centers)
    return Constellation(disks=disks, delta=gap, label=f"ring-m{m}" + (f"-{case}" if m == 4 else ""))


class RollingPathError(ValueError):
    """No connected rolling path exists for the given mobile radius."""


@dataclass(frozen=True)
class _Arc:
    center: complex  # Euclidean center of the carrier circle
    radius: float  # Euclidean radius
    angle_start: float
    angle_end: float

    def point(self, lam: float) -> complex:
        a = self.angle_start + lam * (self.angle_end - self.angle_start)
        return self.center + self.radius * complex(math.cos(a), math.sin(a))


@dataclass(frozen=True)
class RollingPath:
    """Center curve of a disk rolling over a chain of fixed disks.

    The curve consists of arcs of the tangency circles (fixed radius plus
    mobile radius plus delta about each fixed center), joined at the
    double-tangency points, and runs from the far left of the first
    tangency circle on the real axis to the far right of the last.  The
    parameter tau is affine on each arc; with three arcs the junctions
    sit exactly at tau = 1/3 and 2/3.
    """

    fixed: Constellation
    mobile_radius: float
    delta: float
    arcs: tuple[_Arc, ...]
    breaks: tuple[float, ...]
    junctions: tuple[complex, ...]

    def point(self, tau: float) -> complex:
        if not 0.0 <= tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        k = len(self.arcs) - 1
        for i in range(len(self.arcs) - 1):
            if tau <= self.breaks[i + 1]:
                k = i
                break
        a, b = self.breaks[k], self.breaks[k + 1]
        return self.arcs[k].point((tau - a) / (b - a))

    def constellation(self, tau: float) -> Constellation:
        mobile = HyperbolicDisk(center=self.point(tau), radius=self.mobile_radius)
        return Constellation(disks=self.fixed.disks + (mobile,), delta=self.delta)


def _upper_intersection(c1: complex, m1: float, c2: complex, m2: float) -> complex | None:
    pts = [p for p in hyp_circle_intersection(c1, m1, c2, m2) if p.imag > 0.0]
    return pts[0] if pts else None


def rolling_path(
    fixed: Constellation | Sequence[HyperbolicDisk], mobile_radius: float, delta: float = 0.02
) -> RollingPath:
    """Path of a mobile disk rolling left to right over a fixed chain.

    The fixed disks must be centered on the real axis in increasing
    order.  The mobile disk keeps boundary separation delta from the
    fixed disk it currently rolls on; if a junction point would bring it
    closer than delta to another fixed disk, the unreachable middle arc
    is dropped and the path degrades to two arcs (breaks at tau = 1/2).
    """
    if isinstance(fixed, Constellation):
        fixed_c = replace(fixed, delta=delta)
    else:
        fixed_c = Constellation(disks=tuple(fixed), delta=delta)
    if mobile_radius <= 0.0 or delta <= 0.0:
        raise ValueError("mobile radius and delta must be positive")
    centers = fixed_c.centers
    if any(abs(z.imag) > 1e-14 for z in centers):
        raise ValueError("fixed centers must lie on the real axis")
    if any(a.real >= b.real for a, b in itertools.pairwise(centers)):
        raise ValueError("fixed centers must increase along the real axis")

    n = fixed_c.m
    big = [r + mobile_radius + delta for r in fixed_c.radii]  # tangency circle radii
    euc = [hyp_to_euc(HyperbolicDisk(center=z, radius=R)) for z, R in zip(centers, big)]

    def clears(p: complex, skip: tuple[int, ...]) -> bool:
        return all(
            hyp_distance(p, centers[j]) >= big[j] - 1e-9 for j in range(n) if j not in skip
        )

    junctions: list[complex] = []
    arc_idx: list[int] = [0]
    for i in range(n - 1):
        p = _upper_intersection(centers[i], big[i], centers[i + 1], big[i + 1])
        if p is None or not clears(p, (i, i + 1)):
            continue
        junctions.append(p)
        arc_idx.append(i + 1)
    # drop arcs that were skipped: re-link consecutive used circles directly
    if len(arc_idx) < n:
        junctions = []
        arc_idx = [0]
        i = 0
        while i < n - 1:
            hop = None
            for j in range(n - 1, i, -1):
                p = _upper_intersection(centers[i], big[i], centers[j], big[j])
                if p is not None and clears(p, (i, j)):
                    hop = (j, p)
                    break
            if hop is None:
                raise RollingPathError("mobile disk cannot pass over the chain")
            junctions.append(hop[1])
            arc_idx.append(hop[0])
            i = hop[0]

    s_first = 2.0 * math.atanh(centers[arc_idx[0]].real)
    s_last = 2.0 * math.atanh(centers[arc_idx[-1]].real)
    start = complex(math.tanh((s_first - big[arc_idx[0]]) / 2.0))
    end = complex(math.tanh((s_last + big[arc_idx[-1]]) / 2.0))

    arcs = []
    waypoints = [start] + junctions + [end]
    for k, idx in enumerate(arc_idx):
        e = euc[idx]
        p0, p1 = waypoints[k], waypoints[k + 1]
        a0 = math.atan2((p0 - e.center).imag, (p0 - e.center).real)
        a1 = math.atan2((p1 - e.center).imag, (p1 - e.center).real)
        if a0 <= a1:
            raise RollingPathError("degenerate arc ordering")
        arcs.append(_Arc(center=e.center, radius=e.radius, angle_start=a0, angle_end=a1))
    k = len(arcs)
    breaks = tuple(i / k for i in range(k + 1))
    path = RollingPath(
        fixed=fixed_c,
        mobile_radius=mobile_radius,
        delta=delta,
        arcs=tuple(arcs),
        breaks=breaks,
        junctions=tuple(junctions),
    )
    for arc, idx in zip(arcs, arc_idx):
        for lam in (j / 32.0 for j in range(33)):
            p = arc.point(lam)
            if not clears(p, (idx,)):
                raise RollingPathError("constructed path violates clearance")
    return path
