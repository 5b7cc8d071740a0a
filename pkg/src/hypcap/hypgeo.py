"""Hyperbolic geometry of the unit disk.

Points are complex numbers z with |z| < 1.  Disks carry either a
hyperbolic radius (measured in the Poincare metric) or a Euclidean one;
a hyperbolic disk is a Euclidean disk, just not concentric with it, and
the two representations convert exactly in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "HyperbolicDisk",
    "EuclideanDisk",
    "MobiusSelfMap",
    "hyp_distance",
    "hyp_midpoint",
    "hyp_to_euc",
    "euc_to_hyp",
    "hyp_area",
    "hyp_circumference",
    "hyp_circle_intersection",
]

# discriminant band snapped to a single tangency point
_TANGENCY_EPS = 1e-12


def _check_point(z: complex) -> complex:
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"point {z} is not inside the unit disk")
    return z


@dataclass(frozen=True)
class HyperbolicDisk:
    """Closed disk of hyperbolic radius `radius` about `center`."""

    center: complex
    radius: float

    def __post_init__(self) -> None:
        _check_point(self.center)
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"hyperbolic radius must be positive and finite, got {self.radius}")


@dataclass(frozen=True)
class EuclideanDisk:
    """Closed Euclidean disk whose closure lies inside the unit disk."""

    center: complex
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if abs(self.center) + self.radius >= 1.0:
            raise ValueError("disk closure reaches the unit circle")


def hyp_distance(x: complex, y: complex) -> float:
    """Poincare distance between two points of the unit disk.

    Evaluated as 2*asinh(|x-y| / sqrt((1-|x|^2)(1-|y|^2))), which is
    stable both for nearly coincident points and near the boundary.
    """
    x = _check_point(x)
    y = _check_point(y)
    px = 1.0 - abs(x) ** 2
    py = 1.0 - abs(y) ** 2
    return 2.0 * math.asinh(abs(x - y) / math.sqrt(px * py))


def hyp_midpoint(x: complex, y: complex) -> complex:
    """Hyperbolic midpoint of the segment from x to y."""
    x = _check_point(x)
    y = _check_point(y)
    px = 1.0 - abs(x) ** 2
    py = 1.0 - abs(y) ** 2
    amp = math.sqrt(abs(x - y) ** 2 + px * py)
    den = 1.0 - (abs(x) * abs(y)) ** 2 + amp * math.sqrt(px * py)
    return (y * px + x * py) / den


def hyp_to_euc(disk: HyperbolicDisk) -> EuclideanDisk:
    """Euclidean center and radius of a hyperbolic disk."""
    x = disk.center
    t = math.tanh(disk.radius / 2.0)
    xa2 = abs(x) ** 2
    den = 1.0 - xa2 * t * t
    return EuclideanDisk(center=x * (1.0 - t * t) / den, radius=(1.0 - xa2) * t / den)


def euc_to_hyp(disk: EuclideanDisk) -> HyperbolicDisk:
    """Hyperbolic center and radius of a Euclidean disk inside the unit disk.

    The hyperbolic center lies on the ray through the Euclidean center, at
    the hyperbolic midpoint of the two diameter endpoints of the disk.
    """
    ya = abs(disk.center)
    a = ya - disk.radius
    b = ya + disk.radius
    t = hyp_midpoint(complex(a), complex(b)).real
    radius = hyp_distance(complex(t), complex(b))
    if t == 0.0:
        center = 0j
    else:
        center = t * disk.center / ya
    return HyperbolicDisk(center=center, radius=radius)


def hyp_area(radius: float) -> float:
    """Area of a hyperbolic disk of the given hyperbolic radius."""
    if radius < 0.0:
        raise ValueError("radius must be nonnegative")
    return 4.0 * math.pi * math.sinh(radius / 2.0) ** 2


def hyp_circumference(radius: float) -> float:
    """Boundary length of a hyperbolic disk of the given hyperbolic radius."""
    if radius < 0.0:
        raise ValueError("radius must be nonnegative")
    return 2.0 * math.pi * math.sinh(radius)


@dataclass(frozen=True)
class MobiusSelfMap:
    """Self-map of the unit disk, z -> e^{i phi} (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    phi: float = 0.0

    def __post_init__(self) -> None:
        _check_point(self.a)

    def __call__(self, z: complex) -> complex:
        z = _check_point(z)
        return cmath.exp(1j * self.phi) * (z - self.a) / (1.0 - self.a.conjugate() * z)

    def inverse(self) -> "MobiusSelfMap":
        return MobiusSelfMap(a=-cmath.exp(1j * self.phi) * self.a, phi=-self.phi)

    def map_disk(self, disk: HyperbolicDisk) -> HyperbolicDisk:
        # an isometry carries hyperbolic center to hyperbolic center and
        # preserves the hyperbolic radius
        return HyperbolicDisk(center=self(disk.center), radius=disk.radius)


def hyp_circle_intersection(c1: complex, m1: float, c2: complex, m2: float) -> list[complex]:
    """Intersection points of two hyperbolic circles.

    The circles are the boundaries of HyperbolicDisk(c1, m1) and
    HyperbolicDisk(c2, m2).  Returns 0, 1 or 2 points; a discriminant in
    [-1e-12, 0) counts as tangency and yields the single tangency point.
    Coincident circles return [] (no finite enumeration exists).
    """
    e1 = hyp_to_euc(HyperbolicDisk(c1, m1))
    e2 = hyp_to_euc(HyperbolicDisk(c2, m2))
    y1, r1 = e1.center, e1.radius
    y2, r2 = e2.center, e2.radius
    d = abs(y2 - y1)
    if d == 0.0:
        return []
    u = (y2 - y1) / d
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    disc = r1 * r1 - a * a
    if disc < -_TANGENCY_EPS:
        return []
    base = y1 + a * u
    if disc <= 0.0:
        return [base]
    h = math.sqrt(disc)
    return [base + 1j * h * u, base - 1j * h * u]
