"""Conformal capacity of a union of hyperbolic disks in the unit disk.

The capacity of the condenser whose plate is the disk union and whose
ground is the unit circle is computed from boundary data of the harmonic
potential: each inner circle contributes a logarithmic source, the
integral equation yields the harmonic conjugate periods h, and a small
linear system recovers the source strengths a_k, with capacity
2 pi sum(a_k).  Closed forms cover one disk, the sum upper bound and the
isoperimetric-symmetrization lower bound for rings of equal disks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bie
from .bie import BoundaryGrid, CircularDomain, SolverConfig
from .constellation import Constellation, pair_margins

__all__ = [
    "CapacityResult",
    "ConvergenceStudy",
    "InfeasibleError",
    "gamma_for",
    "capacity",
    "single_disk_capacity",
    "upper_bound_sum",
    "gehring_bound",
    "lr_ratio",
    "convergence_study",
]


class InfeasibleError(ValueError):
    """Disks overlap or touch; the capacity problem is not solvable as posed."""


@dataclass(frozen=True)
class CapacityResult:
    cap: float
    a: np.ndarray
    c: float
    h: np.ndarray  # per-component means, shape (m+1, m)
    h_std: np.ndarray  # within-component spread of h, same shape
    alpha: complex
    n: int
    mode: str
    iterations: list[int] | None

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "a": [float(v) for v in self.a],
            "c": self.c,
            "h": [[float(v) for v in row] for row in self.h],
            "diagnostics": {
                "h_std_max": float(self.h_std.max()),
                "n": self.n,
                "alpha": [self.alpha.real, self.alpha.imag],
                "mode": self.mode,
                "iterations": self.iterations,
            },
        }


def gamma_for(grid: BoundaryGrid, k: int) -> np.ndarray:
    """Boundary data log|eta(t) - z_k| for inner circle k (0-based)."""
    if not 0 <= k < grid.domain.m:
        raise IndexError(f"inner circle index {k} out of range")
    return np.log(np.abs(grid.eta - grid.domain.centers[k]))


def _domain_of(c: Constellation | CircularDomain) -> CircularDomain:
    if isinstance(c, CircularDomain):
        return c
    bad = [(i, j, g + c.delta) for i, j, g in pair_margins(c) if g + c.delta <= 0.0]
    if bad:
        pairs = ", ".join(f"({i},{j}): gap {g:.3e}" for i, j, g in bad)
        raise InfeasibleError(f"disks overlap or touch: {pairs}")
    return CircularDomain.from_constellation(c)


def capacity(
    c: Constellation | CircularDomain, config: SolverConfig | None = None
) -> CapacityResult:
    """Capacity of the condenser (unit disk, disk union).

    Solves one integral equation per disk on a grid of n nodes per
    boundary circle and assembles the capacity from the per-component
    means of the conjugate periods.
    """
    if config is None:
        config = SolverConfig()
    domain = _domain_of(c)
    alpha = bie.resolve_alpha(domain, config.alpha)
    grid = bie.build_grid(domain, config.n)
    q = config.quad_oversample
    if q is None:
        q = bie.auto_oversample(domain, alpha, config.n)
    op = bie.assemble(grid, alpha, q)
    m = domain.m
    g = np.stack([gamma_for(grid, k) for k in range(m)], axis=1)
    info: dict = {}
    mu = bie.solve_mu(op, g, config, info)
    h = bie.compute_h(op, mu, g)
    blocks = h.reshape(m + 1, config.n, m)
    hbar = blocks.mean(axis=1)
    hstd = blocks.std(axis=1)
    sys_mat = np.hstack([hbar, np.ones((m + 1, 1))])
    rhs = np.ones(m + 1)
    rhs[0] = 0.0
    x = np.linalg.solve(sys_mat, rhs)
    a = x[:m]
    cap = 2.0 * math.pi * float(a.sum())
    return CapacityResult(
        cap=cap,
        a=a,
        c=float(x[m]),
        h=hbar,
        h_std=hstd,
        alpha=alpha,
        n=config.n,
        mode=config.mode,
        iterations=info.get("iterations"),
    )


def single_disk_capacity(radius: float) -> float:
    """Capacity of one hyperbolic disk of the given radius, 2 pi / log coth(r/2)."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    # log coth(r/2) = 2 artanh(exp(-r)), stable for large r
    return math.pi / math.atanh(math.exp(-radius))


def upper_bound_sum(radii) -> float:
    """Subadditivity bound: the sum of the single-disk capacities."""
    return sum(single_disk_capacity(r) for r in radii)


def gehring_bound(m: int, r: float) -> float:
    """Lower bound for m disjoint disks of equal hyperbolic radius r.

    Equals the capacity of the single disk of the same total area,
    radius M = 2 asinh(sqrt(m) sinh(r/2)).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    big = 2.0 * math.asinh(math.sqrt(m) * math.sinh(r / 2.0))
    return single_disk_capacity(big)


def lr_ratio(c: Constellation, r: float, config: SolverConfig | None = None) -> float:
    """Relative excess (cap - L) / L over the equal-area lower bound L."""
    if any(abs(rad - r) > 1e-12 for rad in c.radii):
        raise ValueError("all disks must have radius r")
    low = gehring_bound(c.m, r)
    return (capacity(c, config).cap - low) / low


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: list[tuple[int, float, float]]  # (n, cap, |cap - cap_ref|)
    cap_ref: float
    ref_n: int
    sigma: float  # fitted decay rate of the error, err ~ exp(-sigma n)


def convergence_study(
    c: Constellation | CircularDomain,
    n_list,
    alpha: complex | str | None = None,
    mode: str = "direct",
) -> ConvergenceStudy:
    """Capacity at each n against a reference at twice the largest n."""
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise ValueError("n_list must be nonempty")
    ref_n = 2 * n_list[-1]
    cap_ref = capacity(c, SolverConfig(n=ref_n, alpha=alpha, mode=mode)).cap
    rows = []
    for n in n_list:
        cap_n = capacity(c, SolverConfig(n=n, alpha=alpha, mode=mode)).cap
        rows.append((n, cap_n, abs(cap_n - cap_ref)))
    pts = [(n, math.log(err)) for n, _, err in rows if err > 0.0]
    if len(pts) >= 2:
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        slope = np.polyfit(xs, ys, 1)[0]
        sigma = -float(slope)
    else:
        sigma = float("nan")
    return ConvergenceStudy(rows=rows, cap_ref=cap_ref, ref_n=ref_n, sigma=sigma)
