"""Nystrom discretization of the boundary integral equation.

The domain is the unit disk minus m disjoint closed Euclidean disks; its
boundary consists of the unit circle (positively oriented) and the inner
circles (negatively oriented, parametrized clockwise).  The integral
equation couples two kernels built from A(t) = eta(t) - alpha with alpha
a point of the domain: the first is continuous, the second splits into a
cotangent singularity, discretized by the odd-even quadrature rule, plus
a continuous remainder.  All operators are assembled densely with the
trapezoidal rule, which converges exponentially on these analytic
boundaries.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import gmres

__all__ = [
    "CircularDomain",
    "BoundaryGrid",
    "SolverConfig",
    "OperatorMatrices",
    "ConfigurationError",
    "IterativeSolveError",
    "build_grid",
    "kernel_N",
    "kernel_M_cont",
    "assemble",
    "solve_mu",
    "compute_h",
    "default_alpha",
    "auto_alpha",
]

GMRES_RTOL = 1e-14
GMRES_MAXITER = 100


class ConfigurationError(ValueError):
    """Invalid solver configuration (bad alpha, odd n, unknown mode)."""


class IterativeSolveError(RuntimeError):
    """GMRES failed to reach the residual tolerance."""


@dataclass(frozen=True)
class CircularDomain:
    """Unit disk minus m disjoint closed Euclidean disks."""

    centers: tuple[complex, ...]
    radii: tuple[float, ...]

    def __post_init__(self) -> None:
        centers = tuple(complex(z) for z in self.centers)
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)
        if len(centers) != len(radii) or len(centers) == 0:
            raise ValueError("need matching, nonempty centers and radii")
        for z, r in zip(centers, radii):
            if r <= 0.0:
                raise ValueError("inner radii must be positive")
            if abs(z) + r >= 1.0:
                raise ValueError("inner disk reaches the unit circle")
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                    raise ValueError(f"inner disks {i} and {j} overlap or touch")

    @property
    def m(self) -> int:
        return len(self.centers)

    def contains(self, z: complex) -> bool:
        if abs(z) >= 1.0:
            return False
        return all(abs(z - c) > r for c, r in zip(self.centers, self.radii))

    @classmethod
    def from_constellation(cls, c) -> "CircularDomain":
        from .hypgeo import hyp_to_euc

        euc = [hyp_to_euc(d) for d in c.disks]
        return cls(centers=tuple(e.center for e in euc), radii=tuple(e.radius for e in euc))


@dataclass(frozen=True)
class SolverConfig:
    n: int = 128
    alpha: complex | str | None = None  # None: 0 if valid, else error; "auto": max-margin pick
    mode: str = "direct"
    quad_oversample: int | None = None  # None: adaptive from the kernel pole strips

    def __post_init__(self) -> None:
        if self.mode not in ("direct", "iterative"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.n < 4 or self.n % 2 != 0:
            raise ConfigurationError("n must be even and at least 4")
        if self.quad_oversample is not None and self.quad_oversample < 1:
            raise ConfigurationError("quad_oversample must be at least 1")


@dataclass(frozen=True)
class BoundaryGrid:
    """Equispaced nodes s_k = 2 pi k / n on each of the m+1 boundary circles.

    eta, etap, etapp hold the boundary parametrization and its first two
    derivatives, concatenated component by component (outer circle first).
    """

    domain: CircularDomain
    n: int
    s: np.ndarray
    eta: np.ndarray
    etap: np.ndarray
    etapp: np.ndarray

    def component(self, j: int) -> slice:
        return slice(j * self.n, (j + 1) * self.n)


def build_grid(domain: CircularDomain, n: int) -> BoundaryGrid:
    if n < 4 or n % 2 != 0:
        raise ConfigurationError("n must be even and at least 4")
    s = 2.0 * np.pi * np.arange(n) / n
    outer = np.exp(1j * s)
    blocks_eta = [outer]
    blocks_etap = [1j * outer]
    blocks_etapp = [-outer]
    for z, r in zip(domain.centers, domain.radii):
        inner = r * np.exp(-1j * s)
        blocks_eta.append(z + inner)
        blocks_etap.append(-1j * inner)
        blocks_etapp.append(-inner)
    return BoundaryGrid(
        domain=domain,
        n=n,
        s=s,
        eta=np.concatenate(blocks_eta),
        etap=np.concatenate(blocks_etap),
        etapp=np.concatenate(blocks_etapp),
    )


def _check_alpha(domain: CircularDomain, alpha: complex) -> complex:
    alpha = complex(alpha)
    if not domain.contains(alpha):
        raise ConfigurationError(f"alpha {alpha} is not inside the domain")
    return alpha


def default_alpha(domain: CircularDomain) -> complex:
    """0 when the origin lies in the domain, otherwise an error."""
    if domain.contains(0j):
        return 0j
    raise ConfigurationError("origin is covered by a disk; supply alpha explicitly")


def auto_alpha(domain: CircularDomain) -> complex:
    """Deterministic fallback: the candidate point of maximal clearance.

    Tries the origin first, then fixed rings of candidates, and returns
    the point whose distance to all boundary circles is largest.
    """
    def margin(a: complex) -> float:
        out = 1.0 - abs(a)
        inner = min(abs(a - z) - r for z, r in zip(domain.centers, domain.radii))
        return min(out, inner)

    best, best_margin = 0j, margin(0j)
    for rad in (0.15, 0.3, 0.45, 0.6, 0.75, 0.875):
        for k in range(24):
            a = rad * cmath.exp(2j * math.pi * k / 24.0)
            g = margin(a)
            if g > best_margin + 1e-15:
                best, best_margin = a, g
    if best_margin <= 1e-3:
        raise ConfigurationError("no candidate point has usable clearance; supply alpha")
    return best


def resolve_alpha(domain: CircularDomain, alpha: complex | str | None) -> complex:
    if alpha is None:
        return default_alpha(domain)
    if isinstance(alpha, str):
        if alpha != "auto":
            raise ConfigurationError(f"unknown alpha mode {alpha!r}")
        return auto_alpha(domain)
    return _check_alpha(domain, alpha)


def _eta_funcs(domain: CircularDomain, comp: int, t: float) -> tuple[complex, complex, complex]:
    if comp == 0:
        e = cmath.exp(1j * t)
        return e, 1j * e, -e
    z = domain.centers[comp - 1]
    w = domain.radii[comp - 1] * cmath.exp(-1j * t)
    return z + w, -1j * w, -w


def kernel_N(
    domain: CircularDomain, alpha: complex, comp_s: int, s: float, comp_t: int, t: float
) -> float:
    """Continuous kernel value N(s, t); the diagonal is the analytic limit."""
    alpha = _check_alpha(domain, alpha)
    eta_s, _, _ = _eta_funcs(domain, comp_s, s)
    eta_t, etap_t, etapp_t = _eta_funcs(domain, comp_t, t)
    if comp_s == comp_t and s == t:
        return (etapp_t / (2.0 * etap_t) - etap_t / (eta_t - alpha)).imag / math.pi
    return (
        ((eta_s - alpha) / (eta_t - alpha)) * etap_t / (eta_t - eta_s)
    ).imag / math.pi


def kernel_M_cont(
    domain: CircularDomain, alpha: complex, comp_s: int, s: float, comp_t: int, t: float
) -> float:
    """Continuous part of the second kernel.

    Across components this is the full kernel; on one component the
    cotangent singularity -cot((s-t)/2)/(2 pi) has been split off and
    only the smooth remainder is returned.
    """
    alpha = _check_alpha(domain, alpha)
    eta_s, _, _ = _eta_funcs(domain, comp_s, s)
    eta_t, etap_t, etapp_t = _eta_funcs(domain, comp_t, t)
    if comp_s == comp_t and s == t:
        return (etapp_t / (2.0 * etap_t) - etap_t / (eta_t - alpha)).real / math.pi
    val = (((eta_s - alpha) / (eta_t - alpha)) * etap_t / (eta_t - eta_s)).real / math.pi
    if comp_s == comp_t:
        val += 1.0 / (2.0 * math.pi * math.tan((s - t) / 2.0))
    return val


@dataclass(frozen=True)
class OperatorMatrices:
    """Dense Nystrom matrices of the two boundary operators.

    n_mat discretizes the continuous kernel with trapezoidal weights;
    m_mat carries the smooth remainder plus the odd-even cotangent rule,
    so (I - n_mat) mu = -m_mat gamma is the discrete integral equation.
    """

    grid: BoundaryGrid
    alpha: complex
    n_mat: np.ndarray
    m_mat: np.ndarray


def _cot_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    # cot(pi d / n) indexed by i - j; entry 0 on the diagonal
    d = np.arange(n)
    diff = d[:, None] - d[None, :]
    ang = np.pi * diff / n
    cot = np.zeros((n, n))
    mask = diff != 0
    cot[mask] = 1.0 / np.tan(ang[mask])
    return cot, diff


def wittich_matrix(n: int) -> np.ndarray:
    """Odd-even discretization of the conjugation kernel cot((s-t)/2)/(2 pi).

    Exact for trigonometric polynomials of degree below n/2; maps cos(kt)
    to sin(kt) and annihilates constants.
    """
    if n < 4 or n % 2 != 0:
        raise ConfigurationError("n must be even and at least 4")
    cot, diff = _cot_table(n)
    return np.where(diff % 2 == 1, (2.0 / n) * cot, 0.0)


def auto_oversample(domain: CircularDomain, alpha: complex, n: int) -> int:
    """Quadrature refinement factor from the parametric pole strips.

    For circles the preimage of a singularity at w under the boundary
    parametrization lies at distance log(|w - z_b| / r_b) (inner circle)
    or -log|w| (unit circle) from the real axis; the trapezoidal error
    decays like exp(-strip * q * n).  Pick the smallest q that pushes the
    estimate to roundoff, capped at 8 (increase n beyond that).
    """
    strips = []
    centers, radii = domain.centers, domain.radii
    for b in range(domain.m):
        zb, rb = centers[b], radii[b]
        for a in range(domain.m):
            if a != b:
                strips.append(math.log((abs(centers[a] - zb) - radii[a]) / rb))
        strips.append(math.log((1.0 - abs(zb)) / rb))
        strips.append(math.log(abs(alpha - zb) / rb))
    for a in range(domain.m):
        strips.append(-math.log(abs(centers[a]) + radii[a]))
    if alpha != 0:
        strips.append(-math.log(abs(alpha)))
    delta = min(strips)
    if delta <= 0.0:  # touching circles are rejected earlier; guard anyway
        return 8
    return max(1, min(8, math.ceil(37.0 / (delta * n))))


def _interp_blocks(n: int, q: int) -> np.ndarray:
    """Trigonometric cardinal interpolation from n to q*n equispaced nodes."""
    v = (np.arange(q * n)[:, None] - q * np.arange(n)[None, :]) % (q * n)
    table = np.zeros(q * n)
    table[0] = 1.0
    rest = np.arange(1, q * n)
    vals = np.sin(np.pi * rest / q) / np.tan(np.pi * rest / (q * n)) / n
    vals[rest % q == 0] = 0.0  # other coarse nodes
    table[1:] = vals
    return table[v]


def assemble(grid: BoundaryGrid, alpha: complex, quad_oversample: int = 1) -> OperatorMatrices:
    """Dense matrices of both operators on the grid.

    With quad_oversample=q > 1 the smooth kernels are integrated by the
    trapezoidal rule on a q-times finer grid against the trigonometric
    interpolant of the density, which removes the quadrature error of
    near-singular interactions while keeping n unknowns per circle.  The
    odd-even rule for the cotangent part stays on the coarse nodes, where
    it is exact for the represented frequencies.
    """
    alpha = _check_alpha(grid.domain, alpha)
    n = grid.n
    m = grid.domain.m
    q = int(quad_oversample)
    if q < 1:
        raise ConfigurationError("quad_oversample must be at least 1")

    fine = grid if q == 1 else build_grid(grid.domain, q * n)
    big_c = grid.eta - alpha
    big_f = fine.eta - alpha

    diff = fine.eta[None, :] - grid.eta[:, None]
    coin_rows = np.arange((m + 1) * n)
    coin_cols = (coin_rows // n) * (q * n) + q * (coin_rows % n)
    diff[coin_rows, coin_cols] = 1.0  # placeholder; analytic limit set below
    f = (big_c[:, None] / big_f[None, :]) * (fine.etap[None, :] / diff)
    del diff
    kern_n = f.imag / np.pi
    kern_m = f.real / np.pi
    del f
    d = fine.etapp / (2.0 * fine.etap) - fine.etap / big_f
    kern_n[coin_rows, coin_cols] = d.imag[coin_cols] / np.pi

    # own-component blocks of the second kernel: smooth remainder only
    vv = (q * np.arange(n))[:, None] - np.arange(q * n)[None, :]
    cot_cf = np.zeros((n, q * n))
    mask = vv != 0
    cot_cf[mask] = 1.0 / np.tan(np.pi * vv[mask] / (q * n))
    for b in range(m + 1):
        rows = grid.component(b)
        cols = slice(b * q * n, (b + 1) * q * n)
        kern_m[rows, cols] += cot_cf / (2.0 * np.pi)
    kern_m[coin_rows, coin_cols] = d.real[coin_cols] / np.pi

    w = 2.0 * np.pi / (q * n)
    if q == 1:
        n_mat = w * kern_n
        m_mat = w * kern_m
    else:
        p = _interp_blocks(n, q)
        n_mat = np.empty(((m + 1) * n, (m + 1) * n))
        m_mat = np.empty_like(n_mat)
        for b in range(m + 1):
            cols_f = slice(b * q * n, (b + 1) * q * n)
            cols_c = grid.component(b)
            n_mat[:, cols_c] = (w * kern_n[:, cols_f]) @ p
            m_mat[:, cols_c] = (w * kern_m[:, cols_f]) @ p

    cot, idx_diff = _cot_table(n)
    wit = np.where(idx_diff % 2 == 1, -(2.0 / n) * cot, 0.0)
    for b in range(m + 1):
        sl = grid.component(b)
        m_mat[sl, sl] += wit
    return OperatorMatrices(grid=grid, alpha=alpha, n_mat=n_mat, m_mat=m_mat)


def solve_mu(
    op: OperatorMatrices,
    gamma: np.ndarray,
    config: SolverConfig | None = None,
    info: dict | None = None,
) -> np.ndarray:
    """Solve (I - N) mu = -M gamma; gamma may hold several columns."""
    if config is None:
        config = SolverConfig(n=op.grid.n)
    gamma = np.asarray(gamma, dtype=float)
    single = gamma.ndim == 1
    g = gamma.reshape(gamma.shape[0], -1)
    if g.shape[0] != op.n_mat.shape[0]:
        raise ValueError("gamma length does not match the grid")
    lhs = np.eye(op.n_mat.shape[0]) - op.n_mat
    rhs = -op.m_mat @ g
    if config.mode == "direct":
        mu = lu_solve(lu_factor(lhs), rhs)
        if info is not None:
            info["iterations"] = None
    else:
        cols = []
        counts = []
        for k in range(rhs.shape[1]):
            it = 0

            def count(_r) -> None:
                nonlocal it
                it += 1

            x, code = gmres(
                lhs,
                rhs[:, k],
                rtol=GMRES_RTOL,
                atol=0.0,
                restart=GMRES_MAXITER,
                maxiter=1,
                callback=count,
                callback_type="pr_norm",
            )
            res = np.linalg.norm(rhs[:, k] - lhs @ x) / max(np.linalg.norm(rhs[:, k]), 1e-300)
            if code != 0 and res > 1e-12:
                raise IterativeSolveError(
                    f"gmres stopped after {it} iterations with relative residual {res:.3e}"
                )
            cols.append(x)
            counts.append(it)
        mu = np.stack(cols, axis=1)
        if info is not None:
            info["iterations"] = counts
    return mu[:, 0] if single else mu


def compute_h(op: OperatorMatrices, mu: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """h = (M mu - (I - N) gamma) / 2 on the grid nodes."""
    mu = np.asarray(mu, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    return (op.m_mat @ mu - (gamma - op.n_mat @ gamma)) / 2.0
