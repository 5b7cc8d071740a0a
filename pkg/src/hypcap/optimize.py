"""Constrained minimization of the capacity over disk positions.

Each disk is fixed or moves with one of three mobilities: freely in the
plane, along the real diameter, or on a circle |z| = R of hyperbolic
centers.  Separation constraints are hyperbolic,
rho(z_i, z_j) >= r_i + r_j + delta, plus a containment guard keeping
centers inside the unit disk.  Minimization runs a log-barrier interior
method with BFGS inner iterations: constraint gradients are analytic,
capacity gradients come from central finite differences, and the
capacity is never evaluated at an infeasible point.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.optimize import nnls

from .bie import SolverConfig
from .capacity import capacity
from .constellation import Constellation
from .hypgeo import hyp_distance

__all__ = [
    "OptimizationProblem",
    "OptimizerConfig",
    "OptimizationResult",
    "LevelGrid",
    "InfeasibleStartError",
    "pack_params",
    "unpack_params",
    "constraint_values",
    "fd_gradient",
    "minimize",
    "multistart",
    "level_grid",
    "count_local_minima",
]

_CONTAINMENT_EPS = 1e-9


class InfeasibleStartError(ValueError):
    """The starting configuration violates a separation constraint."""


def _norm_mobility(entry) -> tuple[str, float | None]:
    if isinstance(entry, str):
        if entry not in ("fixed", "free", "diameter"):
            raise ValueError(f"unknown mobility {entry!r}")
        return entry, None
    kind, radius = entry
    if kind != "circle":
        raise ValueError(f"unknown mobility {entry!r}")
    radius = float(radius)
    if not 0.0 < radius < 1.0:
        raise ValueError("circle mobility radius must lie in (0, 1)")
    return kind, radius


@dataclass(frozen=True)
class OptimizationProblem:
    template: Constellation
    mobility: tuple
    solver: SolverConfig = SolverConfig(n=128, alpha="auto", quad_oversample=1)
    delta: float | None = None

    def __post_init__(self) -> None:
        if len(self.mobility) != self.template.m:
            raise ValueError("one mobility entry per disk required")
        object.__setattr__(self, "mobility", tuple(self.mobility))
        for entry in self.mobility:
            _norm_mobility(entry)

    @property
    def sep_delta(self) -> float:
        return self.template.delta if self.delta is None else self.delta

    @property
    def dim(self) -> int:
        return sum(_DIMS[_norm_mobility(e)[0]] for e in self.mobility)


_DIMS = {"fixed": 0, "free": 2, "diameter": 1, "circle": 1}


def pack_params(problem: OptimizationProblem, c: Constellation | None = None) -> np.ndarray:
    """Parameter vector of the mobile coordinates of c (default: the template)."""
    if c is None:
        c = problem.template
    out: list[float] = []
    for disk, entry in zip(c.disks, problem.mobility):
        kind, _ = _norm_mobility(entry)
        z = disk.center
        if kind == "free":
            out.extend((z.real, z.imag))
        elif kind == "diameter":
            out.append(z.real)
        elif kind == "circle":
            out.append(math.atan2(z.imag, z.real))
    return np.array(out)


def _centers_from_params(problem: OptimizationProblem, x: np.ndarray) -> list[complex]:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"expected {problem.dim} parameters, got {x.shape}")
    centers = []
    k = 0
    for disk, entry in zip(problem.template.disks, problem.mobility):
        kind, radius = _norm_mobility(entry)
        if kind == "fixed":
            centers.append(disk.center)
        elif kind == "free":
            centers.append(complex(x[k], x[k + 1]))
            k += 2
        elif kind == "diameter":
            centers.append(complex(x[k]))
            k += 1
        else:
            centers.append(radius * cmath.exp(1j * x[k]))
            k += 1
    return centers


def unpack_params(problem: OptimizationProblem, x: np.ndarray) -> Constellation:
    """Constellation at the given parameters; |z| >= 1 marks the point infeasible."""
    centers = _centers_from_params(problem, x)
    if any(abs(z) >= 1.0 for z in centers):
        raise ValueError("center outside the unit disk")
    c = problem.template.with_centers(centers)
    return replace(c, delta=problem.sep_delta)


def constraint_values(problem: OptimizationProblem, x: np.ndarray) -> np.ndarray:
    """All constraint margins at x: pair separations, then containment.

    Pairs are ordered lexicographically (i < j); a pair touching a center
    with |z| >= 1 gets margin -1.  Feasible means every entry positive.
    """
    centers = _centers_from_params(problem, x)
    radii = problem.template.radii
    delta = problem.sep_delta
    vals = []
    inside = [abs(z) < 1.0 for z in centers]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if inside[i] and inside[j]:
                g = hyp_distance(centers[i], centers[j]) - radii[i] - radii[j] - delta
            else:
                g = -1.0
            vals.append(g)
    for z in centers:
        vals.append(1.0 - abs(z) - _CONTAINMENT_EPS)
    return np.array(vals)


def _pair_grad(zi: complex, zj: complex) -> tuple[complex, complex]:
    """Gradient of rho(zi, zj) wrt zi and zj, encoded as complex (dx + i dy)."""
    pi = 1.0 - abs(zi) ** 2
    pj = 1.0 - abs(zj) ** 2
    d = abs(zi - zj)
    root = math.sqrt(pi * pj)
    u = d / root
    scale = 2.0 / math.sqrt(1.0 + u * u)
    if d == 0.0:
        return 0j, 0j
    unit = (zi - zj) / d
    gi = scale * (unit + (d / pi) * zi) / root
    gj = scale * (-unit + (d / pj) * zj) / root
    return gi, gj


def _param_dirs(problem: OptimizationProblem, x: np.ndarray) -> list[tuple[int, complex]]:
    """(disk index, d center / d param) for each parameter column."""
    out: list[tuple[int, complex]] = []
    k = 0
    for idx, entry in enumerate(problem.mobility):
        kind, radius = _norm_mobility(entry)
        if kind == "free":
            out.append((idx, 1.0 + 0j))
            out.append((idx, 1j))
            k += 2
        elif kind == "diameter":
            out.append((idx, 1.0 + 0j))
            k += 1
        elif kind == "circle":
            out.append((idx, 1j * radius * cmath.exp(1j * x[k])))
            k += 1
    return out


def _constraint_hessians(
    problem: OptimizationProblem, x: np.ndarray, weights: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    """sum_i weights[i] * hess(g_i) via central differences of the jacobian."""
    dim = x.size
    out = np.zeros((dim, dim))
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        dj = (constraint_jacobian(problem, x + e) - constraint_jacobian(problem, x - e)) / (2 * h)
        out[:, k] = weights @ dj
    return 0.5 * (out + out.T)


def constraint_jacobian(problem: OptimizationProblem, x: np.ndarray) -> np.ndarray:
    """Analytic d(margins)/d(params); rows ordered as constraint_values."""
    centers = _centers_from_params(problem, x)
    m = len(centers)
    dirs = _param_dirs(problem, x)
    n_pairs = m * (m - 1) // 2
    jac = np.zeros((n_pairs + m, len(dirs)))
    pair_grads = {}
    row = 0
    for i in range(m):
        for j in range(i + 1, m):
            pair_grads[(i, j)] = (row, *_pair_grad(centers[i], centers[j]))
            row += 1
    for col, (idx, dz) in enumerate(dirs):
        for (i, j), (row, gi, gj) in pair_grads.items():
            if idx == i:
                g = gi
            elif idx == j:
                g = gj
            else:
                continue
            jac[row, col] += g.real * dz.real + g.imag * dz.imag
        z = centers[idx]
        az = abs(z)
        if az > 0.0:
            grad_c = -z / az
            jac[n_pairs + idx, col] = grad_c.real * dz.real + grad_c.imag * dz.imag
    return jac


def fd_gradient(
    fun: Callable[[np.ndarray], float],
    params: np.ndarray,
    step: float = 1e-6,
    feasible: Callable[[np.ndarray], bool] | None = None,
    diag: dict | None = None,
) -> np.ndarray:
    """Central finite-difference gradient with feasibility-aware steps.

    When a stencil point is infeasible the step is halved (up to three
    times); if that fails the derivative falls back to a one-sided
    difference on the feasible side, flagged in diag["one_sided"].
    """
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    one_sided: list[int] = []
    f_center: float | None = None
    for i in range(params.size):
        e = np.zeros_like(params)
        e[i] = 1.0
        h = step
        ok = False
        for _ in range(4):  # initial try plus three shrinks
            if feasible is None or (feasible(params + h * e) and feasible(params - h * e)):
                ok = True
                break
            h *= 0.5
        if ok:
            grad[i] = (fun(params + h * e) - fun(params - h * e)) / (2.0 * h)
            continue
        one_sided.append(i)
        done = False
        for sign in (1.0, -1.0):
            hh = step
            for _ in range(8):
                if feasible(params + sign * hh * e):
                    if f_center is None:
                        f_center = fun(params)
                    grad[i] = sign * (fun(params + sign * hh * e) - f_center) / hh
                    done = True
                    break
                hh *= 0.5
            if done:
                break
        if not done:
            raise ValueError(f"no feasible stencil for parameter {i}")
    if diag is not None:
        diag["one_sided"] = one_sided
    return grad


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = 1e-6
    max_iterations: int = 300
    inner_iterations: int = 60
    fd_step: float = 1e-6
    xtol: float = 1e-9
    seed: int = 0
    mu0: float = 1e-3
    mu_factor: float = 0.1
    mu_min: float = 1e-5
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 30
    dedup_cap_tol: float = 1e-4
    dedup_pos_tol: float = 1e-2


@dataclass(frozen=True)
class OptimizationResult:
    configuration: Constellation
    cap: float
    params: np.ndarray
    iterations: int
    evaluations: int
    status: str
    kkt_residual: float
    trajectory: tuple[tuple[int, float], ...]  # (evaluation count, capacity) at accepted steps

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "configuration": self.configuration.to_dict(),
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "status": self.status,
            "kkt_residual": self.kkt_residual,
        }


def _make_objective(problem: OptimizationProblem, objective, counter: list[int]):
    if objective is None:
        def objective(c: Constellation) -> float:
            return capacity(c, problem.solver).cap

    def fun(x: np.ndarray) -> float:
        counter[0] += 1
        return objective(unpack_params(problem, x))

    return fun


def _bfgs_update(b: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Powell-damped BFGS update of the direct Hessian approximation b."""
    bs = b @ s
    sbs = float(s @ bs)
    sy = float(s @ y)
    if sbs <= 0.0:
        return b
    if sy < 0.2 * sbs:
        theta = 0.8 * sbs / (sbs - sy)
        y = theta * y + (1.0 - theta) * bs
        sy = float(s @ y)
    if sy <= 1e-14 * sbs:
        return b
    return b - np.outer(bs, bs) / sbs + np.outer(y, y) / sy


def _dock_candidates(problem: OptimizationProblem, x: np.ndarray) -> list[np.ndarray]:
    """Parameter vectors that re-seat one on-circle disk beside another disk.

    For every disk with circle mobility the candidate angles solve
    rho(center(phi), z_j) = r_i + r_j + delta + slack for each other disk
    j: the seats just clear of contact on either side of j.  Infeasible
    seats and the one the disk already occupies are dropped.
    """
    centers = _centers_from_params(problem, x)
    radii = [d.radius for d in problem.template.disks]
    cols: list[tuple[int, int, float]] = []
    k = 0
    for idx, entry in enumerate(problem.mobility):
        kind, radius = _norm_mobility(entry)
        if kind == "circle":
            cols.append((k, idx, radius))
        k += _DIMS[kind]
    out: list[np.ndarray] = []
    phis = np.linspace(-math.pi, math.pi, 257)
    for col, i, ring in cols:
        on_ring = ring * np.exp(1j * phis)
        pr = 1.0 - ring * ring
        for j, zj in enumerate(centers):
            if j == i:
                continue
            target = radii[i] + radii[j] + problem.sep_delta + 1e-2
            pj = 1.0 - abs(zj) ** 2
            s = 2.0 * np.arcsinh(np.abs(on_ring - zj) / math.sqrt(pr * pj)) - target
            for a in range(256):
                if s[a] == 0.0 or s[a] * s[a + 1] > 0.0:
                    continue
                lo, hi, slo = phis[a], phis[a + 1], s[a]
                for _ in range(50):
                    mid = 0.5 * (lo + hi)
                    sm = hyp_distance(ring * cmath.exp(1j * mid), zj) - target
                    if sm == 0.0:
                        lo = hi = mid
                        break
                    if (sm > 0.0) == (slo > 0.0):
                        lo, slo = mid, sm
                    else:
                        hi = mid
                phi = 0.5 * (lo + hi)
                if abs((phi - x[col] + math.pi) % (2.0 * math.pi) - math.pi) < 1e-4:
                    continue
                xt = x.copy()
                xt[col] = phi
                if constraint_values(problem, xt).min() > 0.0:
                    out.append(xt)
    return out


def minimize(
    problem: OptimizationProblem,
    config: OptimizerConfig | None = None,
    x0: np.ndarray | None = None,
    objective: Callable[[Constellation], float] | None = None,
) -> OptimizationResult:
    """Log-barrier interior minimization from the template (or x0).

    Each barrier subproblem min f - mu sum(log g) takes Newton-type steps
    with the barrier curvature mu J^T diag(1/g^2) J modeled analytically
    and the objective curvature estimated by a safeguarded secant scalar.
    Line searches test feasibility before touching the objective, so the
    capacity is only ever evaluated where every margin is positive, and a
    step is accepted only if it does not increase the capacity.  A stage
    ends when the barrier gradient or the step falls below tolerance.

    Disks confined to a circle cannot exchange places under continuous
    feasible motion, so after the local phase converges, docking proposals
    re-seat one such disk against the far side of another disk and are
    adopted, each as a single accepted step, only when the re-descended
    capacity strictly decreases.
    """
    if config is None:
        config = OptimizerConfig()
    x = pack_params(problem) if x0 is None else np.asarray(x0, dtype=float).copy()
    g0 = constraint_values(problem, x)
    if g0.min() <= 0.0:
        raise InfeasibleStartError(f"start violates constraints (min margin {g0.min():.3e})")

    evals = [0]
    fun = _make_objective(problem, objective, evals)

    def feasible(xx: np.ndarray) -> bool:
        return constraint_values(problem, xx).min() > 0.0

    def log_sum(xx: np.ndarray) -> float:
        gg = constraint_values(problem, xx)
        if gg.min() <= 0.0:
            return -math.inf
        return float(np.log(gg).sum())

    gtol_final = 5.0 * config.tol
    mu_min = min(config.mu_min, 10.0 * config.tol)

    schedule = []
    mu = config.mu0
    while mu > mu_min:
        schedule.append(mu)
        mu = max(mu_min, mu * config.mu_factor)
    schedule.append(mu_min)

    def active_multipliers(
        gf: np.ndarray, g: np.ndarray, jac: np.ndarray
    ) -> tuple[np.ndarray, float]:
        """Least-squares nonnegative multipliers on near-active margins.

        Restricting to g <= 1e-2 keeps the underdetermined fit from
        parking weight on slack constraints, which would inflate the
        complementarity part of the residual.
        """
        lam = np.zeros_like(g)
        act = g <= 1e-2
        if act.any():
            lam[act], _ = nnls(jac[act].T, gf)
        stationarity = float(np.abs(gf - jac.T @ lam).max())
        return lam, max(stationarity, float((lam * g).max(initial=0.0)))

    def kkt_at(xx: np.ndarray, gf: np.ndarray) -> float:
        return active_multipliers(
            gf, constraint_values(problem, xx), constraint_jacobian(problem, xx)
        )[1]

    total_iters = 0

    def descend(
        x_start: np.ndarray, f_start: float, stages: list[float] | None = None
    ) -> tuple[np.ndarray, float, np.ndarray, list[tuple[int, float]], bool]:
        """Barrier stages plus KKT polish from one starting point."""
        nonlocal total_iters
        if stages is None:
            stages = schedule
        x = x_start.copy()
        f_cur = f_start
        grad_f = fd_gradient(fun, x, config.fd_step, feasible)
        bf = 10.0 * np.eye(problem.dim)  # secant model of the objective Hessian
        traj: list[tuple[int, float]] = [(evals[0], f_cur)]
        out_of_budget = False
        for mu in stages:
            last_stage = mu == stages[-1]
            gtol = max(gtol_final, 0.5 * mu)
            tiny_steps = 0
            damping = 0
            for _ in range(config.inner_iterations):
                if total_iters >= config.max_iterations:
                    out_of_budget = True
                    break
                g = constraint_values(problem, x)
                jac = constraint_jacobian(problem, x)
                grad_b = grad_f - mu * (jac / g[:, None]).sum(axis=0)
                if float(np.abs(grad_b).max()) <= gtol:
                    break
                lam, kkt_ls = active_multipliers(grad_f, g, jac)
                if last_stage and kkt_ls <= 10.0 * config.tol:
                    break
                hess = (
                    bf
                    + mu * (jac / g[:, None]).T @ (jac / g[:, None])
                    + _constraint_hessians(problem, x, -mu / g)
                )
                ev_min = float(np.linalg.eigvalsh(hess)[0])
                if ev_min < 1e-1:
                    hess = hess + (1e-1 - ev_min) * np.eye(problem.dim)
                try:
                    p = -np.linalg.solve(hess, grad_b)
                except np.linalg.LinAlgError:
                    p = -np.linalg.lstsq(hess, grad_b, rcond=None)[0]
                    if not np.all(np.isfinite(p)):
                        p = -grad_b
                slope = float(p @ grad_b)
                # keep margins near their central-path scale mu/lambda;
                # overshooting into the corner strands the iterate where only
                # capacity-increasing steps could rebalance, while halving at
                # most per step keeps the early stages adiabatic
                if last_stage:
                    floor = np.minimum(0.9 * g, mu / np.maximum(lam, 1e-2))
                else:
                    floor = np.minimum(0.5 * g, mu / np.maximum(lam, 1e-1))
                jp = jac @ p
                shrink = jp < 0.0
                t = 1.0
                if shrink.any():
                    t = min(1.0, float(((g[shrink] - floor[shrink]) / -jp[shrink]).min()))
                    t = max(t, 1e-12)
                b_cur = f_cur - mu * log_sum(x)
                accepted = None
                for _ in range(config.max_backtracks):
                    xt = x + t * p
                    ls = log_sum(xt)
                    if math.isfinite(ls):
                        ft = fun(xt)
                        f_slack = 1e-9 * (1.0 + abs(f_cur))
                        if (
                            ft - mu * ls <= b_cur + config.armijo * t * slope
                            and ft <= f_cur + f_slack
                        ):
                            accepted = (xt, ft)
                            break
                    t *= config.backtrack
                if accepted is None:
                    # stiffen the curvature model and retry before giving up
                    if damping < 3:
                        damping += 1
                        bf = bf + (10.0**damping) * np.eye(problem.dim)
                        continue
                    break
                damping = 0
                x_new, f_new = accepted
                grad_f_new = fd_gradient(fun, x_new, config.fd_step, feasible)
                s = x_new - x
                bf = _bfgs_update(bf, s, grad_f_new - grad_f)
                b_new = f_new - mu * log_sum(x_new)
                b_drop = (f_cur - mu * log_sum(x)) - b_new
                x, f_cur, grad_f = x_new, f_new, grad_f_new
                total_iters += 1
                traj.append((evals[0], f_cur))
                if float(np.abs(s).max()) <= config.xtol or b_drop <= 1e-8 * (1.0 + abs(b_new)):
                    tiny_steps += 1
                    if tiny_steps >= 2:
                        break
                else:
                    tiny_steps = 0
            if out_of_budget:
                break

        # polish: descend along the stationarity residual, which is tangent
        # to the active constraints; keep a step only if it lowers the KKT
        # measure
        kkt_cur = kkt_at(x, grad_f)
        for _ in range(10):
            if out_of_budget or total_iters >= config.max_iterations:
                break
            if kkt_cur <= 10.0 * config.tol:
                break
            g = constraint_values(problem, x)
            jac = constraint_jacobian(problem, x)
            lam, _ = active_multipliers(grad_f, g, jac)
            p = -(grad_f - jac.T @ lam)
            jp = jac @ p
            shrink = jp < 0.0
            t = 1.0
            if shrink.any():
                t = min(1.0, float((0.9 * g[shrink] / -jp[shrink]).min()))
            accepted = None
            for _ in range(config.max_backtracks):
                xt = x + t * p
                if constraint_values(problem, xt).min() > 0.0:
                    ft = fun(xt)
                    if ft <= f_cur + 1e-12:
                        accepted = (xt, ft)
                        break
                t *= config.backtrack
            if accepted is None:
                break
            gf_new = fd_gradient(fun, accepted[0], config.fd_step, feasible)
            kkt_new = kkt_at(accepted[0], gf_new)
            if kkt_new >= kkt_cur:
                break
            x, f_cur, grad_f, kkt_cur = accepted[0], accepted[1], gf_new, kkt_new
            total_iters += 1
            traj.append((evals[0], f_cur))
        return x, f_cur, grad_f, traj, out_of_budget

    x, f_cur, grad_f, trajectory, out_of_budget = descend(x, fun(x))

    # Disks confined to a circle can never exchange places under continuous
    # feasible motion, so the descent above only ever sees one contact
    # arrangement.  Docking proposals re-seat one such disk against the far
    # side of another disk and are adopted, as a single accepted step, only
    # when the re-descended capacity strictly decreases.
    for _ in range(12):
        if out_of_budget or total_iters >= config.max_iterations:
            break
        docks = _dock_candidates(problem, x)
        if not docks:
            break
        trials = []
        for xd in docks:
            fd = fun(xd)
            if fd < f_cur - 1e-9:
                trials.append((fd, xd))
        trials.sort(key=lambda t: t[0])
        adopted = False
        for fd, xd in trials[:3]:
            # the dock already sits inside the target arrangement's basin,
            # so only the final barrier stage is needed to press it home
            xe, fe, gfe, _, oob = descend(xd, fd, stages=[schedule[-1]])
            out_of_budget = out_of_budget or oob
            if fe < f_cur - 1e-9:
                x, f_cur, grad_f = xe, fe, gfe
                trajectory.append((evals[0], f_cur))
                adopted = True
                break
        if not adopted:
            break

    g = constraint_values(problem, x)
    jac = constraint_jacobian(problem, x)
    # stationarity and complementarity under least-squares multipliers
    kkt = active_multipliers(grad_f, g, jac)[1]
    if out_of_budget:
        status = "max_iterations"
    elif kkt <= 10.0 * config.tol:
        status = "converged"
    else:
        status = "stalled"

    return OptimizationResult(
        configuration=unpack_params(problem, x),
        cap=f_cur,
        params=x,
        iterations=total_iters,
        evaluations=evals[0],
        status=status,
        kkt_residual=kkt,
        trajectory=tuple(trajectory),
    )


def _random_start(problem: OptimizationProblem, rng: np.random.Generator) -> np.ndarray:
    # constraints among fixed disks bound the reachable clearance, so demand
    # no more of a draw than the template's static geometry permits
    base = constraint_values(problem, pack_params(problem))
    thr = min(1e-3, float(base.min()) * 0.5)
    for _ in range(500):
        out: list[float] = []
        for entry in problem.mobility:
            kind, _ = _norm_mobility(entry)
            if kind == "free":
                r = 0.92 * math.sqrt(rng.uniform())
                phi = rng.uniform(0.0, 2.0 * math.pi)
                out.extend((r * math.cos(phi), r * math.sin(phi)))
            elif kind == "diameter":
                out.append(rng.uniform(-0.92, 0.92))
            elif kind == "circle":
                out.append(rng.uniform(0.0, 2.0 * math.pi))
        x = np.array(out)
        if constraint_values(problem, x).min() > max(thr, 0.0):
            return x
    raise InfeasibleStartError("could not draw a feasible random start")


def multistart(
    problem: OptimizationProblem,
    k: int,
    config: OptimizerConfig | None = None,
    objective: Callable[[Constellation], float] | None = None,
    jobs: int = 1,
) -> list[OptimizationResult]:
    """k barrier runs (template start first, then seeded random starts).

    Results are deduplicated: two runs coincide when their capacities
    agree within dedup_cap_tol and their centers within dedup_pos_tol.
    The list is sorted by capacity.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if config is None:
        config = OptimizerConfig()
    rng = np.random.default_rng(config.seed)
    starts = [pack_params(problem)]
    while len(starts) < k:
        starts.append(_random_start(problem, rng))

    def run(x0: np.ndarray) -> OptimizationResult:
        return minimize(problem, config, x0=x0, objective=objective)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(x0) for x0 in starts]

    results.sort(key=lambda r: r.cap)
    kept: list[OptimizationResult] = []
    for res in results:
        dup = False
        for other in kept:
            if abs(res.cap - other.cap) > config.dedup_cap_tol:
                continue
            dist = max(
                abs(a - b) for a, b in zip(res.configuration.centers, other.configuration.centers)
            )
            if dist <= config.dedup_pos_tol:
                dup = True
                break
        if not dup:
            kept.append(res)
    return kept


@dataclass(frozen=True)
class LevelGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs)); NaN marks infeasible cells


def level_grid(
    problem: OptimizationProblem,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    resolution: int | tuple[int, int],
    jobs: int = 1,
) -> LevelGrid:
    """Capacity over a rectangular grid of positions of the one free disk."""
    moving = [i for i, e in enumerate(problem.mobility) if _norm_mobility(e)[0] != "fixed"]
    if len(moving) != 1 or _norm_mobility(problem.mobility[moving[0]])[0] != "free":
        raise ValueError("level_grid needs exactly one mobile disk with free mobility")
    nx, ny = (resolution, resolution) if isinstance(resolution, int) else resolution
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)

    def cell(point: tuple[float, float]) -> float:
        x = np.array(point)
        if constraint_values(problem, x).min() <= 0.0:
            return math.nan
        return capacity(unpack_params(problem, x), problem.solver).cap

    points = [(x, y) for y in ys for x in xs]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(cell, points))
    else:
        flat = [cell(p) for p in points]
    values = np.array(flat).reshape(ny, nx)
    return LevelGrid(xs=xs, ys=ys, values=values)


def count_local_minima(values: np.ndarray) -> int:
    """Strict local minima of a grid with absent (NaN) cells.

    A cell is a minimum when it is finite and strictly smaller than all
    its finite 8-neighbors; adjacent minima cells merge into one basin.
    """
    values = np.asarray(values, dtype=float)
    ny, nx = values.shape
    minima = np.zeros_like(values, dtype=bool)
    for iy in range(ny):
        for ix in range(nx):
            v = values[iy, ix]
            if not math.isfinite(v):
                continue
            ok = True
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    jy, jx = iy + dy, ix + dx
                    if 0 <= jy < ny and 0 <= jx < nx and math.isfinite(values[jy, jx]):
                        if values[jy, jx] <= v:
                            ok = False
                            break
                if not ok:
                    break
            minima[iy, ix] = ok
    # count 8-connected clusters of minima cells
    seen = np.zeros_like(minima)
    count = 0
    for iy in range(ny):
        for ix in range(nx):
            if not minima[iy, ix] or seen[iy, ix]:
                continue
            count += 1
            stack = [(iy, ix)]
            seen[iy, ix] = True
            while stack:
                cy, cx = stack.pop()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        jy, jx = cy + dy, cx + dx
                        if 0 <= jy < ny and 0 <= jx < nx and minima[jy, jx] and not seen[jy, jx]:
                            seen[jy, jx] = True
                            stack.append((jy, jx))
    return count
