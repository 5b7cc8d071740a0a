"""Check whether the d=0.05 error at n=128 is quadrature- or representation-limited.

Assemble the smooth kernels on a q-times finer grid, compose with the
trigonometric interpolation matrix (n -> qn per component), keep the
Wittich rule on the coarse nodes, and compare capacities.
"""
import math
import numpy as np

from hypcap import collinear_chain, SolverConfig
from hypcap.bie import CircularDomain, build_grid, _cot_table
from hypcap.capacity import gamma_for


def interp_matrix(n: int, q: int) -> np.ndarray:
    # trig cardinal interpolation from n coarse to qn fine nodes (even n)
    fine = 2.0 * np.pi * np.arange(q * n) / (q * n)
    coarse = 2.0 * np.pi * np.arange(n) / n
    u = fine[:, None] - coarse[None, :]
    out = np.empty((q * n, n))
    small = np.abs(np.sin(u / 2.0)) < 1e-14
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sin(n * u / 2.0) / np.tan(u / 2.0) / n
    out[small] = 1.0
    return out


def capacity_oversampled(c, n: int, q: int, alpha: complex) -> float:
    domain = CircularDomain.from_constellation(c)
    m = domain.m
    coarse = build_grid(domain, n)
    fine = build_grid(domain, q * n)
    a_c = coarse.eta - alpha
    a_f = fine.eta - alpha

    # smooth kernels: rows at coarse nodes, columns at fine nodes
    diff = fine.eta[None, :] - coarse.eta[:, None]
    # same-point pairs occur where a coarse node coincides with a fine node
    coincide = np.abs(diff) < 1e-15
    diff[coincide] = 1.0
    f = (a_c[:, None] / a_f[None, :]) * (fine.etap[None, :] / diff)
    kern_n = f.imag / np.pi
    kern_m = f.real / np.pi
    d_f = fine.etapp / (2.0 * fine.etap) - fine.etap / a_f
    # diagonal limits where nodes coincide (same component only)
    nc, nf = (m + 1) * n, (m + 1) * q * n
    for b in range(m + 1):
        rows = np.arange(b * n, (b + 1) * n)
        cols = b * q * n + q * np.arange(n)
        kern_n[rows, cols] = d_f.imag[cols] / np.pi
        kern_m[rows, cols] = d_f.real[cols] / np.pi  # M1 diagonal

    # subtract the cotangent singular part on own component (to re-add via Wittich)
    s_c = coarse.s
    s_f = fine.s
    for b in range(m + 1):
        rows = np.arange(b * n, (b + 1) * n)
        cols = np.arange(b * q * n, (b + 1) * q * n)
        u = s_c[:, None] - s_f[None, :]
        cot = np.zeros_like(u)
        mask = np.abs(np.sin(u / 2.0)) > 1e-14
        cot[mask] = 1.0 / np.tan(u[mask] / 2.0)
        kern_m[np.ix_(rows, cols)] += cot / (2.0 * np.pi)

    p = interp_matrix(n, q)
    pb = np.zeros((nf, nc))
    for b in range(m + 1):
        pb[b * q * n:(b + 1) * q * n, b * n:(b + 1) * n] = p
    w = 2.0 * np.pi / (q * n)
    n_mat = (w * kern_n) @ pb
    m_mat = (w * kern_m) @ pb

    cot_c, idx = _cot_table(n)
    wit = np.where(idx % 2 == 1, -(2.0 / n) * cot_c, 0.0)
    for b in range(m + 1):
        sl = slice(b * n, (b + 1) * n)
        m_mat[sl, sl] += wit

    g = np.stack([gamma_for(coarse, k) for k in range(m)], axis=1)
    lhs = np.eye(nc) - n_mat
    mu = np.linalg.solve(lhs, -m_mat @ g)
    h = (m_mat @ mu - (g - n_mat @ g)) / 2.0
    hbar = h.reshape(m + 1, n, m).mean(axis=1)
    sys_mat = np.hstack([hbar, np.ones((m + 1, 1))])
    rhs = np.ones(m + 1)
    rhs[0] = 0.0
    x = np.linalg.solve(sys_mat, rhs)
    return 2.0 * math.pi * float(x[:m].sum())


d1 = math.log(16.0)
radii = [f * d1 / 2 for f in (0.15, 0.35, 0.20, 0.30)]
refs = {0.05: 7.230698262298405, 0.10: 7.442082617728490}
for d, ref in refs.items():
    c = collinear_chain(radii, d, anchor=1)
    for q in (1, 2, 4):
        cap = capacity_oversampled(c, 128, q, 0.8j)
        print(f"d={d:.2f} q={q}  cap={cap:.16f}  err={abs(cap-ref):.3e}")

# effect on the sigma fit of criterion 5 (d=0.1, n in 16..128), q=4
c = collinear_chain(radii, 0.1, anchor=1)
ref = capacity_oversampled(c, 256, 4, 0.8j)
errs = []
for n in (16, 32, 64, 128):
    cap = capacity_oversampled(c, n, 4, 0.8j)
    err = abs(cap - ref)
    errs.append((n, err))
    print(f"q=4 d=0.10 n={n:4d} err={err:.3e}")
pts = [(n, math.log(e)) for n, e in errs if e > 0]
sl = np.polyfit([p[0] for p in pts], [p[1] for p in pts], 1)[0]
print("sigma with q=4:", -sl)
