import numpy as np

from hypcap.capacity import capacity
from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.hypgeo import hyp_distance
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    multistart,
)

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)
best = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7))[0].configuration
fixed = best.disks[1:]
print("fixed centers:", [f"{d.center:.4f}" for d in fixed], flush=True)

r0 = R[0]
charge = np.mean([d.center for d in fixed])


def rim_point(phi, off):
    # walk outward from the centroid until every margin is off-positive
    d = np.exp(1j * phi)
    lo, hi = 0.0, 1.2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        z = charge + mid * d
        if abs(z) >= 0.97:
            hi = mid
            continue
        m = min(hyp_distance(z, f.center) - r0 - f.radius - 0.02 for f in fixed)
        if m < off:
            lo = mid
        else:
            hi = mid
    return charge + hi * d


def u_at(z):
    c = Constellation((HyperbolicDisk(z, r0),) + tuple(fixed), delta=0.02)
    return capacity(c, problem.solver).cap


phis = np.linspace(-np.pi, np.pi, 241)[:-1]
prof = np.array([u_at(rim_point(p, 1e-3)) for p in phis])
mins = []
n = len(prof)
for i in range(n):
    if prof[i] < prof[(i - 1) % n] and prof[i] < prof[(i + 1) % n]:
        mins.append((phis[i], prof[i]))
print(f"rim profile: {len(mins)} 1d minima")
for p, v in mins:
    z = rim_point(p, 1e-3)
    print(f"  phi={p:+.3f} u={v:.6f} z={z:.4f}")
print(f"profile range [{prof.min():.4f}, {prof.max():.4f}]")
# radial slope at the deepest pocket
pbest = mins[int(np.argmin([v for _, v in mins]))][0] if mins else 0.0
for off in (1e-3, 0.02, 0.05, 0.1):
    print(f"  off={off}: u={u_at(rim_point(pbest, off)):.6f}")
