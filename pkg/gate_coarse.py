import json
import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk, pair_margins
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    count_local_minima,
    level_grid,
    multistart,
)

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)
t0 = time.time()
best = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7))[0].configuration
print(f"outer optimum in {time.time() - t0:.0f}s", flush=True)
print("centers:", [format(z.real, ".17g") + "," + format(z.imag, ".17g") for z in best.centers], flush=True)
print("margins:", [(i, j, format(g, ".3e")) for i, j, g in pair_margins(best)], flush=True)
with open("/tmp/cluster_centers.json", "w") as f:
    json.dump([[z.real, z.imag] for z in best.centers], f)

sub = OptimizationProblem(best, ["free", "fixed", "fixed", "fixed"], delta=0.02)
TRUE = [0.1794 + 0.1041j, 0.0043 - 0.2093j, 0.2734 - 0.2019j]


def minima_cells(g):
    v = g.values
    ny, nx = v.shape
    out = []
    for iy in range(ny):
        for ix in range(nx):
            c = v[iy, ix]
            if not np.isfinite(c):
                continue
            ok = True
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == dy == 0:
                        continue
                    jy, jx = iy + dy, ix + dx
                    if 0 <= jy < ny and 0 <= jx < nx and np.isfinite(v[jy, jx]) and v[jy, jx] <= c:
                        ok = False
            if ok:
                out.append(complex(g.xs[ix], g.ys[iy]))
    return out


t0 = time.time()
hits = []
for ctr in ((0.151, -0.045), (0.152, -0.102), (0.0, 0.0)):
    for span in (0.45, 0.5, 0.55, 0.6, 0.7, 0.8):
        for res in (5, 6, 7, 8, 9, 10, 11):
            g = level_grid(sub, (ctr[0] - span, ctr[0] + span), (ctr[1] - span, ctr[1] + span), res)
            cnt = count_local_minima(g.values)
            cells = minima_cells(g)
            near = [min(abs(z - t) for t in TRUE) for z in cells]
            line = f"ctr={ctr} span={span} res={res}: {cnt}  cells={[f'{z:.3f}' for z in cells]}  dist={[f'{d:.3f}' for d in near]}"
            print(line, flush=True)
            if cnt == 3:
                hits.append(line)
print(f"== {len(hits)} hits in {time.time() - t0:.0f}s ==")
for h in hits:
    print("HIT", h)
