import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    count_local_minima,
    level_grid,
    multistart,
)

t0 = time.time()

# best configuration of the four-disk free problem
R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)
results = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7))
best = results[0].configuration
print(f"best cap {results[0].cap:.6f} centers:",
      [f"{z:.4f}" for z in best.centers], f"{time.time()-t0:.0f}s")

# small-disk landscape over that configuration
sub = OptimizationProblem(best, ["free", "fixed", "fixed", "fixed"], delta=0.02)
t0 = time.time()
grid = level_grid(sub, (-0.8, 0.8), (-0.8, 0.8), 41)
n_min = count_local_minima(grid.values)
print(f"small-disk grid 41x41: {n_min} basins "
      f"({np.isfinite(grid.values).sum()} feasible cells, {time.time()-t0:.0f}s)")

# three equal fixed disks, mobile fourth, r=0.2
fixed = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), 0.2) for k in range(3)]
tpl = Constellation([HyperbolicDisk(0j, 0.2)] + fixed)
p51 = OptimizationProblem(tpl, ["free", "fixed", "fixed", "fixed"], delta=0.02)
t0 = time.time()
g51 = level_grid(p51, (-0.85, 0.85), (-0.85, 0.85), 41)
n51 = count_local_minima(g51.values)
ix = int(np.argmin(np.abs(g51.xs)))
iy = int(np.argmin(np.abs(g51.ys)))
v0 = g51.values[iy, ix]
neigh = g51.values[iy - 1 : iy + 2, ix - 1 : ix + 2].copy()
neigh[1, 1] = np.inf
origin_min = np.isfinite(v0) and v0 < np.nanmin(neigh)
print(f"r=0.2 grid: {n51} basins, origin cell local min: {origin_min} "
      f"({time.time()-t0:.0f}s)")
