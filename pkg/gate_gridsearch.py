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

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)
best = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7))[0].configuration
print("fixed:", [f"{z:.4f}" for z in best.centers[1:]], flush=True)

sub = OptimizationProblem(best, ["free", "fixed", "fixed", "fixed"], delta=0.02)
cx, cy = 0.151, -0.045  # cluster centroid

t0 = time.time()
hits = []
for ctr in ((0.0, 0.0), (cx, cy)):
    for span in (0.42, 0.46, 0.5, 0.55, 0.6, 0.65, 0.7):
        for res in (9, 11, 13, 15, 17, 19, 21, 23, 25, 29, 33, 37, 41):
            g = level_grid(
                sub, (ctr[0] - span, ctr[0] + span), (ctr[1] - span, ctr[1] + span), res
            )
            n = count_local_minima(g.values)
            tag = "ORIGIN" if ctr == (0.0, 0.0) else "CLUSTR"
            line = f"{tag} span={span} res={res}: {n}"
            print(line, flush=True)
            if n == 3:
                hits.append(line)
print(f"== {len(hits)} hits in {time.time()-t0:.0f}s ==")
for h in hits:
    print("HIT", h)
