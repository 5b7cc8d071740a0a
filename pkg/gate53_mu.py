import sys
import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import OptimizationProblem, OptimizerConfig, multistart

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 4), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0.5 + 0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(
    template,
    [("circle", 0.5), ("circle", 0.5), ("circle", 0.5), "fixed"],
    delta=0.02,
)

mu0 = float(sys.argv[1]) if len(sys.argv) > 1 else 1e-1
t0 = time.time()
cfg = OptimizerConfig(tol=1e-5, seed=11, mu0=mu0, inner_iterations=80, max_iterations=500)
results = multistart(problem, 20, cfg, jobs=4)
dt = time.time() - t0
print(f"mu0={mu0:g}: {len(results)} distinct in {dt:.0f}s")
for r in results:
    print(f"  cap={r.cap:.6f} status={r.status} kkt={r.kkt_residual:.2e} iters={r.iterations}")
levels: list[float] = []
for r in results:
    if not any(abs(r.cap - lv) <= 5e-4 for lv in levels):
        levels.append(r.cap)
print("levels:", [f"{v:.5f}" for v in sorted(levels)])
