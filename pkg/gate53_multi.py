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

t0 = time.time()
results = multistart(problem, 20, OptimizerConfig(tol=1e-5, seed=11), jobs=4)
dt = time.time() - t0
print(f"{len(results)} distinct results in {dt:.0f}s")
for r in results:
    print(f"  cap={r.cap:.6f} status={r.status} kkt={r.kkt_residual:.2e} iters={r.iterations}")

expected = [4.6193, 4.6269, 4.6621]
levels: list[float] = []
for r in results:
    if not any(abs(r.cap - lv) <= 5e-4 for lv in levels):
        levels.append(r.cap)
print("levels:", [f"{v:.5f}" for v in sorted(levels)])
ok = len(levels) == 3 and all(
    min(abs(lv - e) for e in expected) <= 5e-4 for lv in levels
)
print("3 expected levels:", ok, "| minimum is 4.6193:", abs(min(r.cap for r in results) - 4.6193) <= 5e-4)
