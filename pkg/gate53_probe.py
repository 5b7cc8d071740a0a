import numpy as np

from hypcap.capacity import capacity
from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    constraint_values,
    minimize,
    multistart,
    unpack_params,
)

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 4), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0.5 + 0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(
    template,
    [("circle", 0.5), ("circle", 0.5), ("circle", 0.5), "fixed"],
    delta=0.02,
)

results = multistart(problem, 20, OptimizerConfig(tol=1e-5, seed=11), jobs=4)

def describe(r):
    angs = [np.angle(d.center) for d in r.configuration.disks]
    order = np.argsort([a % (2 * np.pi) for a in angs])
    g = constraint_values(problem, r.params)
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    active = [pairs[k] for k in range(6) if g[k] <= 1e-2]
    return order, active, [f"{a:+.3f}" for a in angs]

def probe(r, n_samples=400, radius=0.05, seed=0):
    rng = np.random.default_rng(seed)
    best = r.cap
    best_x = None
    for _ in range(n_samples):
        dx = rng.uniform(-radius, radius, size=3)
        xt = r.params + dx
        if constraint_values(problem, xt).min() <= 0.0:
            continue
        c = capacity(unpack_params(problem, xt), problem.solver).cap
        if c < best:
            best = c
            best_x = xt
    return best, best_x

for r in results:
    order, active, angs = describe(r)
    print(f"cap={r.cap:.6f} ccw_order={list(order)} active={active} angles={angs}")

print()
for idx in (5, 7, 16):  # 4.6399 split, 4.6621 chain, 4.7444 tail
    r = results[idx]
    best, bx = probe(r)
    print(f"probe around cap={r.cap:.6f}: best nearby={best:.6f} "
          f"improved={best < r.cap - 1e-6}")
