"""Hard versus soft boundary conditions on an untrained network.

Wrapping the network output in a multiplier that vanishes at the supports
pins the deflection there for any weights. A penalty only adds a cost, so an
untrained (or partly trained) network misses the boundary values.
"""

import math

import numpy as np

from pinnbc import BeamSpec, CaseLoss, Penalty, init_network, make_grid, make_strategy

spec = BeamSpec()
grid = make_grid(spec.L, 101, 2)
hybrid = CaseLoss(spec, make_strategy("hybrid", "beam", math.pi), grid)
penalty = CaseLoss(spec, Penalty(), grid)

print("seed   hybrid w(0)  hybrid w(L)     penalty w(0)  penalty w(L)")
for seed in range(5):
    net = init_network(seed=seed)
    h, p = hybrid.field(net), penalty.field(net)
    print(
        f"{seed:<6} {h.at(grid.left) + 0.0:<12.3g} {h.at(grid.right) + 0.0:<15.3g} "
        f"{p.at(grid.left):<13.4f} {p.at(grid.right):.4f}"
    )

net = init_network(seed=0)
for name, loss in (("hybrid", hybrid), ("penalty", penalty)):
    breakdown = loss.evaluate(net)
    print(f"\n{name}: residual term {breakdown.residual_term:.4f}")
    for term in breakdown.bc_terms:
        print(f"  {term.label:<6} raw {term.raw:+.4e}  weighted {term.weighted:.4e}")

xs = np.array([0.0, math.pi])
print("\nmultiplier at the supports:", hybrid.strategy.multiplier(xs))
