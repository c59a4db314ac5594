"""Why the residual-only bar run drifts.

With K(x) = x e^-x F(x) only u(0) = 0 is built in. The traction condition
u'(L) = 0 is neither embedded nor penalised, so any u + c x has the same
discrete residual (the second difference of a line is zero). The loss cannot
tell these apart, and training lands on an arbitrary member of the family.
"""

import numpy as np

from pinnbc import BarSpec, CaseLoss, Reparameterization, make_grid
from pinnbc.bc import BarDecay
from pinnbc.problems import bar_analytic

spec = BarSpec()
grid = make_grid(spec.L, 101, 2)
loss = CaseLoss(spec, Reparameterization(BarDecay()), grid)
x = grid.nodes
u = (spec.L**2 * x / 2 - x**3 / 6) / spec.stiffness

print("   c    residual loss   error vs exact %")
exact = bar_analytic(spec, grid.x)
safe = np.where(x == 0.0, 1.0, x)
for c in (-1.0, -0.5, 0.0, 0.5, 1.0):
    k = u + c * x
    # recover F = K / (x e^-x), continued through x = 0 by its limit
    f = np.where(x == 0.0, np.exp(0.0) * (spec.L**2 / 2 + c), k / (safe * np.exp(-safe)))
    total = loss.loss_from_output(f).total
    err = 100 * np.linalg.norm(k[grid.physical] - exact) / np.linalg.norm(exact)
    print(f"{c:+5.1f}   {total:.3e}       {err:7.2f}")
