"""Central-difference stencils on a ghosted grid.

Samples sin(x) on grids of shrinking spacing and shows the error of each
operator dropping by about four per halving. Then it shows the rounding
floor that the fourth-derivative stencil hits once h gets small.
"""

import math

import numpy as np

from pinnbc.fdm import SampledField, d1, d2, d4, make_grid

x0 = 0.7
exact = {d1: math.cos(x0), d2: -math.sin(x0), d4: math.sin(x0)}

print("h          d1 err      d2 err      d4 err")
for k in range(6):
    h = 0.2 / 2**k
    field = SampledField(np.sin(x0 + h * np.arange(-2, 3)), make_grid(4 * h, 5, 0))
    errs = [abs(op(field).at(2) - val) for op, val in exact.items()]
    print(f"{h:<10.5f} " + "  ".join(f"{e:.3e}" for e in errs))

# Once 16 eps / h^4 overtakes h^2 / 6 (a few times 1e-3 here) the d4 error grows again.
print("\nd4 error near the rounding floor")
for h in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3):
    field = SampledField(np.sin(x0 + h * np.arange(-2, 3)), make_grid(4 * h, 5, 0))
    err = abs(d4(field).at(2) - exact[d4])
    print(f"h={h:.0e}  err={err:.2e}  h^2/6={h * h / 6:.1e}  16eps/h^4={16 * np.finfo(float).eps / h**4:.1e}")
