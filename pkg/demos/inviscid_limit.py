"""Watch the viscous solutions collapse onto the inviscid one.

Runs the same small Gaussian datum through the solver at a ladder of
viscosities, measures how far each run strays from the eps=0 reference
in the refined Sobolev norm, and fits the decay rate.  Desk scale: one
core, about a minute.
"""

import numpy as np

from boblab import default_gaussian, inviscid_sweep, make_grid

grid = make_grid(16.0, 256)
phi = default_gaussian(grid)
print(f"grid: L={grid.L:g}, N={grid.N}, datum: Gaussian bump, H~0 norm 0.025")
print()

epsilons = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
sweep = inviscid_sweep(phi, 0.0, epsilons, T=0.5, dt=2.0**-9)

print(f"{'epsilon':>10} {'sup_t distance':>16} {'t at max':>9} {'dist/eps':>10}")
for rec in sweep.records:
    print(
        f"{rec.param:>10.4g} {rec.measurement:>16.6e} "
        f"{rec.aux['t_argmax']:>9.3f} {rec.measurement / rec.param:>10.4f}"
    )
print()
print(f"fitted log-log slope : {sweep.slope:.4f}   (first-order rate = 1)")
print(f"fit R^2              : {sweep.r2:.5f}")
print(f"monotone in epsilon  : {sweep.notes['monotone_in_eps']}")
print()
print("The distance scales like epsilon itself: halving the viscosity")
print("halves the gap to the inviscid solution, uniformly over [0, T].")
