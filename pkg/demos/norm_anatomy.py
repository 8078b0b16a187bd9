"""Dissect the refined Sobolev norm of one datum, block by block.

The norm treats low frequencies with an infimal-convolution functional
(an optimal split between an L1-of-synthesis cost and weighted dyadic
L2 pieces) and everything above with plain weighted L2 blocks.  This
script prints the whole anatomy for a two-bump datum, then rescales the
datum through lambda phi(lambda x) and shows the reported value barely
moves: the low block is engineered to absorb the scaling.
"""

import numpy as np

from boblab import (
    PhysicalField,
    b0_norm,
    make_grid,
    refined_sobolev_norm,
    scaling_check,
    to_spectral,
)
from boblab.dyadic import eta0
from boblab.grid import SpectralField

def two_bumps(x):
    return 0.3 * np.exp(-((x - 2.0) ** 2)) + 0.1 * np.cos(3.0 * x) * np.exp(
        -((x + 4.0) ** 2) / 4.0
    )


grid = make_grid(16.0, 256)
phi_hat = to_spectral(PhysicalField(grid=grid, values=two_bumps(grid.x)))

for sigma in (0.0, 1.0):
    bd = refined_sobolev_norm(phi_hat, sigma)
    print(f"refined H~{sigma:g} breakdown (total {bd.total:.6f}, {bd.composition}):")
    for block_id, weight, contribution in bd.blocks:
        if contribution > 1e-12 * bd.total:
            print(f"  {block_id:>6}  weight {weight:8.3f}  contributes {contribution:.6f}")
    print()

low = SpectralField(grid=grid, coeffs=eta0(grid.xi) * phi_hat.coeffs)
bd = b0_norm(low)
g_part, h_part = bd.witness["g"], bd.witness["h"]
share = np.abs(g_part).sum() / (np.abs(g_part).sum() + np.abs(h_part).sum())
print("low-frequency split found by the proximal solver:")
print(f"  synthesis-L1 piece takes {share:.1%} of the coefficient mass,")
print(f"  the weighted-L2 blocks take the rest; split cost = {bd.total:.6f}")
print()

result = scaling_check(two_bumps, 0.0)
print("norm ratio under phi -> lambda phi(lambda x):")
for rec in result.records:
    print(
        f"  lambda = 1/{round(1 / rec.param):<3d} ratio {rec.measurement:.4f}   "
        f"(low block alone: {rec.aux['b0_ratio']:.4f})"
    )
print()
print("A plain L2 norm would shrink like sqrt(lambda^3); the reported value")
print("stays within a small constant of the unscaled one at every lambda.")
