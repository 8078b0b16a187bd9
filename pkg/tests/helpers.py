"""Independent oracles used by the test suite.

The b0 oracle re-derives the low-frequency splitting objective from the
definition (explicit inverse-transform matrix, no FFT) and minimizes its
Moreau-smoothed version by accelerated gradient descent with a smoothing
continuation schedule.  It shares no optimizer code with the library, so
agreement is evidence the primal-dual solver reports the right infimum.
"""

import numpy as np

import boblab.dyadic as dyadic
from boblab.grid import Grid


def b0_oracle(grid: Grid, coeffs: np.ndarray, n_iter: int = 3000) -> float:
    support = np.abs(grid.xi) <= 2.0
    f = coeffs[support]
    peak = np.abs(f).max()
    if peak == 0.0:
        return 0.0
    f = f / peak

    xi = grid.xi[support]
    # explicit synthesis matrix: values_n = (dxi / 2pi) sum_m e^{i x_n xi_m} g_m
    A = (grid.dxi / (2.0 * np.pi)) * np.exp(1j * np.outer(grid.x, xi))
    alpha = grid.dx

    blocks = dyadic.homogeneous_blocks(grid.dxi, l_top=1)
    chis = [sym(xi) for _, sym in blocks]
    wts = [2.0 ** (-kp / 2.0) * np.sqrt(grid.dxi) for kp, _ in blocks]

    def objective(g):
        y = A @ g
        val = alpha * np.sum(np.abs(y))
        for c, w in zip(chis, wts):
            val += w * np.linalg.norm(c * (f - g))
        return val

    def smoothed_grad(g, mu):
        y = A @ g
        ay = np.abs(y)
        u = np.where(ay >= mu * alpha, alpha * y / np.maximum(ay, 1e-300), y / mu)
        grad = A.conj().T @ u
        for c, w in zip(chis, wts):
            r = c * (f - g)
            nr = np.linalg.norm(r)
            gr = (w * r / nr) if nr >= mu * w else r / mu
            grad = grad - c * gr
        return grad

    a_norm = np.linalg.norm(A, 2)
    lip_base = a_norm**2 + sum(np.max(c) ** 2 for c in chis)

    best = min(objective(f), objective(np.zeros_like(f)))
    g = f.copy() if objective(f) <= objective(np.zeros_like(f)) else np.zeros_like(f)
    for mu in (1e-1, 1e-2, 1e-3, 1e-4):
        step = mu / lip_base
        z = g.copy()
        t = 1.0
        for _ in range(n_iter):
            g_new = z - step * smoothed_grad(z, mu)
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            z = g_new + ((t - 1.0) / t_new) * (g_new - g)
            g, t = g_new, t_new
        val = objective(g)
        if val < best:
            best = val
    return float(peak * best)


def hermitian_coeffs(grid: Grid, rng, mask=None, amplitude=1.0) -> np.ndarray:
    """Random spectral data of a real field, optionally masked."""
    v = rng.standard_normal(grid.N)
    c = grid.dx * grid.phase * np.fft.fft(v)
    if mask is not None:
        c = c * mask
    return amplitude * c
