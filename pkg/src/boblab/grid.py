"""Periodic grid and spectral transform layer.

The real line is truncated to the torus [-L, L) with N equispaced points.
Wavenumbers are xi_m = pi*m/L for m in {-N/2, ..., N/2 - 1} (numpy FFT
ordering), so dx = 2L/N and the wavenumber spacing is dxi = pi/L.

Transform convention, used consistently by every norm formula in the
package: ``to_spectral`` returns continuum-normalized amplitudes

    coeffs[m] ~= integral f(x) exp(-i xi_m x) dx = dx * (-1)^m * FFT(f)[m],

the (-1)^m phase accounting for the leftmost grid point sitting at x = -L
(underneath, numpy's forward FFT is unnormalized and the inverse divides
by N).  ``to_physical`` inverts this exactly.  Plancherel then reads

    integral |f|^2 dx = (1/2pi) * sum_m |coeffs[m]|^2 * dxi,

i.e. spectral-side L2 norms carry the measure dxi and a final 1/sqrt(2pi)
when they stand for physical-side L2 norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GridMismatchError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic spatial grid on [-L, L) with N points.

    Attributes:
        L: half-length of the domain.
        N: number of points (power of two).
        x: grid points -L + dx*arange(N).
        xi: wavenumbers pi*m/L in FFT ordering.
        dx: spacing 2L/N.
        dxi: wavenumber spacing pi/L.
    """

    L: float
    N: int
    x: np.ndarray = field(repr=False, compare=False)
    xi: np.ndarray = field(repr=False, compare=False)
    dx: float
    dxi: float
    # (-1)^m phase aligning the DFT with the x = -L origin
    phase: np.ndarray = field(repr=False, compare=False)

    @property
    def xi_max(self) -> float:
        """Largest resolved wavenumber magnitude (the Nyquist mode)."""
        return np.pi * (self.N // 2) / self.L

    def mode_numbers(self) -> np.ndarray:
        """Integer mode indices m in FFT ordering."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)


def make_grid(L: float, N: int) -> Grid:
    """Build the periodic grid for half-length ``L`` and ``N`` points."""
    if not (isinstance(N, (int, np.integer)) and _is_power_of_two(int(N)) and N >= 16):
        raise ConfigurationError(f"N must be a power of two >= 16, got {N!r}")
    if not (np.isfinite(L) and L > 0):
        raise ConfigurationError(f"L must be positive and finite, got {L!r}")
    N = int(N)
    L = float(L)
    dx = 2.0 * L / N
    m = np.fft.fftfreq(N, d=1.0 / N).astype(int)
    xi = np.pi * m / L
    x = -L + dx * np.arange(N)
    phase = np.where(m % 2 == 0, 1.0, -1.0)
    return Grid(L=L, N=N, x=x, xi=xi, dx=dx, dxi=np.pi / L, phase=phase)


@dataclass(frozen=True)
class PhysicalField:
    """Real field sampled on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise GridMismatchError(
                f"values shape {v.shape} does not match grid N={self.grid.N}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("physical field contains non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SpectralField:
    """Continuum-normalized Fourier amplitudes of a field on a grid.

    Hermitian symmetry coeffs(-xi) = conj(coeffs(xi)) holds whenever the
    underlying physical field is real; complex (non-Hermitian) data are
    allowed for intermediate objects such as infimum-norm witnesses.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.N,):
            raise GridMismatchError(
                f"coeffs shape {c.shape} does not match grid N={self.grid.N}"
            )
        object.__setattr__(self, "coeffs", c)


def to_spectral(f: PhysicalField) -> SpectralField:
    """Forward transform; see module docstring for the normalization."""
    g = f.grid
    coeffs = g.dx * g.phase * np.fft.fft(f.values)
    return SpectralField(grid=g, coeffs=coeffs)


def synthesis(g: SpectralField) -> np.ndarray:
    """Inverse transform to (possibly complex) grid values.

    Exact inverse of ``to_spectral`` for any coefficient vector; used
    directly where the spectral data are not Hermitian (decomposition
    witnesses, kernels).
    """
    gr = g.grid
    return np.fft.ifft(g.coeffs * gr.phase) / gr.dx


def to_physical(g: SpectralField) -> PhysicalField:
    """Inverse transform to a real field.

    The imaginary residue of non-Hermitian rounding is dropped; callers
    holding genuinely complex data should use ``synthesis``.
    """
    return PhysicalField(grid=g.grid, values=synthesis(g).real)


def l2_norm_physical(f: PhysicalField) -> float:
    """L2 norm integral |f|^2 dx on the grid."""
    return float(np.sqrt(f.grid.dx * np.sum(f.values**2)))


def l2_norm_spectral(g: SpectralField) -> float:
    """Physical-side L2 norm computed from coefficients (Plancherel)."""
    return float(
        np.sqrt(g.grid.dxi / (2.0 * np.pi) * np.sum(np.abs(g.coeffs) ** 2))
    )


def derivative(g: SpectralField, order: int) -> SpectralField:
    """Spectral derivative (i*xi)^order; Nyquist zeroed for odd orders."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    gr = g.grid
    mult = (1j * gr.xi) ** order
    if order % 2 == 1:
        mult = mult.copy()
        mult[gr.N // 2] = 0.0
    return SpectralField(grid=gr, coeffs=mult * g.coeffs)


def hilbert(g: SpectralField) -> SpectralField:
    """Hilbert transform: multiply by -i*sgn(xi), with sgn(0)=0.

    The Nyquist mode is zeroed as well so real fields stay real.
    """
    gr = g.grid
    mult = -1j * np.sign(gr.xi)
    mult[gr.N // 2] = 0.0
    return SpectralField(grid=gr, coeffs=mult * g.coeffs)


def require_same_grid(a, b) -> None:
    if a.grid.N != b.grid.N or a.grid.L != b.grid.L:
        raise GridMismatchError(
            f"grid mismatch: (L={a.grid.L}, N={a.grid.N}) vs (L={b.grid.L}, N={b.grid.N})"
        )
