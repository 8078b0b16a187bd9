"""Littlewood-Paley symbols and dyadic regions.

The base bump eta0 is even, smooth, equal to 1 on [-5/4, 5/4] and
supported in [-8/5, 8/5]; the transition uses the standard smooth step
s(t) = sig(t)/(sig(t) + sig(1-t)) with sig(t) = exp(-1/t) for t > 0.
Everything else is built from it:

    chi_l(xi)  = eta0(xi/2^l) - eta0(xi/2^(l-1))      (homogeneous blocks)
    eta_l      = chi_l for l >= 1, eta_0 = eta0, 0 for l <= -1
    eta_leq(l) = eta0(xi/2^max(l,0))                  (telescoped sum)

On a grid the homogeneous index l cannot go below the lowest resolved
block: content under block ``lowest_block(d)`` (d the grid spacing of the
relevant frequency axis) is lumped into that block, whose symbol becomes
the full low-pass bump eta0(./2^l_min).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LO = 5.0 / 4.0
_HI = 8.0 / 5.0


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t<=0, 1 for t>=1, strictly monotone between."""
    t = np.asarray(t, dtype=float)
    a = np.zeros_like(t)
    b = np.zeros_like(t)
    pos = t > 0
    a[pos] = np.exp(-1.0 / t[pos])
    neg = (1.0 - t) > 0
    b[neg] = np.exp(-1.0 / (1.0 - t)[neg])
    return a / (a + b)


def eta0(xi) -> np.ndarray:
    """Base even bump: 1 on [-5/4,5/4], 0 outside [-8/5,8/5], smooth."""
    xi = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros_like(xi)
    out[xi <= _LO] = 1.0
    band = (xi > _LO) & (xi < _HI)
    if np.any(band):
        out[band] = _smooth_step((_HI - xi[band]) / (_HI - _LO))
    return out


def chi(l: int, xi) -> np.ndarray:
    """Homogeneous block chi_l, supported in |xi| in [(5/8)2^l, (8/5)2^l]."""
    s = 2.0**l
    return eta0(np.asarray(xi) / s) - eta0(np.asarray(xi) / (s / 2.0))


def eta(l: int, xi) -> np.ndarray:
    """Inhomogeneous block: eta0 at l=0, chi_l for l>=1, zero for l<0."""
    if l < 0:
        return np.zeros_like(np.asarray(xi, dtype=float))
    if l == 0:
        return eta0(xi)
    return chi(l, xi)


def chi_range(l1: int, l2: int, xi) -> np.ndarray:
    """Sum of chi_l over l in [l1, l2] (telescoped closed form)."""
    if l1 > l2:
        raise ValueError(f"empty range [{l1}, {l2}]")
    return eta0(np.asarray(xi) / 2.0**l2) - eta0(np.asarray(xi) / 2.0 ** (l1 - 1))


def eta_range(l1: int, l2: int, xi) -> np.ndarray:
    """Sum of eta_l over l in [l1, l2]."""
    if l1 > l2:
        raise ValueError(f"empty range [{l1}, {l2}]")
    l1 = max(l1, 0)
    if l1 == 0:
        return eta_leq(l2, xi)
    return chi_range(l1, l2, xi)


def eta_leq(l: int, xi) -> np.ndarray:
    """Low-pass symbol eta0(xi / 2^max(l,0)).

    For l >= 0 this is the telescoped sum of eta_l' over l' <= l; negative
    indices clamp to the base bump.
    """
    return eta0(np.asarray(xi) / 2.0 ** max(l, 0))


_KINDS = ("eta0", "chi", "eta", "eta_range", "eta_leq", "lump")


@dataclass(frozen=True)
class DyadicSymbol:
    """A named dyadic multiplier, evaluable over a frequency axis.

    kind 'lump' is the grid-floor block: the full low-pass bump
    eta0(./2^l) standing in for the unresolvable tail below block l.
    """

    kind: str
    l1: int = 0
    l2: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    def __call__(self, xi) -> np.ndarray:
        if self.kind == "eta0":
            return eta0(xi)
        if self.kind == "chi":
            return chi(self.l1, xi)
        if self.kind == "eta":
            return eta(self.l1, xi)
        if self.kind == "eta_range":
            return eta_range(self.l1, self.l2, xi)
        if self.kind == "eta_leq":
            return eta_leq(self.l2, xi)
        return eta0(np.asarray(xi) / 2.0**self.l1)  # lump

    def support(self) -> tuple[float, float]:
        """(lo, hi) bounds on |xi| outside which the symbol vanishes."""
        if self.kind == "eta0":
            return (0.0, _HI)
        if self.kind == "chi":
            return ((5.0 / 8.0) * 2.0**self.l1, _HI * 2.0**self.l1)
        if self.kind == "eta":
            if self.l1 <= 0:
                return (0.0, _HI) if self.l1 == 0 else (0.0, 0.0)
            return ((5.0 / 8.0) * 2.0**self.l1, _HI * 2.0**self.l1)
        if self.kind == "eta_range":
            lo = 0.0 if self.l1 <= 0 else (5.0 / 8.0) * 2.0**self.l1
            return (lo, _HI * 2.0**self.l2)
        if self.kind == "eta_leq":
            return (0.0, _HI * 2.0 ** max(self.l2, 0))
        return (0.0, _HI * 2.0**self.l1)  # lump


def eval_symbol(s: DyadicSymbol, xi) -> np.ndarray:
    """Evaluate a symbol at points; values lie in [0, 1]."""
    return s(xi)


def lowest_block(d: float) -> int:
    """Grid-floor homogeneous index for an axis with frequency spacing d."""
    return math.ceil(math.log2(d)) - 1


def homogeneous_blocks(d: float, l_top: int = 1) -> list[tuple[int, DyadicSymbol]]:
    """Resolved homogeneous blocks (index, symbol) for spacing ``d``.

    Indices run from lowest_block(d) up to ``l_top``; the lowest entry is
    the lump symbol absorbing all content below it.
    """
    l_min = lowest_block(d)
    if l_min > l_top:
        raise ValueError(f"no homogeneous blocks: floor {l_min} > top {l_top}")
    out = [(l_min, DyadicSymbol("lump", l1=l_min))]
    out.extend((l, DyadicSymbol("chi", l1=l)) for l in range(l_min + 1, l_top + 1))
    return out


def omega(xi) -> np.ndarray:
    """Dispersion relation of the underlying flow: omega(xi) = -xi|xi|."""
    xi = np.asarray(xi, dtype=float)
    return -xi * np.abs(xi)


@dataclass(frozen=True)
class DyadicRegion:
    """Frequency/modulation cell D_{k,j}.

    For k >= 1 membership reads xi in I_k and tau - omega(xi) in
    Itilde_j; for k <= 0 the second coordinate is plain tau.  Here
    I_l = {|xi| in [2^(l-1), 2^(l+1)]}, Itilde_0 = [-2,2] and
    Itilde_j = I_j for j >= 1.
    """

    k: int
    j: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("modulation index j must be >= 0")

    def contains(self, xi, tau) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        tau = np.asarray(tau, dtype=float)
        in_k = (np.abs(xi) >= 2.0 ** (self.k - 1)) & (np.abs(xi) <= 2.0 ** (self.k + 1))
        mu = tau - omega(xi) if self.k >= 1 else tau
        if self.j == 0:
            in_j = np.abs(mu) <= 2.0
        else:
            in_j = (np.abs(mu) >= 2.0 ** (self.j - 1)) & (np.abs(mu) <= 2.0 ** (self.j + 1))
        return in_k & in_j


def project(field, symbol: DyadicSymbol, axis: str = "frequency"):
    """Multiply spectral data by a dyadic symbol along one axis.

    For a SpectralField, only axis='frequency' makes sense.  For a
    SpaceTimeSpectral, axis='frequency' weights in xi and
    axis='modulation' weights in tau - omega(xi) (plain tau for data
    supported at |xi| <= 2, matching the region convention).
    """
    from .grid import SpectralField  # local import to avoid cycles
    from .norms import SpaceTimeSpectral

    if isinstance(field, SpectralField):
        if axis != "frequency":
            raise ValueError("SpectralField supports only axis='frequency'")
        return SpectralField(grid=field.grid, coeffs=symbol(field.grid.xi) * field.coeffs)
    if isinstance(field, SpaceTimeSpectral):
        if axis == "frequency":
            w = symbol(field.grid.xi)[:, None]
        elif axis == "modulation":
            lo, hi = field.frequency_support()
            if hi <= 2.0:
                mu = field.tau[None, :] * np.ones((field.grid.N, 1))
            else:
                mu = field.tau[None, :] - omega(field.grid.xi)[:, None]
            w = symbol(mu)
        else:
            raise ValueError(f"unknown axis {axis!r}")
        return field.with_coeffs(w * field.coeffs)
    raise TypeError(f"cannot project object of type {type(field).__name__}")
