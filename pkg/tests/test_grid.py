import numpy as np
import pytest

from boblab import (
    ConfigurationError,
    GridMismatchError,
    PhysicalField,
    SpectralField,
    derivative,
    hilbert,
    l2_norm_physical,
    l2_norm_spectral,
    make_grid,
    to_physical,
    to_spectral,
)
from boblab.grid import require_same_grid, synthesis


def test_grid_layout():
    g = make_grid(16.0, 128)
    assert g.x[0] == -16.0
    assert g.dx == pytest.approx(0.25)
    assert g.dxi == pytest.approx(np.pi / 16.0)
    assert g.xi_max == pytest.approx(np.pi * 128 / 32.0)
    assert g.xi[0] == 0.0
    assert g.xi[1] == pytest.approx(g.dxi)


@pytest.mark.parametrize("bad_n", [100, 48, 8, 0, -16])
def test_grid_rejects_bad_n(bad_n):
    with pytest.raises(ConfigurationError):
        make_grid(16.0, bad_n)


def test_grid_rejects_bad_l():
    with pytest.raises(ConfigurationError):
        make_grid(0.0, 64)
    with pytest.raises(ConfigurationError):
        make_grid(-4.0, 64)


def test_round_trip_random():
    g = make_grid(12.0, 256)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(g.N)
    w = to_physical(to_spectral(PhysicalField(grid=g, values=v))).values
    assert np.abs(w - v).max() <= 1e-12 * np.abs(v).max()


def test_single_mode_coefficient():
    # cos(xi0 x) has coefficients exactly L at +-xi0 in this normalization
    g = make_grid(16.0, 128)
    xi0 = 3 * g.dxi
    f = to_spectral(PhysicalField(grid=g, values=np.cos(xi0 * g.x)))
    idx = np.argmin(np.abs(g.xi - xi0))
    assert f.coeffs[idx] == pytest.approx(g.L, abs=1e-9)
    others = np.abs(f.coeffs)
    others[idx] = 0.0
    others[np.argmin(np.abs(g.xi + xi0))] = 0.0
    assert others.max() < 1e-9


def test_plancherel_exact():
    g = make_grid(10.0, 128)
    rng = np.random.default_rng(3)
    v = rng.standard_normal(g.N)
    pf = PhysicalField(grid=g, values=v)
    assert l2_norm_physical(pf) == pytest.approx(l2_norm_spectral(to_spectral(pf)), rel=1e-13)


def test_sup_spectral_bounded_by_l1_physical():
    # |f_hat(xi)| <= dx sum |f| holds exactly on the grid, with equality
    # for a single-point spike
    g = make_grid(8.0, 64)
    rng = np.random.default_rng(11)
    v = rng.standard_normal(g.N)
    f = to_spectral(PhysicalField(grid=g, values=v))
    assert np.abs(f.coeffs).max() <= g.dx * np.sum(np.abs(v)) + 1e-12
    spike = np.zeros(g.N)
    spike[17] = 2.5
    fs = to_spectral(PhysicalField(grid=g, values=spike))
    assert np.abs(fs.coeffs).max() == pytest.approx(g.dx * np.sum(np.abs(spike)), rel=1e-13)


def test_derivative_trig():
    g = make_grid(16.0, 256)
    a = 5 * g.dxi
    u = PhysicalField(grid=g, values=np.sin(a * g.x))
    du = to_physical(derivative(to_spectral(u), 1))
    assert np.abs(du.values - a * np.cos(a * g.x)).max() < 1e-10
    d2u = to_physical(derivative(to_spectral(u), 2))
    assert np.abs(d2u.values + a * a * np.sin(a * g.x)).max() < 1e-8


def test_derivative_rejects_order():
    g = make_grid(16.0, 64)
    f = to_spectral(PhysicalField(grid=g, values=np.cos(g.x * g.dxi)))
    with pytest.raises(ValueError):
        derivative(f, 3)


def test_derivative_nyquist_zeroed():
    g = make_grid(16.0, 64)
    v = np.cos(g.xi_max * g.x)  # pure Nyquist mode
    du = to_physical(derivative(to_spectral(PhysicalField(grid=g, values=v)), 1))
    assert np.abs(du.values).max() < 1e-10


def test_hilbert_transform_trig():
    g = make_grid(16.0, 128)
    a = 4 * g.dxi
    f = to_spectral(PhysicalField(grid=g, values=np.cos(a * g.x)))
    hv = to_physical(hilbert(f)).values
    assert np.abs(hv - np.sin(a * g.x)).max() < 1e-10


def test_hilbert_is_isometry_on_mean_free():
    g = make_grid(16.0, 128)
    rng = np.random.default_rng(5)
    v = rng.standard_normal(g.N)
    v -= v.mean()
    nyq = np.cos(g.xi_max * g.x)
    v -= nyq * np.sum(v * nyq) / g.N
    f = to_spectral(PhysicalField(grid=g, values=v))
    assert l2_norm_spectral(hilbert(f)) == pytest.approx(l2_norm_spectral(f), rel=1e-10)


def test_synthesis_complex_output():
    g = make_grid(8.0, 64)
    c = np.zeros(g.N, dtype=complex)
    c[3] = 1.0  # non-Hermitian data
    v = synthesis(SpectralField(grid=g, coeffs=c))
    assert np.iscomplexobj(v)
    assert np.abs(np.abs(v) - np.abs(v[0])).max() < 1e-12


def test_grid_mismatch_detected():
    g1 = make_grid(16.0, 64)
    g2 = make_grid(16.0, 128)
    f1 = PhysicalField(grid=g1, values=np.zeros(g1.N))
    f2 = PhysicalField(grid=g2, values=np.zeros(g2.N))
    with pytest.raises(GridMismatchError):
        require_same_grid(f1, f2)


def test_fields_validate_shape_and_finiteness():
    g = make_grid(16.0, 64)
    with pytest.raises(GridMismatchError):
        PhysicalField(grid=g, values=np.zeros(32))
    bad = np.zeros(64)
    bad[0] = np.nan
    with pytest.raises(ValueError):
        PhysicalField(grid=g, values=bad)
