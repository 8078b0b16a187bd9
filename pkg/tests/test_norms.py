import numpy as np
import pytest
from helpers import b0_oracle, hermitian_coeffs

from boblab import (
    SpectralField,
    SupportViolationError,
    b0_norm,
    beta_weight,
    dyadic,
    make_grid,
    refined_sobolev_norm,
    sobolev_norm,
    xk_norm,
    y0_norm,
    yk_norm,
    zbar0_norm,
    zk_norm,
)
from boblab.norms import (
    SpaceTimeField,
    SpaceTimeSpectral,
    _l1x_l2t,
    fsigma_norm,
    nsigma_norm,
    st_to_physical,
    st_to_spectral,
)

L, N = 16.0, 128


def make_st(grid, M=512, T=4.0, t0=-2.0):
    return SpaceTimeSpectral(
        grid=grid, t0=t0, T_total=T, coeffs=np.zeros((grid.N, M), complex)
    )


# ---------------------------------------------------------------------------
# space-time transforms


def test_st_round_trip():
    g = make_grid(L, N)
    rng = np.random.default_rng(0)
    v = rng.standard_normal((g.N, 64))
    u = SpaceTimeField(grid=g, t0=-2.0, T_total=4.0, values=v)
    w = st_to_physical(st_to_spectral(u)).values
    assert np.abs(w - v).max() <= 1e-12 * np.abs(v).max()


def test_st_separable_mode():
    g = make_grid(L, N)
    M, T = 128, 4.0
    a = 3 * g.dxi
    u0 = make_st(g, M, T)
    b = 2 * u0.dtau
    t = -2.0 + (T / M) * np.arange(M)
    vals = np.outer(np.cos(a * g.x), np.cos(b * t))
    F = st_to_spectral(SpaceTimeField(grid=g, t0=-2.0, T_total=T, values=vals))
    ia = np.argmin(np.abs(g.xi - a))
    ib = np.argmin(np.abs(F.tau - b))
    assert F.coeffs[ia, ib] == pytest.approx(g.L * T / 2, abs=1e-8)
    mass = np.abs(F.coeffs) ** 2
    corner = sum(
        mass[i, j]
        for i in (ia, np.argmin(np.abs(g.xi + a)))
        for j in (ib, np.argmin(np.abs(F.tau + b)))
    )
    assert corner == pytest.approx(mass.sum(), rel=1e-12)


def test_st_plancherel():
    g = make_grid(L, 64)
    rng = np.random.default_rng(1)
    v = rng.standard_normal((g.N, 32))
    u = SpaceTimeField(grid=g, t0=0.0, T_total=2.0, values=v)
    F = st_to_spectral(u)
    lhs = g.dx * u.dt * np.sum(v**2)
    rhs = g.dxi * F.dtau / (2 * np.pi) ** 2 * np.sum(np.abs(F.coeffs) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_frequency_support():
    g = make_grid(L, N)
    f = make_st(g, M=64)
    c = f.coeffs.copy()
    r = np.argmin(np.abs(g.xi - 4.0))
    c[r, 5] = 1.0
    assert f.with_coeffs(c).frequency_support()[1] == pytest.approx(g.xi[r])
    assert f.frequency_support() == (0.0, 0.0)


def test_j_max():
    g = make_grid(L, 64)
    f = make_st(g, M=512, T=4.0)
    # tau_max = pi*M/T = 402; largest resolved block floor(log2(402)) = 8
    assert f.j_max == 8


# ---------------------------------------------------------------------------
# initial-data norms


def test_sobolev_single_mode_exact():
    g = make_grid(L, N)
    xi0 = 5 * g.dxi
    f = SpectralField(
        grid=g, coeffs=g.dx * g.phase * np.fft.fft(np.cos(xi0 * g.x))
    )
    for sigma in (0.0, 1.0, 2.0):
        want = np.sqrt(2 * np.pi * g.L) * (1 + xi0**2) ** (sigma / 2)
        assert sobolev_norm(f, sigma) == pytest.approx(want, rel=1e-10)


def test_sobolev_monotone_in_sigma():
    g = make_grid(L, N)
    rng = np.random.default_rng(2)
    f = SpectralField(grid=g, coeffs=hermitian_coeffs(g, rng))
    assert sobolev_norm(f, 1.0) >= sobolev_norm(f, 0.0)


def test_beta_weight():
    assert beta_weight(3, 6) == pytest.approx(2.0)  # j = 2k doubles
    assert beta_weight(5, 0) == pytest.approx(1.0 + 2.0**-5)
    assert beta_weight(2, 10) == pytest.approx(1.0 + 8.0)


def test_b0_against_oracle():
    g = make_grid(L, 64)
    low_modes = [m for m in range(1, g.N // 2) if abs(g.xi[m]) <= 2.0]
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        c = np.zeros(g.N, complex)
        for m in rng.choice(low_modes, size=4, replace=False):
            amp = rng.standard_normal() + 1j * rng.standard_normal()
            c[m] = amp
            c[-m] = np.conj(amp)
        f = SpectralField(grid=g, coeffs=c)
        mine = b0_norm(f).total
        ref = b0_oracle(g, c)
        assert mine == pytest.approx(ref, rel=0.01)


def test_b0_homogeneous_exactly():
    g = make_grid(L, 64)
    rng = np.random.default_rng(3)
    c = hermitian_coeffs(g, rng, mask=np.abs(g.xi) <= 2.0)
    v1 = b0_norm(SpectralField(grid=g, coeffs=c)).total
    v2 = b0_norm(SpectralField(grid=g, coeffs=3.5 * c)).total
    assert v2 == pytest.approx(3.5 * v1, rel=1e-12)


def test_b0_witness_and_upper_bounds():
    g = make_grid(L, 64)
    rng = np.random.default_rng(4)
    c = hermitian_coeffs(g, rng, mask=np.abs(g.xi) <= 2.0)
    f = SpectralField(grid=g, coeffs=c)
    bd = b0_norm(f)
    w = bd.witness
    assert np.abs(w["g"] + w["h"] - c).max() <= 1e-12 * np.abs(c).max()
    assert bd.total == pytest.approx(sum(r[2] for r in bd.blocks), rel=1e-12)
    # reported value never exceeds either pure assignment's cost
    from boblab.grid import synthesis

    pure_g = g.dx * np.sum(np.abs(synthesis(f)))
    assert bd.total <= pure_g + 1e-9


def test_b0_support_violation():
    g = make_grid(L, 64)
    c = np.zeros(g.N, complex)
    c[np.argmin(np.abs(g.xi - 5.0))] = 1.0
    with pytest.raises(SupportViolationError):
        b0_norm(SpectralField(grid=g, coeffs=c))


def test_b0_zero():
    g = make_grid(L, 64)
    assert b0_norm(SpectralField(grid=g, coeffs=np.zeros(g.N, complex))).total == 0.0


def test_refined_sobolev_blocks():
    g = make_grid(L, N)
    rng = np.random.default_rng(5)
    f = SpectralField(grid=g, coeffs=hermitian_coeffs(g, rng))
    bd = refined_sobolev_norm(f, 1.0)
    assert bd.total == pytest.approx(
        np.sqrt(sum(c**2 for _, _, c in bd.blocks)), rel=1e-12
    )
    # data on the plateau of one high block: only that block contributes
    plateau = (np.abs(g.xi) >= 6.4) & (np.abs(g.xi) <= 10.0)
    c = plateau.astype(complex)
    bd3 = refined_sobolev_norm(SpectralField(grid=g, coeffs=c), 0.5)
    direct = 2.0**1.5 * np.sqrt(g.dxi * plateau.sum())
    assert bd3.total == pytest.approx(direct, rel=1e-10)


def test_classical_controlled_by_refined():
    # H^sigma <= 2*sqrt(2) * refined value, exactly derivable on the grid
    g = make_grid(L, N)
    for seed, sigma in [(6, 0.0), (7, 1.0), (8, 0.0), (9, 1.0)]:
        rng = np.random.default_rng(seed)
        f = SpectralField(grid=g, coeffs=hermitian_coeffs(g, rng))
        lhs = sobolev_norm(f, sigma)
        rhs = refined_sobolev_norm(f, sigma).total
        assert lhs <= 2.0 * np.sqrt(2.0) * rhs * (1 + 1e-9)


# ---------------------------------------------------------------------------
# space-time norms


def plateau_column(f, j):
    """Index of a tau column with eta_j(tau) exactly 1, eta elsewhere 0."""
    lo, hi = 1.6 * 2.0 ** (j - 1), 1.25 * 2.0**j
    cols = np.where((np.abs(f.tau) >= lo) & (np.abs(f.tau) <= hi))[0]
    assert cols.size > 0
    return cols[0]


def test_xk_single_block_exact():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    k, j = 4, 3
    r = np.argmin(np.abs(g.xi - 10.0))
    mu_row = f.tau - dyadic.omega(g.xi[r])
    lo, hi = 1.6 * 2.0 ** (j - 1), 1.25 * 2.0**j
    cols = np.where((np.abs(mu_row) >= lo) & (np.abs(mu_row) <= hi))[0]
    assert cols.size > 0
    c = f.coeffs.copy()
    c[r, cols] = 2.0 - 1.0j
    fk = f.with_coeffs(c)
    bd = xk_norm(fk, k)
    base = np.sqrt(g.dxi * f.dtau * np.sum(np.abs(c[r, cols]) ** 2))
    want = 2.0 ** (j / 2) * beta_weight(k, j) * base
    assert bd.total == pytest.approx(want, rel=1e-12)


def test_x0_single_cell_exact():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    r = np.argmin(np.abs(g.xi - 1.0))  # chi_0 plateau: |xi| in [0.8, 1.25]
    assert dyadic.chi(0, g.xi[r]) == 1.0
    col = plateau_column(f, 2)
    c = f.coeffs.copy()
    c[r, col] = 1.5
    bd = xk_norm(f.with_coeffs(c), 0)
    base = np.sqrt(g.dxi * f.dtau) * 1.5
    assert bd.total == pytest.approx(2.0**2 * base, rel=1e-12)


def test_xk_homogeneous_and_triangle():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    rng = np.random.default_rng(10)
    band = (np.abs(g.xi) >= 8) & (np.abs(g.xi) <= 30)
    c1 = band[:, None] * (
        rng.standard_normal((g.N, f.M)) + 1j * rng.standard_normal((g.N, f.M))
    )
    c2 = band[:, None] * (
        rng.standard_normal((g.N, f.M)) + 1j * rng.standard_normal((g.N, f.M))
    )
    n1 = xk_norm(f.with_coeffs(c1), 4).total
    n2 = xk_norm(f.with_coeffs(c2), 4).total
    assert xk_norm(f.with_coeffs(2.5 * c1), 4).total == pytest.approx(2.5 * n1, rel=1e-10)
    assert xk_norm(f.with_coeffs(c1 + c2), 4).total <= n1 + n2 + 1e-10 * (n1 + n2)


def test_xk_support_violation():
    g = make_grid(L, N)
    f = make_st(g, M=64)
    c = f.coeffs.copy()
    c[np.argmin(np.abs(g.xi - 3.0)), 0] = 1.0
    with pytest.raises(SupportViolationError):
        xk_norm(f.with_coeffs(c), 4)


def test_yk_single_row_closed_form():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    k = 4
    r = np.argmin(np.abs(g.xi - 10.0))
    mu_row = f.tau - dyadic.omega(g.xi[r])
    ok = np.abs(mu_row) <= 0.9 * 2.0**k
    rng = np.random.default_rng(11)
    prof = np.where(ok, rng.standard_normal(f.M) + 1j * rng.standard_normal(f.M), 0.0)
    c = f.coeffs.copy()
    c[r] = prof
    val = yk_norm(f.with_coeffs(c), k)
    want = 2.0 ** (-k / 2) * np.sqrt(
        f.dtau / (2 * np.pi) * np.sum(np.abs((mu_row + 1j) * prof) ** 2)
    )
    assert val == pytest.approx(want, rel=1e-12)


def test_yk_support_violation():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    k = 4
    r = np.argmin(np.abs(g.xi - 10.0))
    mu_row = f.tau - dyadic.omega(g.xi[r])
    c = f.coeffs.copy()
    c[r, np.argmax(np.abs(mu_row))] = 1.0  # far above modulation 2^k
    with pytest.raises(SupportViolationError):
        yk_norm(f.with_coeffs(c), k)


def test_y0_low_modulation_weight_is_one():
    # pure content at |tau| ~ 1/8 is charged weight 1, not 2^j
    g = make_grid(L, 64)
    f = make_st(g, M=256, T=64.0, t0=0.0)
    r = np.argmin(np.abs(g.xi - 1.0))
    col = np.argmin(np.abs(f.tau - 0.125))
    c = f.coeffs.copy()
    c[r, col] = 1.0
    base = _l1x_l2t(f, c)
    assert y0_norm(f.with_coeffs(c)) == pytest.approx(base, rel=1e-12)


def test_y0_inhomogeneous_weight():
    g = make_grid(L, 64)
    f = make_st(g, M=512, T=4.0)
    r = np.argmin(np.abs(g.xi - 1.0))
    col = plateau_column(f, 3)
    c = f.coeffs.copy()
    c[r, col] = 1.0
    base = _l1x_l2t(f, c)
    assert y0_norm(f.with_coeffs(c)) == pytest.approx(2.0**3 * base, rel=1e-12)


def test_zbar0_single_block():
    g = make_grid(L, 64)
    f = make_st(g, M=512, T=4.0)
    r = np.argmin(np.abs(g.xi - 1.0))
    col = plateau_column(f, 2)
    c = f.coeffs.copy()
    c[r, col] = 1.0
    want = 2.0**2 * np.sqrt(g.dxi * f.dtau)
    assert zbar0_norm(f.with_coeffs(c)) == pytest.approx(want, rel=1e-12)


def test_zk_below_activation_equals_xk():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    rng = np.random.default_rng(12)
    band = (np.abs(g.xi) >= 4.2) & (np.abs(g.xi) <= 7.5)
    c = band[:, None] * (
        rng.standard_normal((g.N, f.M)) + 1j * rng.standard_normal((g.N, f.M))
    )
    z = zk_norm(f.with_coeffs(c), 3, k_y=5)
    x = xk_norm(f.with_coeffs(c), 3)
    assert z.total == x.total
    assert z.witness["split"] == "pure X"


def test_zk_never_exceeds_xk():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    rng = np.random.default_rng(13)
    for k in (0, 5):
        band = (
            np.abs(g.xi) <= 1.5
            if k == 0
            else (np.abs(g.xi) >= 2.0 ** (k - 1) + 1) & (np.abs(g.xi) <= 2.0**k)
        )
        c = band[:, None] * (
            rng.standard_normal((g.N, f.M)) + 1j * rng.standard_normal((g.N, f.M))
        )
        z = zk_norm(f.with_coeffs(c), k, k_y=5)
        x = xk_norm(f.with_coeffs(c), k)
        assert z.total <= x.total * (1 + 1e-12)


def test_zk_homogeneous():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    rng = np.random.default_rng(14)
    band = (np.abs(g.xi) >= 17) & (np.abs(g.xi) <= 31)
    c = band[:, None] * (
        rng.standard_normal((g.N, f.M)) + 1j * rng.standard_normal((g.N, f.M))
    )
    v1 = zk_norm(f.with_coeffs(c), 5, k_y=5).total
    v2 = zk_norm(f.with_coeffs(0.3 * c), 5, k_y=5).total
    assert v2 == pytest.approx(0.3 * v1, rel=1e-10)


def test_zk_witness_split_consistent():
    g = make_grid(L, N)
    f = make_st(g, M=512, T=4.0)
    rng = np.random.default_rng(15)
    # concentrate mass at low modulation so a genuine split or pure Y wins
    band_rows = np.where((np.abs(g.xi) >= 17) & (np.abs(g.xi) <= 31))[0]
    c = f.coeffs.copy()
    for r in band_rows:
        mu_row = f.tau - dyadic.omega(g.xi[r])
        near = np.abs(mu_row) <= 3.0
        c[r, near] = rng.standard_normal(near.sum()) + 1j * rng.standard_normal(near.sum())
    z = zk_norm(f.with_coeffs(c), 5, k_y=5, keep_witness=True)
    assert z.total <= xk_norm(f.with_coeffs(c), 5).total * (1 + 1e-12)
    if "f_X" in (z.witness or {}):
        rec = z.witness["f_X"] + z.witness["f_Y"]
        assert np.abs(rec - c).max() <= 1e-12 * np.abs(c).max()


def test_fsigma_nsigma_breakdowns():
    g = make_grid(L, 64)
    M, T = 256, 4.0
    rng = np.random.default_rng(16)
    t = -2.0 + (T / M) * np.arange(M)
    window = dyadic.eta0(t)
    prof = rng.standard_normal((g.N, M))
    vals = prof * window[None, :]
    u = SpaceTimeField(grid=g, t0=-2.0, T_total=T, values=vals)
    for fn, s in ((fsigma_norm, 0.0), (fsigma_norm, 1.0), (nsigma_norm, 0.0)):
        bd = fn(u, s)
        assert bd.total == pytest.approx(
            np.sqrt(sum(c**2 for _, _, c in bd.blocks)), rel=1e-12
        )
        assert bd.total > 0
    z = SpaceTimeField(grid=g, t0=-2.0, T_total=T, values=np.zeros((g.N, M)))
    assert fsigma_norm(z, 1.0).total == 0.0


def test_fsigma_homogeneous():
    g = make_grid(L, 64)
    M, T = 256, 4.0
    rng = np.random.default_rng(17)
    t = -2.0 + (T / M) * np.arange(M)
    vals = rng.standard_normal((g.N, M)) * dyadic.eta0(t)[None, :]
    u1 = SpaceTimeField(grid=g, t0=-2.0, T_total=T, values=vals)
    u2 = SpaceTimeField(grid=g, t0=-2.0, T_total=T, values=4.0 * vals)
    assert fsigma_norm(u2, 1.0).total == pytest.approx(
        4.0 * fsigma_norm(u1, 1.0).total, rel=1e-10
    )


def test_breakdown_csv_round_trip():
    g = make_grid(L, N)
    rng = np.random.default_rng(18)
    f = SpectralField(grid=g, coeffs=hermitian_coeffs(g, rng))
    bd = refined_sobolev_norm(f, 1.0)
    text = bd.to_csv_text()
    lines = text.strip().split("\n")
    assert lines[0] == "# schema=v1"
    assert lines[1] == "block_id,weight,contribution"
    assert lines[-1].startswith("TOTAL[")
    for row, (bid, w, c) in zip(lines[2:-1], bd.blocks):
        parts = row.split(",")
        assert parts[0] == bid
        assert float(parts[1]) == w
        assert float(parts[2]) == c
    assert float(lines[-1].split(",")[2]) == bd.total
