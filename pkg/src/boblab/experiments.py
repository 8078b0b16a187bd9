"""Headline experiments: inviscid-limit rate, Lipschitz probes, scaling
quasi-invariance, Picard convergence reports, energy diagnostics.

Each experiment returns a SweepResult: a table of (parameter, measurement)
records plus an optional regression over the sweep.  Experiments are
deterministic functions of their arguments; re-running one reproduces its
CSV byte for byte.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .evolution import (
    DELTA_DEFAULT,
    Trajectory,
    dissipation_residuals,
    energy_series,
    picard_solve,
    solution_map,
)
from .grid import Grid, PhysicalField, make_grid, to_spectral
from .norms import _fmt, refined_sobolev_norm

__all__ = [
    "SweepRecord",
    "SweepResult",
    "default_gaussian",
    "inviscid_sweep",
    "lipschitz_probe",
    "scaling_check",
    "picard_report",
    "energy_report",
]


@dataclass(frozen=True)
class SweepRecord:
    param: float
    measurement: float
    aux: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    """Sweep table with an optional fitted trend.

    ``fit_kind`` selects the regression coordinates: "loglog" fits
    log(measurement) against log(param), "semilog" fits log2(measurement)
    against param, "none" suppresses the fit.  A fit needs at least four
    records with positive measurements; otherwise slope, intercept and r2
    stay None.
    """

    experiment_id: str
    records: list
    fit_kind: str = "loglog"
    notes: dict = field(default_factory=dict)
    slope: float = None
    intercept: float = None
    r2: float = None

    def __post_init__(self):
        params = np.array([r.param for r in self.records])
        if params.size >= 2:
            d = np.diff(params)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError("sweep parameters must be strictly monotone")
        for r in self.records:
            if not (math.isfinite(r.measurement) and r.measurement >= 0.0):
                raise ValueError(f"{self.experiment_id}: bad measurement at {r.param}")
        if self.fit_kind not in ("loglog", "semilog", "none"):
            raise ValueError(f"unknown fit kind {self.fit_kind!r}")
        self._fit()

    def _fit(self):
        if self.fit_kind == "none":
            return
        pts = [(r.param, r.measurement) for r in self.records if r.measurement > 0.0]
        if len(pts) < 4:
            return
        x = np.array([p for p, _ in pts])
        y = np.array([m for _, m in pts])
        if self.fit_kind == "loglog":
            if np.any(x <= 0.0):
                return
            gx, gy = np.log(x), np.log(y)
        else:
            gx, gy = x, np.log2(y)
        slope, intercept = np.polyfit(gx, gy, 1)
        resid = gy - (slope * gx + intercept)
        ss_tot = float(np.sum((gy - gy.mean()) ** 2))
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 1.0

    def aux_keys(self) -> list:
        keys = set()
        for r in self.records:
            keys.update(r.aux)
        return sorted(keys)

    def to_csv_text(self) -> str:
        keys = self.aux_keys()
        header = "experiment_id,param,measurement" + "".join("," + k for k in keys)
        lines = ["# schema=v1", header]
        for r in self.records:
            cells = [self.experiment_id, _fmt(r.param), _fmt(r.measurement)]
            cells += [_fmt(r.aux[k]) if k in r.aux else "" for k in keys]
            lines.append(",".join(cells))
        if self.slope is None:
            lines.append("# summary fit=none")
        else:
            lines.append(
                f"# summary slope={_fmt(self.slope)} intercept={_fmt(self.intercept)} "
                f"r2={_fmt(self.r2)}"
            )
        for k in sorted(self.notes):
            lines.append(f"# note {k}={self.notes[k]}")
        return "\n".join(lines) + "\n"


def default_gaussian(
    grid: Grid, width: float = 2.0, delta: float = DELTA_DEFAULT
) -> PhysicalField:
    """Gaussian bump scaled so the reported H~0 norm is exactly delta / 2.

    The norm is 1-homogeneous, so a single evaluation on the unit-amplitude
    bump fixes the amplitude.
    """
    raw = np.exp(-((grid.x / width) ** 2))
    base = refined_sobolev_norm(to_spectral(PhysicalField(grid=grid, values=raw)), 0.0).total
    return PhysicalField(grid=grid, values=(0.5 * delta / base) * raw)


def _sup_diff_norm(a: Trajectory, b: Trajectory, sigma: float):
    """Largest refined-Sobolev distance over the common snapshot times."""
    if len(a.snapshots) != len(b.snapshots) or not np.array_equal(a.times, b.times):
        raise ConfigurationError("trajectories sample different time grids")
    worst, t_at = 0.0, 0.0
    for t, sa, sb in zip(a.times, a.snapshots, b.snapshots):
        d = PhysicalField(grid=sa.grid, values=sa.values - sb.values)
        v = refined_sobolev_norm(to_spectral(d), sigma).total
        if v > worst:
            worst, t_at = v, float(t)
    return worst, t_at


def inviscid_sweep(
    phi: PhysicalField,
    sigma: float,
    epsilons,
    T: float = 1.0,
    dt: float = 2.0**-12,
    snapshots_per_unit: int = 64,
    delta: float = DELTA_DEFAULT,
    workers: int = 1,
) -> SweepResult:
    """sup_t || S_eps(phi) - S_0(phi) ||_{H~sigma} against eps, with fit.

    The reference flow is the eps = 0 solve at doubled resolution,
    restricted back to the working grid, computed once and shared by all
    sweep cells; the cells are independent and run on ``workers`` threads,
    merged back in epsilon order.  Monotonicity of the measurements in eps
    is recorded in the notes, never asserted.
    """
    eps = tuple(sorted({float(e) for e in epsilons}, reverse=True))
    if not eps or eps[-1] <= 0.0:
        raise ConfigurationError("inviscid sweep needs strictly positive epsilons")
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    phi_hat = to_spectral(phi)
    h2 = refined_sobolev_norm(phi_hat, 2.0).total
    ref = solution_map(phi, 0.0, sigma, T, dt, snapshots_per_unit, delta)

    def cell(e):
        traj = solution_map(phi, e, sigma, T, dt, snapshots_per_unit, delta)
        return _sup_diff_norm(traj, ref, sigma)

    if workers == 1:
        results = [cell(e) for e in eps]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(cell, eps))
    records = [
        SweepRecord(e, worst, {"t_argmax": t_at, "constant": worst / (e * h2)})
        for e, (worst, t_at) in zip(eps, results)
    ]
    notes = {"h2_norm": _fmt(h2), "T": _fmt(T), "snapshots_per_unit": str(snapshots_per_unit)}
    meas = [r.measurement for r in records]
    drops = sum(1 for a, b in zip(meas, meas[1:]) if b > a + 1e-15)
    notes["monotone_in_eps"] = "yes" if drops == 0 else f"violated {drops}x"
    return SweepResult("inviscid-limit", records, "loglog", notes)


def lipschitz_probe(
    phi: PhysicalField,
    phi2: PhysicalField,
    sigma: float,
    epsilon: float,
    T: float = 1.0,
    dt: float = 2.0**-12,
    snapshots_per_unit: int = 64,
    delta: float = DELTA_DEFAULT,
) -> dict:
    """Ratio sup_t ||S_eps(phi) - S_eps(phi2)|| / ||phi - phi2|| in H~sigma."""
    diff = phi.values - phi2.values
    if float(np.abs(diff).max()) == 0.0:
        raise ConfigurationError("lipschitz probe needs distinct data")
    denom = refined_sobolev_norm(
        to_spectral(PhysicalField(grid=phi.grid, values=diff)), sigma
    ).total
    a = solution_map(phi, epsilon, sigma, T, dt, snapshots_per_unit, delta)
    b = solution_map(phi2, epsilon, sigma, T, dt, snapshots_per_unit, delta)
    worst, t_at = _sup_diff_norm(a, b, sigma)
    return {
        "epsilon": float(epsilon),
        "sigma": float(sigma),
        "numerator": worst,
        "denominator": denom,
        "ratio": worst / denom,
        "t_argmax": t_at,
    }


def scaling_check(
    phi_of_x,
    sigma: float,
    lambdas=tuple(0.5**i for i in range(7)),
    L: float = 1024.0,
    N: int = 8192,
) -> SweepResult:
    """Reported-norm ratios of phi_lambda(x) = lambda phi(lambda x) to phi.

    Checks representability of every scale on the working grid: the scaled
    data must have decayed at the domain edge, else the scale is below the
    resolvable floor.  Aux column b0_ratio tracks the low-frequency part.
    """
    lams = tuple(float(l) for l in lambdas)
    if any(b >= a for a, b in zip(lams, lams[1:])) or any(
        l <= 0.0 or l > 1.0 for l in lams
    ):
        raise ConfigurationError("lambda list must lie in (0, 1], strictly decreasing")
    g = make_grid(L, N)

    def build(lam):
        vals = lam * np.asarray(phi_of_x(lam * g.x), dtype=float)
        edge = max(abs(vals[0]), abs(vals[-1]))
        if edge > 1e-8 * np.abs(vals).max():
            raise ConfigurationError(
                f"scale lambda={lam} puts data mass at the domain edge; "
                "below the resolvable floor of this grid"
            )
        return to_spectral(PhysicalField(grid=g, values=vals))

    base = refined_sobolev_norm(build(1.0), sigma)
    base_b0 = base.blocks[0][2] if base.blocks else 0.0
    records = []
    for lam in lams:
        nb = refined_sobolev_norm(build(lam), sigma)
        b0 = nb.blocks[0][2] if nb.blocks else 0.0
        aux = {"b0_ratio": b0 / base_b0 if base_b0 > 0 else 0.0}
        records.append(SweepRecord(lam, nb.total / base.total, aux))
    return SweepResult("scaling-quasi-invariance", records, "loglog", {"L": _fmt(L), "N": str(N)})


def picard_report(
    phi: PhysicalField,
    epsilon: float,
    n_iters: int,
    dt: float = 2.0**-8,
    delta: float = DELTA_DEFAULT,
    T: float = 1.0,
) -> SweepResult:
    """Successive-difference decay of the Picard iterates.

    Records one row per iteration: sup-in-time L2 distance to the previous
    iterate, with the H~0 distance and the running ratio as aux columns.
    Divergence is reported as a negative-result note, not an exception.
    """
    from .errors import SolverDivergenceError

    notes = {"epsilon": _fmt(epsilon), "dt": _fmt(dt)}
    try:
        iters = picard_solve(phi, epsilon, T, n_iters, dt=dt, delta=delta)
    except SolverDivergenceError as e:
        notes["divergence"] = str(e)
        return SweepResult("picard-differences", [], "none", notes)
    g = phi.grid
    records = []
    prev_d = None
    for n in range(1, len(iters)):
        a, b = iters[n - 1], iters[n]
        l2s, h0s = 0.0, 0.0
        for sa, sb in zip(a.snapshots, b.snapshots):
            d = sb.values - sa.values
            l2s = max(l2s, math.sqrt(g.dx * float(np.sum(d * d))))
            h0 = refined_sobolev_norm(
                to_spectral(PhysicalField(grid=g, values=d)), 0.0
            ).total
            h0s = max(h0s, h0)
        aux = {"h0_diff": h0s}
        if prev_d is not None and prev_d > 0.0:
            aux["ratio"] = l2s / prev_d
        records.append(SweepRecord(float(n), l2s, aux))
        prev_d = l2s
    return SweepResult("picard-differences", records, "semilog", notes)


def energy_report(traj: Trajectory) -> SweepResult:
    """Per-snapshot L2 mass, dissipation, and the discrete balance residual."""
    e, d = energy_series(traj)
    res = dissipation_residuals(traj) if len(traj.times) >= 3 else np.array([])
    records = []
    for i, t in enumerate(traj.times):
        aux = {"dissipation": float(d[i])}
        if 0 < i < len(traj.times) - 1 and len(res) > i - 1:
            aux["balance_residual"] = float(res[i - 1])
        records.append(SweepRecord(float(t), float(e[i]), aux))
    notes = {"epsilon": _fmt(traj.epsilon), "method": traj.method}
    return SweepResult("energy-balance", records, "none", notes)
