"""Command-line front end.

Subcommands drive the solver, the epsilon sweep, the estimate studies, norm
evaluation on stored trajectories, and Picard reports.  Configuration is a
flat key = value text: defaults, then an optional --config file, then
explicit flags, later layers winning.  Every run writes a summary.txt that
is itself a valid config file reproducing the run (results ride along as
comment lines), plus versioned CSV outputs.

Exit codes: 0 success, 2 invalid configuration, 3 solver divergence,
4 a threshold requested via --assert failed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    ConfigurationError,
    GridMismatchError,
    ResolutionError,
    SolverDivergenceError,
    ThresholdError,
)
from .estimates import (
    bilinear_dyadic_study,
    free_estimate_study,
    full_bilinear_study,
    gaussian_data_family,
    inhomogeneous_estimate_study,
    j1_trend,
    random_forcing_family,
)
from .evolution import (
    DELTA_DEFAULT,
    integrate,
    read_trajectory_csv,
    trajectory_to_text,
)
from .experiments import (
    default_gaussian,
    energy_report,
    inviscid_sweep,
    picard_report,
)
from .grid import PhysicalField, make_grid, to_spectral
from .norms import DEFAULT_K_Y, _fmt, refined_sobolev_norm

__all__ = ["RunConfig", "main", "parse_config_text", "config_text"]

SWEEP_EPSILONS = "0.1,0.03,0.01,0.003,0.001,0.0003,0.0001"
VERIFY_EPSILONS = "1.0,0.3,0.1,0.03,0.01,0.003,0.001,0.0003,0.0001,0.0"


@dataclass
class RunConfig:
    """Flat run configuration; one field per config key / CLI flag.

    N has no usable default: commands that build a grid refuse to run until
    it is set.  amplitude = nan means "tune the amplitude so the reported
    low-regularity norm equals delta / 2"; any explicit number (including
    0) is used literally.
    """

    command: str = ""
    L: float = 16.0
    N: int = 0
    T: float = 1.0
    dt: float = 2.0**-9
    snapshots: int = 64
    epsilon: float = 0.0
    epsilons: str = ""
    sigma: float = 0.0
    width: float = 2.0
    amplitude: float = float("nan")
    delta: float = DELTA_DEFAULT
    seed: int = 100
    k_y: int = DEFAULT_K_Y
    M: int = 2048
    T_total: float = 4.0
    n_iters: int = 8
    n_samples: int = 20
    n_pairs: int = 50
    workers: int = 1
    spread_max: float = 3.0
    slope_max: float = 0.1
    median_factor: float = 10.0
    rho_max: float = 0.3
    rate_slope: float = 1.0
    rate_tol: float = 0.15
    r2_min: float = 0.98
    ratio_max: float = 0.8
    input: str = ""
    out: str = "boblab-out"
    assert_thresholds: bool = False


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key: str, raw: str):
    typ = _FIELD_TYPES[key]
    raw = raw.strip()
    if typ == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"key {key}: expected a boolean, got {raw!r}")
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
    except ValueError:
        raise ConfigurationError(f"key {key}: cannot parse {raw!r} as {typ}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """Parse flat key = value lines; # comments and blank lines ignored."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"config line {lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        entries[key] = _parse_value(key, value)
    return entries


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def config_text(cfg: RunConfig) -> str:
    """Emit the resolved config as parseable key = value text."""
    lines = [
        "# schema=v1",
        "# resolved configuration; rerun with --config <this file> (and a",
        "# fresh --out) to reproduce the outputs byte for byte",
    ]
    for f in fields(RunConfig):
        lines.append(f"{f.name} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < explicit flags, later layers winning."""
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            file_entries = parse_config_text(fh.read())
        for key, value in file_entries.items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            setattr(cfg, f.name, flag_value)
    cfg.command = args.cmd
    if cfg.workers < 1:
        raise ConfigurationError("workers must be >= 1")
    return cfg


def _epsilon_list(cfg: RunConfig, default: str) -> tuple:
    text = cfg.epsilons.strip() or default
    try:
        eps = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigurationError(f"cannot parse epsilon list {text!r}") from None
    if not eps:
        raise ConfigurationError("epsilon list is empty")
    return eps


def _require_grid(cfg: RunConfig):
    if cfg.N <= 0:
        raise ConfigurationError("N must be set (grid size, power of two >= 16)")
    return make_grid(cfg.L, cfg.N)


def _initial_data(cfg: RunConfig, grid) -> PhysicalField:
    if math.isnan(cfg.amplitude):
        return default_gaussian(grid, cfg.width, cfg.delta)
    values = cfg.amplitude * np.exp(-((grid.x / cfg.width) ** 2))
    return PhysicalField(grid=grid, values=values)


def _write(cfg: RunConfig, name: str, text: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _write_summary(cfg: RunConfig, results: dict) -> str:
    lines = [config_text(cfg).rstrip("\n")]
    for key in results:
        lines.append(f"# result {key}={results[key]}")
    return _write(cfg, "summary.txt", "\n".join(lines) + "\n")


def _check(failures: list, ok: bool, message: str):
    if not ok:
        failures.append(message)


def _enforce(cfg: RunConfig, failures: list):
    if failures and cfg.assert_thresholds:
        raise ThresholdError("; ".join(failures))


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(cfg: RunConfig) -> int:
    grid = _require_grid(cfg)
    phi = _initial_data(cfg, grid)
    steps_per_snap = int(round(1.0 / (cfg.dt * cfg.snapshots)))
    if steps_per_snap < 1:
        raise ConfigurationError(
            f"snapshots={cfg.snapshots} denser than the step size dt={cfg.dt}"
        )
    traj = integrate(phi, cfg.epsilon, cfg.T, cfg.dt, store_every=steps_per_snap)
    _write(cfg, "trajectory.csv", trajectory_to_text(traj))
    _write(cfg, "energy.csv", energy_report(traj).to_csv_text())
    final_l2 = traj.l2_series()[-1]
    _write_summary(
        cfg,
        {
            "snapshots": len(traj.times),
            "final_l2": _fmt(final_l2),
            "files": "trajectory.csv,energy.csv",
        },
    )
    return 0


def cmd_sweep_epsilon(cfg: RunConfig) -> int:
    grid = _require_grid(cfg)
    phi = _initial_data(cfg, grid)
    eps = _epsilon_list(cfg, SWEEP_EPSILONS)
    sw = inviscid_sweep(
        phi, cfg.sigma, eps, cfg.T, cfg.dt, cfg.snapshots, cfg.delta, cfg.workers
    )
    _write(cfg, "sweep.csv", sw.to_csv_text())
    results = {"files": "sweep.csv", "monotone_in_eps": sw.notes["monotone_in_eps"]}
    failures = []
    if sw.slope is not None:
        results["slope"] = _fmt(sw.slope)
        results["r2"] = _fmt(sw.r2)
        _check(
            failures,
            abs(sw.slope - cfg.rate_slope) <= cfg.rate_tol,
            f"slope {sw.slope:.4f} outside {cfg.rate_slope} +- {cfg.rate_tol}",
        )
        _check(failures, sw.r2 >= cfg.r2_min, f"r2 {sw.r2:.4f} < {cfg.r2_min}")
    results["threshold_failures"] = len(failures)
    _write_summary(cfg, results)
    _enforce(cfg, failures)
    return 0


def cmd_verify_linear(cfg: RunConfig) -> int:
    grid = _require_grid(cfg)
    eps = _epsilon_list(cfg, VERIFY_EPSILONS)
    datasets = gaussian_data_family(grid, cfg.n_samples, delta=cfg.delta)
    free = free_estimate_study(datasets, cfg.sigma, eps, cfg.M, cfg.T_total, cfg.k_y)
    forcings = random_forcing_family(
        grid,
        range(cfg.seed + 1000, cfg.seed + 1000 + cfg.n_samples),
        cfg.M,
        cfg.T_total,
        t0=-cfg.T_total / 2.0,
    )
    inhom = inhomogeneous_estimate_study(forcings, cfg.sigma, eps, cfg.k_y)
    _write(cfg, "free.csv", free.to_csv_text())
    _write(cfg, "inhomogeneous.csv", inhom.to_csv_text())
    results = {"files": "free.csv,inhomogeneous.csv"}
    failures = []
    for study in (free, inhom):
        s = study.summary()
        results[f"{study.estimate_id};spread"] = _fmt(s.get("spread", 0.0))
        if "slope" in s:
            results[f"{study.estimate_id};slope"] = _fmt(s["slope"])
        _check(
            failures,
            s.get("spread", 0.0) < cfg.spread_max,
            f"{study.estimate_id}: spread {s.get('spread', 0.0):.3f} >= {cfg.spread_max}",
        )
        if "slope" in s:
            _check(
                failures,
                abs(s["slope"]) < cfg.slope_max,
                f"{study.estimate_id}: |slope| {abs(s['slope']):.3f} >= {cfg.slope_max}",
            )
    results["threshold_failures"] = len(failures)
    _write_summary(cfg, results)
    _enforce(cfg, failures)
    return 0


def cmd_verify_bilinear(cfg: RunConfig) -> int:
    # the dyadic lattice is part of the estimate's setup (L=8, N=256, tau
    # range chosen from the regimes), so the generic grid keys do not apply
    dyadic_study = bilinear_dyadic_study(
        n_samples=cfg.n_samples, seed0=cfg.seed, k_y=cfg.k_y
    )
    full = full_bilinear_study(
        n_pairs=cfg.n_pairs, sigma=cfg.sigma, seed0=cfg.seed + 4000, k_y=cfg.k_y
    )
    _write(cfg, "bilinear.csv", dyadic_study.to_csv_text())
    _write(cfg, "full-bilinear.csv", full.to_csv_text())
    failures = []
    regimes = {}
    for s in dyadic_study.samples:
        regimes.setdefault(s.detail["regime"], []).append(s.ratio)
    worst_factor = 0.0
    for ratios in regimes.values():
        med = float(np.median(ratios))
        worst_factor = max(worst_factor, max(ratios) / med)
    _check(
        failures,
        worst_factor <= cfg.median_factor,
        f"dyadic: a ratio exceeds {cfg.median_factor}x its regime median "
        f"(worst {worst_factor:.2f}x)",
    )
    rhos = j1_trend(dyadic_study)
    worst_rho = max(rhos.values()) if rhos else 0.0
    _check(
        failures,
        worst_rho <= cfg.rho_max,
        f"dyadic: upward j1 trend, rho {worst_rho:.2f} > {cfg.rho_max}",
    )
    full_ratios = [s.ratio for s in full.samples]
    full_factor = max(full_ratios) / float(np.median(full_ratios)) if full_ratios else 0.0
    _check(
        failures,
        full_factor <= cfg.median_factor,
        f"full: a ratio exceeds {cfg.median_factor}x the median ({full_factor:.2f}x)",
    )
    results = {
        "files": "bilinear.csv,full-bilinear.csv",
        "regimes": len(regimes),
        "worst_median_factor": _fmt(worst_factor),
        "worst_j1_rho": _fmt(worst_rho),
        "full_median_factor": _fmt(full_factor),
        "threshold_failures": len(failures),
    }
    _write_summary(cfg, results)
    _enforce(cfg, failures)
    return 0


def cmd_norms(cfg: RunConfig) -> int:
    if not cfg.input:
        raise ConfigurationError("norms needs --input <trajectory.csv>")
    traj = read_trajectory_csv(cfg.input)
    g = traj.grid
    lines = ["# schema=v1", "t,l2,h_sigma"]
    for t, snap in zip(traj.times, traj.snapshots):
        l2 = math.sqrt(g.dx * float(np.sum(snap.values**2)))
        h = refined_sobolev_norm(to_spectral(snap), cfg.sigma).total
        lines.append(f"{_fmt(t)},{_fmt(l2)},{_fmt(h)}")
    _write(cfg, "norms.csv", "\n".join(lines) + "\n")
    _write_summary(cfg, {"files": "norms.csv", "rows": len(traj.times)})
    return 0


def cmd_picard(cfg: RunConfig) -> int:
    grid = _require_grid(cfg)
    phi = _initial_data(cfg, grid)
    rep = picard_report(phi, cfg.epsilon, cfg.n_iters, cfg.dt, cfg.delta, cfg.T)
    _write(cfg, "picard.csv", rep.to_csv_text())
    results = {"files": "picard.csv", "iterations": len(rep.records)}
    failures = []
    if "divergence" in rep.notes:
        results["divergence"] = rep.notes["divergence"]
        _check(failures, False, "picard iteration diverged")
    else:
        ratios = [r.aux["ratio"] for r in rep.records if "ratio" in r.aux]
        if ratios:
            results["max_ratio"] = _fmt(max(ratios))
            _check(
                failures,
                max(ratios) <= cfg.ratio_max,
                f"picard: max ratio {max(ratios):.3f} > {cfg.ratio_max}",
            )
    results["threshold_failures"] = len(failures)
    _write_summary(cfg, results)
    _enforce(cfg, failures)
    return 0


def cmd_print_config(cfg: RunConfig) -> int:
    sys.stdout.write(config_text(cfg))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "sweep-epsilon": cmd_sweep_epsilon,
    "verify-linear": cmd_verify_linear,
    "verify-bilinear": cmd_verify_bilinear,
    "norms": cmd_norms,
    "picard": cmd_picard,
    "print-config": cmd_print_config,
}

_HELP = {
    "solve": "integrate one run and store the trajectory plus energy report",
    "sweep-epsilon": "inviscid-limit sweep: sup-t distance to the eps=0 flow",
    "verify-linear": "free and Duhamel estimate ratio studies over epsilon",
    "verify-bilinear": "dyadic block and full bilinear ratio studies",
    "norms": "evaluate norms on a stored trajectory",
    "picard": "successive-difference report for the Duhamel iteration",
    "print-config": "print the resolved configuration and exit",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boblab",
        description="dispersive-dissipative model lab: solver, norms, estimate studies",
    )
    sub = parser.add_subparsers(dest="cmd")
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", default=None, help="key = value config file")
        for f in fields(RunConfig):
            if f.name in ("command", "assert_thresholds"):
                continue
            flag = "--" + f.name.replace("_", "-")
            if f.type == "bool":
                p.add_argument(flag, action="store_const", const=True, default=None)
            else:
                typ = {"int": int, "float": float, "str": str}[f.type]
                p.add_argument(flag, type=typ, default=None)
        p.add_argument(
            "--assert",
            dest="assert_thresholds",
            action="store_const",
            const=True,
            default=None,
            help="exit 4 when a configured threshold fails",
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cmd is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.cmd](cfg)
    except ThresholdError as e:
        print(f"threshold failure: {e}", file=sys.stderr)
        return 4
    except SolverDivergenceError as e:
        print(f"solver divergence: {e}", file=sys.stderr)
        return 3
    except (ConfigurationError, ResolutionError, GridMismatchError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
