"""Config-driven simulation runner with CSV/JSON persistence.

An ExperimentConfig fully determines one run: interaction kernel, diffusion
(m, nu), mollifier rule, initial density, computational domain and particle
count, integrator controls, and an optional output directory.  run() checks
the config exhaustively, discretizes, integrates, and persists per-snapshot
particle and reconstructed-density tables plus a diagnostics summary.

Persisted layout under <output_dir>/<name>/:

    config.json            resolved configuration (defaults filled in)
    diagnostics.csv        time,mass,center,M2,E_eps,S_m,W_rho,max_speed,
                           max_density,n_remesh -- one row per snapshot
    particles_<t>.csv      position,weight
    density_<t>.csv        x,rho (reconstruction on 800 points spanning the
                           particles plus an 8*epsilon margin)
    meta.json              library versions, solver step counts, remesh
                           times, wall time

<t> is the snapshot time formatted with six decimal places.  All floats are
written with repr, so reruns of the same config give bit-identical CSVs.
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, replace
from importlib import metadata as _importlib_metadata
from pathlib import Path

import numpy as np
import scipy

from .analysis import grid_entropy, grid_interaction
from .density import Grid1D, density_from_config, discretize, reconstruct
from .dynamics import Model
from .errors import ValidationError
from .integrator import IntegratorOpts, TrajectoryRecord, integrate
from .kernels import kernel_from_config
from .mollifier import Mollifier, epsilon_from_spacing

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-")
_GRID_POINTS = 800
_GRID_MARGIN = 8.0  # reconstruction grid extends this many epsilons past the particles
_TRUNCATION_TOL = 1e-3  # tolerated fraction of initial mass outside the domain

_CONFIG_KEYS = {
    "name", "kernel", "m", "nu", "mollify_kernel", "epsilon_abs", "epsilon_exp",
    "initial", "domain", "N", "t_max", "max_step", "rel_tol", "abs_tol",
    "max_order", "snapshot_dt", "remesh_factor", "output_dir",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully specified simulation (see module docstring for the schema)."""

    name: str
    kernel: dict
    m: float
    nu: float
    initial: dict
    domain: tuple[float, float]
    n_particles: int
    t_max: float
    max_step: float
    mollify_kernel: bool = False
    epsilon_abs: float | None = None
    epsilon_exp: float | None = None
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_order: int = 5
    snapshot_dt: float | None = None
    remesh_factor: float = 1.5
    output_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = sorted(set(data) - _CONFIG_KEYS)
        if unknown:
            raise ValidationError([f"unknown config key: {k!r}" for k in unknown])
        missing = [k for k in ("name", "kernel", "m", "nu", "initial", "domain",
                               "N", "t_max", "max_step") if k not in data]
        if missing:
            raise ValidationError([f"missing config key: {k!r}" for k in missing])
        kwargs = {k: v for k, v in data.items() if k not in ("N", "domain")}
        kwargs["n_particles"] = data["N"]
        kwargs["domain"] = tuple(data["domain"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kernel": dict(self.kernel),
            "m": self.m,
            "nu": self.nu,
            "mollify_kernel": self.mollify_kernel,
            "epsilon_abs": self.epsilon_abs,
            "epsilon_exp": self.epsilon_exp,
            "initial": dict(self.initial),
            "domain": list(self.domain),
            "N": self.n_particles,
            "t_max": self.t_max,
            "max_step": self.max_step,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_order": self.max_order,
            "snapshot_dt": self.snapshot_dt,
            "remesh_factor": self.remesh_factor,
            "output_dir": self.output_dir,
        }

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)

    def validate(self) -> list[str]:
        """Every problem with this config, as human-readable strings."""
        problems: list[str] = []

        if not isinstance(self.name, str) or not self.name:
            problems.append("name must be a nonempty string")
        elif set(self.name) - _NAME_OK:
            problems.append(f"name {self.name!r} contains characters unsafe for a directory name")

        kernel = None
        if not isinstance(self.kernel, dict):
            problems.append("kernel must be a config dict")
        else:
            try:
                kernel = kernel_from_config(self.kernel)
            except Exception as exc:
                problems.append(f"kernel config rejected: {exc}")

        if not (isinstance(self.m, (int, float)) and self.m >= 1):
            problems.append(f"diffusion exponent m must be >= 1, got {self.m!r}")
        if not (isinstance(self.nu, (int, float)) and self.nu >= 0):
            problems.append(f"diffusion coefficient nu must be >= 0, got {self.nu!r}")
        if not isinstance(self.mollify_kernel, bool):
            problems.append("mollify_kernel must be a bool")

        has_abs = self.epsilon_abs is not None
        has_exp = self.epsilon_exp is not None
        if has_abs == has_exp:
            problems.append("exactly one of epsilon_abs, epsilon_exp must be set")
        if has_abs and not self.epsilon_abs > 0:
            problems.append(f"epsilon_abs must be positive, got {self.epsilon_abs}")
        if has_exp and not 0 < self.epsilon_exp <= 1:
            problems.append(f"epsilon_exp must lie in (0, 1], got {self.epsilon_exp}")

        spec = None
        if not isinstance(self.initial, dict):
            problems.append("initial must be a density config dict")
        else:
            try:
                spec = density_from_config(self.initial)
            except Exception as exc:
                problems.append(f"initial density config rejected: {exc}")

        domain_ok = (
            isinstance(self.domain, (tuple, list))
            and len(self.domain) == 2
            and all(isinstance(v, (int, float)) and math.isfinite(v) for v in self.domain)
            and self.domain[0] < self.domain[1]
        )
        if not domain_ok:
            problems.append(f"domain must be a finite increasing pair, got {self.domain!r}")

        if not (isinstance(self.n_particles, int) and self.n_particles >= 2):
            problems.append(f"N must be an integer >= 2, got {self.n_particles!r}")
        if not self.t_max > 0:
            problems.append(f"t_max must be positive, got {self.t_max}")
        if not self.max_step > 0:
            problems.append(f"max_step must be positive, got {self.max_step}")
        if not self.rel_tol > 0:
            problems.append(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol > 0:
            problems.append(f"abs_tol must be positive, got {self.abs_tol}")
        if not (isinstance(self.max_order, int) and 1 <= self.max_order <= 5):
            problems.append(f"max_order must be an integer in 1..5, got {self.max_order!r}")
        if self.snapshot_dt is not None and not self.snapshot_dt > 0:
            problems.append(f"snapshot_dt must be positive, got {self.snapshot_dt}")
        if not self.remesh_factor >= 1:
            problems.append(f"remesh_factor must be >= 1, got {self.remesh_factor}")

        if self.output_dir is not None:
            if not isinstance(self.output_dir, str) or not self.output_dir:
                problems.append("output_dir must be a nonempty string or null")
            elif Path(self.output_dir).exists() and not Path(self.output_dir).is_dir():
                problems.append(f"output_dir {self.output_dir!r} exists and is not a directory")

        if spec is not None and domain_ok:
            total = spec.total_mass()
            if not total > 0:
                problems.append("initial density must have positive mass")
            else:
                inside = spec.cell_integral(self.domain[0], self.domain[1])
                truncated = total - inside
                if truncated > _TRUNCATION_TOL * total:
                    problems.append(
                        f"domain {list(self.domain)} cuts off {truncated / total:.2%} "
                        f"of the initial mass (tolerance {_TRUNCATION_TOL:.1%})"
                    )

        return problems

    def ensure_valid(self) -> None:
        problems = self.validate()
        if problems:
            raise ValidationError(problems)


def _fmt(x: float) -> str:
    return repr(float(x))


def _snapshot_tag(t: float) -> str:
    return f"{t:.6f}"


def run(config: ExperimentConfig) -> TrajectoryRecord:
    """Validate, discretize, integrate, and (if output_dir is set) persist.

    Returns the trajectory record; record.metadata carries the resolved h,
    epsilon, and (when persisted) the run directory.
    """
    config.ensure_valid()
    kernel = kernel_from_config(config.kernel)
    spec = density_from_config(config.initial)
    ens = discretize(spec, config.domain, config.n_particles)
    h = ens.h
    if config.epsilon_abs is not None:
        eps = float(config.epsilon_abs)
    else:
        eps = epsilon_from_spacing(h, config.epsilon_exp)
    moll = Mollifier(eps)
    model = Model(kernel=kernel, m=config.m, nu=config.nu, moll=moll,
                  mollify_kernel=config.mollify_kernel)
    opts = IntegratorOpts(
        t_span=(0.0, config.t_max),
        max_step=config.max_step,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
        max_order=config.max_order,
        snapshot_dt=config.snapshot_dt,
        remesh_factor=config.remesh_factor,
    )

    wall0 = time.perf_counter()
    rec = integrate(model, ens, opts)
    wall = time.perf_counter() - wall0

    rec.metadata["h"] = h
    rec.metadata["epsilon"] = eps
    rec.metadata["wall_time_s"] = wall
    rec.metadata["config"] = config.to_dict()

    if config.output_dir is not None:
        run_dir = Path(config.output_dir) / config.name
        _persist(run_dir, config, model, rec)
        rec.metadata["run_dir"] = str(run_dir)
    return rec


def snapshot_grid(ens, eps: float, points: int = _GRID_POINTS) -> Grid1D:
    """Reconstruction grid for one snapshot: particle hull plus margin."""
    lo = float(np.min(ens.positions[:, 0])) - _GRID_MARGIN * eps
    hi = float(np.max(ens.positions[:, 0])) + _GRID_MARGIN * eps
    return Grid1D.cover(lo, hi, points)


def _persist(run_dir: Path, config: ExperimentConfig, model: Model, rec: TrajectoryRecord) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    eps = model.moll.epsilon

    resolved = config.to_dict()
    resolved["derived"] = {
        "h": rec.metadata["h"],
        "epsilon": eps,
        "n_snapshots": len(rec.times),
    }
    (run_dir / "config.json").write_text(
        json.dumps(resolved, indent=2, sort_keys=True) + "\n"
    )

    diag_rows = ["time,mass,center,M2,E_eps,S_m,W_rho,max_speed,max_density,n_remesh"]
    kernel = model.kernel
    for t, ens, diag in rec.snapshots():
        tag = _snapshot_tag(t)
        dens = reconstruct(ens, model.moll, snapshot_grid(ens, eps))
        entropy = grid_entropy(dens, config.m)
        interaction = grid_interaction(dens, kernel)

        lines = ["position,weight"]
        for x, w in zip(ens.positions[:, 0], ens.weights):
            lines.append(f"{_fmt(x)},{_fmt(w)}")
        (run_dir / f"particles_{tag}.csv").write_text("\n".join(lines) + "\n")

        lines = ["x,rho"]
        for x, v in zip(dens.grid.points, dens.values):
            lines.append(f"{_fmt(x)},{_fmt(v)}")
        (run_dir / f"density_{tag}.csv").write_text("\n".join(lines) + "\n")

        diag_rows.append(
            ",".join(
                [
                    _fmt(t),
                    _fmt(diag.mass),
                    _fmt(diag.center_of_mass[0]),
                    _fmt(diag.second_moment),
                    _fmt(diag.energy),
                    _fmt(entropy),
                    _fmt(interaction),
                    _fmt(diag.max_speed),
                    _fmt(diag.max_density),
                    str(rec.remesh_count_at(t)),
                ]
            )
        )
    (run_dir / "diagnostics.csv").write_text("\n".join(diag_rows) + "\n")

    try:
        pkg_version = _importlib_metadata.version("aggblob")
    except _importlib_metadata.PackageNotFoundError:
        pkg_version = "unknown"
    meta = {
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "aggblob": pkg_version,
        },
        "steps": {
            k: rec.metadata[k]
            for k in ("n_steps", "n_rhs", "n_jac", "n_lu", "segments")
        },
        "n_remesh": rec.metadata["n_remesh"],
        "remesh_times": rec.metadata["remesh_times"],
        "wall_time_s": rec.metadata["wall_time_s"],
    }
    (run_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
