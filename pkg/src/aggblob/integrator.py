"""Stiff time integration of the particle ODE system with online remeshing.

The positions evolve by the gradient-flow velocity; weights are constant in
time (so mass is conserved by construction).  Integration uses the implicit
BDF method with adaptive order and step (finite-difference Jacobians), capped
at a configurable maximum order.

Remeshing: whenever the largest interparticle gap exceeds remesh_factor * h
(detected as a terminal ODE event in d=1), the run stops, the ensemble is
re-gridded with the original spacing h, and integration restarts with fresh
multistep history.  Snapshots are collected at a fixed cadence plus the
endpoints, and each snapshot carries full diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import BDF, solve_ivp

from .density import ParticleEnsemble, max_gap, remesh
from .dynamics import Diagnostics, Model, diagnostics, velocity_arrays, velocity_jacobian
from .errors import DomainError, NumericalError, StiffnessError

_MAX_SEGMENTS = 10_000


class _CappedBDF(BDF):
    """BDF with a hard cap on the method order.

    scipy's BDF raises the order based on error constants; inflating the
    constants above the cap makes raising unattractive, and the post-step
    clamp guarantees the cap even in degenerate corners.
    """

    def __init__(self, fun, t0, y0, t_bound, max_order=5, **kwargs):
        super().__init__(fun, t0, y0, t_bound, **kwargs)
        if not 1 <= int(max_order) <= 5:
            raise DomainError(f"max_order must lie in 1..5, got {max_order}")
        self._order_cap = int(max_order)
        self._max_order_seen = 1
        if self._order_cap < 5:
            ec = np.array(self.error_const, dtype=float, copy=True)
            ec[self._order_cap + 1 :] = 1e290
            self.error_const = ec

    def _step_impl(self):
        ok, msg = super()._step_impl()
        self._max_order_seen = max(self._max_order_seen, self.order)
        if self.order > self._order_cap:
            self.order = self._order_cap
            self.n_equal_steps = 0
        return ok, msg


@dataclass(frozen=True)
class IntegratorOpts:
    """Time span, step/tolerance controls, snapshot cadence, remesh trigger."""

    t_span: tuple[float, float]
    max_step: float
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_order: int = 5
    snapshot_dt: float | None = None
    remesh_factor: float = 1.5

    def __post_init__(self):
        t0, t1 = self.t_span
        if not t1 > t0:
            raise DomainError(f"time span must be increasing, got {self.t_span}")
        if not self.max_step > 0:
            raise DomainError(f"max_step must be positive, got {self.max_step}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not 1 <= self.max_order <= 5:
            raise DomainError(f"max_order must lie in 1..5, got {self.max_order}")
        if self.snapshot_dt is not None and not self.snapshot_dt > 0:
            raise DomainError(f"snapshot_dt must be positive, got {self.snapshot_dt}")
        if not self.remesh_factor >= 1:
            raise DomainError(f"remesh_factor must be >= 1, got {self.remesh_factor}")


@dataclass
class TrajectoryRecord:
    """Snapshots (time, ensemble, diagnostics) plus run metadata."""

    times: list[float] = field(default_factory=list)
    ensembles: list[ParticleEnsemble] = field(default_factory=list)
    diagnostics: list[Diagnostics] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def snapshots(self):
        return zip(self.times, self.ensembles, self.diagnostics)

    def remesh_count_at(self, t: float) -> int:
        return sum(1 for rt in self.metadata.get("remesh_times", []) if rt <= t)


def snapshot_times(t0: float, t1: float, dt: float | None) -> np.ndarray:
    """t0, t0+dt, ... plus t1 (deduplicated)."""
    if dt is None:
        return np.array([t0, t1])
    n = int(math.floor((t1 - t0) / dt + 1e-9))
    times = t0 + dt * np.arange(n + 1)
    if t1 - times[-1] > 1e-9 * dt:
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


def integrate(model: Model, ens: ParticleEnsemble, opts: IntegratorOpts) -> TrajectoryRecord:
    """Run the gradient flow over opts.t_span, remeshing as gaps open up.

    Deterministic: identical inputs give bit-identical snapshots.  Raises
    StiffnessError when the solver stalls (carrying the last accepted state)
    and NumericalError on non-finite velocities.
    """
    t0, t1 = opts.t_span
    span = t1 - t0
    pending = snapshot_times(t0, t1, opts.snapshot_dt)
    rec = TrajectoryRecord()
    rec.metadata.update(
        {
            "solver": "BDF",
            "max_order": opts.max_order,
            "n_rhs": 0,
            "n_jac": 0,
            "n_lu": 0,
            "n_steps": 0,
            "segments": 0,
            "remesh_times": [],
        }
    )

    def record(t: float, e: ParticleEnsemble) -> None:
        rec.times.append(float(t))
        rec.ensembles.append(e)
        rec.diagnostics.append(diagnostics(model, e))

    current = ens
    t = t0
    tiny = 1e-12 * span
    next_snap = 0

    d = ens.d
    threshold = opts.remesh_factor * ens.h
    # the gap event stops the solver a root-finding hair before the strict
    # crossing, so a terminated segment itself flags the remesh
    need_remesh = d == 1 and max_gap(ens) > threshold

    while True:
        # catch up snapshots at (or within float fuzz of) the current time:
        # covers t0, and cadence points an event landed on exactly
        while next_snap < len(pending) and pending[next_snap] <= t + tiny:
            record(pending[next_snap], current)
            next_snap += 1
        if t >= t1 - tiny:
            break
        if rec.metadata["segments"] >= _MAX_SEGMENTS:
            raise NumericalError(f"integration exceeded {_MAX_SEGMENTS} segments (remesh loop?)")
        if need_remesh:
            current = remesh(current, model.moll)
            rec.metadata["remesh_times"].append(float(t))
            need_remesh = False

        n = current.n
        w = current.weights
        h = current.h

        def rhs(_t, y, n=n, w=w):
            v = velocity_arrays(model, y.reshape(n, d), w)
            if not np.all(np.isfinite(v)):
                raise NumericalError(f"non-finite velocity at t={_t}")
            return v.ravel()

        def jac(_t, y, n=n, w=w):
            return velocity_jacobian(model, y.reshape(n, d), w)

        step_evals = [0]

        def gap_event(_t, y, n=n):
            step_evals[0] += 1
            pos = np.sort(y.reshape(n, d)[:, 0])
            gap = float(np.max(np.diff(pos))) if n > 1 else 0.0
            return threshold - gap

        gap_event.terminal = True
        gap_event.direction = -1.0

        t_eval = pending[next_snap:]

        sol = solve_ivp(
            rhs,
            (t, t1),
            current.positions.ravel(),
            method=_CappedBDF,
            t_eval=t_eval if t_eval.size else None,
            events=[gap_event] if d == 1 else None,
            jac=jac if d == 1 else None,
            max_step=opts.max_step,
            rtol=opts.rel_tol,
            atol=opts.abs_tol,
            max_order=opts.max_order,
        )
        rec.metadata["segments"] += 1
        rec.metadata["n_rhs"] += int(sol.nfev)
        rec.metadata["n_jac"] += int(sol.njev)
        rec.metadata["n_lu"] += int(sol.nlu)
        if d == 1:
            rec.metadata["n_steps"] += max(step_evals[0] - 1, 0)

        if sol.status == -1:
            raise StiffnessError(
                f"stiff solver failed at t={t:.6g}: {sol.message}", t=t, state=current
            )

        if t_eval.size and len(sol.t):
            # scipy leaves sol.t/sol.y as plain lists when an event stops the
            # segment before the first t_eval point
            for tk, yk in zip(sol.t, np.asarray(sol.y).T):
                snap = ParticleEnsemble(yk.reshape(n, d), w, h)
                record(tk, snap)
                next_snap += 1

        if sol.status == 1 and sol.t_events and sol.t_events[0].size:
            te = float(sol.t_events[0][0])
            ye = sol.y_events[0][0]
            current = ParticleEnsemble(ye.reshape(n, d), w, h)
            t = te
            need_remesh = True
        else:
            t = t1

    rec.metadata["n_remesh"] = len(rec.metadata["remesh_times"])
    return rec
