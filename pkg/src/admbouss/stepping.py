"""Time integration: low-storage RK3 with exact diffusion factors.

The linear diffusion terms nu Lap w and epsilon Lap rho are integrated
exactly by per-mode factors exp(-nu |k|^2 dt) (and the epsilon analog),
applied stage by stage; the projected nonlinear and buoyancy terms are
advanced with Williamson's three-stage low-storage Runge-Kutta scheme.
Writing E(c) for the diffusion factor over a fraction c of the step, one
step of size dt reads

    h <- A_s h + F(u),   u <- u + B_s dt h,   (u, h) <- E(dc_s) (u, h)

for stages s = 1..3 with A = (0, -5/9, -153/128), B = (1/3, 15/16, 8/15)
and stage-time gaps dc = (1/3, 5/12, 1/4).  In the integrating-factor
variables this is the classical third-order scheme (local error
O(dt^4)); with the nonlinear and buoyancy terms switched off a step
reduces to exact exponential decay of every mode.

A CFL guard based on the deconvolved velocity refuses steps whose dt
exceeds safety * dx / max|D w|; deconvolution amplifies the advecting
field, so the guard watches D w rather than w itself.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .deconv import deconvolve, helmholtz_filter
from .dynamics import ModelParams, explicit_force
from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    sobolev_norm,
    to_physical,
)

__all__ = [
    "SolverState",
    "StepControl",
    "CflError",
    "init_state",
    "cfl_limit",
    "step",
    "integrate",
]

RK_A = (0.0, -5.0 / 9.0, -153.0 / 128.0)
RK_B = (1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0)
RK_DC = (1.0 / 3.0, 5.0 / 12.0, 1.0 / 4.0)

CFL_FLOOR = 1e-30  # velocity floor so a quiescent state allows any dt


class CflError(RuntimeError):
    """Raised when a requested step exceeds the advective CFL limit."""


@dataclass(frozen=True)
class SolverState:
    """Filtered velocity and density at one instant, with the physics."""

    w: SpectralVectorField
    rho: SpectralScalarField
    time: float
    params: ModelParams

    def validate(self, tol: float = 1e-10) -> None:
        self.w.validate(tol)
        self.rho.validate(tol)
        div = float(np.abs((self.w.grid.k * self.w.coeffs).sum(axis=0)).max())
        scale = sobolev_norm(self.w, 1.0)
        if div > tol * (scale + 1e-30):
            raise AssertionError("state velocity is not divergence-free")


@dataclass(frozen=True)
class StepControl:
    """Step size, horizon, and guard settings for the integrator."""

    dt: float
    t_end: float
    cfl_safety: float = 0.5
    scheme_order: int = 3
    observer_cadence: int = 10
    strict_invariants: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.cfl_safety <= 0:
            raise ValueError(f"cfl_safety must be positive, got {self.cfl_safety}")
        if self.scheme_order != 3:
            raise ValueError("only the third-order scheme is provided")
        if self.observer_cadence < 1:
            raise ValueError("observer_cadence must be at least 1")


def init_state(params: ModelParams, u0: SpectralVectorField,
               theta0: SpectralScalarField, time: float = 0.0) -> SolverState:
    """Filter the raw initial data; rejects non-divergence-free velocity."""
    if u0.grid != params.grid or theta0.grid != params.grid:
        raise ValueError("initial data grid does not match the model grid")
    div = float(np.abs((u0.grid.k * u0.coeffs).sum(axis=0)).max())
    scale = sobolev_norm(u0, 1.0)
    if div > 1e-10 * (scale + 1e-30):
        raise ValueError("initial velocity is not divergence-free")
    w = helmholtz_filter(params.deconv, u0)
    w = SpectralVectorField(w.grid, w.coeffs, divergence_free=True)
    rho = helmholtz_filter(params.deconv, theta0)
    return SolverState(w=w, rho=rho, time=float(time), params=params)


def cfl_limit(state: SolverState, cfl_safety: float = 0.5) -> float:
    """Largest admissible dt: safety * dx / max |deconvolved velocity|."""
    u = deconvolve(state.params.deconv, state.w)
    umax = float(np.abs(to_physical(u)).max())
    return cfl_safety * state.params.grid.spacing / (umax + CFL_FLOOR)


def step(state: SolverState, control: StepControl) -> SolverState:
    """Advance one step of control.dt; refuses steps beyond the CFL limit."""
    limit = cfl_limit(state, control.cfl_safety)
    if control.dt > limit:
        raise CflError(
            f"dt={control.dt:g} exceeds CFL limit {limit:g} "
            f"at t={state.time:g}")

    params = state.params
    g = params.grid
    dt = control.dt
    decay_w = [np.exp(-params.nu * g.k_sq * (dt * dc)) for dc in RK_DC]
    decay_r = [np.exp(-params.epsilon * g.k_sq * (dt * dc)) for dc in RK_DC]

    w = state.w.coeffs.copy()
    r = state.rho.coeffs.copy()
    hw = np.zeros_like(w)
    hr = np.zeros_like(r)
    for s in range(3):
        fw, fr = explicit_force(
            params,
            SpectralVectorField(g, w, divergence_free=True),
            SpectralScalarField(g, r))
        hw = RK_A[s] * hw + fw.coeffs
        hr = RK_A[s] * hr + fr.coeffs
        w = w + (dt * RK_B[s]) * hw
        r = r + (dt * RK_B[s]) * hr
        w = w * decay_w[s][None]
        r = r * decay_r[s]
        hw = hw * decay_w[s][None]
        hr = hr * decay_r[s]

    out = SolverState(
        w=SpectralVectorField(g, w, divergence_free=True, copy=False),
        rho=SpectralScalarField(g, r, copy=False),
        time=state.time + dt,
        params=params)
    if control.strict_invariants:
        out.validate()
    return out


def integrate(state: SolverState, control: StepControl, observers=()):
    """March to control.t_end, collecting an energy record per cadence.

    Returns (final_state, records).  Observers are callables invoked with
    the state at the initial instant, every cadence-th step, and the
    final step.  On an aborting step error the partial records are
    attached to the exception as `partial_records` after observers with
    a flush() method have been flushed.
    """
    from .diagnostics import energy_record  # deferred: diagnostics imports us

    if control.t_end < state.time - 1e-12 * max(control.dt, 1.0):
        raise ValueError(f"t_end={control.t_end} lies before state.time={state.time}")

    span = control.t_end - state.time
    n_full = int(np.floor(span / control.dt + 1e-9))
    leftover = span - n_full * control.dt
    take_partial = leftover > 1e-9 * control.dt

    records = [energy_record(state)]
    for obs in observers:
        obs(state)

    try:
        for i in range(n_full):
            state = step(state, control)
            if (i + 1) % control.observer_cadence == 0 or \
                    (i + 1 == n_full and not take_partial):
                records.append(energy_record(state))
                for obs in observers:
                    obs(state)
        if take_partial:
            state = step(state, replace(control, dt=leftover))
            records.append(energy_record(state))
            for obs in observers:
                obs(state)
    except Exception as exc:
        for obs in observers:
            flush = getattr(obs, "flush", None)
            if callable(flush):
                flush()
        exc.partial_records = records
        raise

    # Drop a duplicate if the final step landed exactly on the cadence.
    deduped = [records[0]]
    for rec in records[1:]:
        if rec.time != deduped[-1].time:
            deduped.append(rec)
    return state, deduped
