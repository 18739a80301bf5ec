"""Explicit solver for the relaxed system with boundary stress transport.

    v_t = u_x
    u_t + p(v)_x = S_x
    tau (S_t + eps b(x) S_x) + v S = mu u_x

on [0, 1] with u = 0 at both walls.  The stress equation carries the stiff
source (mu u_x - v S)/tau; time stepping is Strang splitting:

    half relaxation   S <- S* + (S - S*) exp(-v dt / (2 tau)),  S* = mu u_x / v
    full transport    two-stage SSP (Heun) step of
                          v_t = D_x u
                          u_t = D_x S - D_x p(v)
                          S_t = -eps b D_x^up S      (+ any forcing)
    half relaxation

The relaxation halves absorb the entire stiff part exactly, so the transport
stage is non-stiff uniformly in tau and the stable dt never degrades to
O(tau).  Velocity is pinned to zero at the walls after every stage, which
makes the trapezoid mass integral of v telescope exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import timeloop
from .artifacts import RunArtifact
from .core import (
    FluidParams,
    Grid1D,
    NumericsError,
    PositivityError,
    State,
    max_char_speed,
    pressure,
    relax_exact_update,
)
from .operators import diff_x, upwind_diff


@dataclass
class Forcing:
    """Manufactured-solution source terms, each a callable (t, x) -> array."""

    f_v: Callable
    f_u: Callable
    f_S: Callable


@dataclass
class SchemeConfig:
    """Numerical knobs for the relaxed (and parabolic) time steppers.

    record_times switches the snapshot cadence from step-based to an explicit
    list of times that are landed on exactly; sweeps use it so runs with
    different dt stay comparable at shared instants.
    """

    cfl: float = 0.4
    v_floor: float = 1e-6
    forcing: Optional[Forcing] = None
    record_every: int = 1
    record_times: Optional[Sequence[float]] = None
    fixed_dt: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.v_floor > 0:
            raise ValueError(f"v_floor must be positive, got {self.v_floor}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ValueError("fixed_dt must be positive when set")


def rhs_relaxed(state: State, p: FluidParams, grid: Grid1D, forcing: Optional[Forcing] = None):
    """Full semi-discrete right-hand side (v_t, u_t, S_t), unsplit.

    This is the PDE-substitution entry point used by the diagnostics; u_t is
    the raw one-sided value at the walls (its size there measures how far the
    data is from the k = 1 compatibility condition).
    """
    p.require_relaxed()
    v, u, S = state.v, state.u, state.S
    if np.min(v) <= 0:
        raise PositivityError(f"rhs_relaxed requires v > 0 (min {np.min(v)})", state)
    dx = grid.dx
    ux = diff_x(u, dx)
    vt = ux
    ut = diff_x(S, dx) - diff_x(pressure(v, p), dx)
    St = (p.mu * ux - v * S) / p.tau
    if p.epsilon > 0:
        c = p.epsilon * grid.b
        St = St - c * upwind_diff(S, dx, c)
    if forcing is not None:
        vt = vt + forcing.f_v(state.t, grid.x)
        ut = ut + forcing.f_u(state.t, grid.x)
        St = St + forcing.f_S(state.t, grid.x)
    return vt, ut, St


def _transport_rhs(t, v, u, S, p: FluidParams, grid: Grid1D, forcing: Optional[Forcing]):
    # Non-stiff part only: the relaxation halves own (mu u_x - v S)/tau.
    dx = grid.dx
    vt = diff_x(u, dx)
    ut = diff_x(S, dx) - diff_x(pressure(v, p), dx)
    if p.epsilon > 0:
        c = p.epsilon * grid.b
        St = -c * upwind_diff(S, dx, c)
    else:
        St = np.zeros_like(S)
    if forcing is not None:
        vt = vt + forcing.f_v(t, grid.x)
        ut = ut + forcing.f_u(t, grid.x)
        St = St + forcing.f_S(t, grid.x)
    # Dirichlet walls: u never moves there, so stage states keep u = 0 exactly
    # and the flux-form mass update telescopes to zero.
    ut[0] = 0.0
    ut[-1] = 0.0
    return vt, ut, St


def stable_dt(state: State, p: FluidParams, grid: Grid1D, cfg: SchemeConfig) -> float:
    """CFL step bound cfl * dx / max_char_speed, capped at dx.

    cfg.fixed_dt overrides the adaptive bound; callers of that mode own
    stability (see uniform_dt).
    """
    if cfg.fixed_dt is not None:
        return cfg.fixed_dt
    return min(cfg.cfl * grid.dx / max_char_speed(state, p), grid.dx)


def uniform_dt(state: State, p: FluidParams, grid: Grid1D, cfg: SchemeConfig,
               t_end: float, safety: float = 0.9) -> float:
    """Largest dt that divides t_end exactly and sits inside the CFL bound.

    A uniform step makes the recorded times equispaced, which the centered
    dissipation-identity residual needs to stay second order at every
    interior snapshot (the adaptive policy leaves one short final step).
    The safety factor absorbs the drift of max_char_speed along the run.
    """
    if not t_end > 0:
        raise ValueError("uniform_dt requires t_end > 0")
    bound = safety * min(cfg.cfl * grid.dx / max_char_speed(state, p), grid.dx)
    return t_end / max(1, int(np.ceil(t_end / bound)))


def _require_positive(v: np.ndarray, floor: float, t: float, state=None):
    vmin = np.min(v)
    if vmin <= floor:
        raise PositivityError(f"specific volume hit floor: min v = {vmin} at t = {t}", state)


def step(state: State, dt: float, p: FluidParams, grid: Grid1D, cfg: SchemeConfig) -> State:
    """One Strang step of size dt.  Returns a new State at state.t + dt."""
    p.require_relaxed()
    if not dt > 0:
        raise ValueError(f"step requires dt > 0, got {dt}")
    t = state.t
    v, u = state.v, state.u
    _require_positive(v, cfg.v_floor, t, state)

    S = relax_exact_update(state.S, diff_x(u, grid.dx), v, 0.5 * dt, p)

    k1v, k1u, k1S = _transport_rhs(t, v, u, S, p, grid, cfg.forcing)
    v1 = v + dt * k1v
    u1 = u + dt * k1u
    S1 = S + dt * k1S
    _require_positive(v1, cfg.v_floor, t, state)
    k2v, k2u, k2S = _transport_rhs(t + dt, v1, u1, S1, p, grid, cfg.forcing)
    vn = v + 0.5 * dt * (k1v + k2v)
    un = u + 0.5 * dt * (k1u + k2u)
    Sn = S + 0.5 * dt * (k1S + k2S)
    un[0] = 0.0
    un[-1] = 0.0
    _require_positive(vn, cfg.v_floor, t + dt, state)

    Sn = relax_exact_update(Sn, diff_x(un, grid.dx), vn, 0.5 * dt, p)

    new = State(t + dt, vn, un, Sn)
    if not (np.all(np.isfinite(vn)) and np.all(np.isfinite(un)) and np.all(np.isfinite(Sn))):
        raise NumericsError(f"non-finite values after step to t = {t + dt}", state)
    return new


def run(
    state0: State,
    t_end: float,
    p: FluidParams,
    grid: Grid1D,
    cfg: SchemeConfig,
    on_step: Optional[Callable] = None,
) -> RunArtifact:
    """March from state0 to t_end, recording snapshots per cfg.

    The final step is truncated to land on t_end (and on each entry of
    cfg.record_times) exactly.  A positivity or non-finite failure ends the
    run early with status "aborted" and the last good state appended.
    """
    state0.validate(grid)
    tic = time.perf_counter()
    snaps, status, reason, n_steps = timeloop.integrate(
        state0,
        t_end,
        dt_fn=lambda s: stable_dt(s, p, grid, cfg),
        step_fn=lambda s, dt: step(s, dt, p, grid, cfg),
        record_every=cfg.record_every,
        record_times=cfg.record_times,
        on_step=on_step,
    )
    return RunArtifact(
        states=snaps,
        status=status,
        abort_reason=reason,
        wall_time=time.perf_counter() - tic,
        n_steps=n_steps,
    )
