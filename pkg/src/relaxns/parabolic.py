"""Classical parabolic limit solver: the tau -> 0 reference dynamics.

    v_t = u_x
    u_t + p(v)_x = (mu u_x / v)_x

with u = 0 at both walls.  The viscous flux mu u_x / v is evaluated at cell
midpoints, giving a compact three-point stencil whose discrete dissipation is
sign-definite.  Time stepping is the same two-stage SSP scheme as the
relaxed solver; the step bound is the smaller of the acoustic CFL and the
explicit diffusion limit, so dt = O(dx^2).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import timeloop
from .artifacts import RunArtifact
from .core import FluidParams, Grid1D, NumericsError, PositivityError, dpressure, pressure
from .operators import diff_x
from .relaxed import SchemeConfig, _require_positive


@dataclass
class ParabolicState:
    """Nodal (v, u) of the limit system at one instant."""

    t: float
    v: np.ndarray
    u: np.ndarray

    def copy(self) -> "ParabolicState":
        return ParabolicState(self.t, self.v.copy(), self.u.copy())

    def validate(self, grid: Grid1D):
        for name, f in (("v", self.v), ("u", self.u)):
            if f.shape != (grid.n,):
                raise ValueError(f"field {name} has shape {f.shape}, expected ({grid.n},)")
        if np.min(self.v) <= 0:
            raise PositivityError(f"initial v is not positive (min {np.min(self.v)})", self)


def effective_stress(state: ParabolicState, p: FluidParams, grid: Grid1D) -> np.ndarray:
    """Limit stress mu * u_x / v, the field the relaxed S converges to."""
    if np.min(state.v) <= 0:
        raise PositivityError("effective_stress requires v > 0", state)
    return p.mu * diff_x(state.u, grid.dx) / state.v


def viscous_term(v: np.ndarray, u: np.ndarray, p: FluidParams, dx: float) -> np.ndarray:
    """D_x(mu u_x / v) with midpoint fluxes; zero at the pinned wall nodes."""
    vm = 0.5 * (v[:-1] + v[1:])
    flux = p.mu * (u[1:] - u[:-1]) / (dx * vm)
    out = np.zeros_like(u)
    out[1:-1] = (flux[1:] - flux[:-1]) / dx
    return out


def rhs_parabolic(state: ParabolicState, p: FluidParams, grid: Grid1D, forcing=None):
    """(v_t, u_t) of the limit system; u_t = 0 at the Dirichlet walls."""
    v, u = state.v, state.u
    if np.min(v) <= 0:
        raise PositivityError(f"rhs_parabolic requires v > 0 (min {np.min(v)})", state)
    dx = grid.dx
    vt = diff_x(u, dx)
    ut = viscous_term(v, u, p, dx) - diff_x(pressure(v, p), dx)
    if forcing is not None:
        vt = vt + forcing.f_v(state.t, grid.x)
        ut = ut + forcing.f_u(state.t, grid.x)
    ut[0] = 0.0
    ut[-1] = 0.0
    return vt, ut


def stable_dt_parabolic(state: ParabolicState, p: FluidParams, grid: Grid1D, cfg: SchemeConfig) -> float:
    """min(cfl dx / sqrt(-p'(v_min)), 0.4 dx^2 v_min / mu).

    cfg.fixed_dt overrides the bound, as in the relaxed solver.
    """
    if cfg.fixed_dt is not None:
        return cfg.fixed_dt
    vmin = float(np.min(state.v))
    if vmin <= 0:
        raise PositivityError("stable_dt_parabolic requires v > 0", state)
    acoustic = np.sqrt(-dpressure(vmin, p))
    return min(cfg.cfl * grid.dx / acoustic, 0.4 * grid.dx ** 2 * vmin / p.mu)


def step_parabolic(state: ParabolicState, dt: float, p: FluidParams, grid: Grid1D, cfg: SchemeConfig) -> ParabolicState:
    """One two-stage SSP step; returns a new ParabolicState at t + dt."""
    if not dt > 0:
        raise ValueError(f"step requires dt > 0, got {dt}")
    t, v, u = state.t, state.v, state.u
    _require_positive(v, cfg.v_floor, t, state)
    k1v, k1u = rhs_parabolic(state, p, grid, cfg.forcing)
    s1 = ParabolicState(t + dt, v + dt * k1v, u + dt * k1u)
    s1.u[0] = 0.0
    s1.u[-1] = 0.0
    _require_positive(s1.v, cfg.v_floor, t, state)
    k2v, k2u = rhs_parabolic(s1, p, grid, cfg.forcing)
    vn = v + 0.5 * dt * (k1v + k2v)
    un = u + 0.5 * dt * (k1u + k2u)
    un[0] = 0.0
    un[-1] = 0.0
    _require_positive(vn, cfg.v_floor, t + dt, state)
    if not (np.all(np.isfinite(vn)) and np.all(np.isfinite(un))):
        raise NumericsError(f"non-finite values after step to t = {t + dt}", state)
    return ParabolicState(t + dt, vn, un)


def run_parabolic(
    state0: ParabolicState,
    t_end: float,
    p: FluidParams,
    grid: Grid1D,
    cfg: SchemeConfig,
    on_step: Optional[Callable] = None,
) -> RunArtifact:
    """Same run contract as the relaxed solver (snapshot cadence, aborts)."""
    state0.validate(grid)
    tic = time.perf_counter()
    snaps, status, reason, n_steps = timeloop.integrate(
        state0,
        t_end,
        dt_fn=lambda s: stable_dt_parabolic(s, p, grid, cfg),
        step_fn=lambda s, dt: step_parabolic(s, dt, p, grid, cfg),
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
