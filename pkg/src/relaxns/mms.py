"""Manufactured solution for order-of-accuracy measurements.

Target fields on [0, 1]:

    v*(t, x) = 1 + A cos(pi x) cos(t)
    u*(t, x) = A sin(pi x) sin(t)
    S*(t, x) = mu u*_x / v*  +  B tau sin(pi x) cos(t)

with A = 0.1, B = 0.05.  u* vanishes at both walls for all t, so the
Dirichlet condition is met exactly.  The stress offset carries a factor tau,
which keeps the stress forcing bounded as tau -> 0:

    (mu u*_x - v* S*) / tau = -B v* sin(pi x) cos(t).

Forcing terms are the closed-form residuals of the governing equations,

    f_v = v*_t - u*_x
    f_u = u*_t + p'(v*) v*_x - S*_x
    f_S = S*_t + B v* sin(pi x) cos(t) + eps b(x) S*_x

assembled from the elementary derivatives below (every factor is an explicit
trig/rational expression; a symbolic differentiation cross-check lives in the
test suite).  The parabolic variant forces the limit system with the same
(v*, u*) and viscous stress mu u*_x / v*.
"""

from __future__ import annotations

import numpy as np

from .core import FluidParams, Grid1D, State, boundary_weight, dpressure
from .parabolic import ParabolicState
from .relaxed import Forcing

AMP_V = 0.1
AMP_S = 0.05
T_END_DEFAULT = 0.5


def _pieces(t, x):
    cpx = np.cos(np.pi * x)
    spx = np.sin(np.pi * x)
    ct = np.cos(t)
    st = np.sin(t)
    return cpx, spx, ct, st


def v_exact(t, x):
    cpx, _, ct, _ = _pieces(t, x)
    return 1.0 + AMP_V * cpx * ct


def u_exact(t, x):
    _, spx, _, st = _pieces(t, x)
    return AMP_V * spx * st


def S_exact(t, x, p: FluidParams):
    _, spx, ct, _ = _pieces(t, x)
    return p.mu * _ux(t, x) / v_exact(t, x) + AMP_S * p.tau * spx * ct


def _vt(t, x):
    cpx, _, _, st = _pieces(t, x)
    return -AMP_V * cpx * st


def _vx(t, x):
    _, spx, ct, _ = _pieces(t, x)
    return -AMP_V * np.pi * spx * ct


def _ut(t, x):
    _, spx, ct, _ = _pieces(t, x)
    return AMP_V * spx * ct


def _ux(t, x):
    cpx, _, _, st = _pieces(t, x)
    return AMP_V * np.pi * cpx * st


def _uxx(t, x):
    _, spx, _, st = _pieces(t, x)
    return -AMP_V * np.pi ** 2 * spx * st


def _uxt(t, x):
    cpx, _, ct, _ = _pieces(t, x)
    return AMP_V * np.pi * cpx * ct


def _visc_x(t, x, mu):
    # d/dx of mu u*_x / v* by the quotient rule
    v = v_exact(t, x)
    return mu * (_uxx(t, x) * v - _ux(t, x) * _vx(t, x)) / (v * v)


def _visc_t(t, x, mu):
    v = v_exact(t, x)
    return mu * (_uxt(t, x) * v - _ux(t, x) * _vt(t, x)) / (v * v)


def _Sx(t, x, p: FluidParams):
    cpx, _, ct, _ = _pieces(t, x)
    return _visc_x(t, x, p.mu) + AMP_S * p.tau * np.pi * cpx * ct


def _St(t, x, p: FluidParams):
    _, spx, _, st = _pieces(t, x)
    return _visc_t(t, x, p.mu) - AMP_S * p.tau * spx * st


def _forcing_assembler(p: FluidParams, with_stress: bool):
    """Shared closed-form assembly of (f_v, f_u, f_S) at one (t, x).

    The x-dependent trig arrays and the full triple are memoized on the
    (t, x) of the last call: a time stepper evaluates all components at the
    same instant on the same grid array, so each stage costs one assembly.
    """
    A, B = AMP_V, AMP_S
    pi = np.pi
    xc = {"x": None}
    last = {"t": None, "x": None, "out": None}

    def assemble(t, x):
        if last["t"] == t and last["x"] is x:
            return last["out"]
        if xc["x"] is not x:
            xc["x"] = x
            xc["cpx"] = np.cos(pi * np.asarray(x, dtype=np.float64))
            xc["spx"] = np.sin(pi * np.asarray(x, dtype=np.float64))
            xc["b"] = boundary_weight(x)
        cpx, spx, b = xc["cpx"], xc["spx"], xc["b"]
        ct, st = np.cos(t), np.sin(t)

        v = 1.0 + A * cpx * ct
        vt = -A * cpx * st
        vx = -A * pi * spx * ct
        ut = A * spx * ct
        ux = A * pi * cpx * st
        uxx = -A * pi ** 2 * spx * st
        uxt = A * pi * cpx * ct
        v2 = v * v
        visc_x = p.mu * (uxx * v - ux * vx) / v2
        f_v = vt - ux
        if with_stress:
            Sx = visc_x + B * p.tau * pi * cpx * ct
            f_u = ut + dpressure(v, p) * vx - Sx
            visc_t = p.mu * (uxt * v - ux * vt) / v2
            St = visc_t - B * p.tau * spx * st
            f_S = St + B * v * spx * ct  # + (v*S* - mu u*_x)/tau, tau-free
            if p.epsilon > 0:
                f_S = f_S + p.epsilon * b * Sx
        else:
            f_u = ut + dpressure(v, p) * vx - visc_x
            f_S = None
        last["t"], last["x"], last["out"] = t, x, (f_v, f_u, f_S)
        return last["out"]

    return assemble


def forcing_relaxed(p: FluidParams) -> Forcing:
    """Source terms that make (v*, u*, S*) solve the relaxed system."""
    p.require_relaxed()
    assemble = _forcing_assembler(p, with_stress=True)
    return Forcing(
        f_v=lambda t, x: assemble(t, x)[0],
        f_u=lambda t, x: assemble(t, x)[1],
        f_S=lambda t, x: assemble(t, x)[2],
    )


def forcing_parabolic(p: FluidParams) -> Forcing:
    """Source terms that make (v*, u*) solve the limit system."""
    assemble = _forcing_assembler(p, with_stress=False)
    return Forcing(
        f_v=lambda t, x: assemble(t, x)[0],
        f_u=lambda t, x: assemble(t, x)[1],
        f_S=None,
    )


def exact_state(t: float, grid: Grid1D, p: FluidParams) -> State:
    """Manufactured fields sampled on the grid (u pinned to 0 at the walls)."""
    x = grid.x
    u = u_exact(t, x)
    u[0] = 0.0
    u[-1] = 0.0
    return State(float(t), v_exact(t, x), u, S_exact(t, x, p))


def exact_parabolic_state(t: float, grid: Grid1D) -> ParabolicState:
    x = grid.x
    u = u_exact(t, x)
    u[0] = 0.0
    u[-1] = 0.0
    return ParabolicState(float(t), v_exact(t, x), u)
