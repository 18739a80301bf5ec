"""Initial-data families and the compatibility/well-preparedness report.

The sine families are built so the k = 0 and k = 1 compatibility conditions
at the walls hold analytically: u0 = delta sin(pi x) vanishes at both ends,
v0' and u0'' vanish there too, hence (S0 - p(v0))_x = 0 at the walls for the
well-prepared variant.  Well-prepared data takes S0 = mu u0_x / v0 with the
analytic derivative sampled at the nodes, so the continuous well-preparedness
defect is exactly zero for every tau (the discrete residual measured by
compatibility_report is then pure D_x truncation, O(dx^2)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FluidParams, Grid1D, State
from .operators import diff_x
from .parabolic import ParabolicState


def make_initial_data(family: str, delta: float, grid: Grid1D, p: FluidParams,
                      path: str | None = None) -> State:
    """Build nodal initial data; families: equilibrium, well-prepared-sine,
    unprepared-sine, custom-table (nodal values read from a CSV file)."""
    if delta < 0:
        raise ValueError(f"amplitude delta must be >= 0, got {delta}")
    x = grid.x
    if family == "equilibrium":
        state = State(0.0, np.ones(grid.n), np.zeros(grid.n), np.zeros(grid.n))
    elif family in ("well-prepared-sine", "unprepared-sine"):
        if delta >= 1:
            raise ValueError(f"delta = {delta} would make v0 = 1 + delta cos(pi x) vanish")
        v0 = 1.0 + delta * np.cos(np.pi * x)
        u0 = delta * np.sin(np.pi * x)
        u0[0] = 0.0
        u0[-1] = 0.0
        if family == "well-prepared-sine":
            u0x = delta * np.pi * np.cos(np.pi * x)  # analytic derivative, sampled
            S0 = p.mu * u0x / v0
        else:
            S0 = np.zeros(grid.n)
        state = State(0.0, v0, u0, S0)
    elif family == "custom-table":
        if not path:
            raise ValueError("custom-table family requires a file path")
        state = _read_table(path, grid)
    else:
        raise ValueError(f"unknown initial-data family {family!r}")
    state.validate(grid)
    return state


def _read_table(path: str, grid: Grid1D) -> State:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    names = data.dtype.names or ()
    for col in ("x", "v", "u", "S"):
        if col not in names:
            raise ValueError(f"custom table {path} is missing column {col!r}")
    if len(data) != grid.n:
        raise ValueError(f"custom table has {len(data)} rows, grid has {grid.n} nodes")
    if np.max(np.abs(data["x"] - grid.x)) > 1e-12:
        raise ValueError("custom table x column does not match the grid nodes")
    return State(0.0, data["v"].copy(), data["u"].copy(), data["S"].copy())


def parabolic_initial_data(state: State) -> ParabolicState:
    """Drop the stress field: shared (v0, u0) for the limit solver."""
    return ParabolicState(state.t, state.v.copy(), state.u.copy())


@dataclass
class CompatibilityReport:
    """Measured (not enforced) boundary and preparedness residuals.

    u_left/u_right check the k = 0 condition; k1_left/k1_right are
    |(S - p(v))_x| at the walls, i.e. the size of u_t there (k = 1).
    well_preparedness is ||v S - mu u_x||_{H^1} with the discrete derivative.
    """

    u_left: float
    u_right: float
    k1_left: float
    k1_right: float
    v_min: float
    well_preparedness: float

    def to_dict(self) -> dict:
        return {
            "u_left": self.u_left,
            "u_right": self.u_right,
            "k1_left": self.k1_left,
            "k1_right": self.k1_right,
            "v_min": self.v_min,
            "well_preparedness": self.well_preparedness,
        }


def compatibility_report(state: State, p: FluidParams, grid: Grid1D) -> CompatibilityReport:
    from .core import pressure
    from .diagnostics import discrete_norm

    if np.min(state.v) <= 0:
        raise ValueError("compatibility_report requires v > 0")
    dx = grid.dx
    w = state.S - pressure(state.v, p)
    wx = diff_x(w, dx)
    defect = state.v * state.S - p.mu * diff_x(state.u, dx)
    return CompatibilityReport(
        u_left=abs(float(state.u[0])),
        u_right=abs(float(state.u[-1])),
        k1_left=abs(float(wx[0])),
        k1_right=abs(float(wx[-1])),
        v_min=float(np.min(state.v)),
        well_preparedness=discrete_norm(defect, grid, 1),
    )
