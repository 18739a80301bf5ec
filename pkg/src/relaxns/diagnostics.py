"""Energy and dissipation functionals of the relaxed system.

Everything is a pure function of a single State: time derivatives are
obtained by substituting the equations (and their time-differentiated form),
not by differencing a trajectory, so a snapshot is self-contained.

The physical energy integrand is a (v - 1) - h(v) + u^2/2 + tau S^2/(2 mu).
The linear-in-v term uses the coefficient a = p(1) so the integrand is a
nonnegative convex well for every a; for a = 1 it reduces to the familiar
v - 1 - h(v).  Because spatial differencing and trapezoid quadrature form a
summation-by-parts pair and u vanishes at the walls, the semi-discrete
identity

    d/dt e_phys = -(1/mu) * trapz(v S^2)  - (eps/mu) <S, b D_up S>

holds with no interior residual; the recorded dissipation residual therefore
measures pure time-discretization error when eps = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import FluidParams, Grid1D, State, dpressure, enthalpy
from .operators import diff_x, diff_xx, l2_norm, trapz, upwind_diff
from .parabolic import ParabolicState, effective_stress, rhs_parabolic
from .relaxed import rhs_relaxed

REGIME_V_MIN = 0.75
REGIME_V_MAX = 1.25


def discrete_norm(field: np.ndarray, grid: Grid1D, order: int) -> float:
    """Trapezoid Sobolev norm of a nodal field, order in {0, 1, 2}."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    s = trapz(field * field, grid.dx)
    if order >= 1:
        d1 = diff_x(field, grid.dx)
        s += trapz(d1 * d1, grid.dx)
    if order >= 2:
        d2 = diff_xx(field, grid.dx)
        s += trapz(d2 * d2, grid.dx)
    return float(np.sqrt(s))


@dataclass
class TimeDerivatives:
    """PDE-substituted first and second time derivatives of (v, u, S)."""

    vt: np.ndarray
    ut: np.ndarray
    St: np.ndarray
    vtt: np.ndarray
    utt: np.ndarray
    Stt: np.ndarray


def time_derivative_fields(state: State, p: FluidParams, grid: Grid1D) -> TimeDerivatives:
    """First derivatives from the equations; second from their t-derivative.

        v_tt = D_x u_t
        u_tt = D_x (S_t - p'(v) v_t)
        S_tt = (mu D_x u_t - v_t S - v S_t) / tau - eps b D_up S_t

    Unforced system only (the diagnostics track the homogeneous dynamics).
    """
    p.require_relaxed()
    vt, ut, St = rhs_relaxed(state, p, grid)
    dx = grid.dx
    vtt = diff_x(ut, dx)
    utt = diff_x(St - dpressure(state.v, p) * vt, dx)
    Stt = (p.mu * diff_x(ut, dx) - vt * state.S - state.v * St) / p.tau
    if p.epsilon > 0:
        c = p.epsilon * grid.b
        Stt = Stt - c * upwind_diff(St, dx, c)
    return TimeDerivatives(vt, ut, St, vtt, utt, Stt)


@dataclass
class EnergySnapshot:
    """All scalar functionals of one recorded instant."""

    t: float
    e_phys: float
    diss_rate: float
    E_H2: float
    E_dtH1: float
    E_dt2L2: float
    D_value: float
    relax_residual: float

    @property
    def E_components(self) -> dict:
        return {"H2": self.E_H2, "dtH1": self.E_dtH1, "dt2L2": self.E_dt2L2}

    @property
    def E_total(self) -> float:
        return self.E_H2 + self.E_dtH1 + self.E_dt2L2


def _physical_energy(v, u, S, p: FluidParams, dx: float, tau: float) -> Tuple[float, float]:
    well = p.a * (v - 1.0) - enthalpy(v, p)
    e = trapz(well + 0.5 * u * u + tau * S * S / (2.0 * p.mu), dx)
    diss = trapz(v * S * S, dx) / p.mu
    return e, diss


def energy_snapshot(state: State, p: FluidParams, grid: Grid1D) -> EnergySnapshot:
    """Evaluate every functional at one state of the relaxed system."""
    v, u, S = state.v, state.u, state.S
    dx = grid.dx
    tau = p.tau
    e_phys, diss = _physical_energy(v, u, S, p, dx, tau)
    d = time_derivative_fields(state, p, grid)

    E_H2 = (
        discrete_norm(v - 1.0, grid, 2) ** 2
        + discrete_norm(u, grid, 2) ** 2
        + tau * discrete_norm(S, grid, 2) ** 2
    )
    E_dtH1 = (
        discrete_norm(d.vt, grid, 1) ** 2
        + discrete_norm(d.ut, grid, 1) ** 2
        + tau * discrete_norm(d.St, grid, 1) ** 2
    )
    E_dt2L2 = tau ** 2 * (
        l2_norm(d.vtt, dx) ** 2 + l2_norm(d.utt, dx) ** 2 + tau * l2_norm(d.Stt, dx) ** 2
    )
    D_value = _d_functional(grid, d, v, u, tau)
    D_value += (
        discrete_norm(S, grid, 2) ** 2
        + discrete_norm(d.St, grid, 1) ** 2
        + tau ** 2 * l2_norm(d.Stt, dx) ** 2
    )
    residual = l2_norm(S - p.mu * diff_x(u, dx) / v, dx)
    return EnergySnapshot(state.t, e_phys, diss, E_H2, E_dtH1, E_dt2L2, D_value, residual)


def _d_functional(grid: Grid1D, d, v, u, tau) -> float:
    # sum over |alpha| in {1, 2} of ||D^alpha (v, u)||_L2^2 with D = (d_t, d_x)
    dx = grid.dx
    total = 0.0
    for f, ft, ftt in ((v, d.vt, d.vtt), (u, d.ut, d.utt)):
        fx = diff_x(f, dx)
        total += l2_norm(ft, dx) ** 2 + l2_norm(fx, dx) ** 2
        total += (
            l2_norm(ftt, dx) ** 2
            + l2_norm(diff_x(ft, dx), dx) ** 2
            + l2_norm(diff_xx(f, dx), dx) ** 2
        )
    return total


def energy_snapshot_parabolic(state, p: FluidParams, grid: Grid1D) -> EnergySnapshot:
    """tau = 0 shadow of the snapshot for the limit solver.

    S is the effective stress mu u_x / v, so relax_residual is identically
    zero and every tau-weighted term vanishes regardless of p.tau.
    """
    v, u = state.v, state.u
    dx = grid.dx
    ps = ParabolicState(getattr(state, "t", 0.0), v, u)
    S = effective_stress(ps, p, grid)
    e_phys, diss = _physical_energy(v, u, S, p, dx, tau=0.0)

    vt, ut = rhs_parabolic(ps, p, grid)
    # d/dt of the discrete viscous flux (chain rule on the midpoint formula)
    vm = 0.5 * (v[:-1] + v[1:])
    vtm = 0.5 * (vt[:-1] + vt[1:])
    dflux = p.mu * ((ut[1:] - ut[:-1]) / (dx * vm) - (u[1:] - u[:-1]) * vtm / (dx * vm * vm))
    utt = np.zeros_like(u)
    utt[1:-1] = (dflux[1:] - dflux[:-1]) / dx
    utt[1:-1] -= diff_x(dpressure(v, p) * vt, dx)[1:-1]
    vtt = diff_x(ut, dx)
    ux = diff_x(u, dx)
    St = p.mu * (diff_x(ut, dx) * v - ux * vt) / (v * v)

    E_H2 = discrete_norm(v - 1.0, grid, 2) ** 2 + discrete_norm(u, grid, 2) ** 2
    E_dtH1 = discrete_norm(vt, grid, 1) ** 2 + discrete_norm(ut, grid, 1) ** 2
    d = TimeDerivatives(vt, ut, St, vtt, utt, np.zeros_like(u))
    D_value = _d_functional(grid, d, v, u, 0.0)
    D_value += discrete_norm(S, grid, 2) ** 2 + discrete_norm(St, grid, 1) ** 2
    return EnergySnapshot(state.t, e_phys, diss, E_H2, E_dtH1, 0.0, D_value, 0.0)


@dataclass
class EnergyReport:
    """Trajectory-level roll-up of a run's energy snapshots."""

    snapshots: List[EnergySnapshot]
    E_sup: np.ndarray  # running sup of E_total
    D_integral: float
    monotone_flag: bool
    E0: float
    v_min: float
    v_max: float

    def times(self) -> np.ndarray:
        return np.array([e.t for e in self.snapshots])


def build_energy_report(artifact, p: FluidParams, grid: Grid1D,
                        energy_rows: Optional[List[EnergySnapshot]] = None) -> EnergyReport:
    """Assemble an EnergyReport from a run artifact.

    When the artifact already carries per-step energy rows they are used as
    is; otherwise snapshots are evaluated at the recorded states.
    """
    rows = energy_rows if energy_rows is not None else artifact.energy
    if rows is None:
        rows = [energy_snapshot(s, p, grid) for s in artifact.states]
    ts = np.array([e.t for e in rows])
    totals = np.array([e.E_total for e in rows])
    e_phys = np.array([e.e_phys for e in rows])
    d_vals = np.array([e.D_value for e in rows])
    E_sup = np.maximum.accumulate(totals)
    D_integral = float(np.trapezoid(d_vals, ts)) if len(ts) > 1 else 0.0
    monotone = bool(np.all(np.diff(e_phys) <= 0.0))
    v_min = min(float(np.min(s.v)) for s in artifact.states)
    v_max = max(float(np.max(s.v)) for s in artifact.states)
    return EnergyReport(list(rows), E_sup, D_integral, monotone, float(totals[0]), v_min, v_max)


def dissipation_residual(energy_rows: Sequence[EnergySnapshot]) -> Tuple[np.ndarray, np.ndarray]:
    """r(t_k) = (e(t_{k+1}) - e(t_{k-1})) / (t_{k+1} - t_{k-1}) + diss(t_k).

    Defined at interior snapshot indices; r tracks the defect of the energy
    identity, an exact identity at eps = 0 up to discretization error.
    """
    if len(energy_rows) < 3:
        raise ValueError("dissipation residual needs at least 3 snapshots")
    ts = np.array([row.t for row in energy_rows])
    e = np.array([row.e_phys for row in energy_rows])
    diss = np.array([row.diss_rate for row in energy_rows])
    r = (e[2:] - e[:-2]) / (ts[2:] - ts[:-2]) + diss[1:-1]
    return ts[1:-1], r


def relaxation_residual_series(artifact, p: FluidParams, grid: Grid1D):
    """Per-snapshot L2 norm of S - mu u_x / v and its L2-in-time integral."""
    ts = artifact.times()
    vals = np.array(
        [l2_norm(s.S - p.mu * diff_x(s.u, grid.dx) / s.v, grid.dx) for s in artifact.states]
    )
    integral = float(np.sqrt(np.trapezoid(vals * vals, ts))) if len(ts) > 1 else 0.0
    return ts, vals, integral


@dataclass
class AprioriVerdict:
    status: str  # PASS, FAIL, INVALID, or VACUOUS
    ratios: list
    reason: str


def apriori_check(family: Sequence[Tuple[float, EnergyReport]],
                  spread_limit: float = 0.5) -> AprioriVerdict:
    """Amplitude-scaling check of the a-priori estimate.

    For each (delta, report) the ratio (sup E + integral of D) / E(0) is
    formed; the estimate predicts a delta-independent bound, so the family
    passes when the ratios stay within spread_limit of each other.  Runs that
    leave the moderate regime v in [3/4, 5/4] make the comparison meaningless
    and yield INVALID; an equilibrium family (E(0) = 0) is VACUOUS.
    """
    if len(family) < 3:
        raise ValueError("apriori_check needs at least 3 amplitudes")
    ratios = []
    for delta, rep in family:
        if rep.v_min < REGIME_V_MIN or rep.v_max > REGIME_V_MAX:
            return AprioriVerdict(
                "INVALID", [],
                f"run at delta = {delta} left the regime "
                f"[{REGIME_V_MIN}, {REGIME_V_MAX}]: v in [{rep.v_min}, {rep.v_max}]",
            )
        if rep.E0 == 0.0:
            return AprioriVerdict("VACUOUS", [], f"run at delta = {delta} has E(0) = 0")
        ratios.append((float(rep.E_sup[-1]) + rep.D_integral) / rep.E0)
    spread = (max(ratios) - min(ratios)) / min(ratios)
    status = "PASS" if spread < spread_limit else "FAIL"
    return AprioriVerdict(status, ratios, f"ratio spread {spread:.3f} vs limit {spread_limit}")
