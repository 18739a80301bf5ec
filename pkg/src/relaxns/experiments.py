"""Experiment drivers: single runs, convergence study, parameter sweeps.

These functions wire together initial data, solvers, and diagnostics, and
return plain result objects whose rows are JSON-ready dicts.  Sweep verdicts
are pure functions of the rows, so a saved summary can be re-checked without
re-running anything.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import diagnostics, mms, parabolic, relaxed
from .artifacts import RunArtifact, RunConfig
from .core import FluidParams, Grid1D
from .initial_data import make_initial_data, parabolic_initial_data
from .operators import l2_norm, trapz


def _scheme_config(config: RunConfig, record_times=None) -> relaxed.SchemeConfig:
    forcing = None
    if config.forcing == "mms":
        if config.solver == "relaxed":
            forcing = mms.forcing_relaxed(config.params)
        else:
            forcing = mms.forcing_parabolic(config.params)
    return relaxed.SchemeConfig(
        cfl=config.cfl,
        forcing=forcing,
        record_every=config.record_every,
        record_times=record_times,
    )


def execute(
    config: RunConfig,
    record_times: Optional[Sequence[float]] = None,
    energy_mode: str = "snapshots",
    on_step=None,
) -> RunArtifact:
    """Run one configuration and attach the energy table.

    energy_mode: "snapshots" evaluates the functionals at the recorded
    states, "per-step" at every accepted step (needed for per-step
    monotonicity and time integrals of D), "none" skips them.  With
    forcing = "mms" the initial data is the manufactured state at t = 0,
    whatever ic.family says.
    """
    if energy_mode not in ("snapshots", "per-step", "none"):
        raise ValueError(f"unknown energy_mode {energy_mode!r}")
    p = config.params
    grid = Grid1D(config.n)
    cfg = _scheme_config(config, record_times)

    energy_rows: List[diagnostics.EnergySnapshot] = []
    if config.solver == "relaxed":
        if config.forcing == "mms":
            state0 = mms.exact_state(0.0, grid, p)
        else:
            state0 = make_initial_data(config.ic_family, config.ic_delta, grid, p,
                                       path=config.ic_path)
        snap_fn = lambda s: diagnostics.energy_snapshot(s, p, grid)
        runner = relaxed.run
    else:
        if config.forcing == "mms":
            state0 = mms.exact_parabolic_state(0.0, grid)
        else:
            full = make_initial_data(config.ic_family, config.ic_delta, grid, p,
                                     path=config.ic_path)
            state0 = parabolic_initial_data(full)
        snap_fn = lambda s: diagnostics.energy_snapshot_parabolic(s, p, grid)
        runner = parabolic.run_parabolic

    callbacks = []
    if energy_mode == "per-step" and config.forcing == "none":
        energy_rows.append(snap_fn(state0))
        callbacks.append(lambda s: energy_rows.append(snap_fn(s)))
    if on_step is not None:
        callbacks.append(on_step)
    cb = None
    if callbacks:
        def cb(s):
            for f in callbacks:
                f(s)

    artifact = runner(state0, config.t_end, p, grid, cfg, on_step=cb)
    artifact.config = config
    if energy_mode == "per-step" and config.forcing == "none":
        artifact.energy = energy_rows
    elif energy_mode == "snapshots" and config.forcing == "none":
        artifact.energy = [snap_fn(s) for s in artifact.states]
    return artifact


def mass_series(artifact: RunArtifact, grid: Grid1D) -> np.ndarray:
    """Trapezoid integral of v at each recorded snapshot."""
    return np.array([trapz(s.v, grid.dx) for s in artifact.states])


def fit_order(dxs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    dxs = np.asarray(dxs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0):
        raise ValueError("fit_order requires positive errors")
    return float(np.polyfit(np.log(dxs), np.log(errors), 1)[0])


@dataclass
class MmsResult:
    rows: List[dict]
    order: float
    verdict: str  # PASS if the error sequence is strictly decreasing

    def errors(self) -> np.ndarray:
        return np.array([r["err_total"] for r in self.rows])


def mms_convergence(
    solver: str,
    p: FluidParams,
    base_n: int = 65,
    levels: int = 4,
    cfl: float = 0.4,
    t_end: float = mms.T_END_DEFAULT,
) -> MmsResult:
    """Grid-refinement study against the manufactured solution.

    Node counts follow n -> 2n - 1 so dx halves each level.  The reported
    order is the least-squares slope of the composite L2 error.
    """
    if levels < 2:
        raise ValueError("mms_convergence needs at least 2 levels")
    rows = []
    n = base_n
    for _ in range(levels):
        config = RunConfig(solver=solver, params=p, n=n, t_end=t_end, cfl=cfl,
                           record_every=10 ** 9, forcing="mms")
        art = execute(config, energy_mode="none")
        if art.status != "completed":
            raise RuntimeError(f"MMS run at n = {n} aborted: {art.abort_reason}")
        grid = Grid1D(n)
        final = art.final
        if solver == "relaxed":
            ref = mms.exact_state(t_end, grid, p)
            errs = {
                "err_v": l2_norm(final.v - ref.v, grid.dx),
                "err_u": l2_norm(final.u - ref.u, grid.dx),
                "err_S": l2_norm(final.S - ref.S, grid.dx),
            }
        else:
            ref = mms.exact_parabolic_state(t_end, grid)
            errs = {
                "err_v": l2_norm(final.v - ref.v, grid.dx),
                "err_u": l2_norm(final.u - ref.u, grid.dx),
            }
        total = float(np.sqrt(sum(e ** 2 for e in errs.values())))
        # the manufactured fields have constant mean v, so the discrete mass
        # audit applies to forced runs too
        drift = abs(trapz(final.v, grid.dx) - trapz(art.states[0].v, grid.dx))
        rows.append({"n": n, "dx": grid.dx, **errs, "err_total": total,
                     "mass_drift": drift})
        n = 2 * n - 1
    errors = [r["err_total"] for r in rows]
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    order = fit_order([r["dx"] for r in rows], errors)
    return MmsResult(rows, order, "PASS" if monotone else "FAIL")


@dataclass
class SweepResult:
    rows: List[dict]
    verdict: Optional[str]
    slope: Optional[float]
    artifacts: dict  # param value -> RunArtifact, plus "reference"

    def metric(self, key: str) -> np.ndarray:
        return np.array([r[key] for r in self.rows])


def _states_by_time(artifact: RunArtifact) -> dict:
    return {s.t: s for s in artifact.states}


def _sup_distance(art_a: RunArtifact, art_b: RunArtifact, grid: Grid1D,
                  times: Sequence[float], with_stress: bool) -> float:
    by_a, by_b = _states_by_time(art_a), _states_by_time(art_b)
    worst = 0.0
    for t in times:
        if t not in by_a or t not in by_b:
            raise KeyError(f"no shared snapshot at t = {t}")
        sa, sb = by_a[t], by_b[t]
        d2 = l2_norm(sa.v - sb.v, grid.dx) ** 2 + l2_norm(sa.u - sb.u, grid.dx) ** 2
        if with_stress:
            d2 += l2_norm(sa.S - sb.S, grid.dx) ** 2
        worst = max(worst, float(np.sqrt(d2)))
    return worst


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def tau_sweep(config: RunConfig, taus: Sequence[float], n_compare: int = 41) -> SweepResult:
    """Relaxation-limit study: distance to the parabolic reference per tau.

    Every relaxed run shares (v0, u0) and the grid with one parabolic
    reference run; distances are sup over shared snapshot times of the
    (v, u) L2 gap, exact cancellation of the common discretization error.
    Each row also carries the L2-in-time integral of the relaxation residual
    and the first time it falls below 10% of its initial value.  Verdict PASS
    means both distance columns decrease strictly as tau does (taus are
    processed in decreasing order); an aborted member makes it INVALID.
    """
    if config.solver != "relaxed":
        raise ValueError("tau_sweep drives the relaxed solver")
    if len(taus) == 0:
        raise ValueError("tau_sweep needs at least one tau")
    taus = sorted({float(t) for t in taus}, reverse=True)
    if taus[-1] <= 0:
        raise ValueError("tau values must be positive")
    grid = Grid1D(config.n)
    shared_times = np.linspace(0.0, config.t_end, n_compare)

    ref_config = dataclasses.replace(
        config,
        solver="parabolic",
        params=dataclasses.replace(config.params, tau=0.0),
    )
    reference = execute(ref_config, record_times=shared_times, energy_mode="none")
    if reference.status != "completed":
        raise RuntimeError(f"parabolic reference aborted: {reference.abort_reason}")

    rows, artifacts = [], {"reference": reference}
    any_abort = False
    for tau in taus:
        member = dataclasses.replace(config, params=dataclasses.replace(config.params, tau=tau))
        # dense early sampling so the initial-layer decay is resolved
        early = np.linspace(0.0, min(25.0 * tau, config.t_end), 51)
        times = np.union1d(shared_times, early)
        art = execute(member, record_times=times, energy_mode="none")
        artifacts[tau] = art
        if art.status != "completed":
            any_abort = True
            rows.append({"param_value": tau, "status": "aborted", "reason": art.abort_reason})
            continue
        dist = _sup_distance(art, reference, grid, shared_times, with_stress=False)
        ts, resid, integral = diagnostics.relaxation_residual_series(art, member.params, grid)
        drop = _first_drop_time(ts, resid, fraction=0.1)
        rows.append(
            {
                "param_value": tau,
                "status": "completed",
                "sup_distance": dist,
                "residual_time_integral": integral,
                "residual_initial": float(resid[0]),
                "residual_drop_time": drop,
            }
        )
    if any_abort:
        verdict, slope = "INVALID", None
    elif len(rows) < 2:
        verdict, slope = None, None
    else:
        dists = [r["sup_distance"] for r in rows]
        integrals = [r["residual_time_integral"] for r in rows]
        verdict = "PASS" if (_strictly_decreasing(dists) and _strictly_decreasing(integrals)) else "FAIL"
        slope = fit_order([r["param_value"] for r in rows], dists)
    return SweepResult(rows, verdict, slope, artifacts)


def _first_drop_time(ts: np.ndarray, resid: np.ndarray, fraction: float):
    if resid[0] <= 0.0:
        return 0.0
    below = np.nonzero(resid < fraction * resid[0])[0]
    return float(ts[below[0]]) if below.size else None


def eps_sweep(config: RunConfig, epsilons: Sequence[float], n_compare: int = 41) -> SweepResult:
    """Boundary-regularization study against the eps = 0 run.

    epsilons must contain 0 (the reference).  Distances are sup over shared
    snapshot times of the (v, u, S) composite L2 gap on the common grid.
    Verdict PASS means the distance decreases strictly as eps does.
    """
    if config.solver != "relaxed":
        raise ValueError("eps_sweep drives the relaxed solver")
    eps_sorted = sorted({float(e) for e in epsilons}, reverse=True)
    if 0.0 not in eps_sorted:
        raise ValueError("eps_sweep requires a 0 entry as the reference")
    for e in eps_sorted:
        if not 0 <= e <= 0.25:
            raise ValueError(f"epsilon {e} outside the admissible range [0, 1/4]")
    grid = Grid1D(config.n)
    shared_times = np.linspace(0.0, config.t_end, n_compare)

    runs = {}
    any_abort = False
    for e in eps_sorted:
        member = dataclasses.replace(config, params=dataclasses.replace(config.params, epsilon=e))
        art = execute(member, record_times=shared_times, energy_mode="none")
        runs[e] = art
        if art.status != "completed":
            any_abort = True
    reference = runs[0.0]
    rows = []
    for e in eps_sorted:
        if e == 0.0:
            continue
        art = runs[e]
        if art.status != "completed":
            rows.append({"param_value": e, "status": "aborted", "reason": art.abort_reason})
            continue
        if reference.status != "completed":
            rows.append({"param_value": e, "status": "no-reference", "reason": reference.abort_reason})
            continue
        dist = _sup_distance(art, reference, grid, shared_times, with_stress=True)
        rows.append({"param_value": e, "status": "completed", "sup_distance": dist})
    if any_abort:
        verdict, slope = "INVALID", None
    elif len(rows) < 2:
        verdict, slope = None, None
    else:
        dists = [r["sup_distance"] for r in rows]
        verdict = "PASS" if _strictly_decreasing(dists) else "FAIL"
        slope = fit_order([r["param_value"] for r in rows], dists)
    artifacts = dict(runs)
    artifacts["reference"] = reference
    return SweepResult(rows, verdict, slope, artifacts)


@dataclass
class BoundednessResult:
    verdict: str  # PASS, FAIL, or INVALID
    sup_ratio: float
    tail_fraction: float
    v_range: Tuple[float, float]
    reason: str
    artifact: RunArtifact
    report: diagnostics.EnergyReport


def boundedness_proxy(config: RunConfig, tail_start_fraction: float = 0.5) -> BoundednessResult:
    """Long-horizon stability proxy for the a-priori estimate.

    Runs with per-step energy tracking and checks (i) the composite H2 norm
    never exceeds 10x its initial value, (ii) the dissipation integral over
    the trailing half of the horizon is at most 10% of the total.  Leaving
    the moderate regime v in [3/4, 5/4], or aborting, yields INVALID.
    """
    grid = Grid1D(config.n)
    v_lo, v_hi = [np.inf], [-np.inf]

    def track(s):
        v_lo[0] = min(v_lo[0], float(np.min(s.v)))
        v_hi[0] = max(v_hi[0], float(np.max(s.v)))

    artifact = execute(config, energy_mode="per-step", on_step=track)
    state0 = artifact.states[0]
    v_lo[0] = min(v_lo[0], float(np.min(state0.v)))
    v_hi[0] = max(v_hi[0], float(np.max(state0.v)))
    report = diagnostics.build_energy_report(artifact, config.params, grid)
    v_range = (v_lo[0], v_hi[0])

    if artifact.status != "completed":
        return BoundednessResult("INVALID", np.nan, np.nan, v_range,
                                 f"run aborted: {artifact.abort_reason}", artifact, report)
    if v_range[0] < diagnostics.REGIME_V_MIN or v_range[1] > diagnostics.REGIME_V_MAX:
        return BoundednessResult(
            "INVALID", np.nan, np.nan, v_range,
            f"v range {v_range} left the regime "
            f"[{diagnostics.REGIME_V_MIN}, {diagnostics.REGIME_V_MAX}]",
            artifact, report)

    rows = artifact.energy
    h2 = np.sqrt(np.array([e.E_H2 for e in rows]))
    if h2[0] == 0.0:
        sup_ratio = 1.0 if np.max(h2) == 0.0 else np.inf
    else:
        sup_ratio = float(np.max(h2) / h2[0])
    ts = np.array([e.t for e in rows])
    d_vals = np.array([e.D_value for e in rows])
    total = float(np.trapezoid(d_vals, ts))
    t_split = config.t_end * tail_start_fraction
    tail_mask = ts >= t_split
    tail = float(np.trapezoid(d_vals[tail_mask], ts[tail_mask]))
    tail_fraction = tail / total if total > 0 else 0.0

    ok = sup_ratio <= 10.0 and tail_fraction <= 0.1
    reason = f"sup H2 ratio {sup_ratio:.3f} (limit 10), tail fraction {tail_fraction:.4f} (limit 0.1)"
    return BoundednessResult("PASS" if ok else "FAIL", sup_ratio, tail_fraction,
                             v_range, reason, artifact, report)


def apriori_family(config: RunConfig, deltas: Sequence[float]) -> Tuple[list, diagnostics.AprioriVerdict]:
    """Run the amplitude family and apply the a-priori ratio check."""
    family = []
    for delta in sorted(deltas):
        member = dataclasses.replace(config, ic_delta=float(delta))
        grid = Grid1D(member.n)
        art = execute(member, energy_mode="per-step")
        if art.status != "completed":
            verdict = diagnostics.AprioriVerdict(
                "INVALID", [], f"run at delta = {delta} aborted: {art.abort_reason}")
            return family, verdict
        report = diagnostics.build_energy_report(art, member.params, grid)
        family.append((float(delta), report))
    return family, diagnostics.apriori_check(family)
