"""Shared time-marching driver for the two solvers.

Handles snapshot cadence (by step count or by an explicit list of times),
exact landing on requested times and on t_end, and abort capture.  Solver
specifics enter only through dt_fn and step_fn.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .core import NumericsError, PositivityError

_REL_SNAP = 1e-12  # relative window for snapping a step onto a target time


def integrate(
    state0,
    t_end: float,
    dt_fn: Callable,
    step_fn: Callable,
    record_every: int = 1,
    record_times: Optional[Sequence[float]] = None,
    on_step: Optional[Callable] = None,
):
    """March state0 to t_end.  Returns (snapshots, status, abort_reason, n_steps).

    Snapshots always include the initial state and, on completion, the state
    at exactly t_end.  With record_times given, the cadence is purely
    time-based (each listed time is landed on exactly); otherwise every
    record_every-th accepted step is kept.  On a positivity or non-finite
    failure the last accepted state is appended and status is "aborted".
    """
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    snaps = [state0.copy()]
    if t_end <= state0.t:
        return snaps, "completed", None, 0

    if record_times is not None:
        targets = sorted({float(t) for t in record_times if state0.t < t <= t_end})
        if not targets or targets[-1] < t_end:
            targets.append(t_end)
    else:
        targets = None

    state = state0
    n_steps = 0
    target_idx = 0
    while state.t < t_end:
        dt = dt_fn(state)
        if not dt > 0:
            raise ValueError(f"non-positive step size {dt} at t = {state.t}")
        upcoming = t_end if targets is None else targets[target_idx]
        landed = False
        if state.t + dt >= upcoming - _REL_SNAP * max(1.0, abs(upcoming)):
            dt = upcoming - state.t
            landed = True
        try:
            state = step_fn(state, dt)
        except (PositivityError, NumericsError) as exc:
            if snaps[-1].t != state.t:
                snaps.append(state.copy())
            return snaps, "aborted", str(exc), n_steps
        n_steps += 1
        if landed:
            state.t = upcoming
        if on_step is not None:
            on_step(state)
        if targets is not None:
            if landed:
                snaps.append(state.copy())
                target_idx += 1
        elif n_steps % record_every == 0 or state.t >= t_end:
            snaps.append(state.copy())
    if snaps[-1].t != state.t:
        snaps.append(state.copy())
    return snaps, "completed", None, n_steps
