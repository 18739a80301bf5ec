"""Run configuration, artifact container, and on-disk formats.

CSV schemas are fixed:

    snapshots:  t,x,v,u,S           one row per (snapshot, node)
    energy:     t,e_phys,diss_rate,E_H2,E_dtH1,E_dt2L2,D_value,relax_residual

Floats are written with 17 significant digits so a read-back reproduces the
binary values exactly; identical configs therefore produce bit-identical
files.  For parabolic runs the S column carries the effective stress
mu * u_x / v of the limit system.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import FluidParams, State

SNAPSHOT_HEADER = "t,x,v,u,S"
ENERGY_HEADER = "t,e_phys,diss_rate,E_H2,E_dtH1,E_dt2L2,D_value,relax_residual"

_SOLVERS = ("relaxed", "parabolic")
_FAMILIES = ("equilibrium", "well-prepared-sine", "unprepared-sine", "custom-table")
_FORCINGS = ("none", "mms")


def fmt(x: float) -> str:
    """Format a float with 17 significant digits (binary round-trip safe)."""
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    """Everything needed to reproduce a single run."""

    solver: str = "relaxed"
    params: FluidParams = field(default_factory=FluidParams)
    n: int = 201
    t_end: float = 1.0
    cfl: float = 0.4
    record_every: int = 1
    ic_family: str = "well-prepared-sine"
    ic_delta: float = 0.01
    ic_path: Optional[str] = None
    forcing: str = "none"
    seed: int = 0
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.solver not in _SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}, expected one of {_SOLVERS}")
        if self.ic_family not in _FAMILIES:
            raise ValueError(
                f"unknown initial-data family {self.ic_family!r}, expected one of {_FAMILIES}"
            )
        if self.forcing not in _FORCINGS:
            raise ValueError(f"unknown forcing {self.forcing!r}, expected one of {_FORCINGS}")
        if self.ic_family == "custom-table" and not self.ic_path:
            raise ValueError("custom-table initial data requires ic.path")
        if not self.t_end >= 0:
            raise ValueError("t_end must be >= 0")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.ic_delta < 0:
            raise ValueError("ic.delta must be >= 0")

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "params": {
                "a": self.params.a,
                "gamma": self.params.gamma,
                "mu": self.params.mu,
                "tau": self.params.tau,
                "epsilon": self.params.epsilon,
            },
            "n": self.n,
            "t_end": self.t_end,
            "cfl": self.cfl,
            "record_every": self.record_every,
            "ic": {
                "family": self.ic_family,
                "delta": self.ic_delta,
                **({"path": self.ic_path} if self.ic_path else {}),
            },
            "forcing": self.forcing,
            "seed": self.seed,
            **({"output_dir": self.output_dir} if self.output_dir else {}),
        }

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        """Strict parse: any unknown key anywhere is an error."""
        if not isinstance(raw, dict):
            raise ValueError("config must be a JSON object")
        top = {
            "solver", "params", "n", "t_end", "cfl", "record_every",
            "ic", "forcing", "seed", "output_dir",
        }
        _reject_unknown(raw, top, "config")
        kwargs = {}
        if "params" in raw:
            pd = raw["params"]
            _reject_unknown(pd, {"a", "gamma", "mu", "tau", "epsilon"}, "config.params")
            kwargs["params"] = FluidParams(**pd)
        if "ic" in raw:
            ic = raw["ic"]
            _reject_unknown(ic, {"family", "delta", "path"}, "config.ic")
            if "family" in ic:
                kwargs["ic_family"] = ic["family"]
            if "delta" in ic:
                kwargs["ic_delta"] = float(ic["delta"])
            if "path" in ic:
                kwargs["ic_path"] = ic["path"]
        for key in ("solver", "forcing", "output_dir"):
            if key in raw:
                kwargs[key] = raw[key]
        for key, cast in (("n", int), ("t_end", float), ("cfl", float),
                          ("record_every", int), ("seed", int)):
            if key in raw:
                kwargs[key] = cast(raw[key])
        return RunConfig(**kwargs)

    @staticmethod
    def from_json(path: str) -> "RunConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
        return RunConfig.from_dict(raw)


def _reject_unknown(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise ValueError(f"{where} must be a JSON object")
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) in {where}: {sorted(unknown)}")


@dataclass
class RunArtifact:
    """A completed (or aborted) run: config echo, snapshots, energy table."""

    states: list
    status: str = "completed"
    abort_reason: Optional[str] = None
    config: Optional[RunConfig] = None
    energy: Optional[list] = None  # list of diagnostics.EnergySnapshot
    wall_time: float = 0.0
    n_steps: int = 0

    @property
    def final(self) -> State:
        return self.states[-1]

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def write_snapshot_csv(artifact: RunArtifact, grid, path: str):
    rows = [SNAPSHOT_HEADER]
    for s in artifact.states:
        t = fmt(s.t)
        for i in range(grid.n):
            rows.append(f"{t},{fmt(grid.x[i])},{fmt(s.v[i])},{fmt(s.u[i])},{fmt(s.S[i])}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def read_snapshot_csv(path: str):
    """Inverse of write_snapshot_csv: list of States plus the x grid."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    times = np.unique(data["t"])
    states, x = [], None
    for t in times:
        block = data[data["t"] == t]
        if x is None:
            x = block["x"].copy()
        states.append(State(float(t), block["v"].copy(), block["u"].copy(), block["S"].copy()))
    return states, x


def write_energy_csv(energy_rows, path: str):
    rows = [ENERGY_HEADER]
    for e in energy_rows:
        rows.append(
            ",".join(
                fmt(val)
                for val in (
                    e.t, e.e_phys, e.diss_rate, e.E_H2, e.E_dtH1,
                    e.E_dt2L2, e.D_value, e.relax_residual,
                )
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def read_energy_csv(path: str) -> np.ndarray:
    """Structured array with the energy schema columns."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return np.atleast_1d(data)


def write_meta_json(artifact: RunArtifact, path: str):
    meta = {
        "status": artifact.status,
        **({"reason": artifact.abort_reason} if artifact.abort_reason else {}),
        "n_steps": artifact.n_steps,
        "wall_time": artifact.wall_time,
        **({"config": artifact.config.to_dict()} if artifact.config else {}),
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_json(rows: list, verdict: str, slope, path: str, extra: Optional[dict] = None):
    """Sweep summary: array of {param_value, metrics...} plus verdict and slope."""
    payload = {"rows": rows, "verdict": verdict, "slope": slope}
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_run_artifact(artifact: RunArtifact, grid, out_dir: str):
    """Emit snapshots.csv, energy.csv (if present) and meta.json into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    write_snapshot_csv(artifact, grid, os.path.join(out_dir, "snapshots.csv"))
    if artifact.energy is not None:
        write_energy_csv(artifact.energy, os.path.join(out_dir, "energy.csv"))
    write_meta_json(artifact, os.path.join(out_dir, "meta.json"))
