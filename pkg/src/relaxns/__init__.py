"""Numerical laboratory for 1D compressible flow with a relaxed stress law.

Mass form on [0, 1] with u = 0 at both walls:

    v_t = u_x
    u_t + p(v)_x = S_x
    tau (S_t + eps b(x) S_x) + v S = mu u_x,   b(x) = 2x - 1

with p(v) = a v^(-gamma).  tau > 0 gives the hyperbolic relaxed system;
the tau = 0 limit is the classical parabolic system with viscous stress
mu u_x / v, integrated by the companion solver for comparison studies.
"""

from .artifacts import RunArtifact, RunConfig
from .core import (FluidParams, Grid1D, NumericsError, PositivityError, State,
                   enthalpy, max_char_speed, pressure)
from .diagnostics import (EnergyReport, EnergySnapshot, apriori_check,
                          build_energy_report, energy_snapshot)
from .experiments import (boundedness_proxy, eps_sweep, execute, fit_order,
                          mms_convergence, tau_sweep)
from .initial_data import compatibility_report, make_initial_data
from .parabolic import ParabolicState, run_parabolic
from .relaxed import SchemeConfig, run, step

__all__ = [
    "FluidParams", "Grid1D", "State", "ParabolicState",
    "PositivityError", "NumericsError",
    "pressure", "enthalpy", "max_char_speed",
    "RunConfig", "RunArtifact",
    "SchemeConfig", "run", "step", "run_parabolic",
    "EnergySnapshot", "EnergyReport", "energy_snapshot", "build_energy_report",
    "apriori_check",
    "make_initial_data", "compatibility_report",
    "execute", "fit_order", "mms_convergence", "tau_sweep", "eps_sweep",
    "boundedness_proxy",
]

__version__ = "0.1.0"
