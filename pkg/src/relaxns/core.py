"""Model data and constitutive closures shared by both solvers.

The system lives on the unit interval in mass coordinates.  A state is the
triple (v, u, S): specific volume, velocity, and the relaxed viscous stress.
The pressure law is the gamma-law p(v) = a * v**(-gamma), and the stress
relaxes toward mu * u_x / v on the time scale tau / v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class PositivityError(RuntimeError):
    """Raised when the specific volume reaches the positivity floor.

    Carries the offending state (if available) so a driver can emit a
    diagnostic artifact instead of a bare stack trace.
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class NumericsError(RuntimeError):
    """Raised when a step produces non-finite values."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class FluidParams:
    """Material and regularization parameters.

    tau = 0 is legal only for the parabolic limit solver; every relaxed-system
    operation requires tau > 0.  The boundary transport weight epsilon is
    capped at 1/4, which is the largest value the energy estimate absorbs.
    """

    a: float = 1.0
    gamma: float = 2.0
    mu: float = 1.0
    tau: float = 0.1
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"pressure coefficient a must be positive, got {self.a}")
        if not self.gamma > 1:
            raise ValueError(f"adiabatic exponent must exceed 1, got {self.gamma}")
        if not self.mu > 0:
            raise ValueError(f"viscosity mu must be positive, got {self.mu}")
        if not self.tau >= 0:
            raise ValueError(f"relaxation time tau must be >= 0, got {self.tau}")
        if not 0 <= self.epsilon <= 0.25:
            raise ValueError(
                f"boundary transport weight epsilon must lie in [0, 1/4], got {self.epsilon}"
            )

    def require_relaxed(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive for the relaxed system")


@dataclass(frozen=True)
class Grid1D:
    """Uniform node-centered grid on [0, 1] with n >= 8 nodes.

    b is the odd transport weight 2x - 1.  It is generated from integer
    arithmetic so that b[n-1-i] == -b[i] holds exactly in floating point,
    which keeps mirror-symmetric data exactly symmetric under the scheme.
    """

    n: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs at least 8 nodes, got {self.n}")
        m = self.n - 1
        object.__setattr__(self, "dx", 1.0 / m)
        object.__setattr__(self, "x", np.linspace(0.0, 1.0, self.n))
        i = np.arange(self.n, dtype=np.float64)
        object.__setattr__(self, "b", (2.0 * i - m) / m)


@dataclass
class State:
    """Nodal fields of the relaxed system at one instant."""

    t: float
    v: np.ndarray
    u: np.ndarray
    S: np.ndarray

    def copy(self) -> "State":
        return State(self.t, self.v.copy(), self.u.copy(), self.S.copy())

    def validate(self, grid: Grid1D):
        for name, f in (("v", self.v), ("u", self.u), ("S", self.S)):
            if f.shape != (grid.n,):
                raise ValueError(f"field {name} has shape {f.shape}, expected ({grid.n},)")
        if np.min(self.v) <= 0:
            raise PositivityError(f"initial v is not positive (min {np.min(self.v)})", self)


def pressure(v, p: FluidParams):
    """Gamma-law pressure p(v) = a * v**(-gamma).  Rejects v <= 0."""
    v = np.asarray(v, dtype=np.float64)
    if np.any(v <= 0):
        raise ValueError("pressure requires v > 0")
    return p.a * v ** (-p.gamma)


def dpressure(v, p: FluidParams):
    """Derivative p'(v) = -a * gamma * v**(-gamma-1); negative for v > 0."""
    v = np.asarray(v, dtype=np.float64)
    if np.any(v <= 0):
        raise ValueError("dpressure requires v > 0")
    return -p.a * p.gamma * v ** (-p.gamma - 1.0)


def enthalpy(v, p: FluidParams):
    """Pressure primitive h(v) = a * (v**(1-gamma) - 1) / (1 - gamma).

    Normalized so h(1) = 0, and h'(v) = p(v).  Defined for gamma > 1 only;
    the gamma = 1 (isothermal) branch is excluded by FluidParams.
    """
    v = np.asarray(v, dtype=np.float64)
    if np.any(v <= 0):
        raise ValueError("enthalpy requires v > 0")
    return p.a * (v ** (1.0 - p.gamma) - 1.0) / (1.0 - p.gamma)


def boundary_weight(x):
    """Transport weight b(x) = 2x - 1: -1 at the left wall, +1 at the right."""
    return 2.0 * np.asarray(x, dtype=np.float64) - 1.0


def relax_exact_update(S, ux, v, dt, p: FluidParams):
    """Advance tau * S_t = mu * ux - v * S exactly over dt with frozen (ux, v).

    The closed form S* + (S - S*) * exp(-v dt / tau) with S* = mu * ux / v is
    unconditionally stable and exact for frozen coefficients, so the
    relaxation substep never constrains the step size as tau -> 0.
    """
    p.require_relaxed()
    if dt < 0:
        raise ValueError("relax_exact_update requires dt >= 0")
    v = np.asarray(v, dtype=np.float64)
    if np.any(v <= 0):
        raise PositivityError("relax_exact_update requires v > 0")
    S_star = p.mu * np.asarray(ux, dtype=np.float64) / v
    return S_star + (np.asarray(S, dtype=np.float64) - S_star) * np.exp(-v * dt / p.tau)


def quasilinear_matrix(v: float, p: FluidParams) -> np.ndarray:
    """(A0)^-1 A1 of the first-order system at one value of v.

    A0 = diag{1, 1, tau} and A1 = [[0,-1,0], [p'(v),0,-1], [0,-mu,0]].  Kept
    separate from max_char_speed so the closed-form speed can be checked
    against a dense eigenvalue solve.
    """
    p.require_relaxed()
    pd = float(dpressure(v, p))
    return np.array(
        [
            [0.0, -1.0, 0.0],
            [pd, 0.0, -1.0],
            [0.0, -p.mu / p.tau, 0.0],
        ]
    )


def max_char_speed(state: State, p: FluidParams) -> float:
    """Largest signal speed over the grid, plus the epsilon transport speed.

    The nonzero characteristic speeds are +/- sqrt(mu/tau - p'(v)); the
    epsilon boundary transport adds at most epsilon * |b| <= epsilon.
    """
    p.require_relaxed()
    v = state.v
    if np.min(v) <= 0:
        raise PositivityError("max_char_speed requires v > 0", state)
    speeds = np.sqrt(p.mu / p.tau + p.a * p.gamma * v ** (-p.gamma - 1.0))
    return float(np.max(speeds)) + p.epsilon
