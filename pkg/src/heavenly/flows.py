"""Time integration of the reduced MP flows for v = u_x, an implicit-solution
oracle for the y-flow, and residuals of the Plebanski flow pair."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .grid import Grid, GridError, GridFunction, spectral_derivative

CFL_BOUND = 0.5


class Flow(str, Enum):
    MP_Y = "mp-y"
    MP_T = "mp-t"
    PLEBANSKI_T = "plebanski-t"
    PLEBANSKI_Y = "plebanski-y"


class BlowupDetected(RuntimeError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class FlowSpec:
    flow: Flow
    grid: Grid
    dt: float
    T: float
    dealias: bool = False

    def __post_init__(self):
        object.__setattr__(self, "flow", Flow(self.flow))
        if self.dt <= 0 or self.T < 0:
            raise ValueError("dt must be positive and T non-negative")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def wave_speed(self, v: np.ndarray) -> float:
        m = float(np.abs(v).max())
        return 3.0 * m if self.flow is Flow.MP_Y else 7.5 * m * m

    def cfl(self, v: np.ndarray) -> float:
        """dt times the largest wave speed over the grid spacing."""
        return self.dt * self.wave_speed(v) / self.grid.spacing[0]


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[GridFunction] = field(default_factory=list)
    H0: list[float] = field(default_factory=list)

    def append(self, t: float, v: GridFunction):
        self.times.append(float(t))
        self.states.append(v)
        self.H0.append(conserved_H0(v))

    @property
    def final(self) -> GridFunction:
        return self.states[-1]

    def relative_drift(self, monitor: Callable[[GridFunction], float]) -> float:
        """max |m(t) - m(0)| / max(|m(0)|, scale), scale the same monitor applied to |v0|."""
        vals = np.array([monitor(s) for s in self.states])
        v0 = self.states[0]
        scale = max(abs(vals[0]), abs(monitor(GridFunction(v0.grid, np.abs(v0.values)))), 1e-300)
        return float(np.abs(vals - vals[0]).max() / scale)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "H0", "min_v", "max_v"])
            for t, h, s in zip(self.times, self.H0, self.states):
                w.writerow([f"{t:.10g}", f"{h:.17g}", f"{s.values.min():.17g}", f"{s.values.max():.17g}"])


def _dealias(values: np.ndarray) -> np.ndarray:
    n = values.shape[-1]
    vh = np.fft.rfft(values)
    vh[n // 3 + 1 :] = 0.0
    return np.fft.irfft(vh, n)


def _rhs_values(flow: Flow, v: np.ndarray, grid: Grid, dealias: bool) -> np.ndarray:
    vx = spectral_derivative(v, grid)
    if flow is Flow.MP_Y:
        out = -3.0 * v * vx
    elif flow is Flow.MP_T:
        out = -7.5 * v * v * vx
    else:
        raise ValueError(f"{flow.value} is checked as a residual, not integrated")
    return _dealias(out) if dealias else out


def hierarchy_rhs(flow, v: GridFunction, dealias: bool = False) -> GridFunction:
    """v_y = -3 v v_x (mp-y) or v_t = -15/2 v^2 v_x (mp-t)."""
    return GridFunction(v.grid, _rhs_values(Flow(flow), v.values, v.grid, dealias))


def evolve(flow, v0: GridFunction, T: float, dt: float, dealias: bool = False, store_every: int = 1) -> Trajectory:
    """Classical RK4 with fixed step; the last step is shortened to land on T."""
    spec = FlowSpec(flow, v0.grid, dt, T, dealias)
    grid = v0.grid
    if grid.dim != 1:
        raise GridError("the MP flows live on the 1-torus")
    v = np.array(v0.values, dtype=float)
    limit = 1e3 * max(float(np.abs(spectral_derivative(v, grid)).max()), 1e-12)
    traj = Trajectory()
    traj.append(0.0, GridFunction(grid, v))
    f = lambda w: _rhs_values(spec.flow, w, grid, dealias)  # noqa: E731
    t = 0.0
    step = 0
    while t < T - 1e-12 * max(T, 1.0):
        h = min(dt, T - t)
        k1 = f(v)
        k2 = f(v + 0.5 * h * k1)
        k3 = f(v + 0.5 * h * k2)
        k4 = f(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        step += 1
        if not np.all(np.isfinite(v)) or np.abs(spectral_derivative(v, grid)).max() > limit:
            raise BlowupDetected(f"gradient blow-up at t={t:.6g}")
        if step % store_every == 0 or t >= T - 1e-12 * max(T, 1.0):
            traj.append(t, GridFunction(grid, v))
    return traj


def characteristics_solution(v0: Callable[[np.ndarray], np.ndarray], y: float, x, dv0=None, tol: float = 1e-12, max_iter: int = 50):
    """Solve v = v0(x - 3 v y) by Newton's method (the mp-y flow along characteristics).

    ``dv0`` is the derivative of ``v0``; a central difference is used when omitted.
    """
    x = np.asarray(x, dtype=float)
    if dv0 is None:
        dv0 = lambda s: (v0(s + 1e-6) - v0(s - 1e-6)) / 2e-6  # noqa: E731
    v = np.asarray(v0(x), dtype=float) * np.ones_like(x)
    if y == 0:
        return v if v.ndim else float(v)
    for _ in range(max_iter):
        arg = x - 3.0 * v * y
        F = v - v0(arg)
        J = 1.0 + 3.0 * y * dv0(arg)
        if np.any(J <= 0):
            raise NoConvergence("characteristics have crossed")
        dv = F / J
        v = v - dv
        if np.abs(dv).max() <= tol * max(1.0, float(np.abs(v).max())):
            return v if v.ndim else float(v)
    raise NoConvergence("Newton iteration did not converge")


def conserved_H0(v: GridFunction) -> float:
    """int v^3 dx"""
    return float(np.sum(v.values**3) * v.grid.cell_volume)


def momentum(v: GridFunction) -> float:
    return float(np.sum(v.values) * v.grid.cell_volume)


def energy(v: GridFunction) -> float:
    return float(np.sum(v.values**2) * v.grid.cell_volume)


def catastrophe_time(dv0_max: float) -> float:
    """Characteristic-crossing bound 1 / (3 max v0') for the mp-y flow."""
    return np.inf if dv0_max <= 0 else 1.0 / (3.0 * dv0_max)


def plebanski_flow_residual(u: GridFunction, u_t: GridFunction, u_y: GridFunction) -> tuple[GridFunction, GridFunction]:
    """Residuals of (u_x2 - u_x1)_t = M and (u_x1 - u_x2)_y = M, M = u_11 u_22 - u_12^2.

    ``u_t`` and ``u_y`` are the supplied time and y derivatives of u.
    """
    grid = u.grid
    if grid.dim != 2:
        raise GridError("the Plebanski flows live on the 2-torus")
    for f in (u_t, u_y):
        if f.grid != grid:
            raise GridError("grid mismatch")

    def d(a, axis, order=1):
        return spectral_derivative(a, grid, axis, order)

    uv = u.values
    u12 = d(d(uv, 0), 1)
    monge = d(uv, 0, 2) * d(uv, 1, 2) - u12**2
    r_t = d(u_t.values, 1) - d(u_t.values, 0) - monge
    r_y = d(u_y.values, 0) - d(u_y.values, 1) - monge
    return GridFunction(grid, r_t), GridFunction(grid, r_y)
