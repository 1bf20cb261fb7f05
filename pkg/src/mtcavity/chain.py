"""Damped, forced continuum dimer chain

    u_tt = u_xx - gamma * u_t - U'(u) + f

in dimensionless units (unit mass, unit wave speed) on a uniform grid
centred on x = 0. Time stepping is velocity-form leapfrog (kick-drift-kick)
with the damping term treated trapezoidally, which keeps the undamped limit
symplectic and is unconditionally stable in gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Polynomial, poly_eval
from .errors import DegenerateInput, NoCrossing, NumericalBlowup, ValidationError

BLOWUP = 1e6
BOUNDARIES = ("fixed", "zero-gradient")


@dataclass(frozen=True)
class ChainParams:
    potential: Polynomial
    gamma: float = 0.0
    force: float = 0.0
    dx: float = 0.01
    dt: float = 0.005
    boundary: str = "fixed"

    def __post_init__(self):
        if not self.dx > 0:
            raise ValidationError("dx must be positive", "dx")
        if not self.dt > 0:
            raise ValidationError("dt must be positive", "dt")
        if self.dt > 0.5 * self.dx:
            raise ValidationError(f"CFL violated: dt={self.dt!r} > 0.5*dx={0.5 * self.dx!r}", "dt")
        if not self.gamma >= 0:
            raise ValidationError("gamma must be non-negative", "gamma")
        if self.boundary not in BOUNDARIES:
            raise ValidationError(f"boundary must be one of {BOUNDARIES}", "boundary")

    @property
    def dpotential(self) -> Polynomial:
        return self.potential.derivative()


@dataclass
class FieldState:
    u: np.ndarray
    udot: np.ndarray
    t: float = 0.0
    dx: float = 0.01

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.udot = np.asarray(self.udot, dtype=float)
        if self.u.shape != self.udot.shape or self.u.ndim != 1 or self.u.size < 8:
            raise DegenerateInput("u and udot must be equal-length 1-D arrays with at least 8 nodes")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.udot))):
            raise DegenerateInput("field state must be finite")

    @property
    def x(self) -> np.ndarray:
        return grid_positions(self.u.size, self.dx)

    def copy(self) -> "FieldState":
        return FieldState(self.u.copy(), self.udot.copy(), self.t, self.dx)


def grid_positions(n_nodes: int, dx: float) -> np.ndarray:
    return (np.arange(n_nodes) - 0.5 * (n_nodes - 1)) * dx


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    fronts: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    maxu: list = field(default_factory=list)
    dumps: list = field(default_factory=list)  # (t, x, u, udot)
    level: float = 0.0
    final: Optional[FieldState] = None

    def record(self, t, front, energy_value, max_abs_u):
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must increase")
        self.times.append(t)
        self.fronts.append(front)
        self.energies.append(energy_value)
        self.maxu.append(max_abs_u)

    def rows(self):
        return list(zip(self.times, self.fronts, self.energies, self.maxu))

    def front_speed(self, skip: float = 0.0) -> float:
        """Least-squares slope of front position against time."""
        t = np.asarray(self.times)
        xf = np.asarray(self.fronts)
        keep = np.isfinite(xf) & (t >= t[0] + skip)
        if keep.sum() < 2:
            return math.nan
        return float(np.polyfit(t[keep], xf[keep], 1)[0])

    def energy_drift(self) -> float:
        e = np.asarray(self.energies)
        ref = max(abs(e[0]), 1e-300)
        return float(np.max(np.abs(e - e[0])) / ref)


def init_from_profile(profile, n_nodes: int, dx: float, center: float = 0.0) -> FieldState:
    """Sample a kink (or a constant) on the grid, moving rigidly at its velocity.

    ``profile`` is a KinkProfile, a float (uniform state) or any callable
    ``f(xi, nu)``; the time derivative follows from u_t = -v * u_xi.
    """
    if n_nodes < 8 or not dx > 0:
        raise DegenerateInput("need n_nodes >= 8 and dx > 0")
    x = grid_positions(n_nodes, dx)
    if isinstance(profile, (int, float)):
        u = np.full(n_nodes, float(profile))
        udot = np.zeros(n_nodes)
    else:
        xi = x - center
        v = getattr(profile, "velocity", 0.0)
        with np.errstate(all="ignore"):
            u = np.asarray(profile(xi, 0), dtype=float)
            udot = -v * np.asarray(profile(xi, 1), dtype=float) if v != 0.0 else np.zeros(n_nodes)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(udot))):
            raise DegenerateInput("profile is undefined somewhere on the grid")
    return FieldState(u, udot, 0.0, dx)


def _acceleration(u, params: ChainParams):
    lap = np.empty_like(u)
    inv = 1.0 / (params.dx * params.dx)
    lap[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) * inv
    if params.boundary == "zero-gradient":
        lap[0] = (u[1] - u[0]) * inv
        lap[-1] = (u[-2] - u[-1]) * inv
    else:
        lap[0] = lap[-1] = 0.0
    acc = lap - poly_eval(params.dpotential, u) + params.force
    if params.boundary == "fixed":
        acc[0] = acc[-1] = 0.0
    return acc


def step(state: FieldState, params: ChainParams) -> FieldState:
    """Advance one time step (kick-drift-kick, trapezoidal damping)."""
    dt, g = params.dt, params.gamma
    u, v = state.u, state.udot
    if params.boundary == "fixed":
        v = v.copy()
        v[0] = v[-1] = 0.0
    vh = v + 0.5 * dt * (_acceleration(u, params) - g * v)
    un = u + dt * vh
    vn = (vh + 0.5 * dt * _acceleration(un, params)) / (1.0 + 0.5 * g * dt)
    t = state.t + dt
    if not (np.all(np.abs(un) <= BLOWUP) and np.all(np.abs(vn) <= BLOWUP)):
        raise NumericalBlowup("field exceeded 1e6", t)
    out = FieldState.__new__(FieldState)
    out.u, out.udot, out.t, out.dx = un, vn, t, state.dx
    return out


def measure_front(state: FieldState, level: float) -> float:
    """Position of the first crossing of ``level``, linearly interpolated."""
    d = state.u - level
    x = state.x
    hit = np.nonzero(d == 0.0)[0]
    cross = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    first_hit = hit[0] if hit.size else None
    first_cross = cross[0] if cross.size else None
    if first_hit is None and first_cross is None:
        raise NoCrossing(f"field never crosses level {level!r}")
    if first_cross is None or (first_hit is not None and first_hit <= first_cross):
        return float(x[first_hit])
    i = first_cross
    frac = d[i] / (d[i] - d[i + 1])
    return float(x[i] + frac * state.dx)


def energy(state: FieldState, params: ChainParams) -> float:
    """Trapezoid integral of udot^2/2 + u_x^2/2 + U(u) - f*u."""
    ux = np.gradient(state.u, state.dx)
    dens = 0.5 * state.udot**2 + 0.5 * ux**2 + poly_eval(params.potential, state.u) - params.force * state.u
    return float(state.dx * (dens.sum() - 0.5 * (dens[0] + dens[-1])))


def _front_or_nan(state, level):
    try:
        return measure_front(state, level)
    except NoCrossing:
        return math.nan


def evolve(
    state: FieldState,
    params: ChainParams,
    t_final: float,
    stride: int = 10,
    level: Optional[float] = None,
    dump_stride: int = 0,
) -> Trajectory:
    """Integrate to ``t_final`` recording diagnostics every ``stride`` steps.

    The step count is ceil((t_final - t0)/dt) and the step is shrunk so the
    run lands exactly on ``t_final``. ``level`` defaults to the mean of the
    two end values of the initial field.
    """
    if not t_final > state.t:
        raise DegenerateInput("t_final must exceed the current time")
    if stride < 1:
        raise DegenerateInput("stride must be at least 1")
    span = t_final - state.t
    n_steps = max(1, math.ceil(span / params.dt - 1e-9))
    dt = span / n_steps
    if dt != params.dt:
        params = ChainParams(params.potential, params.gamma, params.force, params.dx, dt, params.boundary)
    if level is None:
        level = 0.5 * (state.u[0] + state.u[-1])

    traj = Trajectory(level=level)
    t0 = state.t
    cur = state

    def snap(s):
        traj.record(s.t, _front_or_nan(s, level), energy(s, params), float(np.max(np.abs(s.u))))

    def dump(s):
        traj.dumps.append((s.t, s.x, s.u.copy(), s.udot.copy()))

    snap(cur)
    if dump_stride:
        dump(cur)
    for k in range(1, n_steps + 1):
        try:
            cur = step(cur, params)
        except NumericalBlowup as exc:
            raise NumericalBlowup("field exceeded 1e6", exc.time) from None
        cur.t = t0 + k * dt
        if k % stride == 0 or k == n_steps:
            snap(cur)
        if dump_stride and (k % dump_stride == 0 or k == n_steps):
            dump(cur)
    traj.final = cur
    return traj
