"""FitzHugh-Nagumo medium: kinetics, time stepping, initial conditions.

du/dt = (u - u^3/3 - v)/eps + Du lap(u)
dv/dt = eps (u + beta - gamma v) + Dv lap(v)
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from .grid import BoundarySpec, Grid3, ScalarField, laplacian


@dataclass(frozen=True)
class ModelParams:
    eps: float = 0.3
    beta: float = 0.7
    gamma: float = 0.5
    Du: float = 1.0
    Dv: float = 0.0

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.Du < 0 or self.Dv < 0:
            raise ValueError("diffusion coefficients must be non-negative")


@dataclass
class MediumState:
    u: ScalarField
    v: ScalarField
    t: float = 0.0

    @property
    def grid(self):
        return self.u.grid

    def copy(self):
        return MediumState(self.u.copy(), self.v.copy(), self.t)


@dataclass(frozen=True)
class HopfICParams:
    lambda1: float = math.sqrt(2.0)
    lambda2: float = math.sqrt(0.5)
    offset: float = -0.4


class BlowUpError(RuntimeError):
    """Raised when the explicit step leaves the stable regime."""

    def __init__(self, msg, t=None, step=None):
        super().__init__(msg)
        self.t = t
        self.step = step


def equilibrium_state(params):
    """Spatially uniform rest state (u*, v*) of the kinetics.

    Eliminating v turns the fixed-point system into the cubic
    u^3 + 3(1-gamma)/gamma u + 3 beta/gamma = 0 (gamma != 0). If several
    real roots exist the most negative one is returned, matching the
    excitable rest branch. Residuals are polished below 1e-12.
    """
    eps, beta, gamma = params.eps, params.beta, params.gamma
    if gamma == 0.0:
        u = -beta
        v = u - u ** 3 / 3.0
        return u, v
    roots = np.roots([1.0, 0.0, 3.0 * (1.0 - gamma) / gamma, 3.0 * beta / gamma])
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
    if not real:
        raise ValueError("kinetics have no real rest state for these parameters")
    u = min(real)
    for _ in range(8):
        f = u - u ** 3 / 3.0 - (u + beta) / gamma
        fp = 1.0 - u * u - 1.0 / gamma
        if fp == 0.0:
            break
        u -= f / fp
    v = (u + beta) / gamma
    return u, v


def _zero_dirichlet(arr, grid, bc):
    for i, face in enumerate(bc.faces):
        if face.kind != "dirichlet":
            continue
        ax, side = i // 2, i % 2
        idx = [slice(None)] * 3
        idx[ax] = 0 if side == 0 else grid.n - 1
        arr[tuple(idx)] = 0.0


def pin_boundary(state, bc):
    """Copy of the state with Dirichlet face values enforced."""
    bc.validate(state.grid)
    u = state.u.values.copy()
    v = state.v.values.copy()
    n = state.grid.n
    for i, face in enumerate(bc.faces):
        if face.kind != "dirichlet":
            continue
        ax, side = i // 2, i % 2
        idx = [slice(None)] * 3
        idx[ax] = 0 if side == 0 else n - 1
        u[tuple(idx)] = face.values["u"]
        v[tuple(idx)] = face.values["v"]
    grid = state.grid
    return MediumState(ScalarField(grid, u), ScalarField(grid, v), state.t)


def fhn_rhs(state, params, bc):
    """Reaction-diffusion rates; Dirichlet boundary nodes get rate zero."""
    grid = state.grid
    bc.validate(grid)
    u = state.u.values
    v = state.v.values
    lap_u = laplacian(state.u, bc).values if params.Du != 0.0 else u
    lap_v = laplacian(state.v, bc).values if params.Dv != 0.0 else v
    k = backend.kernels()
    ru, rv = k.fhn_rates(
        u, v, lap_u, lap_v, params.eps, params.beta, params.gamma,
        params.Du, params.Dv,
    )
    _zero_dirichlet(ru, grid, bc)
    _zero_dirichlet(rv, grid, bc)
    return ScalarField(grid, ru), ScalarField(grid, rv)


def stable_dt(grid, params, safety=0.9, loose=False):
    """Largest safe explicit step.

    Diffusive limit h_min^2/(6 Dmax) scaled by the safety factor; the loose
    flag swaps in the classical factor 2 bound. Pure kinetics (no
    diffusion) falls back to eps/10, unscaled.
    """
    dmax = max(params.Du, params.Dv)
    if dmax == 0.0:
        return params.eps / 10.0
    denom = 2.0 if loose else 6.0
    return safety * min(grid.h) ** 2 / (denom * dmax)


def step_euler(state, params, bc, dt):
    """One forward-Euler step; deterministic for identical inputs.

    Re-pins Dirichlet values after the update and raises BlowUpError when
    the new state leaves the sane range (non-finite or |u| > 50).
    """
    k = backend.kernels()
    ru, rv = fhn_rhs(state, params, bc)
    u2, v2 = k.euler_apply(state.u.values, state.v.values, ru.values, rv.values, dt)
    grid = state.grid
    new = pin_boundary(
        MediumState(ScalarField(grid, u2), ScalarField(grid, v2), state.t + dt), bc
    )
    m = float(np.max(np.abs(new.u.values)))
    if not math.isfinite(m) or m > 50.0:
        raise BlowUpError("solution left the stable range at t=%g" % new.t, t=new.t)
    return new


@dataclass
class SimResult:
    final: MediumState
    snapshots: list = field(default_factory=list)
    steps: int = 0


def run_simulation(state, params, bc, t_end, snapshot_times=(), dt=None,
                   safety=0.9, callback=None):
    """Advance to t_end, landing exactly on each snapshot time.

    snapshot_times must be ascending and inside [state.t, t_end]. The
    initial state is pinned to the Dirichlet values before stepping (the
    enforced boundary is part of the problem setup). Returns a SimResult
    whose snapshots carry exact requested timestamps.
    """
    bc.validate(state.grid)
    times = [float(s) for s in snapshot_times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("snapshot times must be strictly ascending")
    if times and (times[0] < state.t or times[-1] > t_end):
        raise ValueError("snapshot times must lie within [t0, t_end]")
    state = pin_boundary(state, bc)
    dt0 = stable_dt(state.grid, params, safety) if dt is None else float(dt)
    if dt0 <= 0:
        raise ValueError("dt must be positive")
    result = SimResult(final=state)
    targets = list(times)
    if not targets or targets[-1] < t_end:
        targets.append(float(t_end))
    snap_set = set(times)
    for target in targets:
        while state.t < target and not np.isclose(state.t, target, rtol=0, atol=1e-12):
            step = min(dt0, target - state.t)
            try:
                state = step_euler(state, params, bc, step)
            except BlowUpError as e:
                e.step = result.steps + 1
                raise
            result.steps += 1
        state = replace(state, t=target)
        if target in snap_set:
            result.snapshots.append(state)
            if callback is not None:
                callback(state)
    result.final = state
    return result


def hopf_initial_condition(grid, ic=HopfICParams()):
    """Linked-filament initial condition from a degree-one map of the box.

    u and v are the two components of a complex field whose zero circles
    form a Hopf link near the origin, scaled and offset into the excitable
    range of the kinetics.
    """
    X, Y, Z = grid.meshgrid()
    r2 = X * X + Y * Y + Z * Z
    den = (r2 + 1.0) ** 2
    a = (2.0 * X * Z + Y * (r2 - 1.0)) / den
    b = (2.0 * Y * Z - X * (r2 - 1.0)) / den
    u = ic.lambda1 * a + ic.offset
    v = ic.lambda2 * b + ic.offset
    return MediumState(ScalarField(grid, u), ScalarField(grid, v), 0.0)
