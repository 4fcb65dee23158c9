"""One-phase Stefan plant on the immobilized unit grid.

The moving domain [0, s(t)] is mapped to xi = x/s(t) in [0, 1], turning the
heat equation T_t = alpha T_xx into

    u_tau = (alpha/s^2) u_xixi + xi (sdot/s) u_xi,      u := T - Tm,

with a flux condition u_xi(0) = -s q / k, a pinned interface value u(1) = 0,
and the interface ODE sdot = -(beta/s) u_xi(1).

The step is semi-implicit: diffusion implicit (tridiagonal solve), advection
and the s-dependent coefficients explicit at the old time level.  The same
advance is reused by the observer, which only adds an output-injection source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ValidityBreach
from .numerics import solve_tridiagonal


@dataclass
class PlantState:
    u: np.ndarray          # T - Tm on the unit grid [deg C]
    s: float               # interface position [cm]
    sdot: float            # interface velocity [cm/s]
    t: float = 0.0         # time [s]

    @property
    def n(self) -> int:
        return self.u.size

    @property
    def h(self) -> float:
        return 1.0 / (self.u.size - 1)


def immobilize(T0, s0: float, phys, n: int) -> PlantState:
    """Map an initial physical profile T0 on [0, s0] to a PlantState.

    T0 may be a callable of x or an array sampled uniformly on [0, s0]; arrays
    are resampled onto the xi-grid by linear interpolation (exact for linear
    profiles).  The far value is pinned to the melting temperature.
    """
    if not 0.0 < s0 < phys.L:
        raise ValidityBreach("mv2", f"s0={s0:g} outside (0, L={phys.L:g})")
    xi = np.linspace(0.0, 1.0, n)
    x = xi * s0
    if callable(T0):
        u = np.asarray([float(T0(xx)) for xx in x]) - phys.Tm
    else:
        T0 = np.asarray(T0, dtype=float)
        x_src = np.linspace(0.0, s0, T0.size)
        u = np.interp(x, x_src, T0) - phys.Tm
    u[-1] = 0.0
    sdot = interface_velocity(u, s0, phys.beta)
    return PlantState(u=u, s=s0, sdot=sdot, t=0.0)


def interface_velocity(u: np.ndarray, s: float, beta: float) -> float:
    """sdot = -(beta/s) u_xi(1) via the first-order one-sided difference.

    The first-order stencil is deliberate: the observer's injection closes a
    loop through this same slope functional, and the discretized coupled
    system is only stable when both sides use the first-order difference (the
    higher-order stencil misreads the injection gain's interface boundary
    layer and destabilizes the error dynamics on coarse grids).
    """
    h = 1.0 / (u.size - 1)
    return -(beta / s) * (u[-1] - u[-2]) / h


def advance_profile(u, s, sdot, q, dt, alpha, k, source=None):
    """One semi-implicit step of the immobilized PDE, returning the new profile.

    Diffusion is implicit with s frozen at the old level; the advection term
    xi (sdot/s) u_xi is explicit and upwinded; `source` (if given) is an
    explicit volumetric term evaluated at the old level.  Boundary conditions:
    second-order ghost-node Neumann u_xi(0) = -s q / k, Dirichlet u(1) = 0.
    """
    n = u.size
    h = 1.0 / (n - 1)
    xi = np.linspace(0.0, 1.0, n)
    r = alpha * dt / (s * s * h * h)

    # Upwinded advection, sign-aware (sdot >= 0 gives a >= 0, forward diff).
    a = xi * (sdot / s)
    adv = np.zeros(n)
    fwd = (np.roll(u, -1) - u) / h
    bwd = (u - np.roll(u, 1)) / h
    adv[1:-1] = np.where(a[1:-1] >= 0.0, a[1:-1] * fwd[1:-1], a[1:-1] * bwd[1:-1])

    rhs = u[:-1] + dt * adv[:-1]
    if source is not None:
        rhs = rhs + dt * np.asarray(source)[:-1]
    # Ghost node for the flux condition folds into the first row.
    g = -s * q / k
    rhs[0] -= 2.0 * r * h * g

    diag = np.full(n - 1, 1.0 + 2.0 * r)
    lower = np.full(n - 2, -r)
    upper = np.full(n - 2, -r)
    upper[0] = -2.0 * r
    # Last unknown u_{n-2} couples to the pinned u_{n-1} = 0: nothing to add.
    sol = solve_tridiagonal(lower, diag, upper, rhs)

    out = np.empty(n)
    out[:-1] = sol
    out[-1] = 0.0
    return out


def step_plant(state: PlantState, phys, q: float, dt: float) -> PlantState:
    """Advance the plant one step under a held boundary heat flux q."""
    if not np.isfinite(q):
        raise NumericalFailure(f"non-finite input q at t={state.t:g}")
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    u_new = advance_profile(state.u, state.s, state.sdot, q, dt, phys.alpha, phys.k)
    if not np.all(np.isfinite(u_new)):
        raise NumericalFailure(f"plant profile became non-finite at t={state.t:g}")

    sdot_new = interface_velocity(u_new, state.s, phys.beta)
    s_new = state.s + dt * sdot_new
    if not 0.0 < s_new < phys.L:
        raise ValidityBreach(
            "mv2", f"interface left (0, L): s={s_new:g}", t=state.t + dt
        )
    return PlantState(u=u_new, s=s_new, sdot=sdot_new, t=state.t + dt)


def measure(state: PlantState) -> tuple[float, float]:
    """Available measurements: interface position and velocity.

    The boundary gradient T_x(s, t) is recoverable as -sdot/beta.
    """
    return state.s, state.sdot
