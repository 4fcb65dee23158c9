"""Backstepping observer on the shared moving domain.

The observer is a copy of the plant PDE driven by the held input plus an
output-injection source p(x, s) * (T_x(s,t) - That_x(s,t)), where the plant
slope T_x(s,t) = -sdot/beta comes from the interface-velocity measurement.
The observer shares the true domain: s and sdot are read from the plant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .numerics import ratio_I1_sqrt, trapezoid
from .plant import PlantState, advance_profile


@dataclass
class ObserverState:
    u_hat: np.ndarray      # That - Tm on the unit grid [deg C]
    t: float = 0.0

    @property
    def n(self) -> int:
        return self.u_hat.size

    @property
    def h(self) -> float:
        return 1.0 / (self.u_hat.size - 1)


def observer_gain(x, s: float, lam: float, alpha: float):
    """Output-injection gain p(x, s) = -lam s I1(z)/z, z = sqrt(lam (s^2-x^2)/alpha).

    Continuous at x = s with value -lam s / 2.  Accepts scalar or array x.
    """
    x = np.asarray(x, dtype=float)
    w = lam * (s * s - x * x) / alpha
    out = -lam * s * np.asarray(ratio_I1_sqrt(np.maximum(w, 0.0)))
    return float(out) if out.ndim == 0 else out


def boundary_slope(values: np.ndarray, s: float) -> float:
    """Physical interface slope: first-order one-sided difference over h*s.

    This is the same functional the plant's interface velocity uses, which is
    what makes the discrete observer-error dynamics homogeneous (an error
    initialized at zero stays at roundoff level), and it is the only one-sided
    variant that keeps the injection feedback dissipative on coarse grids.
    """
    h = 1.0 / (values.size - 1)
    return (values[-1] - values[-2]) / (h * s)


def step_observer(obs: ObserverState, measurement, phys, lam: float,
                  q: float, dt: float,
                  measured_slope: float | None = None) -> ObserverState:
    """Advance the observer one step, paired with the plant step at the same dt.

    `measurement` is the (s, sdot) pair at the old time level; it drives the
    advection of the shared moving grid.  `measured_slope` is the freshest
    interface-gradient measurement T_x(s,t) = -sdot/beta; the caller should
    pass the value from the plant step just taken, so that the injection
    compares plant and observer slopes at the same time level (this keeps the
    discrete error dynamics homogeneous: a converged observer stays converged
    to roundoff).  It defaults to the old-level measurement.

    The injection is stiff through its dependence on the observer's own
    interface slope, so that slope is taken at the new level.  Because the
    injection is rank-one in u_hat, the implicit correction is a
    Sherman-Morrison update on top of the shared tridiagonal step: two solves
    instead of one.  The feedback slope is the first-order difference of
    `boundary_slope`; w.z > 0 for it, so the update never becomes singular.
    """
    s, sdot = measurement
    if measured_slope is None:
        measured_slope = -sdot / phys.beta
    n = obs.u_hat.size
    xi = np.linspace(0.0, 1.0, n)
    zeros = np.zeros(n)

    p = observer_gain(xi * s, s, lam, phys.alpha)

    # Base solve: A u* = rhs + dt p measured_slope.
    u_star = advance_profile(obs.u_hat, s, sdot, q, dt, phys.alpha, phys.k,
                             source=p * measured_slope)
    # Influence solve: A z = p (zero state, zero flux, source p/dt).
    z = advance_profile(zeros, s, 0.0, 0.0, dt, phys.alpha, phys.k,
                        source=p / dt)
    # u_new = u* - z dt w.u* / (1 + dt w.z) solves (A + dt p w^T) u_new =
    # rhs + dt p measured_slope, with w^T u the feedback slope.
    w_u_star = boundary_slope(u_star, s)
    w_z = boundary_slope(z, s)
    denom = 1.0 + dt * w_z
    if abs(denom) < 1e-14:
        raise NumericalFailure(
            f"singular injection correction at t={obs.t:g}")
    u_hat_new = u_star - z * (dt * w_u_star / denom)
    u_hat_new[-1] = 0.0
    if not np.all(np.isfinite(u_hat_new)):
        raise NumericalFailure(f"observer profile became non-finite at t={obs.t:g}")
    return ObserverState(u_hat=u_hat_new, t=obs.t + dt)


def error_norms(plant: PlantState, obs: ObserverState):
    """(L2 norm of u - u_hat, L2 norm of its x-gradient, interface slope).

    Norms are on the physical domain [0, s]; gradients use the chain rule
    d/dx = (1/s) d/dxi.  The interface slope uses the one-sided stencil.
    """
    if plant.n != obs.n:
        raise ValueError("plant and observer grids differ")
    s = plant.s
    err = plant.u - obs.u_hat
    h = plant.h
    norm = np.sqrt(max(trapezoid(err * err, s), 0.0))
    grad = np.gradient(err, h) / s
    grad_norm = np.sqrt(max(trapezoid(grad * grad, s), 0.0))
    slope = boundary_slope(err, s)
    return norm, grad_norm, slope
