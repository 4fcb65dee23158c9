"""Dynamic event-trigger: deviation d(t), dynamic variable m(t), event rule.

Events occur when d^2 > gamma m, or at the latest 1/c after the previous one
(the max dwell keeps the held input positive).  m obeys

    mdot = -eta m - sigma d^2 + mu1 ||u_hat||^2 + mu2 X^2 + mu3 e^2,

where e is the interface slope of the observer error, realizable from
measurements as -sdot/beta minus the observer's own one-sided slope.  The
trigger is supervised once per solver step, so events land on the step grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation


@dataclass
class Snapshot:
    """Quantities frozen at the last event, defining d(t) until the next one."""
    integral_u_hat: float
    X: float


@dataclass
class EventRecord:
    time: float
    reason: str            # 'initial' | 'threshold' | 'max_dwell'
    q_j: float
    dwell: float           # 0.0 for the initial event
    d_squared: float
    gamma_m: float


@dataclass
class TriggerState:
    m: float
    q_j: float
    t_j: float
    snapshot: Snapshot
    d: float = 0.0
    events: list[EventRecord] = field(default_factory=list)


def deviation(integral_u_hat: float, X: float, snapshot: Snapshot,
              c: float, alpha: float, beta: float) -> float:
    """d(t): gap between the continuous law and the held input, divided by k."""
    return (c / alpha) * (snapshot.integral_u_hat - integral_u_hat) \
        + (c / beta) * (snapshot.X - X)


def step_m(m: float, d: float, u_hat_norm_sq: float, X_sq: float,
           err_slope_sq: float, eta: float, sigma: float,
           mu1: float, mu2: float, mu3: float, dt: float) -> float:
    """Advance m by classical RK4 with all sources frozen over the step.

    With frozen inputs the ODE is linear, mdot = -eta m + S, and RK4 integrates
    it to O(dt^5) per step.  A nonpositive result is not clamped: it signals a
    misconfiguration (the theory guarantees m > 0).
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    S = -sigma * d * d + mu1 * u_hat_norm_sq + mu2 * X_sq + mu3 * err_slope_sq

    def f(mm):
        return -eta * mm + S

    k1 = f(m)
    k2 = f(m + 0.5 * dt * k1)
    k3 = f(m + 0.5 * dt * k2)
    k4 = f(m + dt * k3)
    m_new = m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if m_new <= 0.0:
        raise InvariantViolation(
            "m_positive",
            f"dynamic trigger variable m={m_new:g} <= 0 "
            "(mu/sigma misconfiguration or too-coarse dt)",
        )
    return m_new


def check_event(t: float, t_j: float, d: float, m: float,
                c: float, gamma: float, dt: float = 0.0) -> str | None:
    """Event decision at a supervised instant.

    Threshold uses the strict inequality d^2 > gamma m; if both the threshold
    and the max dwell fire on the same step, the threshold reason is logged
    (the control action is identical either way).

    `dt` is the supervision step.  The 1/c max dwell guarantees positivity of
    the held input only if no hold lasts longer than 1/c, so on a step grid
    the event fires at the last supervised instant that does not overshoot:
    when waiting one more step would push the dwell past 1/c.
    """
    if d * d > gamma * m:
        return "threshold"
    if (t - t_j) + dt > 1.0 / c + 1e-12 * max(t, 1.0):
        return "max_dwell"
    return None


def dwell_stats(events: list[EventRecord]) -> tuple[float, float, float]:
    """(min, mean, max) dwell over non-initial events; NaNs when empty."""
    dwells = np.array([e.dwell for e in events if e.reason != "initial"])
    if dwells.size == 0:
        return float("nan"), float("nan"), float("nan")
    return float(dwells.min()), float(dwells.mean()), float(dwells.max())
