"""Continuous-time feedback law and its sampled realizations.

The continuous law drives the interface to the setpoint s_r:

    q(t) = -c ( (k/alpha) int_0^s u_hat dx + (k/beta) (s - s_r) ).

Event-triggered and periodic modes apply it in zero-order-hold fashion; the
"continuous" baseline is a ZOH at every solver step, the finest rate a
discrete simulator can realize.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidityBreach
from .numerics import trapezoid


def integral_u_hat(u_hat: np.ndarray, s: float) -> float:
    """Physical integral of the observer temperature error over [0, s]."""
    return trapezoid(u_hat, s)


def continuous_q(u_hat: np.ndarray, s: float, s_r: float, phys, c: float) -> float:
    """Evaluate the continuous feedback law at the current observer state."""
    integral = integral_u_hat(u_hat, s)
    X = s - s_r
    return -c * (phys.k / phys.alpha * integral + phys.k / phys.beta * X)


def zoh_update(u_hat: np.ndarray, s: float, s_r: float, phys, c: float,
               t_event: float) -> float:
    """Compute the held input q_j at an event instant.

    A nonpositive q_j means the positivity hypotheses (Lipschitz/sandwich/
    setpoint conditions) were violated; the run must halt rather than clamp,
    since well-posedness of the plant requires nonnegative heat.
    """
    q_j = continuous_q(u_hat, s, s_r, phys, c)
    if q_j <= 0.0:
        raise ValidityBreach("q_positive", f"held input q_j={q_j:g} <= 0", t=t_event)
    return q_j


def sampled_data_schedule(period: float, horizon: float) -> np.ndarray:
    """Deterministic periodic update times 0, period, 2*period, ... <= horizon."""
    if period <= 0.0:
        raise ValueError("sampling period must be positive")
    n = int(np.floor(horizon / period)) + 1
    return np.arange(n, dtype=float) * period
