"""Backstepping transforms, Lyapunov monitors, and validity reporting.

Everything here is diagnostics-only: the closed loop never depends on these
quantities.  The transforms map simulated states into the target-system
coordinates in which the stability analysis is immediate, so that decay rates
and boundedness claims can be checked at runtime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigurationError
from .numerics import ratio_I1_sqrt, ratio_J1_sqrt, simpson, trapezoid
from .observer import observer_gain


@dataclass(frozen=True)
class TransformConstants:
    """Constants of the controller-transform kernel pair (phi, psi)."""
    epsilon: float
    nu: float
    omega: float
    zeta: float


def transform_constants(alpha: float, beta: float, c: float,
                        epsilon: float) -> TransformConstants:
    limit = 2.0 * math.sqrt(alpha * c) / beta
    if not 0.0 < epsilon < limit:
        raise ConfigurationError(
            f"epsilon={epsilon:g} outside (0, 2*sqrt(alpha*c)/beta={limit:g})"
        )
    nu = beta * epsilon / (2.0 * alpha)
    omega = math.sqrt((4.0 * alpha * c - (epsilon * beta) ** 2) / (4.0 * alpha * alpha))
    zeta = -(2.0 * alpha * c - (epsilon * beta) ** 2) / (2.0 * alpha * beta * omega)
    # For epsilon below sqrt(alpha c)/beta the kernel bound must hold exactly.
    if epsilon < math.sqrt(alpha * c) / beta:
        bound = 4.0 * alpha * c / (beta * beta)
        if zeta * zeta + epsilon * epsilon >= bound:
            raise ConfigurationError(
                f"zeta^2+eps^2={zeta * zeta + epsilon * epsilon:g} "
                f"not below 4*alpha*c/beta^2={bound:g}"
            )
    return TransformConstants(epsilon=epsilon, nu=nu, omega=omega, zeta=zeta)


def phi_kernel(x, c: float, beta: float, epsilon: float):
    """Direct controller-transform kernel phi(x) = (c/beta) x - epsilon."""
    return (c / beta) * np.asarray(x, dtype=float) - epsilon


def psi_kernel(x, tc: TransformConstants):
    """Inverse controller-transform kernel psi(x) = e^{nu x}(zeta sin wx + eps cos wx)."""
    x = np.asarray(x, dtype=float)
    out = np.exp(tc.nu * x) * (tc.zeta * np.sin(tc.omega * x)
                               + tc.epsilon * np.cos(tc.omega * x))
    return float(out) if out.ndim == 0 else out


def _volterra_weights(n: int, s: float) -> np.ndarray:
    """Trapezoid weights for int_{x_i}^{s} . dy on the xi-grid, row per x_i."""
    h = s / (n - 1)
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i:] = h
        w[i, i] = 0.5 * h
        w[i, -1] = 0.5 * h
    return w


def transform_error_direct(w_tilde: np.ndarray, s: float, lam: float,
                           alpha: float) -> np.ndarray:
    """u_tilde(x) = w_tilde(x) + int_x^s P(x,y) w_tilde(y) dy on the xi-grid."""
    n = w_tilde.size
    y = np.linspace(0.0, 1.0, n) * s
    diff = np.maximum(y[None, :] ** 2 - y[:, None] ** 2, 0.0)
    K = (lam / alpha) * y[None, :] * ratio_I1_sqrt(lam * diff / alpha)
    K = np.triu(K)
    return w_tilde + (K * _volterra_weights(n, s)) @ w_tilde


def transform_error_inverse(u_tilde: np.ndarray, s: float, lam: float,
                            alpha: float) -> np.ndarray:
    """w_tilde(x) = u_tilde(x) - int_x^s Q(x,y) u_tilde(y) dy on the xi-grid."""
    n = u_tilde.size
    y = np.linspace(0.0, 1.0, n) * s
    diff = np.maximum(y[None, :] ** 2 - y[:, None] ** 2, 0.0)
    K = (lam / alpha) * y[None, :] * ratio_J1_sqrt(lam * diff / alpha)
    K = np.triu(K)
    return u_tilde - (K * _volterra_weights(n, s)) @ u_tilde


def transform_controller_direct(u_hat: np.ndarray, X: float, s: float,
                                tc: TransformConstants, alpha: float,
                                beta: float, c: float) -> np.ndarray:
    """w_hat = u_hat - (beta/alpha) int_x^s phi(x-y) u_hat dy - phi(x-s) X."""
    n = u_hat.size
    x = np.linspace(0.0, 1.0, n) * s
    K = phi_kernel(x[:, None] - x[None, :], c, beta, tc.epsilon)
    K = np.triu(K)
    integral = (K * _volterra_weights(n, s)) @ u_hat
    return u_hat - (beta / alpha) * integral - phi_kernel(x - s, c, beta, tc.epsilon) * X


def transform_controller_inverse(w_hat: np.ndarray, X: float, s: float,
                                 tc: TransformConstants, alpha: float,
                                 beta: float) -> np.ndarray:
    """u_hat = w_hat - (beta/alpha) int_x^s psi(x-y) w_hat dy - psi(x-s) X."""
    n = w_hat.size
    x = np.linspace(0.0, 1.0, n) * s
    K = psi_kernel(x[:, None] - x[None, :], tc)
    K = np.triu(K)
    integral = (K * _volterra_weights(n, s)) @ w_hat
    return w_hat - (beta / alpha) * integral - psi_kernel(x - s, tc) * X


def f_kernel(x, s: float, lam: float, alpha: float, beta: float, c: float,
             epsilon: float):
    """Forcing kernel f(x,s) = p - (beta/alpha) int_x^s phi(x-y) p dy + beta phi(x-s).

    Evaluated on an array of x covering [0, s]; phi is affine in (x - y), so
    the inner integral splits into two right-cumulative integrals of p and y p.
    """
    x = np.asarray(x, dtype=float)
    p = observer_gain(x, s, lam, alpha)
    # Right-cumulative integrals int_x^s p dy and int_x^s y p dy.
    cum_p = cumulative_trapezoid(p, x, initial=0.0)
    cum_yp = cumulative_trapezoid(x * p, x, initial=0.0)
    ip = cum_p[-1] - cum_p
    iyp = cum_yp[-1] - cum_yp
    inner = ((c / beta) * x - epsilon) * ip - (c / beta) * iyp
    return p - (beta / alpha) * inner + beta * phi_kernel(x - s, c, beta, epsilon)


def f_max(L: float, lam: float, alpha: float, beta: float, c: float,
          epsilon: float, n_s: int = 256, n_quad: int = 512) -> float:
    """f_max = sqrt(max over s in (0, L] of int_0^s f(x,s)^2 dx).

    Simpson quadrature on an x-grid per s; a refinement doubling that moves
    the result by more than 1e-6 relative attaches an accuracy warning.
    """
    def evaluate(ns, nq):
        best = 0.0
        for s in np.linspace(L / ns, L, ns):
            x = np.linspace(0.0, s, nq + 1)
            f = f_kernel(x, s, lam, alpha, beta, c, epsilon)
            best = max(best, simpson(f * f, s))
        return math.sqrt(best)

    coarse = evaluate(n_s, n_quad)
    fine = evaluate(2 * n_s, 2 * n_quad)
    if abs(fine - coarse) > 1e-6 * max(abs(fine), 1e-300):
        warnings.warn(
            f"f_max quadrature not converged to 1e-6 relative "
            f"({coarse:g} vs {fine:g})", RuntimeWarning, stacklevel=2,
        )
    return fine


@dataclass(frozen=True)
class LyapunovConfig:
    """Weights of the composite Lyapunov functional V = A V1 + m, W = V e^{-xi s}."""
    A: float
    B: float
    xi: float
    b_star: float


def lyapunov_config(A: float, b_star: float, f_max_value: float, L: float,
                    alpha: float, beta: float, c: float,
                    epsilon: float) -> LyapunovConfig:
    B = 4.0 * L * L * f_max_value ** 2 / (alpha * alpha) \
        + epsilon * beta / (2.0 * c) + b_star
    xi = max(c * L / beta,
             (beta / (alpha * epsilon)) * (epsilon * epsilon + c / beta))
    return LyapunovConfig(A=A, B=B, xi=xi, b_star=b_star)


def lyapunov_values(plant, obs, m: float, s_r: float, tc: TransformConstants,
                    lam: float, phys, c: float, lyap: LyapunovConfig):
    """(V1, V, W) evaluated on a (plant, observer, m) snapshot."""
    s = plant.s
    X = s - s_r
    u_tilde = plant.u - obs.u_hat
    w_tilde = transform_error_inverse(u_tilde, s, lam, phys.alpha)
    w_hat = transform_controller_direct(obs.u_hat, X, s, tc, phys.alpha,
                                        phys.beta, c)
    h = 1.0 / (plant.n - 1)
    w_tilde_x = np.gradient(w_tilde, h) / s
    V1 = 0.5 * trapezoid(w_hat * w_hat, s) \
        + tc.epsilon * phys.alpha / (2.0 * phys.beta) * X * X \
        + 0.5 * trapezoid(w_tilde * w_tilde, s) \
        + 0.5 * lyap.B * trapezoid(w_tilde_x * w_tilde_x, s)
    V = lyap.A * V1 + m
    W = V * math.exp(-lyap.xi * s)
    return V1, V, W


@dataclass
class ValidityReport:
    """Worst-case margins of the model-validity conditions over a run.

    All margins are signed so that nonnegative (within the discretization
    tolerance) means the condition held.
    """
    min_temp_above_melt: float      # min over run/grid of T - Tm
    min_interface: float            # min s
    interface_headroom: float       # L - max s
    min_interface_velocity: float   # min sdot
    min_held_input: float           # min q_j
    samples: int

    def as_lines(self) -> list[str]:
        if self.samples == 0:
            return ["validity report: no data"]
        return [
            f"min (T - Tm) over run        : {self.min_temp_above_melt:.6g}",
            f"min interface position s     : {self.min_interface:.6g}",
            f"headroom L - max(s)          : {self.interface_headroom:.6g}",
            f"min interface velocity sdot  : {self.min_interface_velocity:.6g}",
            f"min held input q_j           : {self.min_held_input:.6g}",
        ]


def validity_report(min_u: float | None = None, s_series=None,
                    sdot_series=None, q_series=None, L: float = 0.0) -> ValidityReport:
    """Aggregate per-condition worst-case margins from logged series."""
    s_series = np.asarray(s_series if s_series is not None else [], dtype=float)
    sdot_series = np.asarray(sdot_series if sdot_series is not None else [], dtype=float)
    q_series = np.asarray(q_series if q_series is not None else [], dtype=float)
    if s_series.size == 0:
        return ValidityReport(*(float("nan"),) * 5, samples=0)
    return ValidityReport(
        min_temp_above_melt=float(min_u) if min_u is not None else float("nan"),
        min_interface=float(s_series.min()),
        interface_headroom=float(L - s_series.max()),
        min_interface_velocity=float(sdot_series.min()) if sdot_series.size else float("nan"),
        min_held_input=float(q_series.min()) if q_series.size else float("nan"),
        samples=int(s_series.size),
    )


def psi_bound_holds(tc: TransformConstants, L: float, R: float,
                    n_check: int = 1000) -> bool:
    """Check |psi(-x)| < R on a grid over [0, L], the inverse-kernel bound
    the convergence analysis relies on."""
    x = np.linspace(0.0, L, n_check)
    return bool(np.all(np.abs(psi_kernel(-x, tc)) < R))
