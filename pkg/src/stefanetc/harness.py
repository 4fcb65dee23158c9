"""Scenario orchestration: closed-loop runs, comparisons, file outputs.

A run is deterministic: per step it measures the plant, supervises the
trigger (or the periodic schedule), updates the held input on events, steps
plant / observer / dynamic variable, and logs everything.  Validity breaches
end the run with a structured record instead of an exception escaping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import control, diagnostics, observer, params, plant, trigger
from .config import ScenarioConfig, serialize_config
from .errors import ConfigurationError, NumericalFailure, ValidityBreach

SERIES_COLUMNS = [
    "t", "s", "sdot", "T0_boundary", "norm_T_Tm", "norm_T_That",
    "norm_w_tilde", "energy", "q", "d", "d_squared", "gamma_m", "m",
    "err_slope", "integral_u_hat", "V1", "V", "W",
]

EVENT_COLUMNS = ["time", "reason", "q_j", "dwell", "d_squared", "gamma_m"]

CONVERGENCE_TOL = 0.02   # |s - s_r| threshold defining the auto horizon [cm]


@dataclass
class BreachRecord:
    condition: str
    message: str
    t: float | None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    derived: params.TriggerDerived
    series: dict[str, np.ndarray]
    events: list[trigger.EventRecord]
    summary: dict
    breach: BreachRecord | None = None
    min_u_over_run: float = float("nan")
    validation: params.ValidationReport | None = None


@dataclass
class _Recorder:
    rows: dict[str, list] = field(default_factory=lambda: {c: [] for c in SERIES_COLUMNS})

    def log(self, **kwargs):
        for col in SERIES_COLUMNS:
            self.rows[col].append(kwargs[col])

    def arrays(self) -> dict[str, np.ndarray]:
        return {c: np.asarray(v, dtype=float) for c, v in self.rows.items()}


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    phys, ctrl, trig = cfg.phys, cfg.ctrl, cfg.trig
    scheme, scenario = cfg.scheme, cfg.scenario
    dt, n = scheme.dt, scheme.n
    c, lam, s_r = ctrl.c, ctrl.lam, ctrl.s_r

    validation = params.validate_initial_data(cfg.init, ctrl, phys)
    if not validation.overall_pass and not scenario.unsafe:
        failed = [ch.name for ch in validation.checks if not ch.passed]
        raise ConfigurationError(
            "initial data fails validity conditions "
            f"({', '.join(failed)}); set scenario.unsafe=true to run anyway")

    derived = params.derive_trigger(phys, ctrl, trig)
    if scenario.kind == "event_triggered" and dt >= derived.tau / 5.0 \
            and not scenario.allow_coarse_dt:
        raise ConfigurationError(
            f"dt={dt:g} s is too coarse for honest trigger supervision: "
            f"the minimal dwell is tau={derived.tau:g} s and dt < tau/5 is "
            "required (set scenario.allow_coarse_dt=true to override)")

    tc = diagnostics.transform_constants(phys.alpha, phys.beta, c, ctrl.epsilon)
    lyap = diagnostics.lyapunov_config(derived.A, derived.b_star, derived.f_max,
                                       phys.L, phys.alpha, phys.beta, c,
                                       ctrl.epsilon)

    pstate = plant.immobilize(cfg.init.T0, cfg.init.s0, phys, n)
    ostate = observer.ObserverState(
        u_hat=plant.immobilize(cfg.init.T0_hat, cfg.init.s0, phys, n).u)

    rec = _Recorder()
    is_et = scenario.kind == "event_triggered"
    is_continuous = scenario.kind == "continuous"
    is_sampled = scenario.kind == "sampled_data"
    period = dt if is_continuous else scenario.period
    next_sample = 0.0

    horizon_end = scheme.horizon if scheme.horizon is not None else scheme.max_horizon
    auto_horizon = scheme.horizon is None
    t_converged = None
    breach: BreachRecord | None = None
    min_u = float(np.min(pstate.u))

    # Initial event at t = 0.
    t = 0.0
    I0 = control.integral_u_hat(ostate.u_hat, pstate.s)
    ts = trigger.TriggerState(
        m=trig.m0, q_j=0.0, t_j=0.0,
        snapshot=trigger.Snapshot(integral_u_hat=I0, X=pstate.s - s_r))
    try:
        ts.q_j = control.zoh_update(ostate.u_hat, pstate.s, s_r, phys, c, t)
        ts.events.append(trigger.EventRecord(
            time=0.0, reason="initial", q_j=ts.q_j, dwell=0.0,
            d_squared=0.0, gamma_m=trig.gamma * ts.m))
        if is_sampled or is_continuous:
            next_sample = period

        while True:
            s, sdot = plant.measure(pstate)
            X = s - s_r
            integral = control.integral_u_hat(ostate.u_hat, s)
            d = trigger.deviation(integral, X, ts.snapshot, c, phys.alpha, phys.beta)

            reason = None
            if t > ts.t_j:
                if is_et:
                    reason = trigger.check_event(t, ts.t_j, d, ts.m, c,
                                                 trig.gamma, dt)
                elif t >= next_sample - 1e-9 * max(t, 1.0):
                    reason = "scheduled"
                    next_sample += period
            if reason is not None:
                dwell = t - ts.t_j
                ts.events.append(trigger.EventRecord(
                    time=t, reason=reason, q_j=0.0, dwell=dwell,
                    d_squared=d * d, gamma_m=trig.gamma * ts.m))
                ts.q_j = control.zoh_update(ostate.u_hat, s, s_r, phys, c, t)
                ts.events[-1].q_j = ts.q_j
                ts.snapshot = trigger.Snapshot(integral_u_hat=integral, X=X)
                ts.t_j = t
                d = 0.0
            ts.d = d

            err_norm, _, err_slope = observer.error_norms(pstate, ostate)
            norm_u = math.sqrt(max(control.trapezoid(pstate.u * pstate.u, s), 0.0))
            w_tilde = diagnostics.transform_error_inverse(
                pstate.u - ostate.u_hat, s, lam, phys.alpha)
            norm_wt = math.sqrt(max(control.trapezoid(w_tilde * w_tilde, s), 0.0))
            energy = control.trapezoid(pstate.u, s) / phys.alpha + s / phys.beta
            V1, V, W = diagnostics.lyapunov_values(
                pstate, ostate, ts.m, s_r, tc, lam, phys, c, lyap)
            rec.log(t=t, s=s, sdot=sdot, T0_boundary=phys.Tm + pstate.u[0],
                    norm_T_Tm=norm_u, norm_T_That=err_norm, norm_w_tilde=norm_wt,
                    energy=energy, q=ts.q_j, d=d,
                    d_squared=d * d, gamma_m=trig.gamma * ts.m, m=ts.m,
                    err_slope=err_slope, integral_u_hat=integral,
                    V1=V1, V=V, W=W)
            min_u = min(min_u, float(np.min(pstate.u)))

            if auto_horizon and t_converged is None and abs(X) < CONVERGENCE_TOL:
                t_converged = t
                horizon_end = min(1.2 * t, scheme.max_horizon)
            if t >= horizon_end - 1e-9 * max(horizon_end, 1.0):
                break

            pstate_new = plant.step_plant(pstate, phys, ts.q_j, dt)
            ostate = observer.step_observer(
                ostate, (s, sdot), phys, lam, ts.q_j, dt,
                measured_slope=-pstate_new.sdot / phys.beta)
            if is_et:
                ts.m = trigger.step_m(ts.m, d, norm_u_hat_sq(ostate, s), X * X,
                                      err_slope * err_slope, trig.eta,
                                      derived.sigma, derived.mu1, derived.mu2,
                                      derived.mu3, dt)
            pstate = pstate_new
            t = round((t + dt) / dt) * dt
            pstate.t = t
            ostate.t = t
    except (ValidityBreach, NumericalFailure) as exc:
        condition = getattr(exc, "condition", "numerical")
        breach = BreachRecord(condition=condition, message=str(exc),
                              t=getattr(exc, "t", t))

    series = rec.arrays()
    summary = _summarize(cfg, derived, series, ts.events, t_converged,
                         horizon_end, breach, min_u)
    return ScenarioResult(config=cfg, derived=derived, series=series,
                          events=ts.events, summary=summary, breach=breach,
                          min_u_over_run=min_u, validation=validation)


def norm_u_hat_sq(ostate: observer.ObserverState, s: float) -> float:
    return max(control.trapezoid(ostate.u_hat * ostate.u_hat, s), 0.0)


def _summarize(cfg, derived, series, events, t_converged, horizon_end,
               breach, min_u) -> dict:
    dwell_min, dwell_mean, dwell_max = trigger.dwell_stats(events)
    updates = len(events)
    s = series["s"]
    final_gap = abs(s[-1] - cfg.ctrl.s_r) if s.size else float("nan")
    return {
        "scenario": cfg.scenario.kind,
        "steps": int(series["t"].size),
        "control_updates": updates,
        "events_threshold": sum(1 for e in events if e.reason == "threshold"),
        "events_max_dwell": sum(1 for e in events if e.reason == "max_dwell"),
        "dwell_min": dwell_min,
        "dwell_mean": dwell_mean,
        "dwell_max": dwell_max,
        "tau": derived.tau,
        "max_dwell_allowed": derived.max_dwell,
        "t_converged": t_converged if t_converged is not None else float("nan"),
        "horizon": horizon_end,
        "final_interface_gap": float(final_gap),
        "min_temp_margin": float(min_u),
        "min_interface_velocity": float(series["sdot"].min()) if s.size else float("nan"),
        "min_held_input": float(min(e.q_j for e in events)) if events else float("nan"),
        "breach": None if breach is None else
            {"condition": breach.condition, "message": breach.message, "t": breach.t},
    }


def compare_scenarios(configs: list[ScenarioConfig]) -> list[dict]:
    """Run several configs sharing physical/initial data; aligned summary rows."""
    if not configs:
        return []
    ref = configs[0]
    for other in configs[1:]:
        if other.raw.get("physical") != ref.raw.get("physical") \
                or other.raw.get("initial") != ref.raw.get("initial"):
            raise ConfigurationError(
                "compare requires identical [physical] and [initial] sections")
    rows = []
    for cfg in configs:
        result = run_scenario(cfg)
        row = dict(result.summary)
        rows.append(row)
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_outputs(result: ScenarioResult, directory: str | Path) -> list[Path]:
    """Write series.csv, events.csv, derivation_report.txt, summary.json.

    Outputs are byte-stable for identical configs (fixed column order, repr
    floats, no timestamps).
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        written = []

        series_path = directory / "series.csv"
        cols = SERIES_COLUMNS
        lines = [",".join(cols)]
        npts = result.series["t"].size
        for i in range(npts):
            lines.append(",".join(_fmt(float(result.series[c][i])) for c in cols))
        series_path.write_text("\r\n".join(lines) + "\r\n")
        written.append(series_path)

        events_path = directory / "events.csv"
        lines = [",".join(EVENT_COLUMNS)]
        for e in result.events:
            lines.append(",".join([
                _fmt(e.time), e.reason, _fmt(e.q_j), _fmt(e.dwell),
                _fmt(e.d_squared), _fmt(e.gamma_m)]))
        events_path.write_text("\r\n".join(lines) + "\r\n")
        written.append(events_path)

        report_path = directory / "derivation_report.txt"
        report_path.write_text(derivation_report(result.config, result.derived))
        written.append(report_path)

        summary_path = directory / "summary.json"
        summary_path.write_text(_to_json(result.summary) + "\n")
        written.append(summary_path)

        config_path = directory / "config.cfg"
        config_path.write_text(serialize_config(result.config))
        written.append(config_path)
        return written
    except OSError as exc:
        raise OSError(f"failed writing outputs under {directory}: {exc}") from exc


def _to_json(obj) -> str:
    import json

    def sanitize(o):
        if isinstance(o, dict):
            return {k: sanitize(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [sanitize(v) for v in o]
        if isinstance(o, float) and not math.isfinite(o):
            return str(o)
        return o

    return json.dumps(sanitize(obj), indent=2, sort_keys=True)


def derivation_report(cfg: ScenarioConfig, derived: params.TriggerDerived) -> str:
    """Human-readable listing of every derived constant with its formula."""
    phys, ctrl, trig = cfg.phys, cfg.ctrl, cfg.trig
    d = derived
    lines = [
        "derivation report (units: cm - s - degC - J)",
        "",
        "[physical]",
        f"alpha = k/(rho*cp)                 = {phys.alpha!r}",
        f"beta  = k/(rho*latent_heat)        = {phys.beta!r}",
        "",
        "[trigger chain]",
        f"Upsilon = max_s |1 - (1/alpha) int p|  = {d.Upsilon!r}",
        f"theta0 = 4 c^2                     = {d.theta0!r}",
        f"theta1 = 4 c^4 L / alpha^2         = {d.theta1!r}",
        f"theta2 = 4 c^4 / beta^2            = {d.theta2!r}",
        f"theta3 = 4 c^2 Upsilon^2           = {d.theta3!r}",
        f"mu1 = theta1/(gamma (1-delta))     = {d.mu1!r}",
        f"mu2 = theta2/(gamma (1-delta))     = {d.mu2!r}",
        f"mu3 = theta3/(gamma (1-delta))     = {d.mu3!r}",
        f"A_min (max of two brackets)        = {d.A_min!r}",
        f"A (configured or 1.05*A_min)       = {d.A!r}",
        f"sigma = 4 A alpha L                = {d.sigma!r}",
        f"a1 = gamma delta sigma             = {d.a1!r}",
        f"a2 = 1+theta0+2 gamma(1-delta)sigma+eta = {d.a2!r}",
        f"a3 = (1+theta0+gamma(1-delta)sigma+eta)(1-delta)/delta = {d.a3!r}",
        f"tau = int_0^1 ds/(a1 s^2+a2 s+a3)  = {d.tau!r}",
        f"max dwell = 1/c                    = {d.max_dwell!r}",
        "",
        "[epsilon admissibility]",
        f"R = 2 sqrt(alpha c)/beta           = {d.R!r}",
        f"bound 1: sqrt(alpha c)/beta        = {d.eps_bound_components[0]!r}",
        f"bound 2: alpha/(8 beta L (8+beta^2 R^2 L^2/alpha^2)) = {d.eps_bound_components[1]!r}",
        f"bound 3: eps_star (root of h)      = {d.eps_bound_components[2]!r}",
        f"tightest bound                     = {d.eps_bound!r}",
        f"configured epsilon                 = {ctrl.epsilon!r}",
    ]
    if ctrl.epsilon >= d.eps_bound:
        lines.append(
            "NOTE: configured epsilon exceeds the tightest sufficient "
            "bound; the run proceeds (the bound is sufficient, not necessary) "
            "but the exponential-convergence certificate does not apply as-is.")
    lines += [
        "",
        "[lyapunov weights]",
        f"f_max = sqrt(max_s int f^2)        = {d.f_max!r}",
        f"b_star (> mu3/(A alpha))           = {d.b_star!r}",
        "",
        "[dynamic trigger configuration]",
        f"eta = {trig.eta!r}, gamma = {trig.gamma!r}, delta = {trig.delta!r}, "
        f"m0 = {trig.m0!r}",
    ]
    return "\n".join(lines) + "\n"
