"""Feedback-law checks: the closed form of the continuous law, positivity
enforcement of the held input, and the periodic schedule."""

import numpy as np
import pytest

from stefanetc import control, params
from stefanetc.errors import ValidityBreach

PHYS = params.derive_physical(k=0.00220, rho=7.90e-4, cp=2380.0, dH=2.10e5,
                              L=3.0, Tm=37.0)
C = 3.0e-4


class TestContinuousLaw:
    def test_closed_form_on_constant_profile(self):
        u_hat = np.full(21, 2.0)
        s, s_r = 0.5, 2.0
        expected = -C * (PHYS.k / PHYS.alpha * 2.0 * s
                         + PHYS.k / PHYS.beta * (s - s_r))
        assert control.continuous_q(u_hat, s, s_r, PHYS, C) == pytest.approx(
            expected, rel=1e-12)

    def test_positive_below_setpoint(self):
        q = control.continuous_q(np.zeros(21), 0.1, 2.0, PHYS, C)
        assert q == pytest.approx(C * PHYS.k / PHYS.beta * 1.9, rel=1e-12)
        assert q > 0.0

    def test_integral_scaling(self):
        u_hat = np.linspace(1.0, 0.0, 21)
        assert control.integral_u_hat(u_hat, 2.0) == pytest.approx(1.0, rel=1e-12)


class TestZohUpdate:
    def test_returns_positive_input(self):
        q = control.zoh_update(np.zeros(21), 0.1, 2.0, PHYS, C, 0.0)
        assert q > 0.0

    def test_breach_past_setpoint(self):
        with pytest.raises(ValidityBreach) as exc:
            control.zoh_update(np.zeros(21), 2.5, 2.0, PHYS, C, 12.0)
        assert exc.value.condition == "q_positive"
        assert exc.value.t == 12.0


class TestSchedule:
    def test_uniform_grid(self):
        times = control.sampled_data_schedule(3000.0, 10000.0)
        assert np.array_equal(times, [0.0, 3000.0, 6000.0, 9000.0])

    def test_horizon_inclusive(self):
        times = control.sampled_data_schedule(2.0, 6.0)
        assert times[-1] == 6.0

    def test_rejects_nonpositive_period(self):
        with pytest.raises(ValueError):
            control.sampled_data_schedule(0.0, 10.0)
