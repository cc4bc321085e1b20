"""Integrate-and-fire state machine against closed-form and ODE oracles."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from pcosync.oscillator import MASTER, SLAVE, Oscillator, PcoParams

T_D = 100e-6


def make(role=SLAVE, **kw):
    return Oscillator(PcoParams(**kw), role)


class TestIntegrate:
    def test_no_drive_stays_at_zero(self):
        osc = make(s0=0.0)
        osc.integrate(1.0)
        assert osc.x == 0.0

    def test_linear_ramp(self):
        osc = make(s0=1.0, gamma=0.0, x_th=3.0)
        osc.integrate(2.0)
        assert osc.x == pytest.approx(2.0, rel=1e-12)

    def test_leaky_ode_matches_numerical_integration(self):
        s0, gamma = 1.0, 0.5
        osc = make(s0=s0, gamma=gamma, x_th=3.0)
        t_end = 1.7
        osc.integrate(t_end)
        sol = solve_ivp(lambda t, x: s0 - gamma * x[0], (0.0, t_end), [0.0],
                        rtol=1e-11, atol=1e-13)
        assert osc.x == pytest.approx(sol.y[0, -1], rel=1e-8)

    def test_leaky_asymptote_is_drive_over_leak(self):
        osc = make(s0=1.0, gamma=0.5, x_th=3.0)
        osc.integrate(200.0)
        assert osc.x == pytest.approx(2.0, rel=1e-9)

    def test_state_clamped_to_threshold(self):
        osc = make(s0=1e9, x_th=3.0)
        osc.integrate(1.0)
        assert osc.x == 3.0


class TestTimeToThreshold:
    def test_linear_prediction(self):
        osc = make()
        assert osc.time_to_threshold() == pytest.approx(T_D, rel=1e-12)
        osc.integrate(T_D / 2)
        assert osc.time_to_threshold() == pytest.approx(T_D / 2, rel=1e-9)

    def test_leaky_prediction_matches_integration(self):
        osc = make(s0=1.0, gamma=0.2, x_th=3.0, t_desired_s=1.0,
                   refractory_s=0.1, window_s=50.0, window_max_s=60.0,
                   resync_period_s=500.0)
        dt = osc.time_to_threshold()
        osc.integrate(dt)
        assert osc.x == pytest.approx(3.0, abs=1e-9)

    def test_subthreshold_asymptote_never_fires(self):
        osc = make(s0=1.0, gamma=1.0, x_th=3.0)  # asymptote 1.0 < 3
        assert osc.time_to_threshold() is None

    def test_master_never_self_fires(self):
        assert make(role=MASTER).time_to_threshold() is None


class TestPulseCoupling:
    def test_master_ignores_pulses(self):
        osc = make(role=MASTER)
        assert osc.on_pulse_decoded(1.0) is False
        assert osc.x == 0.0

    def test_refractory_ignores_pulses(self):
        osc = make()
        osc.fire(0.0)
        assert osc.on_pulse_decoded(5e-6) is False  # within 10 us
        assert osc.x == pytest.approx(0.0)

    def test_third_increment_triggers_fire(self):
        osc = make()
        osc.x = 2.0
        osc._t = 1.0
        assert osc.on_pulse_decoded(1.0) is True
        assert osc.x == 3.0


class TestFire:
    def test_phi_exactly_one_at_desired_gap(self):
        osc = make()
        osc.fire(0.0)
        osc.fire(T_D)
        assert osc.phi == pytest.approx(1.0, rel=1e-12)

    def test_phi_half(self):
        osc = make()
        osc.fire(0.0)
        osc.fire(0.5 * T_D)
        assert osc.phi == pytest.approx(0.5, rel=1e-12)

    def test_phi_above_one(self):
        osc = make()
        osc.fire(0.0)
        osc.fire(120e-6)
        assert osc.phi == pytest.approx(1.2, rel=1e-12)

    def test_fire_resets_state_and_sets_refractory(self):
        osc = make()
        osc.integrate(T_D / 3)
        osc.fire(T_D / 3)
        assert osc.x == 0.0
        assert osc.refractory_until == pytest.approx(T_D / 3 + 10e-6)


class TestConvergenceDetection:
    def gaps_to_verdict(self, gaps_us, k_confirm=3, phase_tol=0.02):
        osc = make(k_confirm=k_confirm, phase_tol=phase_tol)
        t = 0.0
        osc.fire(t)
        for g in gaps_us:
            t += g * 1e-6
            osc.fire(t)
        return osc.detect_convergence()

    def test_constant_gaps_converge(self):
        assert self.gaps_to_verdict([100, 100, 100, 100]) is True

    def test_alternating_gaps_do_not(self):
        assert self.gaps_to_verdict([100, 80, 100, 80]) is False

    def test_isolated_free_runner_converges(self):
        # constant-gap free-running is a locally converged train
        assert self.gaps_to_verdict([100] * 4) is True

    def test_confirmation_resets_on_disturbance(self):
        assert self.gaps_to_verdict([100, 100, 60, 100, 100]) is False
        assert self.gaps_to_verdict([100, 100, 60, 100, 100, 100, 100]) is True

    def test_tolerance_scales_with_desired_interval(self):
        # 1.5 us change sits inside the 2 us default tolerance band
        assert self.gaps_to_verdict([100, 101.5, 100, 101.5]) is True


class TestStateBounds:
    def test_x_stays_in_range_under_random_operations(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            osc = make()
            t = 0.0
            for _ in range(200):
                op = rng.random()
                if op < 0.5:
                    t += float(rng.uniform(0, 2 * T_D))
                    osc.integrate(t)
                elif op < 0.9:
                    fired = osc.on_pulse_decoded(t)
                    if fired:
                        osc.fire(t)
                else:
                    osc.integrate(t)
                    if osc.x >= osc.params.x_th:
                        osc.fire(t)
                assert 0.0 <= osc.x <= osc.params.x_th


class TestParamsValidation:
    def test_defaults_are_valid(self):
        PcoParams().validate()

    def test_default_drive_free_runs_at_desired_interval(self):
        p = PcoParams()
        assert p.resolved_s0() * p.t_desired_s == pytest.approx(p.x_th, rel=1e-12)

    def test_ordering_invariant(self):
        with pytest.raises(ValueError):
            PcoParams(refractory_s=200e-6).validate()
        with pytest.raises(ValueError):
            PcoParams(window_s=50e-6).validate()

    def test_positive_threshold_and_increment(self):
        with pytest.raises(ValueError):
            PcoParams(x_th=-1.0).validate()
        with pytest.raises(ValueError):
            PcoParams(epsilon=0.0).validate()

    def test_duty_cycle_of_defaults(self):
        p = PcoParams()
        assert p.window_s / p.resync_period_s == pytest.approx(1e-5, rel=1e-12)
