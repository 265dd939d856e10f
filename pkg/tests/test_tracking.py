"""Error propagation closed forms validated against Monte Carlo oracles."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jcstrack import tracking as tk

T120 = 1.0 / 120.0


class TestConversions:
    def test_velocity_from_frequency(self):
        # 1 m/s at 60 GHz / 50 kpkt/s corresponds to ~0.004 cycles/packet
        v = tk.velocity_from_frequency(0.004002769, 60e9, 5e4)
        assert v == pytest.approx(1.0, abs=1e-6)

    def test_velocity_scale(self):
        # one cycle/packet corresponds to c R_p / f0 m/s
        assert tk.velocity_from_frequency(0.1, 60e9, 5e4) == pytest.approx(
            0.1 * 299_792_458.0 * 5e4 / 60e9)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            tk.velocity_from_frequency(0.5, 60e9, 5e4)


class TestProfilesAndSpecs:
    def test_profiles(self):
        assert tk.PROFILE_P1.sigma_bar_a == 10.0
        assert tk.PROFILE_P2.sigma_bar_a == 40.0
        with pytest.raises(ValueError):
            tk.AccelProfile(-1.0)

    def test_imu_spec_for_profile(self):
        p1 = tk.ImuSpec.for_profile("P1")
        p2 = tk.ImuSpec.for_profile("P2")
        assert p1.accel_noise == pytest.approx(2e-3 * 9.80665)
        assert p2.accel_noise == pytest.approx(3e-3 * 9.80665)
        with pytest.raises(ValueError):
            tk.ImuSpec.for_profile("P9")

    def test_gyro_noise_back_derivation(self):
        # gyro-only drift reaches the AoA floor after 20 minutes
        drift = tk.gyro_angle_rmse(tk.DEFAULT_GYRO_NOISE_DEG, T120, 1200.0)
        assert drift == pytest.approx(tk.DEFAULT_AOA_RMSE_DEG, rel=1e-12)

    def test_velocity_estimate_validation(self):
        with pytest.raises(ValueError):
            tk.VelocityEstimate((1.0, 1.0, 1.0), (0.1, 0.0, 0.1))


class TestClosedForms:
    def test_jcs_value(self):
        # sqrt((1+1+1) * 0.01 * 4) = sqrt(0.12)
        assert tk.jcs_position_rmse((1.0, 1.0, 1.0), 0.01, 4.0) == pytest.approx(
            np.sqrt(0.12))

    def test_imu_value(self):
        assert tk.imu_position_rmse(2.0, 0.25, 4.0) == pytest.approx(
            2.0 * 0.5 * 8.0)

    def test_gyro_value(self):
        assert tk.gyro_angle_rmse(0.1, T120, 1200.0) == pytest.approx(
            np.sqrt(3 * T120) * 0.1 * np.sqrt(1200.0))

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            tk.jcs_position_rmse((1.0,), 0.01, -1.0)

    @pytest.mark.parametrize("fn,args,slope", [
        (tk.jcs_position_rmse, ((0.01, 0.01, 0.01), T120), 0.5),
        (tk.imu_position_rmse, (0.03, T120), 1.5),
        (tk.gyro_angle_rmse, (0.08, T120), 0.5),
    ])
    def test_log_log_slopes(self, fn, args, slope):
        t = np.logspace(-1, 3, 50)
        fitted = np.polyfit(np.log10(t), np.log10(fn(*args, t)), 1)[0]
        assert fitted == pytest.approx(slope, abs=1e-9)

    def test_recalibrated_resets_at_training(self):
        s0, sg, tb = 0.44, 0.08, 0.1024
        r = tk.recalibrated_angle_rmse(s0, sg, T120, tb, np.array([0.0, tb, 5 * tb]))
        np.testing.assert_allclose(r, s0, atol=1e-12)

    def test_recalibrated_within_bounds(self):
        s0, sg, tb = 0.44, 0.08, 0.1024
        t = np.linspace(0.0, 10.0, 5000)
        r = tk.recalibrated_angle_rmse(s0, sg, T120, tb, t)
        bound = tk.recalibrated_angle_bound(s0, sg, T120, tb)
        assert np.all(r >= s0 - 1e-12)
        assert np.all(r <= bound + 1e-12)

    @given(st.floats(0.01, 2.0), st.floats(0.001, 1.0), st.floats(0.0, 100.0))
    def test_recalibrated_bounds_property(self, s0, sg, t):
        r = tk.recalibrated_angle_rmse(s0, sg, T120, 0.1024, t)
        bound = tk.recalibrated_angle_bound(s0, sg, T120, 0.1024)
        assert s0 - 1e-9 <= r <= bound + 1e-9


class TestCrossover:
    def grid(self):
        return np.linspace(0.1, 10.0, 100)

    def test_simple_crossing(self):
        t = self.grid()
        a = tk.ErrorCurve(t, np.full_like(t, 2.0), "a")
        b = tk.ErrorCurve(t, t, "b")
        assert tk.crossover_time(a, b) == pytest.approx(2.0, abs=0.11)

    def test_never_crosses(self):
        t = self.grid()
        a = tk.ErrorCurve(t, t + 1.0, "a")
        b = tk.ErrorCurve(t, t, "b")
        assert tk.crossover_time(a, b) is None

    def test_always_below(self):
        t = self.grid()
        a = tk.ErrorCurve(t, t, "a")
        b = tk.ErrorCurve(t, t + 1.0, "b")
        assert tk.crossover_time(a, b) == t[0]

    def test_identical_curves(self):
        t = self.grid()
        a = tk.ErrorCurve(t, t, "a")
        b = tk.ErrorCurve(t, t.copy(), "b")
        assert tk.crossover_time(a, b) == t[0]

    def test_requires_shared_grid(self):
        a = tk.ErrorCurve(np.array([1.0, 2.0]), np.array([1.0, 1.0]), "a")
        b = tk.ErrorCurve(np.array([1.0, 3.0]), np.array([1.0, 1.0]), "b")
        with pytest.raises(ValueError):
            tk.crossover_time(a, b)

    def test_persistence_rule(self):
        # a dips below b transiently, then stays below only from t >= 5
        t = np.arange(1.0, 11.0)
        a_vals = np.array([2, 0.5, 2, 2, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5])
        a = tk.ErrorCurve(t, a_vals, "a")
        b = tk.ErrorCurve(t, np.ones_like(t), "b")
        assert tk.crossover_time(a, b) == 5.0


class TestMonteCarloOracles:
    """Closed forms agree with direct noise integration within 5%."""

    def test_jcs(self):
        sig = (0.0098, 0.0098, 0.0109)
        curve = tk.simulate_jcs_position_rmse(sig, T120, 240, 4000,
                                              np.random.default_rng(0))
        expected = tk.jcs_position_rmse(sig, T120, curve.times)
        np.testing.assert_allclose(curve.rmse, expected, rtol=0.05)

    def test_imu(self):
        curve = tk.simulate_imu_position_rmse(0.0294, T120, 240, 4000,
                                              np.random.default_rng(1))
        expected = tk.imu_position_rmse(0.0294, T120, curve.times)
        np.testing.assert_allclose(curve.rmse, expected, rtol=0.05)

    def test_gyro(self):
        curve = tk.simulate_gyro_angle_rmse(0.08, T120, 240, 4000,
                                            np.random.default_rng(2))
        expected = tk.gyro_angle_rmse(0.08, T120, curve.times)
        np.testing.assert_allclose(curve.rmse, expected, rtol=0.05)

    def test_mc_slopes(self):
        # asymptotic growth exponents from the simulated curves
        curve = tk.simulate_imu_position_rmse(0.03, T120, 1200, 500,
                                              np.random.default_rng(3))
        mask = curve.times > 1.0
        slope = np.polyfit(np.log10(curve.times[mask]),
                           np.log10(curve.rmse[mask]), 1)[0]
        assert slope == pytest.approx(1.5, abs=0.05)


class TestErrorCurve:
    def test_validation(self):
        with pytest.raises(ValueError):
            tk.ErrorCurve(np.array([1.0, 2.0]), np.array([1.0]), "x")
        with pytest.raises(ValueError):
            tk.ErrorCurve(np.array([1.0]), np.array([-1.0]), "x")

    def test_csv(self, tmp_path):
        c = tk.ErrorCurve(np.array([1.0, 2.0]), np.array([0.5, 1.5]), "jcs")
        p = tmp_path / "curve.csv"
        c.to_csv(p)
        lines = p.read_text().splitlines()
        assert lines[0] == "time,rmse,method"
        assert lines[1] == "1,0.5,jcs"
