"""Kinematic conversion and error propagation for radio and IMU tracking.

Velocity estimates integrate once into position (error grows as sqrt(t));
accelerometer dead reckoning integrates twice (t^1.5); gyroscope integration
grows as sqrt(t) but starts from zero, while radio angle estimates restart
from a fixed floor at every beam-training recalibration.  Each closed form
ships with a Monte Carlo integration oracle used to validate it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT
from ._validation import as_rng

STANDARD_GRAVITY = 9.80665  # m/s^2

# Angle RMSE of a single beam-training 2D AoA estimate at the reference
# link budget, degrees (reproduced by experiments.run_sigma0).
DEFAULT_AOA_RMSE_DEG = 0.4421

# Per-sample gyroscope noise (deg) back-derived so that gyro-only integration
# reaches the AoA floor after ~20 minutes: sigma_g = sigma_0 / sqrt(3 T t_x)
# with T = 1/120 s and t_x = 1200 s.
DEFAULT_GYRO_NOISE_DEG = DEFAULT_AOA_RMSE_DEG / np.sqrt(3.0 * (1.0 / 120.0) * 1200.0)


@dataclass(frozen=True)
class AccelProfile:
    """Motion intensity: std of the per-observation random acceleration."""

    sigma_bar_a: float  # m/s^2
    label: str = "custom"

    def __post_init__(self):
        if self.sigma_bar_a < 0:
            raise ValueError("sigma_bar_a must be non-negative")


PROFILE_P1 = AccelProfile(10.0, "P1")
PROFILE_P2 = AccelProfile(40.0, "P2")
PROFILES = {"P1": PROFILE_P1, "P2": PROFILE_P2}

# Accelerometer per-sample RMS noise in g for the range setting matched to
# each motion profile (4G range for P1, 16G for P2).
_ACCEL_NOISE_MILLI_G = {"P1": 2.0, "P2": 3.0}


@dataclass(frozen=True)
class ImuSpec:
    """Per-sample IMU noise and the shared sampling interval."""

    accel_noise: float                  # m/s^2 RMS per sample
    gyro_noise: float = DEFAULT_GYRO_NOISE_DEG  # deg RMS per sample
    sample_interval: float = 1.0 / 120.0        # s

    def __post_init__(self):
        if self.accel_noise <= 0 or self.gyro_noise <= 0 or self.sample_interval <= 0:
            raise ValueError("ImuSpec fields must be positive")

    @classmethod
    def for_profile(cls, label: str, sample_interval: float = 1.0 / 120.0) -> "ImuSpec":
        if label not in _ACCEL_NOISE_MILLI_G:
            raise ValueError(f"unknown profile {label!r}")
        accel = _ACCEL_NOISE_MILLI_G[label] * 1e-3 * STANDARD_GRAVITY
        return cls(accel_noise=accel, sample_interval=sample_interval)


@dataclass(frozen=True)
class VelocityEstimate:
    """Per-axis velocity with its estimation uncertainty."""

    velocity: tuple[float, float, float]   # m/s
    sigma: tuple[float, float, float]      # m/s

    def __post_init__(self):
        if any(s <= 0 for s in self.sigma):
            raise ValueError("velocity stds must be positive")


@dataclass(frozen=True)
class ErrorCurve:
    """RMSE as a function of elapsed time for one tracking method."""

    times: np.ndarray
    rmse: np.ndarray
    label: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        r = np.asarray(self.rmse, dtype=float)
        if t.shape != r.shape or t.ndim != 1:
            raise ValueError("times and rmse must be matching 1-D arrays")
        if np.any(r < 0):
            raise ValueError("rmse values must be non-negative")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "rmse", r)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time,rmse,method\n")
            for t, r in zip(self.times, self.rmse):
                fh.write(f"{t:.12g},{r:.12g},{self.label}\n")


def velocity_from_frequency(freq: float, carrier_freq: float,
                            packet_rate: float) -> float:
    """Velocity in m/s from a normalized Doppler frequency (cycles/packet)."""
    if abs(freq) >= 0.5:
        raise ValueError("normalized frequency must lie in [-0.5, 0.5)")
    return SPEED_OF_LIGHT * freq * packet_rate / carrier_freq


def jcs_position_rmse(sigma_v, interval: float, t) -> np.ndarray | float:
    """3D position RMSE from integrating noisy velocity estimates:
    sqrt((sx^2 + sy^2 + sz^2) T t)."""
    t = _check_time(t)
    total = float(np.sum(np.square(sigma_v)))
    return np.sqrt(total * interval * t)


def imu_position_rmse(sigma_a: float, interval: float, t) -> np.ndarray | float:
    """3D position RMSE of accelerometer-only dead reckoning:
    sigma_a sqrt(T) t^1.5 (discrete double integration of white noise)."""
    t = _check_time(t)
    return sigma_a * np.sqrt(interval) * t ** 1.5


def gyro_angle_rmse(sigma_g: float, interval: float, t) -> np.ndarray | float:
    """3D angle RMSE of gyroscope-only integration: sqrt(3 T) sigma_g sqrt(t)."""
    t = _check_time(t)
    return np.sqrt(3.0 * interval) * sigma_g * np.sqrt(t)


def recalibrated_angle_rmse(sigma_0: float, sigma_g: float, interval: float,
                            training_interval: float, t) -> np.ndarray | float:
    """Angle RMSE with gyro integration restarted from the AoA floor at every
    beam training: sqrt(sigma_0^2 + 3 sigma_g^2 T (t - k T_b)) on
    [k T_b, (k+1) T_b)."""
    t = _check_time(t)
    elapsed = t - np.floor(t / training_interval) * training_interval
    return np.sqrt(sigma_0 ** 2 + 3.0 * sigma_g ** 2 * interval * elapsed)


def recalibrated_angle_bound(sigma_0: float, sigma_g: float, interval: float,
                             training_interval: float) -> float:
    """Supremum of the recalibrated-angle sawtooth."""
    return float(np.sqrt(sigma_0 ** 2
                         + 3.0 * sigma_g ** 2 * interval * training_interval))


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return t if t.ndim else float(t)


def crossover_time(curve_a: ErrorCurve, curve_b: ErrorCurve) -> float | None:
    """Earliest time where curve_a drops to/below curve_b and stays there."""
    if curve_a.times.shape != curve_b.times.shape or \
            not np.allclose(curve_a.times, curve_b.times):
        raise ValueError("curves must share a common time grid")
    below = curve_a.rmse <= curve_b.rmse
    if not below[-1]:
        return None
    # last index where a is above b marks the start of the persistent run
    above = np.nonzero(~below)[0]
    idx = 0 if above.size == 0 else int(above[-1]) + 1
    return float(curve_a.times[idx])


# ---------------------------------------------------------------------
# Monte Carlo integration oracles
# ---------------------------------------------------------------------

def simulate_jcs_position_rmse(sigma_v, interval: float, n_steps: int,
                               n_realizations: int = 1000, rng=None) -> ErrorCurve:
    """Integrate per-axis velocity noise over time; 3D RMS across realizations."""
    rng = as_rng(rng)
    sigma_v = np.asarray(sigma_v, dtype=float)
    noise = rng.normal(0.0, 1.0, (n_realizations, n_steps, sigma_v.size)) * sigma_v
    pos = interval * np.cumsum(noise, axis=1)
    rmse = np.sqrt(np.mean(np.sum(pos ** 2, axis=2), axis=0))
    times = interval * np.arange(1, n_steps + 1)
    return ErrorCurve(times, rmse, "jcs-mc")


def simulate_imu_position_rmse(sigma_a: float, interval: float, n_steps: int,
                               n_realizations: int = 1000, rng=None) -> ErrorCurve:
    """Doubly integrate white accelerometer noise.

    Uses the exact discretization of the continuous double integrator driven
    by white noise of spectral density sigma_a^2 T, so the sampled process
    has variance sigma_a^2 T t^3 / 3 per axis at every step (the per-step
    noise covariance is the standard [[T^3/3, T^2/2], [T^2/2, T]] block).
    """
    rng = as_rng(rng)
    q = sigma_a ** 2 * interval
    t_ = interval
    # Cholesky factor of q * [[T^3/3, T^2/2], [T^2/2, T]]
    l11 = np.sqrt(q * t_ ** 3 / 3.0)
    l21 = np.sqrt(q) * np.sqrt(3.0) / 2.0 * np.sqrt(t_)
    l22 = np.sqrt(q * t_) / 2.0
    shape = (n_realizations, n_steps, 3)
    xi1 = rng.normal(0.0, 1.0, shape)
    xi2 = rng.normal(0.0, 1.0, shape)
    w_pos = l11 * xi1
    w_vel = l21 * xi1 + l22 * xi2
    vel = np.cumsum(w_vel, axis=1)
    vel_prev = np.concatenate([np.zeros((n_realizations, 1, 3)), vel[:, :-1]], axis=1)
    pos = np.cumsum(vel_prev * t_ + w_pos, axis=1)
    rmse = np.sqrt(np.mean(np.sum(pos ** 2, axis=2), axis=0))
    times = t_ * np.arange(1, n_steps + 1)
    return ErrorCurve(times, rmse, "imu-mc")


def simulate_gyro_angle_rmse(sigma_g: float, interval: float, n_steps: int,
                             n_realizations: int = 1000, rng=None) -> ErrorCurve:
    """Integrate per-sample gyro angle noise; 3D RMS across realizations."""
    rng = as_rng(rng)
    # per-sample angle increment noise sigma_g * T gives var 3 sigma_g^2 T t
    noise = rng.normal(0.0, sigma_g * interval, (n_realizations, n_steps, 3))
    ang = np.cumsum(noise, axis=1)
    rmse = np.sqrt(np.mean(np.sum(ang ** 2, axis=2), axis=0))
    times = interval * np.arange(1, n_steps + 1)
    return ErrorCurve(times, rmse, "gyro-mc")
