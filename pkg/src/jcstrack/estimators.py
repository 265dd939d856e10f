"""Scikit-learn style wrappers around the MUSIC estimators.

Each estimator follows the fit/get_params convention so the algorithms
compose with pipelines, grid search and cloning.  `fit` consumes raw complex
measurements and exposes the recovered parameters as trailing-underscore
attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_complex_vector, as_snapshot_matrix
from .signalmodel import CfrRecord
from .subspace import estimate_aoa_2d, estimate_frequency, estimate_roll
from .tracking import velocity_from_frequency


class DopplerMusic(BaseEstimator):
    """Normalized-frequency estimator for a scalar packet sequence.

    Parameters
    ----------
    window : int or None
        Sliding-window (subvector) length; defaults to half the sequence.
    carrier_freq, packet_rate : float
        Radio constants used by `predict_velocity`.
    """

    def __init__(self, window=None, carrier_freq=60e9, packet_rate=5e4):
        self.window = window
        self.carrier_freq = carrier_freq
        self.packet_rate = packet_rate

    def fit(self, X, y=None):
        if isinstance(X, CfrRecord):
            samples = X.samples
        else:
            samples = as_complex_vector(np.ravel(np.asarray(X)), "X")
        self.frequency_ = estimate_frequency(samples, self.window)
        self.velocity_ = velocity_from_frequency(
            self.frequency_, self.carrier_freq, self.packet_rate)
        return self

    def fit_predict(self, X, y=None) -> float:
        """Fit and return the normalized frequency in cycles/packet."""
        return self.fit(X).frequency_


class PlanarAoaMusic(BaseEstimator):
    """2D angle-of-arrival estimator for planar-array snapshots.

    `fit` expects snapshots of dimension rows*cols (a single vector or a
    stack); afterwards `theta_` and `phi_` hold elevation and azimuth in
    degrees.  A boresight source flags `degenerate_` and leaves `phi_` NaN.
    """

    def __init__(self, rows=4, cols=4, coarse_size=256):
        self.rows = rows
        self.cols = cols
        self.coarse_size = coarse_size

    def fit(self, X, y=None):
        x = as_snapshot_matrix(X, self.rows * self.cols, "X")
        self.theta_, self.phi_ = estimate_aoa_2d(
            x, self.rows, self.cols, coarse_size=self.coarse_size)
        self.degenerate_ = bool(np.isnan(self.phi_))
        return self

    def fit_predict(self, X, y=None) -> tuple[float, float]:
        """Fit and return (elevation, azimuth) in degrees."""
        self.fit(X)
        return self.theta_, self.phi_


class RollMusic(BaseEstimator):
    """1D roll-angle estimator for planar-array snapshots."""

    def __init__(self, rows=4, cols=4, coarse_step_deg=0.2):
        self.rows = rows
        self.cols = cols
        self.coarse_step_deg = coarse_step_deg

    def fit(self, X, y=None):
        x = as_snapshot_matrix(X, self.rows * self.cols, "X")
        self.gamma_ = estimate_roll(x, self.rows, self.cols,
                                    coarse_step_deg=self.coarse_step_deg)
        return self

    def fit_predict(self, X, y=None) -> float:
        """Fit and return the roll angle in degrees."""
        return self.fit(X).gamma_
