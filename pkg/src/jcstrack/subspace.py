"""MUSIC subspace estimation: covariance construction, noise-subspace
extraction, pseudospectrum evaluation and peak search.

Specializations cover normalized Doppler frequency from a scalar packet
sequence (sliding-window covariance with forward-backward averaging), 2D
elevation/azimuth from planar-array snapshots, and 1D roll.  A single
dominant source is assumed throughout, so the pseudospectrum denominator
a^H U_n U_n^H a is evaluated through the equivalent ||a||^2 - |u1^H a|^2
with u1 the principal eigenvector; large grids then reduce to FFTs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.sparse.linalg import LinearOperator, eigsh

from ._validation import as_complex_vector, as_snapshot_matrix
from .signalmodel import CfrRecord, steering_vector_2d, steering_vector_roll

_DENOM_FLOOR = 1e-300


class AngleDegeneracyWarning(UserWarning):
    """Raised when the azimuth is unidentifiable (source at boresight)."""


@dataclass(frozen=True)
class CovarianceMatrix:
    """Hermitian sample covariance with its snapshot count."""

    matrix: np.ndarray
    n_snapshots: int

    def __post_init__(self):
        r = np.asarray(self.matrix, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("covariance must be square")
        if np.max(np.abs(r - r.conj().T)) > 1e-10 * max(1.0, np.abs(r).max()):
            raise ValueError("covariance is not Hermitian")
        object.__setattr__(self, "matrix", (r + r.conj().T) / 2.0)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class NoiseSubspace:
    """Orthonormal basis of the noise subspace (dim x (dim - n_sources))."""

    matrix: np.ndarray
    n_sources: int

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2:
            raise ValueError("noise subspace must be a matrix")
        gram = u.conj().T @ u
        if np.max(np.abs(gram - np.eye(u.shape[1]))) > 1e-9:
            raise ValueError("noise subspace columns are not orthonormal")
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PseudoSpectrum:
    """Pseudospectrum values over a parameter grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("pseudospectrum values must be finite and positive")
        object.__setattr__(self, "grid", np.asarray(self.grid))
        object.__setattr__(self, "values", v)

    def peak(self):
        return self.grid[int(np.argmax(self.values))]

    def to_txt(self, path) -> None:
        """Two-column numeric text (parameter, value) for plotting."""
        np.savetxt(path, np.column_stack([np.asarray(self.grid, dtype=float),
                                          self.values]))


# ---------------------------------------------------------------------
# Covariance construction
# ---------------------------------------------------------------------

def covariance_from_sliding_window(samples, window: int) -> CovarianceMatrix:
    """Smoothed covariance of a scalar sequence, forward-backward averaged.

    Averages the outer products of all K - m + 1 length-m subvectors, then
    adds the exchange-conjugated counterpart, the standard decorrelation for
    single-snapshot harmonic retrieval.
    """
    x = as_complex_vector(samples, "samples")
    k = x.size
    if not 2 <= window <= k // 2:
        raise ValueError(f"window must satisfy 2 <= m <= K/2, got m={window}, K={k}")
    w = sliding_window_view(x, window)
    n_win = w.shape[0]
    r = w.T @ w.conj() / n_win
    r = (r + r[::-1, ::-1].conj()) / 2.0
    return CovarianceMatrix(r, n_win)


def covariance_from_snapshots(snapshots) -> CovarianceMatrix:
    """Sample mean of snapshot outer products y y^H."""
    x = as_snapshot_matrix(snapshots)
    r = x.T @ x.conj() / x.shape[0]
    return CovarianceMatrix(r, x.shape[0])


# ---------------------------------------------------------------------
# Subspaces and pseudospectrum
# ---------------------------------------------------------------------

def _eigh(r: np.ndarray):
    try:
        return np.linalg.eigh(r)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("covariance eigendecomposition failed") from exc


def noise_subspace(cov: CovarianceMatrix, n_sources: int) -> NoiseSubspace:
    """Eigenvectors of the dim - p smallest eigenvalues."""
    m = cov.dim
    if not 1 <= n_sources < m:
        raise ValueError(f"need 1 <= n_sources < {m}, got {n_sources}")
    _, vecs = _eigh(cov.matrix)
    # eigh returns ascending eigenvalues; the leading columns span the noise space
    return NoiseSubspace(vecs[:, : m - n_sources], n_sources)


def signal_axis(cov: CovarianceMatrix) -> np.ndarray:
    """Principal eigenvector (single-source signal subspace)."""
    _, vecs = _eigh(cov.matrix)
    return vecs[:, -1]


def pseudospectrum(ns: NoiseSubspace, steering: Callable[..., np.ndarray],
                   grid: Sequence) -> PseudoSpectrum:
    """Evaluate P(X) = 1 / ||U_n^H a(X)||^2 over a parameter grid.

    Grid entries may be scalars or tuples; tuples are splatted into the
    steering function.
    """
    values = np.empty(len(grid))
    un_h = ns.matrix.conj().T
    for i, x in enumerate(grid):
        a = steering(*x) if isinstance(x, tuple) else steering(x)
        a = np.asarray(a, dtype=complex)
        if a.size != ns.dim:
            raise ValueError(
                f"steering vector dimension {a.size} does not match subspace "
                f"dimension {ns.dim}")
        denom = np.linalg.norm(un_h @ a) ** 2
        values[i] = 1.0 / max(denom, _DENOM_FLOOR)
    return PseudoSpectrum(np.asarray(grid, dtype=object)
                          if grid and isinstance(grid[0], tuple)
                          else np.asarray(grid, dtype=float), values)


# ---------------------------------------------------------------------
# Frequency estimation
# ---------------------------------------------------------------------

def _sliding_principal_eigvec(x: np.ndarray, m: int) -> np.ndarray:
    """Principal eigenvector of the forward-backward sliding-window
    covariance, computed matrix-free (the covariance is never formed)."""
    w = np.ascontiguousarray(sliding_window_view(x, m))
    wc = np.conj(w)
    n_win = w.shape[0]

    def matvec(v):
        v = np.asarray(v).ravel()
        fwd = w.T @ (wc @ v)
        bwd = w.T @ (wc @ np.conj(v[::-1]))
        return (fwd + np.conj(bwd)[::-1]) / (2.0 * n_win)

    op = LinearOperator((m, m), matvec=matvec, dtype=complex)
    v0 = np.ascontiguousarray(w[0])  # deterministic, signal-aligned start
    vals, vecs = eigsh(op, k=1, which="LM", v0=v0)
    return vecs[:, 0]


def _refine_peak_1d(denom_fn, center: float, spacing: float,
                    n_rounds: int = 3, n_points: int = 33,
                    lo: float | None = None, hi: float | None = None) -> float:
    """Shrinking grid search on the pseudospectrum denominator, finished by
    a parabolic fit on the log-pseudospectrum."""
    span = spacing
    best = center
    grid = None
    d = None
    for _ in range(n_rounds):
        grid = best + np.linspace(-span, span, n_points)
        if lo is not None or hi is not None:
            grid = np.clip(grid, lo, hi)
        d = np.maximum(denom_fn(grid), _DENOM_FLOOR)
        i = int(np.argmin(d))
        best = float(grid[i])
        span = 2.0 * (grid[1] - grid[0]) if grid.size > 1 else span / 8.0
    # parabolic vertex on log P = -log denom
    i = int(np.argmin(d))
    if 0 < i < len(grid) - 1:
        y = -np.log(d[i - 1: i + 2])
        denom2 = y[0] - 2.0 * y[1] + y[2]
        if denom2 < 0:
            delta = 0.5 * (y[0] - y[2]) / denom2
            if abs(delta) <= 1.0:
                best = float(grid[i] + delta * (grid[i + 1] - grid[i]))
    return best


def estimate_frequency(record, window: int | None = None) -> float:
    """Normalized frequency in [-0.5, 0.5) cycles/packet of the dominant tone.

    Accepts a CfrRecord or a raw complex sequence.  The coarse search runs on
    an FFT grid finer than 1/(8K); shrinking local grids plus a parabolic fit
    refine the peak far below the coarse resolution.
    """
    x = record.samples if isinstance(record, CfrRecord) else None
    if x is None:
        x = as_complex_vector(record, "record")
    if x.ndim != 1:
        raise ValueError("frequency estimation expects a scalar sequence")
    k = x.size
    m = k // 2 if window is None else window
    if k < 2 * m:
        raise ValueError(f"need at least 2*window samples, got K={k}, m={m}")
    if m < 2:
        raise ValueError("window must be at least 2")

    if m <= 32:
        u = signal_axis(covariance_from_sliding_window(x, m))
    else:
        u = _sliding_principal_eigvec(x, m)

    uc = np.conj(u)
    nfft = max(1024, 1 << (8 * k - 1).bit_length())
    g = np.fft.fft(uc, nfft)
    denom = np.maximum(float(m) - np.abs(g) ** 2, _DENOM_FLOOR)
    i = int(np.argmin(denom))
    f0 = i / nfft
    if f0 >= 0.5:
        f0 -= 1.0

    idx = np.arange(m)

    def denom_fn(freqs):
        a = np.exp(-2j * np.pi * np.outer(freqs, idx))
        return float(m) - np.abs(a @ uc) ** 2

    f = _refine_peak_1d(denom_fn, f0, 1.0 / nfft)
    return float((f + 0.5) % 1.0 - 0.5)


# ---------------------------------------------------------------------
# Angle estimation
# ---------------------------------------------------------------------

def _aoa_denominator(uc_grid: np.ndarray, thetas: np.ndarray, phis: np.ndarray,
                     rows: int, cols: int) -> np.ndarray:
    """Denominator ||a||^2 - |u^H a|^2 on a theta x phi grid.

    uc_grid is conj(u) reshaped to (cols, rows) following the steering
    vector's row-fastest element order.
    """
    st = np.sin(np.radians(thetas))[:, None]
    su = st * np.cos(np.radians(phis))[None, :]
    sv = st * np.sin(np.radians(phis))[None, :]
    om = np.exp(-1j * np.pi * su[..., None] * np.arange(rows))
    ph = np.exp(-1j * np.pi * sv[..., None] * np.arange(cols))
    g = np.einsum("tpm,tpn,nm->tp", om, ph, uc_grid)
    return float(rows * cols) - np.abs(g) ** 2


def estimate_aoa_2d(snapshots, rows: int, cols: int,
                    coarse_size: int = 256) -> tuple[float, float]:
    """2D angle of arrival (elevation, azimuth) in degrees.

    The coarse stage searches the direction-cosine disk via a zero-padded 2D
    FFT of the principal eigenvector, followed by shrinking local grids in
    angle space and a separable parabolic fit.  A source at boresight leaves
    the azimuth unidentifiable; the estimate is flagged with
    AngleDegeneracyWarning and azimuth NaN.
    """
    x = as_snapshot_matrix(snapshots, rows * cols)
    u = signal_axis(covariance_from_snapshots(x))
    uc = np.conj(u).reshape(cols, rows)

    pad = np.zeros((coarse_size, coarse_size), dtype=complex)
    pad[:cols, :rows] = uc
    g = np.fft.fft2(pad)
    # bin (k, l) maps to direction cosines (sv, su) = (2k, 2l)/coarse_size
    s = 2.0 * np.arange(coarse_size) / coarse_size
    s[s >= 1.0] -= 2.0
    sv = s[:, None]
    su = s[None, :]
    denom = float(rows * cols) - np.abs(g) ** 2
    denom[su ** 2 + sv ** 2 >= 1.0] = np.inf
    k, l = np.unravel_index(int(np.argmin(denom)), denom.shape)
    radius = float(np.hypot(s[l], s[k]))

    if radius < 4.0 / coarse_size:
        warnings.warn("source at array boresight: azimuth is unidentifiable",
                      AngleDegeneracyWarning)
        return 0.0, float("nan")

    theta = float(np.degrees(np.arcsin(min(radius, 1.0))))
    phi = float(np.degrees(np.arctan2(s[k], s[l])))

    span_theta, span_phi = 2.0, 2.0
    for _ in range(3):
        thetas = np.clip(theta + np.linspace(-span_theta, span_theta, 41),
                         0.0, 90.0 - 1e-9)
        phis = phi + np.linspace(-span_phi, span_phi, 41)
        d = _aoa_denominator(uc, thetas, phis, rows, cols)
        i, j = np.unravel_index(int(np.argmin(d)), d.shape)
        theta, phi = float(thetas[i]), float(phis[j])
        span_theta = 2.0 * (thetas[1] - thetas[0])
        span_phi = 2.0 * (phis[1] - phis[0])

    # separable parabolic refinement on the final grid
    step = span_theta / 2.0
    thetas = np.clip(theta + np.array([-step, 0.0, step]), 0.0, 90.0 - 1e-9)
    dt = np.maximum(_aoa_denominator(uc, thetas, np.array([phi]), rows, cols)[:, 0],
                    _DENOM_FLOOR)
    theta = _parabolic_vertex(thetas, dt, theta)
    step = span_phi / 2.0
    phis = phi + np.array([-step, 0.0, step])
    dp = np.maximum(_aoa_denominator(uc, np.array([theta]), phis, rows, cols)[0],
                    _DENOM_FLOOR)
    phi = _parabolic_vertex(phis, dp, phi)

    phi = float((phi + 180.0) % 360.0 - 180.0)
    return float(theta), phi


def _parabolic_vertex(grid3: np.ndarray, denom3: np.ndarray, fallback: float) -> float:
    y = -np.log(denom3)
    curv = y[0] - 2.0 * y[1] + y[2]
    if curv < 0:
        delta = 0.5 * (y[0] - y[2]) / curv
        if abs(delta) <= 1.0:
            return float(grid3[1] + delta * (grid3[2] - grid3[1]))
    return fallback


def estimate_roll(snapshots, rows: int, cols: int,
                  coarse_step_deg: float = 0.2) -> float:
    """Roll angle in (-90, 90) degrees from planar-array snapshots."""
    x = as_snapshot_matrix(snapshots, rows * cols)
    u = signal_axis(covariance_from_snapshots(x))
    # roll steering repeats over columns, so only column sums matter
    coeff = np.conj(u).reshape(cols, rows).sum(axis=0)
    mn = float(rows * cols)

    # |u^H a(gamma)|^2 with a = tile(block, cols): u^H a = sum_n sum_m conj(u[n,m]) block[m]
    def denom(gammas):
        gam = np.atleast_1d(np.asarray(gammas, dtype=float))
        blocks = np.exp(-1j * np.pi * np.sin(np.radians(gam))[:, None] * np.arange(rows))
        g = blocks @ coeff
        return mn - np.abs(g) ** 2

    grid = np.arange(-90.0 + coarse_step_deg, 90.0, coarse_step_deg)
    d = denom(grid)
    gamma = float(grid[int(np.argmin(d))])
    gamma = _refine_peak_1d(denom, gamma, coarse_step_deg,
                            lo=-90.0 + 1e-9, hi=90.0 - 1e-9)
    return float(gamma)
