"""Channel synthesis under motion, beam codebooks, and array steering vectors.

The per-packet channel frequency response (CFR) of a moving headset is a
complex exponential whose phase accumulates the Doppler shift of the motion:
one packet at constant speed v advances the phase by -2 pi f_d with
f_d = f0 v / (c R_p) cycles/packet.  Beam training measures the channel
through a unitary codebook; inverting it recovers per-antenna channels with
unchanged noise statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT
from ._validation import as_complex_vector, as_rng


@dataclass(frozen=True)
class VelocityTrace:
    """Per-packet velocity samples along one axis."""

    samples: np.ndarray      # m/s, shape (K,)
    packet_rate: float       # packets/s

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("velocity trace must be 1-D with at least 2 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("velocity trace contains non-finite values")
        if self.packet_rate <= 0:
            raise ValueError("packet rate must be positive")
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return self.samples.size

    @classmethod
    def constant(cls, velocity: float, n_packets: int, packet_rate: float) -> "VelocityTrace":
        return cls(np.full(n_packets, velocity), packet_rate)

    @classmethod
    def linear_ramp(cls, accel: float, n_packets: int, packet_rate: float) -> "VelocityTrace":
        """Constant acceleration: v(i) = i * a / R_p."""
        return cls(np.arange(n_packets) * accel / packet_rate, packet_rate)

    def mean_velocity(self) -> float:
        return float(self.samples.mean())


@dataclass(frozen=True)
class CfrRecord:
    """Complex channel samples indexed by packet, optionally per antenna."""

    samples: np.ndarray          # (K,) or (K, n_antennas)
    packet_rate: float
    snr_db: float | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim not in (1, 2):
            raise ValueError("CFR samples must be 1-D or 2-D (packet, antenna)")
        if s.shape[0] < 1:
            raise ValueError("CFR record is empty")
        object.__setattr__(self, "samples", s)

    @property
    def n_packets(self) -> int:
        return self.samples.shape[0]

    def conjugate(self) -> "CfrRecord":
        return CfrRecord(np.conj(self.samples), self.packet_rate, self.snr_db)

    def to_csv(self, path) -> None:
        """Columnar dump: packet index, real, imag[, antenna index]."""
        s = self.samples
        with open(path, "w", encoding="utf-8") as fh:
            if s.ndim == 1:
                fh.write("packet,real,imag\n")
                for k, v in enumerate(s):
                    fh.write(f"{k},{v.real:.12g},{v.imag:.12g}\n")
            else:
                fh.write("packet,antenna,real,imag\n")
                for k in range(s.shape[0]):
                    for a in range(s.shape[1]):
                        v = s[k, a]
                        fh.write(f"{k},{a},{v.real:.12g},{v.imag:.12g}\n")


def noise_sigma_for_snr(snr_db: float, signal_amplitude: float = 1.0) -> float:
    """Std of complex circular noise giving the requested per-sample SNR."""
    return signal_amplitude / 10.0 ** (snr_db / 20.0)


def complex_noise(shape, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise with E|n|^2 = sigma^2."""
    scale = sigma / np.sqrt(2.0)
    return rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)


def synth_cfr(trace: VelocityTrace, alpha: complex = 1.0 + 0.0j,
              carrier_freq: float = 60e9, snr_db: float | None = None,
              rng=None) -> CfrRecord:
    """Synthesize the per-packet CFR of a moving headset.

    The k-th sample is alpha * exp(-j 2 pi f0 sum_{i<k} v(i) / (c R_p)), so
    the record starts exactly at alpha (the receiver is synchronized at time
    zero) and each packet advances the phase by the instantaneous normalized
    Doppler frequency.  Complex white Gaussian noise is added at `snr_db`
    relative to |alpha|^2; None means noiseless.
    """
    v = trace.samples
    rate = 2.0 * np.pi * carrier_freq / (SPEED_OF_LIGHT * trace.packet_rate)
    phase = np.empty(v.size)
    phase[0] = 0.0
    np.cumsum(v[:-1], out=phase[1:])
    phase[1:] *= -rate
    samples = alpha * np.exp(1j * phase)
    if snr_db is not None and np.isfinite(snr_db):
        sigma = noise_sigma_for_snr(snr_db, abs(alpha))
        samples = samples + complex_noise(samples.shape, sigma, as_rng(rng))
    return CfrRecord(samples, trace.packet_rate, snr_db)


@dataclass(frozen=True)
class BeamCodebook:
    """Unitary beam-weight matrix; rows are the swept beam vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.matrix, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("codebook must be a square matrix")
        gram = b @ b.conj().T
        if np.max(np.abs(gram - np.eye(b.shape[0]))) > 1e-12:
            raise ValueError("codebook is not unitary to 1e-12")
        object.__setattr__(self, "matrix", b)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def dft(cls, size: int) -> "BeamCodebook":
        """Unitary DFT codebook; deterministic and orthonormal by construction."""
        n = np.arange(size)
        b = np.exp(-2j * np.pi * np.outer(n, n) / size) / np.sqrt(size)
        return cls(b)


def apply_codebook(per_antenna: np.ndarray, codebook: BeamCodebook,
                   noise_sigma: float = 0.0, rng=None) -> np.ndarray:
    """Beam-domain measurements: B (h + n), noise entering before the codebook."""
    h = as_complex_vector(per_antenna, "per_antenna")
    if h.size != codebook.size:
        raise ValueError(
            f"vector length {h.size} does not match codebook size {codebook.size}")
    if noise_sigma > 0.0:
        h = h + complex_noise(h.shape, noise_sigma, as_rng(rng))
    return codebook.matrix @ h


def invert_codebook(beam_measurements: np.ndarray, codebook: BeamCodebook) -> np.ndarray:
    """Recover per-antenna channels from beam measurements (unitary inverse)."""
    y = as_complex_vector(beam_measurements, "beam_measurements")
    if y.size != codebook.size:
        raise ValueError(
            f"vector length {y.size} does not match codebook size {codebook.size}")
    return codebook.matrix.conj().T @ y


def steering_vector_2d(theta_deg, phi_deg, rows: int, cols: int) -> np.ndarray:
    """Planar-array steering vector for elevation theta and azimuth phi.

    Entry (n*rows + m) equals Omega^m Phi^n with Omega = exp(-j pi sin(theta)
    cos(phi)) and Phi = exp(-j pi sin(theta) sin(phi)); the row index runs
    fastest.  Half-wavelength element spacing is assumed.
    """
    theta = np.radians(theta_deg)
    phi = np.radians(phi_deg)
    omega_exp = -1j * np.pi * np.sin(theta) * np.cos(phi)
    phi_exp = -1j * np.pi * np.sin(theta) * np.sin(phi)
    row_part = np.exp(omega_exp * np.arange(rows))
    col_part = np.exp(phi_exp * np.arange(cols))
    return np.kron(col_part, row_part)


def steering_vector_roll(gamma_deg, rows: int, cols: int) -> np.ndarray:
    """Roll steering vector: N repeats of [1, Gamma, ..., Gamma^(M-1)].

    Gamma = exp(-j pi sin(gamma)).  Roll rotates the array about its
    boresight, so the phase progression repeats identically over columns.
    """
    gamma = np.radians(gamma_deg)
    block = np.exp(-1j * np.pi * np.sin(gamma) * np.arange(rows))
    return np.tile(block, cols)


def steering_vector_frequency(freq, length: int) -> np.ndarray:
    """Complex-exponential steering [1, e^{-j2pi f}, ..., e^{-j2pi f (m-1)}]."""
    return np.exp(-2j * np.pi * freq * np.arange(length))
