"""Room geometry, radio constants, and the link budget producing per-path SNR.

The indoor layout is a square room with one main access point (AP1) on the
southern wall, a ceiling reflector (RIS1) directly above the user, and either
a second access point (AP2) or a second reflector (RIS2) on the eastern wall.
The headset sits at the room center.  Each velocity axis is served by one
dominant propagation path whose worst-case SNR follows from transmit power,
receive antenna/array gain, reflector gain, and free-space path loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameterization of geometry, radio and timing.

    Defaults describe the reference setup: a 4x4x2.8 m room, 60 GHz carrier,
    24 dBm transmit power, 4x4 receive arrays with 120 degree HPBW elements,
    50 kpkt/s packet rate and a 102.4 ms beam training interval.
    """

    room_x: float = 4.0
    room_y: float = 4.0
    room_z: float = 2.8
    device_height: float = 1.8
    carrier_freq: float = 60e9          # Hz
    tx_power_dbm: float = 24.0
    thermal_noise_dbm: float = -82.0
    noise_figure_db: float = 10.0
    packet_rate: float = 5e4            # packets/s
    refresh_rate: float = 120.0         # Hz, display refresh = estimate rate
    beam_training_interval: float = 0.1024  # s
    movement_bandwidth: float = 30.0    # Hz
    array_rows: int = 4
    array_cols: int = 4
    antenna_hpbw_deg: float = 120.0
    ris_gain_db: float = 0.0
    # Optional knob forcing the reference SNR value on the ceiling-reflector
    # path; the geometric segment lengths give ~34.8 dB instead of 36 dB.
    ris1_snr_override_db: float | None = None

    def __post_init__(self):
        if self.carrier_freq <= 0:
            raise ValueError("carrier frequency must be positive")
        for name in ("room_x", "room_y", "room_z", "device_height",
                     "packet_rate", "refresh_rate", "beam_training_interval"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (self.packet_rate > self.refresh_rate > self.movement_bandwidth):
            raise ValueError(
                "sampling hierarchy violated: need packet_rate > refresh_rate "
                "> movement_bandwidth")
        if self.array_rows < 1 or self.array_cols < 1:
            raise ValueError("array dimensions must be at least 1")
        if self.device_height >= self.room_z:
            raise ValueError("device_height must be below the ceiling")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def n_elements(self) -> int:
        return self.array_rows * self.array_cols

    @property
    def packets_per_observation(self) -> int:
        """Packets in one display-frame observation window."""
        return int(round(self.packet_rate / self.refresh_rate))


@dataclass(frozen=True)
class PropagationPath:
    """One AP/RIS-to-headset path with its worst-case array misalignment."""

    label: str
    segment_lengths: tuple[float, ...]
    azimuth_offset_deg: float
    uses_ris: bool = False
    snr_override_db: float | None = None

    def __post_init__(self):
        if not self.segment_lengths:
            raise ValueError("path needs at least one segment")
        if any(s <= 0 for s in self.segment_lengths):
            raise ValueError("segment lengths must be positive")
        object.__setattr__(self, "segment_lengths",
                           tuple(float(s) for s in self.segment_lengths))

    @property
    def total_length(self) -> float:
        return sum(self.segment_lengths)


@dataclass(frozen=True)
class MobilityConstants:
    """Head-motion intensity statistics (RMS and maxima over a motion corpus)."""

    gyro_rms_deg_s: float = 38.0
    gyro_max_deg_s: float = 261.0
    accel_rms: float = 1.8   # m/s^2
    accel_max: float = 14.0  # m/s^2


def rx_gain(azimuth_offset_deg: float, rows: int, cols: int) -> float:
    """Receive gain in dB: cosine-pattern element gain plus array gain.

    G(phi, M, N) = 10 log10(pi cos phi) + 10 log10(M N).  Undefined at or
    beyond 90 degrees off boresight where the cosine pattern vanishes.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    if abs(azimuth_offset_deg) >= 90.0:
        raise ValueError(
            f"azimuth offset {azimuth_offset_deg} deg outside the (-90, 90) "
            "pattern domain")
    c = math.cos(math.radians(azimuth_offset_deg))
    if c <= 0.0:
        raise ValueError(
            f"azimuth offset {azimuth_offset_deg} deg outside the (-90, 90) "
            "pattern domain")
    return 10.0 * math.log10(math.pi * c) + 10.0 * math.log10(rows * cols)


def free_space_path_loss(distance: float, carrier_freq: float) -> float:
    """Free-space path loss 20 log10(4 pi d / lambda) in dB."""
    if distance <= 0:
        raise ValueError("distance must be positive")
    if carrier_freq <= 0:
        raise ValueError("carrier frequency must be positive")
    wavelength = SPEED_OF_LIGHT / carrier_freq
    return 20.0 * math.log10(4.0 * math.pi * distance / wavelength)


def path_snr(path: PropagationPath, cfg: ScenarioConfig) -> float:
    """Worst-case SNR of one propagation path in dB.

    SNR = P_TX + G_RX + G_RIS - PL - P_N - NF.  An explicit per-path
    override short-circuits the computation (used to pin the ambiguous
    ceiling-reflector path to its reference value).
    """
    if path.snr_override_db is not None:
        return path.snr_override_db
    if abs(path.azimuth_offset_deg) > cfg.antenna_hpbw_deg / 2.0:
        raise ValueError(
            f"misalignment {path.azimuth_offset_deg} deg exceeds the "
            f"half-power beamwidth edge ({cfg.antenna_hpbw_deg / 2.0} deg)")
    gain = rx_gain(path.azimuth_offset_deg, cfg.array_rows, cfg.array_cols)
    ris_gain = cfg.ris_gain_db if path.uses_ris else 0.0
    loss = free_space_path_loss(path.total_length, cfg.carrier_freq)
    return (cfg.tx_power_dbm + gain + ris_gain - loss
            - cfg.thermal_noise_dbm - cfg.noise_figure_db)


# Worst-case azimuth misalignment of the three frame-mounted arrays while the
# user rotates; the top array has boresight conditions to the ceiling RIS.
WORST_CASE_MISALIGNMENT_DEG = 60.0


def _node_positions(cfg: ScenarioConfig) -> dict[str, tuple[float, float, float]]:
    cx, cy, h = cfg.room_x / 2.0, cfg.room_y / 2.0, cfg.device_height
    return {
        "HMD": (cx, cy, h),
        "AP1": (cx, 0.0, h),          # southern wall
        "EAST": (cfg.room_x, cy, h),  # AP2 or RIS2 on the eastern wall
        "RIS1": (cx, cy, cfg.room_z),  # ceiling, directly above the user
    }


def _dist(a, b) -> float:
    return math.dist(a, b)


def make_paths(cfg: ScenarioConfig) -> dict[str, PropagationPath]:
    """Build the four candidate paths from the room geometry."""
    pos = _node_positions(cfg)
    d_ap = _dist(pos["AP1"], pos["HMD"])
    d_east = _dist(pos["EAST"], pos["HMD"])
    d_ap_ris1 = _dist(pos["AP1"], pos["RIS1"])
    d_ris1_hmd = _dist(pos["RIS1"], pos["HMD"])
    d_ap_ris2 = _dist(pos["AP1"], pos["EAST"])
    worst = WORST_CASE_MISALIGNMENT_DEG
    return {
        "AP1-HMD": PropagationPath("AP1-HMD", (d_ap,), worst),
        "AP2-HMD": PropagationPath("AP2-HMD", (d_east,), worst),
        "AP1-RIS1-HMD": PropagationPath(
            "AP1-RIS1-HMD", (d_ap_ris1, d_ris1_hmd), 0.0, uses_ris=True,
            snr_override_db=cfg.ris1_snr_override_db),
        "AP1-RIS2-HMD": PropagationPath(
            "AP1-RIS2-HMD", (d_ap_ris2, d_east), worst, uses_ris=True),
    }


@dataclass(frozen=True)
class ScenarioLayout:
    """Per-axis path assignment for one deployment variant.

    Velocity axes x/y/z each get a dominant path; azimuth/elevation always
    come from AP1, roll from the eastern node (AP2 or RIS2 -- both candidate
    roll paths have the same attenuation).
    """

    variant: str
    axis_paths: dict[str, PropagationPath]
    aoa_path: PropagationPath
    roll_path: PropagationPath

    def paths(self) -> list[PropagationPath]:
        return [self.axis_paths[a] for a in ("x", "y", "z")]

    def axis_snrs(self, cfg: ScenarioConfig) -> tuple[float, float, float]:
        return tuple(path_snr(p, cfg) for p in self.paths())


VARIANTS = ("S1", "S2")


def build_scenario(variant: str, cfg: ScenarioConfig | None = None) -> ScenarioLayout:
    """Assign propagation paths to velocity axes and angle sources.

    S1 deploys two APs and one RIS (x->AP1, y->AP2, z->RIS1); S2 deploys one
    AP and two RISs (x->AP1, y->RIS2, z->RIS1).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    cfg = cfg or ScenarioConfig()
    paths = make_paths(cfg)
    if variant == "S1":
        y_path = paths["AP2-HMD"]
    else:
        y_path = paths["AP1-RIS2-HMD"]
    return ScenarioLayout(
        variant=variant,
        axis_paths={"x": paths["AP1-HMD"], "y": y_path, "z": paths["AP1-RIS1-HMD"]},
        aoa_path=paths["AP1-HMD"],
        roll_path=y_path,
    )


# ---------------------------------------------------------------------
# Plain-text key-value configuration files
# ---------------------------------------------------------------------

# Config-file keys use the reference symbol names.
CONFIG_KEYS = {
    "room_x": "room_x",
    "room_y": "room_y",
    "room_z": "room_z",
    "device_height": "device_height",
    "f0": "carrier_freq",
    "P_TX": "tx_power_dbm",
    "P_N": "thermal_noise_dbm",
    "NF": "noise_figure_db",
    "R_p": "packet_rate",
    "refresh_rate": "refresh_rate",
    "T_b": "beam_training_interval",
    "B_m": "movement_bandwidth",
    "M": "array_rows",
    "N": "array_cols",
    "HPBW": "antenna_hpbw_deg",
    "G_RIS": "ris_gain_db",
    "ris1_snr_override": "ris1_snr_override_db",
}

_INT_FIELDS = {"array_rows", "array_cols"}


def parse_config_text(text: str) -> tuple[dict[str, float], list[str]]:
    """Parse `key = value` lines; returns (field values, unknown keys)."""
    values: dict[str, float] = {}
    unknown: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, val = parts
        key, val = key.strip(), val.strip()
        if key not in CONFIG_KEYS:
            unknown.append(key)
            continue
        field_name = CONFIG_KEYS[key]
        try:
            num = int(val) if field_name in _INT_FIELDS else float(val)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {val!r}") from exc
        values[field_name] = num
    return values, unknown


def load_config(path) -> ScenarioConfig:
    """Load a scenario from a key-value file; missing keys take defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        values, unknown = parse_config_text(fh.read())
    if unknown:
        raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")
    return ScenarioConfig(**values)


def config_report(path) -> tuple[ScenarioConfig, dict[str, float], list[str]]:
    """Load a config and report which fields fell back to defaults.

    Returns (config, defaults substituted keyed by file key, unknown keys).
    """
    with open(path, "r", encoding="utf-8") as fh:
        values, unknown = parse_config_text(fh.read())
    cfg = ScenarioConfig(**values)
    defaults = ScenarioConfig()
    substituted = {}
    for file_key, field_name in CONFIG_KEYS.items():
        if field_name not in values:
            substituted[file_key] = getattr(defaults, field_name)
    return cfg, substituted, unknown


def config_canonical_text(cfg: ScenarioConfig) -> str:
    """Canonical serialization used for hashing and provenance."""
    inverse = {v: k for k, v in CONFIG_KEYS.items()}
    lines = []
    for f in fields(cfg):
        key = inverse[f.name]
        lines.append(f"{key} = {getattr(cfg, f.name)!r}")
    return "\n".join(lines) + "\n"
