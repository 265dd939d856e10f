"""Joint communication-and-sensing tracking for head-mounted displays.

Link-budget evaluation of mmWave propagation paths, Doppler velocity and
2D angle-of-arrival estimation via subspace methods, and error-propagation
comparison against IMU dead reckoning.
"""

from .scenario import (
    ScenarioConfig,
    ScenarioLayout,
    PropagationPath,
    MobilityConstants,
    build_scenario,
    make_paths,
    path_snr,
    rx_gain,
    free_space_path_loss,
    load_config,
    SPEED_OF_LIGHT,
)
from .signalmodel import (
    VelocityTrace,
    CfrRecord,
    BeamCodebook,
    synth_cfr,
    apply_codebook,
    invert_codebook,
    steering_vector_2d,
    steering_vector_roll,
    steering_vector_frequency,
)
from .subspace import (
    AngleDegeneracyWarning,
    estimate_frequency,
    estimate_aoa_2d,
    estimate_roll,
)
from .tracking import (
    AccelProfile,
    ImuSpec,
    ErrorCurve,
    velocity_from_frequency,
    jcs_position_rmse,
    imu_position_rmse,
    gyro_angle_rmse,
    recalibrated_angle_rmse,
    recalibrated_angle_bound,
    crossover_time,
)
from .estimators import DopplerMusic, PlanarAoaMusic, RollMusic
from .experiments import ExperimentSpec, ResultSet, Series, run_experiment

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig", "ScenarioLayout", "PropagationPath", "MobilityConstants",
    "build_scenario", "make_paths", "path_snr", "rx_gain",
    "free_space_path_loss", "load_config", "SPEED_OF_LIGHT",
    "VelocityTrace", "CfrRecord", "BeamCodebook", "synth_cfr",
    "apply_codebook", "invert_codebook", "steering_vector_2d",
    "steering_vector_roll", "steering_vector_frequency",
    "AngleDegeneracyWarning", "estimate_frequency", "estimate_aoa_2d",
    "estimate_roll",
    "AccelProfile", "ImuSpec", "ErrorCurve", "velocity_from_frequency",
    "jcs_position_rmse", "imu_position_rmse", "gyro_angle_rmse",
    "recalibrated_angle_rmse", "recalibrated_angle_bound", "crossover_time",
    "DopplerMusic", "PlanarAoaMusic", "RollMusic",
    "ExperimentSpec", "ResultSet", "Series", "run_experiment",
    "__version__",
]
