"""Simulator for sensing-assisted near-field energy focusing over non-stationary channels."""

from .beamform import (
    BeamformerSolution,
    average_harvested_power,
    harvested_power,
    isotropic_covariance,
    solve_energy_covariance,
    weighted_channel_matrix,
)
from .channel import (
    ErState,
    VisibilityRegion,
    channel,
    channel_derivative,
    min_vr_span,
    steering_vector,
    vr_cover,
)
from .crb import (
    CrbReport,
    FisherInfo,
    crb_position,
    fim,
    fim_finite_difference,
    min_sensing_duration,
    sample_covariance,
)
from .echo import EchoBatch, aggregate, simulate_echo, uniform_probe
from .errors import (
    DegenerateChannelError,
    InfeasibleBlockError,
    InfeasibleWindowError,
    SingularFimError,
    SingularGeometryError,
    UnidentifiableReflectionError,
)
from .geometry import (
    SPEED_OF_LIGHT,
    UpaGeometry,
    build_upa,
    element_position,
    grid_indices,
    linear_index,
)
from .harness import (
    SCHEMES,
    ArraySpec,
    ErSpec,
    ScenarioConfig,
    SweepRow,
    TrialResult,
    config_from_dict,
    default_config,
    load_config,
    rows_to_csv,
    run_trial,
    run_trials,
    simulate,
    summarize,
    sweep_beta,
    sweep_gamma,
    sweep_pmax,
    write_csv,
)
from .localize import LocalizationResult, concentrated_objective, estimate_b, locate_er
from .visibility import estimate_power_levels, identify_vr, scaling_factor

__all__ = [
    "SPEED_OF_LIGHT",
    "SCHEMES",
    "ArraySpec",
    "BeamformerSolution",
    "CrbReport",
    "DegenerateChannelError",
    "EchoBatch",
    "ErSpec",
    "ErState",
    "FisherInfo",
    "InfeasibleBlockError",
    "InfeasibleWindowError",
    "LocalizationResult",
    "ScenarioConfig",
    "SingularFimError",
    "SingularGeometryError",
    "SweepRow",
    "TrialResult",
    "UnidentifiableReflectionError",
    "UpaGeometry",
    "VisibilityRegion",
    "aggregate",
    "average_harvested_power",
    "build_upa",
    "channel",
    "channel_derivative",
    "concentrated_objective",
    "config_from_dict",
    "crb_position",
    "default_config",
    "element_position",
    "estimate_b",
    "estimate_power_levels",
    "fim",
    "fim_finite_difference",
    "grid_indices",
    "harvested_power",
    "identify_vr",
    "isotropic_covariance",
    "linear_index",
    "load_config",
    "locate_er",
    "min_sensing_duration",
    "min_vr_span",
    "rows_to_csv",
    "run_trial",
    "run_trials",
    "sample_covariance",
    "scaling_factor",
    "simulate",
    "simulate_echo",
    "solve_energy_covariance",
    "steering_vector",
    "summarize",
    "sweep_beta",
    "sweep_gamma",
    "sweep_pmax",
    "uniform_probe",
    "vr_cover",
    "weighted_channel_matrix",
    "write_csv",
]

__version__ = "0.1.0"
