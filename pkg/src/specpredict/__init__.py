"""specpredict: spectrum availability prediction for secondary users.

Combines a two-state occupancy model of a primary transmitter with
path-loss models and a link-budget threshold rule to predict, per
secondary user, when a channel is free — as seeded Monte Carlo
timelines or exact per-step probabilities.
"""

from .errors import (
    DegenerateChainError,
    DistanceOutOfRangeError,
    EnvironmentUnsupportedError,
    FrequencyOutOfRangeError,
    InsufficientDataError,
    InvalidBracketError,
    NonMonotoneDistancesError,
    ScenarioValidationError,
    SpecPredictError,
    TableParseError,
    TraceParseError,
)
from .rng import SplitMix64, substream_seed, substream_seeds, uniform_block
from .markov import (
    ChannelState,
    MarkovParams,
    OccupancyTrace,
    StateDistribution,
    TransitionCounts,
    estimate_params,
    evolve_distribution,
    sample_path,
    stationary_distribution,
    step,
    transition_counts,
)
from .propagation import (
    BasicLossModel,
    ClutterEnvironment,
    ClutterLossModel,
    FreeSpaceLoss,
    LinkGeometry,
    LossTable,
    NoClutter,
    PathLossResult,
    PropagationModel,
    SmoothEarthLoss,
    StatisticalClutter,
    TableClutter,
    TableLoss,
    basic_loss,
    clutter_loss,
    free_space_loss,
    load_loss_table,
    total_loss,
)
from .availability import (
    AvailabilityState,
    NoCrossing,
    RadioParams,
    RangeClass,
    channel_state,
    classify_range,
    interference_range,
    received_power,
)
from .predictor import (
    Analytic,
    MonteCarlo,
    PredictionReport,
    PredictionTimeline,
    Scenario,
    UserSummary,
    ensemble_availability,
    precompute_losses,
    predict,
    predict_analytic,
    predict_monte_carlo,
)
from .scenario import build_scenario, load_scenario_file

__version__ = "0.1.0"

__all__ = [
    "Analytic",
    "AvailabilityState",
    "BasicLossModel",
    "ChannelState",
    "ClutterEnvironment",
    "ClutterLossModel",
    "DegenerateChainError",
    "DistanceOutOfRangeError",
    "EnvironmentUnsupportedError",
    "FreeSpaceLoss",
    "FrequencyOutOfRangeError",
    "InsufficientDataError",
    "InvalidBracketError",
    "LinkGeometry",
    "LossTable",
    "MarkovParams",
    "MonteCarlo",
    "NoClutter",
    "NoCrossing",
    "NonMonotoneDistancesError",
    "OccupancyTrace",
    "PathLossResult",
    "PredictionReport",
    "PredictionTimeline",
    "PropagationModel",
    "RadioParams",
    "RangeClass",
    "Scenario",
    "ScenarioValidationError",
    "SmoothEarthLoss",
    "SpecPredictError",
    "SplitMix64",
    "StateDistribution",
    "StatisticalClutter",
    "TableClutter",
    "TableLoss",
    "TableParseError",
    "TraceParseError",
    "TransitionCounts",
    "UserSummary",
    "basic_loss",
    "build_scenario",
    "channel_state",
    "classify_range",
    "clutter_loss",
    "ensemble_availability",
    "estimate_params",
    "evolve_distribution",
    "free_space_loss",
    "interference_range",
    "load_loss_table",
    "load_scenario_file",
    "precompute_losses",
    "predict",
    "predict_analytic",
    "predict_monte_carlo",
    "received_power",
    "sample_path",
    "stationary_distribution",
    "step",
    "substream_seed",
    "substream_seeds",
    "total_loss",
    "transition_counts",
    "uniform_block",
]
