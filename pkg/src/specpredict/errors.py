"""Exception hierarchy for specpredict.

Everything raised deliberately by this package derives from
:class:`SpecPredictError`, so callers (including the CLI) can separate
"the inputs were bad" from genuine bugs: input problems raise a subclass
of :class:`SpecPredictError`, anything else is a defect.
"""


class SpecPredictError(Exception):
    """Base class for all errors raised by specpredict."""


class DegenerateChainError(SpecPredictError):
    """Both transition probabilities are zero, so no stationary
    distribution is uniquely defined."""


class InsufficientDataError(SpecPredictError):
    """An estimation routine was given too little data to produce an
    estimate; the message names the quantity that could not be formed."""


class FrequencyOutOfRangeError(SpecPredictError):
    """The carrier frequency lies outside the validity span of the
    selected propagation or clutter model."""


class DistanceOutOfRangeError(SpecPredictError):
    """The path distance lies outside the validity span of the selected
    model, or outside the span of a loss table (no extrapolation)."""


class EnvironmentUnsupportedError(SpecPredictError):
    """The selected clutter model has no defined loss for the requested
    environment (e.g. statistical clutter over open terrain)."""


class TableParseError(SpecPredictError):
    """A loss table file is malformed; the message reports the
    1-indexed line number of the first offending line."""


class NonMonotoneDistancesError(SpecPredictError):
    """A loss table's distance axis is not strictly increasing."""


class InvalidBracketError(SpecPredictError):
    """A search bracket is empty (lower bound not below upper bound)."""


class TraceParseError(SpecPredictError):
    """An occupancy trace file is malformed; the message reports the
    1-indexed line number of the first offending token."""


class ScenarioValidationError(SpecPredictError):
    """A scenario document is malformed; the message names the offending
    key path (e.g. ``markov.lambda``)."""
