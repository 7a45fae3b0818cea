"""Link budget and the channel-availability decision rule.

A secondary user sees the channel as *occupied* at a step exactly when
the primary is transmitting **and** its signal arrives above the
interference threshold: ``p_rx >= p_th`` with an inclusive boundary, the
conservative reading that protects the secondary from interference.
Because geometry is static, the threshold comparison collapses to a
per-user constant — the in-range/out-of-range classification — and the
per-step rule becomes the identity ``Y_n = X_n`` for in-range users and
all-Free for out-of-range ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum, IntEnum

from .errors import InvalidBracketError
from .markov import ChannelState
from .propagation import LinkGeometry, PathLossResult, PropagationModel, total_loss


class AvailabilityState(IntEnum):
    """What the channel looks like to a secondary user at one step."""

    FREE = 0
    OCCUPIED = 1


class RangeClass(Enum):
    """Static classification of a user against the interference range."""

    IN_RANGE = "in_range"
    OUT_OF_RANGE = "out_of_range"


class NoCrossing(Enum):
    """Verdict when a threshold crossing search finds no sign change."""

    ALWAYS_IN = "ALWAYS_IN"
    ALWAYS_OUT = "ALWAYS_OUT"


@dataclass(frozen=True)
class RadioParams:
    """Link-budget constants of the primary transmitter and threshold.

    Args:
        p_tx_dbm: Primary transmit power.
        g_t_dbi: Transmit antenna gain (scalar, no pattern).
        g_r_dbi: Receive antenna gain (scalar, no pattern).
        p_th_dbm: Interference threshold at the secondary receiver;
            received power at or above it marks the channel occupied.
    """

    p_tx_dbm: float
    g_t_dbi: float
    g_r_dbi: float
    p_th_dbm: float

    def __post_init__(self):
        for name in ("p_tx_dbm", "g_t_dbi", "g_r_dbi", "p_th_dbm"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")


def received_power(radio: RadioParams, loss: PathLossResult) -> float:
    """Received power in dBm: ``p_tx + g_t + g_r - l_total``."""
    return radio.p_tx_dbm + radio.g_t_dbi + radio.g_r_dbi - loss.l_total_db


def channel_state(
    x: ChannelState, p_rx_dbm: float, p_th_dbm: float
) -> AvailabilityState:
    """Channel as seen by a user: occupied iff the primary is active
    and arrives at or above threshold (inclusive boundary)."""
    if x == ChannelState.ACTIVE and p_rx_dbm >= p_th_dbm:
        return AvailabilityState.OCCUPIED
    return AvailabilityState.FREE


def classify_range(radio: RadioParams, loss: PathLossResult) -> RangeClass:
    """In range iff the primary's signal would meet the threshold.

    For static geometry this is computed once and reused for the whole
    timeline: in-range users track the primary state exactly,
    out-of-range users always see a free channel.
    """
    if received_power(radio, loss) >= radio.p_th_dbm:
        return RangeClass.IN_RANGE
    return RangeClass.OUT_OF_RANGE


def interference_range(
    model: PropagationModel,
    radio: RadioParams,
    geometry_template: LinkGeometry,
    d_min_km: float,
    d_max_km: float,
    tolerance_km: float = 1e-3,
) -> float | NoCrossing:
    """Distance where received power crosses the threshold.

    Bisects over ``[d_min_km, d_max_km]`` (all other geometry fields
    taken from ``geometry_template``), assuming loss is monotone
    non-decreasing in distance — true for all built-in models.  The
    crossing is located to ``tolerance_km`` (default 1 m).

    Returns:
        The crossing distance in km, or :data:`NoCrossing.ALWAYS_IN` /
        :data:`NoCrossing.ALWAYS_OUT` when the whole bracket lies on one
        side of the threshold.

    Raises:
        InvalidBracketError: If ``d_min_km >= d_max_km``.

    Model errors (frequency validity, table span) propagate; pick a
    bracket inside the model's valid distance span.
    """
    if not d_min_km < d_max_km:
        raise InvalidBracketError(
            f"need d_min_km < d_max_km, got [{d_min_km}, {d_max_km}]"
        )

    def margin(d: float) -> float:
        loss = total_loss(model, replace(geometry_template, distance_km=d))
        return received_power(radio, loss) - radio.p_th_dbm

    if margin(d_min_km) < 0.0:
        return NoCrossing.ALWAYS_OUT
    if margin(d_max_km) >= 0.0:
        return NoCrossing.ALWAYS_IN

    lo, hi = d_min_km, d_max_km  # invariant: in range at lo, out at hi
    while hi - lo > tolerance_km:
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
