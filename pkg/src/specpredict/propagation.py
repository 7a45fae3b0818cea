"""Path-loss models for the primary-to-secondary link.

Total loss is the dB-domain sum of a *basic* transmission loss (the
over-the-path propagation loss) and a *clutter* loss (extra attenuation
from obstructions local to the receiver).  Both halves are pluggable:
anything with a ``loss_db(geometry)`` method works, and three basic
models (free-space, a smooth-earth horizon model, interpolated tables)
plus three clutter models (none, statistical percentile, tables) ship
built in.

The built-in analytic models are deliberately simple.  They are not
conformant implementations of the ITU-R recommendations they resemble;
for authoritative losses compute a table with a reference
implementation and load it with :func:`load_loss_table`.

All loss arithmetic is double precision dB, and every operation here is
a pure function of its inputs.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import ClassVar, Protocol

import numpy as np

from .errors import (
    DistanceOutOfRangeError,
    EnvironmentUnsupportedError,
    FrequencyOutOfRangeError,
    NonMonotoneDistancesError,
    TableParseError,
)

_NORMAL = statistics.NormalDist()


class ClutterEnvironment(Enum):
    """Receiver-side environment class used by clutter models."""

    OPEN = "open"
    SUBURBAN = "suburban"
    URBAN = "urban"


@dataclass(frozen=True)
class LinkGeometry:
    """Static geometry of one primary-to-secondary link.

    Args:
        distance_km: Great-circle separation in km (> 0).
        h_tx_m: Transmitter antenna height above ground in m (>= 1).
        h_rx_m: Receiver antenna height above ground in m (>= 1).
        freq_mhz: Carrier frequency in MHz (model validity spans are
            checked at evaluation time, not here).
        time_pct: Time-availability percentage in (0, 100); 50 is the
            median-time prediction.
        clutter_env: Environment class around the receiver.
        loc_pct: Clutter location percentage in (0, 100); 50 is the
            median location.
    """

    distance_km: float
    h_tx_m: float
    h_rx_m: float
    freq_mhz: float
    time_pct: float = 50.0
    clutter_env: ClutterEnvironment = ClutterEnvironment.OPEN
    loc_pct: float = 50.0

    def __post_init__(self):
        if not math.isfinite(self.distance_km) or self.distance_km <= 0:
            raise ValueError(f"distance_km must satisfy > 0, got {self.distance_km}")
        for name, h in (("h_tx_m", self.h_tx_m), ("h_rx_m", self.h_rx_m)):
            if not math.isfinite(h) or h < 1.0:
                raise ValueError(f"{name} must satisfy >= 1 m, got {h}")
        if not math.isfinite(self.freq_mhz):
            raise ValueError(f"freq_mhz must be finite, got {self.freq_mhz}")
        for name, pct in (("time_pct", self.time_pct), ("loc_pct", self.loc_pct)):
            if not math.isfinite(pct) or not 0.0 < pct < 100.0:
                raise ValueError(f"{name} must lie in (0, 100), got {pct}")
        if not isinstance(self.clutter_env, ClutterEnvironment):
            raise ValueError(f"clutter_env must be a ClutterEnvironment, got {self.clutter_env!r}")


@dataclass(frozen=True)
class PathLossResult:
    """Loss decomposition for one link; total is exactly basic + clutter."""

    l_basic_db: float
    l_clutter_db: float
    l_total_db: float = field(init=False)

    def __post_init__(self):
        for name, value in (
            ("l_basic_db", self.l_basic_db),
            ("l_clutter_db", self.l_clutter_db),
        ):
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0 dB, got {value}")
        object.__setattr__(self, "l_total_db", self.l_basic_db + self.l_clutter_db)


@dataclass(frozen=True)
class LossTable:
    """Loss-versus-distance samples with linear interpolation.

    Distances must be strictly increasing with at least two samples;
    queries outside the sampled span are refused rather than
    extrapolated.
    """

    distances_km: np.ndarray
    losses_db: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.distances_km, dtype=np.float64)
        l = np.asarray(self.losses_db, dtype=np.float64)
        if d.ndim != 1 or d.shape != l.shape or d.size < 2:
            raise ValueError("table needs matching 1-D axes with >= 2 samples")
        if not (np.isfinite(d).all() and np.isfinite(l).all()):
            raise ValueError("table entries must be finite")
        if (l < 0.0).any():
            raise ValueError("table losses must be >= 0 dB")
        if not (np.diff(d) > 0).all():
            raise NonMonotoneDistancesError("table distances must be strictly increasing")
        d.setflags(write=False)
        l.setflags(write=False)
        object.__setattr__(self, "distances_km", d)
        object.__setattr__(self, "losses_db", l)

    def interpolate(self, distance_km: float) -> float:
        """Linearly interpolated loss at ``distance_km``.

        Raises:
            DistanceOutOfRangeError: If the distance falls outside the
                table span (no extrapolation).
        """
        d0, d1 = self.distances_km[0], self.distances_km[-1]
        if not d0 <= distance_km <= d1:
            raise DistanceOutOfRangeError(
                f"distance {distance_km} km outside table span [{d0}, {d1}] km"
            )
        return float(np.interp(distance_km, self.distances_km, self.losses_db))


def load_loss_table(source: str | Path) -> LossTable:
    """Load a loss table from a CSV file.

    Expected format: UTF-8 text, header line ``distance_km,loss_db``,
    then one ``<distance>,<loss>`` sample per line (LF or CRLF, ``.``
    decimal separator).  Blank lines are ignored.

    Raises:
        TableParseError: On unreadable files, bad headers, malformed or
            non-finite rows (the 1-indexed line number is reported), or
            fewer than two samples.
        NonMonotoneDistancesError: If distances are not strictly
            increasing.
    """
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableParseError(f"cannot read loss table {path}: {exc}") from exc

    distances: list[float] = []
    losses: list[float] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if not header_seen:
            if line != "distance_km,loss_db":
                raise TableParseError(
                    f"{path}: line {lineno}: expected header 'distance_km,loss_db', got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TableParseError(
                f"{path}: line {lineno}: expected 2 comma-separated values, got {len(parts)}"
            )
        try:
            d, l = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise TableParseError(f"{path}: line {lineno}: {exc}") from exc
        if not (math.isfinite(d) and math.isfinite(l)):
            raise TableParseError(f"{path}: line {lineno}: values must be finite")
        if l < 0.0:
            raise TableParseError(f"{path}: line {lineno}: loss must be >= 0 dB")
        distances.append(d)
        losses.append(l)

    if not header_seen:
        raise TableParseError(f"{path}: empty file (missing header)")
    if len(distances) < 2:
        raise TableParseError(f"{path}: need at least 2 data rows, got {len(distances)}")
    return LossTable(np.array(distances), np.array(losses))


def free_space_loss(geometry: LinkGeometry) -> float:
    """Friis free-space loss in dB.

    ``20*log10(d_km) + 20*log10(f_MHz) + 32.45`` over the slant distance
    (ground separation combined with antenna height difference), which
    collapses to the ground distance for equal heights.
    """
    if geometry.freq_mhz <= 0:
        raise ValueError(f"freq_mhz must be > 0, got {geometry.freq_mhz}")
    dh_km = (geometry.h_tx_m - geometry.h_rx_m) / 1000.0
    slant_km = math.hypot(geometry.distance_km, dh_km)
    return 20.0 * math.log10(slant_km) + 20.0 * math.log10(geometry.freq_mhz) + 32.45


class BasicLossModel(Protocol):
    """Anything that can price the over-the-path loss of a link."""

    name: str

    def loss_db(self, geometry: LinkGeometry) -> float: ...


class ClutterLossModel(Protocol):
    """Anything that can price receiver-side clutter attenuation."""

    name: str

    def loss_db(self, geometry: LinkGeometry) -> float: ...


@dataclass(frozen=True)
class FreeSpaceLoss:
    """Pure Friis free-space basic loss; valid at any frequency."""

    name: ClassVar[str] = "free_space"

    def loss_db(self, geometry: LinkGeometry) -> float:
        return free_space_loss(geometry)


@dataclass(frozen=True)
class SmoothEarthLoss:
    """Smooth-earth basic loss: free space plus a beyond-horizon term.

    Within the radio horizon ``4.12*(sqrt(h_tx) + sqrt(h_rx))`` km the
    model reduces to free-space loss at median time.  Past the horizon
    an attenuation of ``beyond_horizon_db_per_km`` accrues per km.  Time
    variability subtracts ``time_sigma_db * z(time_pct/100)`` (z the
    standard normal quantile): high ``time_pct`` asks for the strong
    signal exceeded that rarely, i.e. a *lower* loss.  The result is
    floored at the free-space value so the model never predicts a
    better-than-free-space path.

    Valid for 125--15500 MHz and distances up to 1000 km.
    """

    beyond_horizon_db_per_km: float = 0.5
    time_sigma_db: float = 3.0
    name: ClassVar[str] = "smooth_earth"

    def __post_init__(self):
        if self.beyond_horizon_db_per_km < 0 or self.time_sigma_db < 0:
            raise ValueError("model parameters must be >= 0")

    def horizon_km(self, geometry: LinkGeometry) -> float:
        """Radio-horizon distance for the link's antenna heights."""
        return 4.12 * (math.sqrt(geometry.h_tx_m) + math.sqrt(geometry.h_rx_m))

    def loss_db(self, geometry: LinkGeometry) -> float:
        if not 125.0 <= geometry.freq_mhz <= 15500.0:
            raise FrequencyOutOfRangeError(
                f"smooth_earth model is valid for 125..15500 MHz, got {geometry.freq_mhz} MHz"
            )
        if geometry.distance_km > 1000.0:
            raise DistanceOutOfRangeError(
                f"smooth_earth model is valid up to 1000 km, got {geometry.distance_km} km"
            )
        fsl = free_space_loss(geometry)
        beyond_km = max(0.0, geometry.distance_km - self.horizon_km(geometry))
        excess = self.beyond_horizon_db_per_km * beyond_km
        adjustment = self.time_sigma_db * _NORMAL.inv_cdf(geometry.time_pct / 100.0)
        return fsl + max(0.0, excess - adjustment)


@dataclass(frozen=True)
class TableLoss:
    """Basic loss interpolated from a precomputed table."""

    table: LossTable
    name: ClassVar[str] = "table"

    def loss_db(self, geometry: LinkGeometry) -> float:
        return self.table.interpolate(geometry.distance_km)


@dataclass(frozen=True)
class NoClutter:
    """Clutter-free receiver surroundings: always 0 dB."""

    name: ClassVar[str] = "none"

    def loss_db(self, geometry: LinkGeometry) -> float:
        return 0.0


@dataclass(frozen=True)
class StatisticalClutter:
    """Percentile clutter loss from an environment-median distribution.

    The loss at location percentage ``p`` is the Gaussian quantile
    ``median_env + sigma_db * z(p/100)``, floored at 0 dB; ``p = 50``
    returns exactly the environment median.  Open terrain carries no
    clutter statistics and is rejected.  Valid for 500--67000 MHz.
    """

    urban_median_db: float = 20.0
    suburban_median_db: float = 12.0
    sigma_db: float = 6.0
    name: ClassVar[str] = "statistical"

    def __post_init__(self):
        if min(self.urban_median_db, self.suburban_median_db, self.sigma_db) < 0:
            raise ValueError("clutter parameters must be >= 0")

    def loss_db(self, geometry: LinkGeometry) -> float:
        if geometry.clutter_env is ClutterEnvironment.OPEN:
            raise EnvironmentUnsupportedError(
                "statistical clutter undefined for open terrain; use clutter model 'none'"
            )
        if not 500.0 <= geometry.freq_mhz <= 67000.0:
            raise FrequencyOutOfRangeError(
                f"statistical clutter is valid for 500..67000 MHz, got {geometry.freq_mhz} MHz"
            )
        median = (
            self.urban_median_db
            if geometry.clutter_env is ClutterEnvironment.URBAN
            else self.suburban_median_db
        )
        return max(0.0, median + self.sigma_db * _NORMAL.inv_cdf(geometry.loc_pct / 100.0))


@dataclass(frozen=True)
class TableClutter:
    """Clutter loss interpolated from a precomputed table."""

    table: LossTable
    name: ClassVar[str] = "table"

    def loss_db(self, geometry: LinkGeometry) -> float:
        return self.table.interpolate(geometry.distance_km)


@dataclass(frozen=True)
class PropagationModel:
    """A basic-loss model paired with a clutter model."""

    basic: BasicLossModel
    clutter: ClutterLossModel = NoClutter()


def basic_loss(model: PropagationModel, geometry: LinkGeometry) -> float:
    """Basic transmission loss in dB under ``model.basic``."""
    return model.basic.loss_db(geometry)


def clutter_loss(model: PropagationModel, geometry: LinkGeometry) -> float:
    """Clutter loss in dB under ``model.clutter``."""
    return model.clutter.loss_db(geometry)


def total_loss(model: PropagationModel, geometry: LinkGeometry) -> PathLossResult:
    """Basic plus clutter loss for one link (pure function of inputs)."""
    return PathLossResult(
        l_basic_db=basic_loss(model, geometry),
        l_clutter_db=clutter_loss(model, geometry),
    )
