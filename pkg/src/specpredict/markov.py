"""Two-state occupancy model of a primary transmitter.

The transmitter is either idle or actively transmitting, and hops
between the two states once per time step: an idle transmitter becomes
active with probability ``lam``, an active one falls back to idle with
probability ``mu``.  For ``lam + mu > 0`` the chain has the unique
stationary distribution ``(mu, lam) / (lam + mu)`` and converges to it
geometrically at rate ``|1 - lam - mu|``.

All stochastic draws go through an explicitly supplied generator (see
:mod:`specpredict.rng`) and use the strict convention *transition fires
iff u < p*, so a probability of exactly 0 never fires and a probability
of exactly 1 always does.  Every step consumes exactly one uniform
variate, which pins down the value of a sampled path as a pure function
of ``(seed, initial state, n_steps)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
import math

import numpy as np

from .errors import DegenerateChainError, InsufficientDataError
from .rng import SplitMix64


class ChannelState(IntEnum):
    """Activity of the primary transmitter at one time step."""

    IDLE = 0
    ACTIVE = 1


@dataclass(frozen=True)
class MarkovParams:
    """Per-step transition probabilities of the occupancy chain.

    Args:
        lam: Probability that an idle transmitter turns active.
        mu: Probability that an active transmitter turns idle.
    """

    lam: float
    mu: float

    def __post_init__(self):
        for name, value in (("lam", self.lam), ("mu", self.mu)):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{name} must be a number, got {value!r}")
            if math.isnan(value) or not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class StateDistribution:
    """Probability vector over the two channel states.

    Components must each lie in ``[0, 1]`` and sum to 1 within 1e-12.
    """

    p_idle: float
    p_active: float

    def __post_init__(self):
        for name, value in (("p_idle", self.p_idle), ("p_active", self.p_active)):
            if math.isnan(value) or not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.p_idle + self.p_active - 1.0) > 1e-12:
            raise ValueError(
                f"probabilities must sum to 1, got {self.p_idle + self.p_active!r}"
            )


@dataclass(frozen=True)
class OccupancyTrace:
    """An observed 0/1 activity sequence (0 = idle, 1 = active)."""

    states: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.states)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("trace must be a non-empty 1-D sequence")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("trace may contain only 0 and 1")
        object.__setattr__(self, "states", arr.astype(np.uint8))

    def __len__(self) -> int:
        return self.states.size


@dataclass(frozen=True)
class TransitionCounts:
    """Pair counts extracted from a trace.

    ``idle_pairs``/``active_pairs`` count consecutive pairs starting in
    the respective state; ``idle_to_active``/``active_to_idle`` count
    how many of those pairs changed state.
    """

    idle_pairs: int
    idle_to_active: int
    active_pairs: int
    active_to_idle: int


def stationary_distribution(params: MarkovParams) -> StateDistribution:
    """Long-run state distribution of the chain.

    Returns:
        ``StateDistribution(mu / (lam + mu), lam / (lam + mu))``.

    Raises:
        DegenerateChainError: If ``lam == mu == 0`` (both states are
            absorbing, so no unique stationary distribution exists).
    """
    total = params.lam + params.mu
    if total == 0.0:
        raise DegenerateChainError(
            "stationary distribution undefined for lam == mu == 0"
        )
    return StateDistribution(p_idle=params.mu / total, p_active=params.lam / total)


def step(current: ChannelState, params: MarkovParams, rng: SplitMix64) -> ChannelState:
    """Advance the chain one step, consuming exactly one uniform variate."""
    u = rng.random()
    if current == ChannelState.IDLE:
        return ChannelState.ACTIVE if u < params.lam else ChannelState.IDLE
    return ChannelState.IDLE if u < params.mu else ChannelState.ACTIVE


def _simulate_paths(x0, uniforms: np.ndarray, lam: float, mu: float) -> np.ndarray:
    """Vectorized equivalent of repeatedly applying :func:`step`.

    Args:
        x0: Initial state(s): scalar or ``(n_rows,)`` array of 0/1.
        uniforms: ``(n_steps,)`` or ``(n_rows, n_steps)`` uniforms, one
            per step, laid out exactly as sequential draws would be.
        lam: Idle-to-active probability.
        mu: Active-to-idle probability.

    Returns:
        uint8 array of the same shape as ``uniforms`` holding states
        after steps ``1 .. n_steps`` (the initial state is not included).

    The scan exploits that each step is one of three maps on {0, 1}:
    with ``u < min(lam, mu)`` both transitions fire and the state flips,
    with ``min <= u < max`` exactly one fires and the next state is
    forced regardless of the current one (a *reset*, always to the state
    favoured by the larger probability), and otherwise the state stays.
    A path value is then the most recent reset value (or the initial
    state) xor the parity of the flips since.  Because the flip count is
    non-decreasing, "flip count at the latest reset" is just a running
    maximum of the flip count masked to reset positions.
    """
    u = np.atleast_2d(np.asarray(uniforms, dtype=np.float64))
    n_rows, n_steps = u.shape
    if n_steps == 0:
        return np.zeros(np.shape(uniforms), dtype=np.uint8)

    lo, hi = min(lam, mu), max(lam, mu)
    flip = u < lo
    reset = flip ^ (u < hi)  # exactly one transition would fire
    reset_value = lam > mu  # the forced state: active iff lam is larger

    count_t = np.int64 if n_steps > 2**31 - 2 else np.int32
    flips = np.cumsum(flip, axis=1, dtype=count_t)
    # flip count at the latest reset so far; 0 doubles as "no reset yet",
    # which is consistent because the pre-reset parity reference is 0
    flips_at_reset = np.maximum.accumulate(np.where(reset, flips, 0), axis=1)
    seen = np.logical_or.accumulate(reset, axis=1)

    x0_col = np.broadcast_to(
        np.asarray(x0, dtype=np.uint8).reshape(-1), (n_rows,)
    ).reshape(n_rows, 1)
    base = np.where(seen, reset_value, x0_col.astype(bool))
    parity = flips - flips_at_reset
    parity &= 1

    states = (base ^ parity.astype(bool)).astype(np.uint8)
    return states.reshape(np.shape(uniforms))


def sample_path(
    params: MarkovParams,
    initial: ChannelState | StateDistribution,
    n_steps: int,
    rng: SplitMix64,
) -> np.ndarray:
    """Sample one occupancy path ``X_1 .. X_n``.

    Args:
        params: Transition probabilities.
        initial: Either a fixed starting state, or a distribution from
            which the starting state is drawn (consuming one variate,
            active iff ``u < p_active``).
        n_steps: Number of steps to simulate (>= 1).
        rng: Generator supplying the uniforms; exactly one variate is
            consumed per step (plus one for a distribution initial).

    Returns:
        ``(n_steps,)`` uint8 array of states *after* each step; the
        initial state itself is not part of the returned path.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if isinstance(initial, StateDistribution):
        x0 = int(rng.random() < initial.p_active)
    else:
        x0 = int(ChannelState(initial))
    u = rng.random(n_steps)
    return _simulate_paths(x0, u, params.lam, params.mu)


def _step_p_active(p_active: float, lam: float, mu: float) -> float:
    """One application of the 2x2 transition rule to Pr{active},
    clipped to [0, 1] against accumulated rounding."""
    p = (1.0 - p_active) * lam + p_active * (1.0 - mu)
    return min(1.0, max(0.0, p))


def evolve_distribution(
    initial: StateDistribution, params: MarkovParams, n_steps: int
) -> StateDistribution:
    """Exact state distribution after ``n_steps`` applications of the chain.

    Each step applies ``p_active' = p_idle * lam + p_active * (1 - mu)``
    and keeps the vector normalized.  ``n_steps = 0`` returns the
    initial distribution unchanged.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if n_steps == 0:
        return initial
    p_active = initial.p_active
    for _ in range(n_steps):
        p_active = _step_p_active(p_active, params.lam, params.mu)
    return StateDistribution(p_idle=1.0 - p_active, p_active=p_active)


def transition_counts(trace: OccupancyTrace | np.ndarray) -> TransitionCounts:
    """Count state-pair transitions in a trace (needs length >= 2).

    Raises:
        InsufficientDataError: If the trace has fewer than two samples.
    """
    states = trace.states if isinstance(trace, OccupancyTrace) else OccupancyTrace(
        np.asarray(trace)
    ).states
    if states.size < 2:
        raise InsufficientDataError(
            f"need at least 2 samples to count transitions, got {states.size}"
        )
    src, dst = states[:-1], states[1:]
    idle = src == 0
    return TransitionCounts(
        idle_pairs=int(np.count_nonzero(idle)),
        idle_to_active=int(np.count_nonzero(idle & (dst == 1))),
        active_pairs=int(np.count_nonzero(~idle)),
        active_to_idle=int(np.count_nonzero(~idle & (dst == 0))),
    )


def estimate_params(
    trace: OccupancyTrace | np.ndarray, add_one: bool = False
) -> MarkovParams:
    """Maximum-likelihood transition probabilities from an observed trace.

    ``lam`` is estimated as (idle-to-active pairs) / (pairs starting
    idle) and ``mu`` symmetrically.  With ``add_one=True`` both counts of
    a ratio get Laplace add-one smoothing, which keeps estimates off the
    hard 0/1 boundary *when the originating state was observed at all*.

    Raises:
        InsufficientDataError: If the trace is shorter than 2 samples,
            or if one of the states never starts a pair (its outgoing
            probability cannot be estimated, smoothed or not); the
            message names the missing parameter.
    """
    counts = transition_counts(trace)
    if counts.idle_pairs == 0:
        raise InsufficientDataError(
            "no transitions out of the idle state observed; lam is not estimable"
        )
    if counts.active_pairs == 0:
        raise InsufficientDataError(
            "no transitions out of the active state observed; mu is not estimable"
        )
    if add_one:
        lam = (counts.idle_to_active + 1) / (counts.idle_pairs + 2)
        mu = (counts.active_to_idle + 1) / (counts.active_pairs + 2)
    else:
        lam = counts.idle_to_active / counts.idle_pairs
        mu = counts.active_to_idle / counts.active_pairs
    return MarkovParams(lam=lam, mu=mu)
