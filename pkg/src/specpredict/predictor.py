"""End-to-end availability prediction for users sharing one primary.

Runs the whole pipeline: precompute each user's path loss once (static
geometry), classify users against the interference threshold, simulate
or analytically evolve the primary's occupancy, and map it onto
per-user availability timelines.  Because geometry is static the
per-step decision rule degenerates to the identity ``Y_n = X_n`` for
in-range users and all-Free for out-of-range ones, so the hot loop does
no threshold comparisons at all — a replica's primary path is shared by
every user and timelines are materialized on demand.

Monte Carlo replicas draw from independent substreams derived from
``(seed, replica_index)``, so results are deterministic under the seed,
independent of worker count and execution order, and stable when
replicas are added.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

import numpy as np

from . import propagation
from .availability import RadioParams, RangeClass, classify_range
from .errors import SpecPredictError
from .markov import (
    ChannelState,
    MarkovParams,
    StateDistribution,
    _simulate_paths,
    _step_p_active,
    stationary_distribution,
)
from .propagation import LinkGeometry, PathLossResult, PropagationModel
from .rng import substream_seeds, uniform_block


@dataclass(frozen=True)
class MonteCarlo:
    """Seeded Monte Carlo mode with ``n_replicas`` independent paths."""

    seed: int
    n_replicas: int = 1

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if isinstance(self.n_replicas, bool) or not isinstance(self.n_replicas, int):
            raise ValueError(f"n_replicas must be an integer, got {self.n_replicas!r}")
        if self.n_replicas < 1:
            raise ValueError(f"n_replicas must be >= 1, got {self.n_replicas}")


@dataclass(frozen=True)
class Analytic:
    """Deterministic mode: exact per-step occupancy probabilities."""


Mode = Union[MonteCarlo, Analytic]


@dataclass(frozen=True)
class Scenario:
    """One static prediction problem: a primary, its radio constants,
    and the secondary users listening to it.

    Args:
        markov: Occupancy-chain transition probabilities.
        radio: Link-budget constants (power, gains, threshold).
        users: ``(user_id, geometry)`` pairs; ids must be unique and all
            geometries must share the primary-side fields (``h_tx_m``,
            ``freq_mhz``, ``time_pct``) since there is a single static
            primary.  Mobility is out of scope and rejected here.
        model: Propagation model pair used for every user.
        n_steps: Timeline length (>= 1).
        mode: :class:`MonteCarlo` or :class:`Analytic`.
        initial: Fixed initial primary state, or ``None`` to start from
            the stationary distribution.
    """

    markov: MarkovParams
    radio: RadioParams
    users: tuple[tuple[str, LinkGeometry], ...]
    model: PropagationModel
    n_steps: int
    mode: Mode
    initial: ChannelState | None = None

    def __post_init__(self):
        users = tuple((uid, geom) for uid, geom in self.users)
        if not users:
            raise ValueError("scenario needs at least one user")
        seen: set[str] = set()
        for uid, geom in users:
            if not isinstance(uid, str) or not uid:
                raise ValueError(f"user id must be a non-empty string, got {uid!r}")
            if uid in seen:
                raise ValueError(f"duplicate user id {uid!r}")
            seen.add(uid)
            if not isinstance(geom, LinkGeometry):
                raise ValueError(f"user {uid!r}: expected LinkGeometry, got {geom!r}")
        anchor = (users[0][1].h_tx_m, users[0][1].freq_mhz, users[0][1].time_pct)
        for uid, geom in users[1:]:
            if (geom.h_tx_m, geom.freq_mhz, geom.time_pct) != anchor:
                raise ValueError(
                    f"user {uid!r}: h_tx_m/freq_mhz/time_pct must match the shared "
                    "primary (static single-transmitter scenario)"
                )
        object.__setattr__(self, "users", users)
        if isinstance(self.n_steps, bool) or not isinstance(self.n_steps, int):
            raise ValueError(f"n_steps must be an integer, got {self.n_steps!r}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not isinstance(self.mode, (MonteCarlo, Analytic)):
            raise ValueError(f"mode must be MonteCarlo or Analytic, got {self.mode!r}")
        if self.initial is not None and not isinstance(self.initial, ChannelState):
            raise ValueError(f"initial must be a ChannelState or None, got {self.initial!r}")

    @property
    def user_ids(self) -> tuple[str, ...]:
        return tuple(uid for uid, _ in self.users)


@dataclass(frozen=True)
class PredictionTimeline:
    """One user's predicted timeline: 0/1 availability states (Monte
    Carlo, one replica) or per-step occupancy probabilities (analytic)."""

    user_id: str
    states: np.ndarray | None = None
    probs: np.ndarray | None = None
    replica: int | None = None

    def __post_init__(self):
        if (self.states is None) == (self.probs is None):
            raise ValueError("exactly one of states/probs must be set")

    def __len__(self) -> int:
        seq = self.states if self.states is not None else self.probs
        return int(seq.size)


@dataclass(frozen=True)
class UserSummary:
    """Per-user availability digest.

    ``availability_fraction`` is the fraction of Free cells over the
    whole run (all replicas pooled in Monte Carlo mode; the mean per-step
    free probability in analytic mode).  Longest runs are maxima across
    replicas in Monte Carlo mode and undefined (``None``) for analytic
    probability timelines.
    """

    user_id: str
    availability_fraction: float
    longest_free_run: int | None
    longest_occupied_run: int | None


@dataclass(frozen=True)
class PredictionReport:
    """Everything a prediction run produced.

    Monte Carlo reports carry the shared primary paths (one row per
    replica); analytic reports carry the occupancy probability curve.
    Per-user timelines are materialized on demand from those plus the
    static range classification, which keeps memory at O(replicas x
    steps + users) instead of O(steps x users).
    """

    scenario: Scenario
    losses: Mapping[str, PathLossResult]
    in_range: Mapping[str, bool]
    summaries: Mapping[str, UserSummary]
    metadata: Mapping[str, object]
    paths: np.ndarray | None = None
    occupancy_probs: np.ndarray | None = None

    @property
    def n_replicas(self) -> int:
        return 1 if self.paths is None else int(self.paths.shape[0])

    def timeline(self, user_id: str, replica: int = 0) -> PredictionTimeline:
        """Materialize one user's timeline (for one replica in MC mode)."""
        in_range = self.in_range[user_id]
        n = self.scenario.n_steps
        if self.paths is not None:
            if not 0 <= replica < self.paths.shape[0]:
                raise IndexError(f"replica {replica} out of range")
            states = self.paths[replica].copy() if in_range else np.zeros(n, np.uint8)
            return PredictionTimeline(user_id=user_id, states=states, replica=replica)
        probs = self.occupancy_probs.copy() if in_range else np.zeros(n)
        return PredictionTimeline(user_id=user_id, probs=probs)

    def iter_timelines(self, replica: int = 0) -> Iterator[PredictionTimeline]:
        """Timelines for all users in scenario order."""
        for uid in self.scenario.user_ids:
            yield self.timeline(uid, replica=replica)


def precompute_losses(scenario: Scenario) -> dict[str, PathLossResult]:
    """Evaluate the loss model exactly once per user.

    Propagation errors are re-raised with the offending user id
    prefixed.
    """
    losses: dict[str, PathLossResult] = {}
    for uid, geom in scenario.users:
        try:
            losses[uid] = propagation.total_loss(scenario.model, geom)
        except SpecPredictError as exc:
            raise type(exc)(f"user {uid!r}: {exc}") from exc
    return losses


def _classify_users(
    scenario: Scenario, losses: Mapping[str, PathLossResult]
) -> dict[str, bool]:
    return {
        uid: classify_range(scenario.radio, losses[uid]) is RangeClass.IN_RANGE
        for uid in scenario.user_ids
    }


def _longest_runs(paths: np.ndarray) -> tuple[int, int]:
    """Longest (zero run, one run) over all rows of a 0/1 matrix."""
    n = paths.shape[1]
    idx = np.arange(n, dtype=np.int64)
    ones = paths != 0
    last_zero = np.maximum.accumulate(np.where(~ones, idx, np.int64(-1)), axis=1)
    longest_one = int((idx - last_zero).max())
    last_one = np.maximum.accumulate(np.where(ones, idx, np.int64(-1)), axis=1)
    longest_zero = int((idx - last_one).max())
    return longest_zero, longest_one


def _initial_draws(
    scenario: Scenario, seeds: np.ndarray
) -> tuple[np.ndarray, int]:
    """Initial states per replica and the per-stream draw offset."""
    n_replicas = seeds.shape[0]
    if scenario.initial is None:
        pi = stationary_distribution(scenario.markov)
        u0 = uniform_block(seeds, 1)[:, 0]
        return (u0 < pi.p_active).astype(np.int64), 1
    return np.full(n_replicas, int(scenario.initial), dtype=np.int64), 0


def predict_monte_carlo(scenario: Scenario, workers: int = 1) -> PredictionReport:
    """Simulate seeded replica timelines for every user.

    Replica ``r`` consumes the substream derived from
    ``(mode.seed, r)``: one draw for the initial state when starting
    from the stationary distribution, then one per step — exactly the
    sequential :func:`specpredict.markov.sample_path` contract, so a
    replica row equals the path a scalar generator would produce.

    Args:
        scenario: Scenario with ``mode=MonteCarlo``; raises
            :class:`specpredict.errors.DegenerateChainError` when asked
            for a stationary start of a degenerate chain.
        workers: Thread count for replica generation.  Replicas are
            split into contiguous chunks merged by index, so the output
            is byte-identical for every worker count.
    """
    if not isinstance(scenario.mode, MonteCarlo):
        raise ValueError("scenario.mode must be MonteCarlo for predict_monte_carlo")
    t0 = time.perf_counter()
    losses = precompute_losses(scenario)
    in_range = _classify_users(scenario, losses)

    n_replicas, n_steps = scenario.mode.n_replicas, scenario.n_steps
    lam, mu = scenario.markov.lam, scenario.markov.mu
    seeds = substream_seeds(scenario.mode.seed, n_replicas)
    x0, offset = _initial_draws(scenario, seeds)

    paths = np.empty((n_replicas, n_steps), dtype=np.uint8)

    def fill(lo: int, hi: int) -> None:
        u = uniform_block(seeds[lo:hi], n_steps, offset)
        paths[lo:hi] = _simulate_paths(x0[lo:hi], u, lam, mu)

    n_workers = max(1, min(int(workers), n_replicas))
    if n_workers == 1:
        fill(0, n_replicas)
    else:
        bounds = np.linspace(0, n_replicas, n_workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [
                pool.submit(fill, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if lo < hi
            ]
            for fut in futures:
                fut.result()

    longest_zero, longest_one = _longest_runs(paths)
    occupied = int(paths.sum(dtype=np.int64))
    cells = paths.size
    summaries = {}
    for uid in scenario.user_ids:
        if in_range[uid]:
            summaries[uid] = UserSummary(
                user_id=uid,
                availability_fraction=(cells - occupied) / cells,
                longest_free_run=longest_zero,
                longest_occupied_run=longest_one,
            )
        else:
            summaries[uid] = UserSummary(
                user_id=uid,
                availability_fraction=1.0,
                longest_free_run=n_steps,
                longest_occupied_run=0,
            )

    metadata = {
        "mode": "monte_carlo",
        "seed": scenario.mode.seed,
        "n_replicas": n_replicas,
        "workers": n_workers,
        "initial": "stationary" if scenario.initial is None else scenario.initial.name.lower(),
        "basic_model": scenario.model.basic.name,
        "clutter_model": scenario.model.clutter.name,
        "wall_time_s": time.perf_counter() - t0,
    }
    return PredictionReport(
        scenario=scenario,
        losses=losses,
        in_range=in_range,
        summaries=summaries,
        metadata=metadata,
        paths=paths,
    )


def predict_analytic(scenario: Scenario, workers: int = 1) -> PredictionReport:
    """Evolve exact per-step occupancy probabilities for every user.

    Step ``n`` carries ``Pr{X_n = Active}`` for in-range users and 0 for
    out-of-range ones; no randomness is involved.  ``workers`` is
    accepted for interface symmetry but the stepwise evolution is
    inherently sequential and single-threaded.
    """
    if not isinstance(scenario.mode, Analytic):
        raise ValueError("scenario.mode must be Analytic for predict_analytic")
    t0 = time.perf_counter()
    losses = precompute_losses(scenario)
    in_range = _classify_users(scenario, losses)

    lam, mu = scenario.markov.lam, scenario.markov.mu
    if scenario.initial is None:
        p_active = stationary_distribution(scenario.markov).p_active
    else:
        p_active = float(int(scenario.initial))
    probs = np.empty(scenario.n_steps, dtype=np.float64)
    for n in range(scenario.n_steps):
        p_active = _step_p_active(p_active, lam, mu)
        probs[n] = p_active

    summaries = {}
    for uid in scenario.user_ids:
        fraction = float(np.mean(1.0 - probs)) if in_range[uid] else 1.0
        summaries[uid] = UserSummary(
            user_id=uid,
            availability_fraction=fraction,
            longest_free_run=None,
            longest_occupied_run=None,
        )

    metadata = {
        "mode": "analytic",
        "seed": None,
        "n_replicas": None,
        "workers": 1,
        "initial": "stationary" if scenario.initial is None else scenario.initial.name.lower(),
        "basic_model": scenario.model.basic.name,
        "clutter_model": scenario.model.clutter.name,
        "wall_time_s": time.perf_counter() - t0,
    }
    return PredictionReport(
        scenario=scenario,
        losses=losses,
        in_range=in_range,
        summaries=summaries,
        metadata=metadata,
        occupancy_probs=probs,
    )


def predict(scenario: Scenario, workers: int = 1) -> PredictionReport:
    """Dispatch to the predictor matching ``scenario.mode``."""
    if isinstance(scenario.mode, MonteCarlo):
        return predict_monte_carlo(scenario, workers=workers)
    return predict_analytic(scenario, workers=workers)


def ensemble_availability(report: PredictionReport) -> dict[str, np.ndarray]:
    """Per-step empirical occupancy frequency across replicas.

    For each user and step: (occupied replicas) / (total replicas).
    With one replica the frequencies are exactly the 0/1 timeline.

    Raises:
        ValueError: If the report is not a Monte Carlo report.
    """
    if report.paths is None:
        raise ValueError("ensemble_availability needs a Monte Carlo report")
    freq = report.paths.mean(axis=0)
    zeros = np.zeros_like(freq)
    return {
        uid: freq.copy() if report.in_range[uid] else zeros.copy()
        for uid in report.scenario.user_ids
    }
