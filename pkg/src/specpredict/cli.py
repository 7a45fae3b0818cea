"""Command-line front end.

Subcommands:
    predict     run a scenario file and write timelines + summary
    stationary  print the long-run (idle, active) distribution
    range       bisect the interference-range distance for a scenario
    estimate    fit transition probabilities to an observed 0/1 trace

Exit codes: 0 success, 2 invalid input (bad flags, malformed scenario /
trace / table files, degenerate parameters), 3 runtime failure (output
I/O errors, internal faults).  The ``SPECPREDICT_LOG`` environment
variable sets the log level (DEBUG, INFO, WARNING, ...).

Every output file is written to a temporary name and atomically
renamed, so a crash never leaves a partial file; ``summary.json`` is
written last, so its presence marks a complete bundle.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .availability import NoCrossing, interference_range
from .errors import SpecPredictError, TraceParseError
from .markov import MarkovParams, estimate_params, stationary_distribution, transition_counts
from .predictor import PredictionReport, predict
from .propagation import ClutterEnvironment, LinkGeometry
from .scenario import load_scenario_file

log = logging.getLogger("specpredict")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specpredict",
        description="Spectrum availability prediction for secondary users.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_predict = sub.add_parser("predict", help="run a scenario and write timelines")
    p_predict.add_argument("--scenario", required=True, help="scenario JSON file")
    p_predict.add_argument("--out", required=True, help="output directory")
    p_predict.add_argument("--seed", type=int, default=None, help="override run.seed")
    p_predict.add_argument("--n-steps", type=int, default=None, help="override run.n_steps")
    p_predict.add_argument(
        "--mode", choices=("monte_carlo", "analytic"), default=None, help="override run.mode"
    )
    p_predict.add_argument("--replicas", type=int, default=None, help="override run.n_replicas")
    p_predict.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads for replica generation (default: CPU count); "
        "results are identical for every worker count",
    )
    p_predict.set_defaults(func=_cmd_predict)

    p_stat = sub.add_parser("stationary", help="print the long-run state distribution")
    p_stat.add_argument("lam", metavar="LAMBDA", type=float, help="idle-to-active probability")
    p_stat.add_argument("mu", metavar="MU", type=float, help="active-to-idle probability")
    p_stat.set_defaults(func=_cmd_stationary)

    p_range = sub.add_parser("range", help="bisect the interference-range distance")
    p_range.add_argument("--scenario", required=True, help="scenario JSON file (radio/propagation/primary)")
    p_range.add_argument("--d-min", type=float, default=0.1, help="bracket lower edge, km (default 0.1)")
    p_range.add_argument("--d-max", type=float, default=100.0, help="bracket upper edge, km (default 100)")
    p_range.add_argument("--h-rx-m", type=float, default=1.5, help="receiver height, m (default 1.5)")
    p_range.add_argument(
        "--clutter-env",
        choices=("open", "suburban", "urban"),
        default="open",
        help="receiver environment (default open)",
    )
    p_range.add_argument("--loc-pct", type=float, default=50.0, help="clutter location percentage")
    p_range.set_defaults(func=_cmd_range)

    p_est = sub.add_parser("estimate", help="estimate transition probabilities from a trace")
    p_est.add_argument("trace", help="trace file of 0/1 tokens (newline/comma separated)")
    p_est.add_argument(
        "--add-one", action="store_true", help="apply add-one smoothing to transition counts"
    )
    p_est.set_defaults(func=_cmd_estimate)
    return parser


def _atomic_write(path: Path, lines: Iterable[str]) -> None:
    tmp = path.with_name(path.name + ".tmp~")
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(lines)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def _state_rows(header: str, values: np.ndarray) -> Iterator[str]:
    yield header + "\n"
    for step, value in enumerate(values, start=1):
        yield f"{step},{value}\n"


def _prob_rows(header: str, values: np.ndarray) -> Iterator[str]:
    yield header + "\n"
    for step, value in enumerate(values, start=1):
        # plain-float repr round-trips exactly and is shortest-form
        yield f"{step},{float(value)!r}\n"


def _write_bundle(report: PredictionReport, out_dir: Path, resolved: dict, overrides: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if report.occupancy_probs is not None:
        for timeline in report.iter_timelines():
            path = out_dir / f"timeline_{timeline.user_id}.csv"
            _atomic_write(path, _prob_rows("step,occupancy_prob", timeline.probs))
            written.append(path)
    else:
        n_replicas = report.n_replicas
        for uid in report.scenario.user_ids:
            if n_replicas == 1:
                timeline = report.timeline(uid)
                path = out_dir / f"timeline_{uid}.csv"
                _atomic_write(path, _state_rows("step,state", timeline.states))
                written.append(path)
            else:
                for r in range(n_replicas):
                    timeline = report.timeline(uid, replica=r)
                    path = out_dir / f"timeline_{uid}_r{r}.csv"
                    _atomic_write(path, _state_rows("step,state", timeline.states))
                    written.append(path)
        if n_replicas > 1:
            from .predictor import ensemble_availability

            for uid, freq in ensemble_availability(report).items():
                path = out_dir / f"ensemble_{uid}.csv"
                _atomic_write(path, _prob_rows("step,occupancy_freq", freq))
                written.append(path)

    users = {}
    for uid in report.scenario.user_ids:
        summary = report.summaries[uid]
        loss = report.losses[uid]
        users[uid] = {
            "in_range": report.in_range[uid],
            "l_basic_db": loss.l_basic_db,
            "l_clutter_db": loss.l_clutter_db,
            "l_total_db": loss.l_total_db,
            "availability_fraction": summary.availability_fraction,
            "longest_free_run": summary.longest_free_run,
            "longest_occupied_run": summary.longest_occupied_run,
        }
    run = {k: v for k, v in report.metadata.items() if k not in ("wall_time_s", "workers")}
    run["overrides"] = overrides
    summary_doc = {
        "scenario": resolved,
        "run": run,
        "users": users,
        # measurement-only keys live here so everything else is
        # byte-identical across reruns and worker counts
        "timing": {
            "wall_time_s": report.metadata["wall_time_s"],
            "workers": report.metadata["workers"],
        },
    }
    summary_path = out_dir / "summary.json"
    _atomic_write(summary_path, [json.dumps(summary_doc, indent=2, sort_keys=True) + "\n"])
    written.append(summary_path)
    return written


def _cmd_predict(args) -> int:
    scenario, resolved, overrides = load_scenario_file(
        args.scenario,
        n_steps=args.n_steps,
        seed=args.seed,
        mode=args.mode,
        n_replicas=args.replicas,
    )
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    if workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    report = predict(scenario, workers=workers)
    written = _write_bundle(report, Path(args.out), resolved, overrides)
    log.info(
        "predicted %d steps for %d users (%s mode) in %.3f s",
        scenario.n_steps,
        len(scenario.users),
        report.metadata["mode"],
        report.metadata["wall_time_s"],
    )
    print(f"wrote {len(written)} files to {args.out}")
    return 0


def _cmd_stationary(args) -> int:
    try:
        params = MarkovParams(lam=args.lam, mu=args.mu)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dist = stationary_distribution(params)
    print(f"{dist.p_idle:.6f} {dist.p_active:.6f}")
    return 0


def _cmd_range(args) -> int:
    # range runs no simulation, so the run section's monte_carlo seed
    # requirement must not apply; forcing analytic mode neutralizes it
    # while still type-checking whatever run keys the file does have
    scenario, _, _ = load_scenario_file(args.scenario, mode="analytic")
    anchor = scenario.users[0][1]
    try:
        if args.d_min <= 0:
            raise ValueError(f"--d-min must be > 0 km, got {args.d_min}")
        template = LinkGeometry(
            distance_km=args.d_min,
            h_tx_m=anchor.h_tx_m,
            h_rx_m=args.h_rx_m,
            freq_mhz=anchor.freq_mhz,
            time_pct=anchor.time_pct,
            clutter_env=ClutterEnvironment(args.clutter_env),
            loc_pct=args.loc_pct,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = interference_range(
        scenario.model, scenario.radio, template, args.d_min, args.d_max
    )
    if isinstance(result, NoCrossing):
        print(result.name)
    else:
        print(f"{result:.3f} km")
    return 0


def _parse_trace(path: str | Path) -> np.ndarray:
    """Read a 0/1 trace file; tokens split on commas and whitespace."""
    path = Path(path)
    values: list[int] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceParseError(f"cannot read trace file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        for token in line.replace(",", " ").split():
            if token == "0":
                values.append(0)
            elif token == "1":
                values.append(1)
            else:
                raise TraceParseError(
                    f"{path}: line {lineno}: invalid token {token!r} (expected 0 or 1)"
                )
    if not values:
        raise TraceParseError(f"{path}: no 0/1 tokens found")
    return np.array(values, dtype=np.uint8)


def _cmd_estimate(args) -> int:
    trace = _parse_trace(args.trace)
    counts = transition_counts(trace)
    params = estimate_params(trace, add_one=args.add_one)
    print(f"lam={params.lam:.6f} mu={params.mu:.6f}")
    print(
        f"idle_pairs={counts.idle_pairs} idle_to_active={counts.idle_to_active} "
        f"active_pairs={counts.active_pairs} active_to_idle={counts.active_to_idle}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    level_name = os.environ.get("SPECPREDICT_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    logging.basicConfig(
        level=level if isinstance(level, int) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecPredictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # engine faults: report, never traceback-spam
        log.exception("internal error")
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
