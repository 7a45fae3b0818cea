"""Scenario documents: validation and construction of runnable scenarios.

A scenario file is a JSON object with six sections — ``markov``,
``radio``, ``propagation``, ``primary``, ``users``, ``run`` — mapping
one-to-one onto the engine's domain types.  Validation is strict and
loud: unknown keys are rejected, every message names the offending key
path (``markov.lambda``, ``users[2].distance_km``, ...), and nothing is
coerced silently.  Per-user link geometries are assembled from each
user entry plus the shared ``primary`` section, which is what pins all
users to the one static primary transmitter.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

from .errors import ScenarioValidationError
from .markov import ChannelState, MarkovParams
from .availability import RadioParams
from .predictor import Analytic, Mode, MonteCarlo, Scenario
from .propagation import (
    ClutterEnvironment,
    FreeSpaceLoss,
    LinkGeometry,
    NoClutter,
    PropagationModel,
    SmoothEarthLoss,
    StatisticalClutter,
    TableClutter,
    TableLoss,
    load_loss_table,
)

_USER_ID_RE = re.compile(r"^[A-Za-z0-9_.-]+$")

_PARAM_DEFAULTS = {
    "beyond_horizon_db_per_km": 0.5,
    "time_sigma_db": 3.0,
    "urban_median_db": 20.0,
    "suburban_median_db": 12.0,
    "clutter_sigma_db": 6.0,
}


def _fail(path: str, message: str) -> ScenarioValidationError:
    return ScenarioValidationError(f"{path}: {message}")


def _as_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    for key in obj:
        if key not in required and key not in optional:
            raise _fail(f"{path}.{key}" if path else key, "unknown key")
    for key in required:
        if key not in obj:
            raise _fail(f"{path}.{key}" if path else key, "missing required key")


def _number(
    obj: dict,
    path: str,
    key: str,
    *,
    default: float | None = None,
    lo: float | None = None,
    hi: float | None = None,
    lo_open: bool = False,
    hi_open: bool = False,
) -> float:
    if key not in obj:
        if default is None:
            raise _fail(f"{path}.{key}", "missing required key")
        return default
    value = obj[key]
    full = f"{path}.{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(full, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise _fail(full, f"must be finite, got {value}")
    if lo is not None and (value <= lo if lo_open else value < lo):
        raise _fail(full, f"must be {'>' if lo_open else '>='} {lo}, got {value}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        raise _fail(full, f"must be {'<' if hi_open else '<='} {hi}, got {value}")
    return value


def _integer(
    obj: dict, path: str, key: str, *, default: int | None = None, lo: int | None = None,
    hi: int | None = None,
) -> int:
    if key not in obj:
        if default is None:
            raise _fail(f"{path}.{key}", "missing required key")
        return default
    value = obj[key]
    full = f"{path}.{key}"
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(full, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise _fail(full, f"must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise _fail(full, f"must be <= {hi}, got {value}")
    return value


def _choice(obj: dict, path: str, key: str, choices: tuple[str, ...], *, default: str | None = None) -> str:
    if key not in obj:
        if default is None:
            raise _fail(f"{path}.{key}", "missing required key")
        return default
    value = obj[key]
    if not isinstance(value, str) or value not in choices:
        raise _fail(f"{path}.{key}", f"expected one of {list(choices)}, got {value!r}")
    return value


def apply_overrides(
    doc: dict,
    *,
    n_steps: int | None = None,
    seed: int | None = None,
    mode: str | None = None,
    n_replicas: int | None = None,
) -> dict:
    """Write command-line overrides into a scenario document's ``run``
    section (before validation) and return the overrides that applied."""
    applied: dict[str, object] = {}
    run = doc.setdefault("run", {}) if isinstance(doc, dict) else {}
    if not isinstance(run, dict):
        return applied  # malformed; validation will report it properly
    for key, value in (
        ("n_steps", n_steps),
        ("seed", seed),
        ("mode", mode),
        ("n_replicas", n_replicas),
    ):
        if value is not None:
            run[key] = value
            applied[key] = value
    return applied


def _build_propagation(section: dict, base_dir: Path) -> tuple[PropagationModel, dict]:
    _check_keys(
        section,
        "propagation",
        required=("basic_model", "clutter_model"),
        optional=("parameters", "basic_table", "clutter_table"),
    )
    basic_name = _choice(section, "propagation", "basic_model", ("free_space", "smooth_earth", "table"))
    clutter_name = _choice(section, "propagation", "clutter_model", ("none", "statistical", "table"))

    params = _as_mapping(section.get("parameters", {}), "propagation.parameters")
    _check_keys(params, "propagation.parameters", required=(), optional=tuple(_PARAM_DEFAULTS))
    resolved_params = {
        key: _number(params, "propagation.parameters", key, default=default, lo=0.0)
        for key, default in _PARAM_DEFAULTS.items()
    }

    def table_path(key: str, wanted: bool) -> Path | None:
        present = key in section
        if wanted and not present:
            raise _fail(f"propagation.{key}", "required when the model is 'table'")
        if present and not wanted:
            raise _fail(f"propagation.{key}", "only valid when the model is 'table'")
        if not present:
            return None
        value = section[key]
        if not isinstance(value, str) or not value:
            raise _fail(f"propagation.{key}", f"expected a file path string, got {value!r}")
        path = Path(value)
        return path if path.is_absolute() else base_dir / path

    basic_table = table_path("basic_table", basic_name == "table")
    clutter_table = table_path("clutter_table", clutter_name == "table")

    if basic_name == "free_space":
        basic = FreeSpaceLoss()
    elif basic_name == "smooth_earth":
        basic = SmoothEarthLoss(
            beyond_horizon_db_per_km=resolved_params["beyond_horizon_db_per_km"],
            time_sigma_db=resolved_params["time_sigma_db"],
        )
    else:
        basic = TableLoss(load_loss_table(basic_table))

    if clutter_name == "none":
        clutter = NoClutter()
    elif clutter_name == "statistical":
        clutter = StatisticalClutter(
            urban_median_db=resolved_params["urban_median_db"],
            suburban_median_db=resolved_params["suburban_median_db"],
            sigma_db=resolved_params["clutter_sigma_db"],
        )
    else:
        clutter = TableClutter(load_loss_table(clutter_table))

    resolved = {
        "basic_model": basic_name,
        "clutter_model": clutter_name,
        "parameters": resolved_params,
    }
    if "basic_table" in section:
        resolved["basic_table"] = section["basic_table"]
    if "clutter_table" in section:
        resolved["clutter_table"] = section["clutter_table"]
    return PropagationModel(basic=basic, clutter=clutter), resolved


def build_scenario(doc, base_dir: Path | str = ".") -> tuple[Scenario, dict]:
    """Validate a scenario document and build the runnable scenario.

    Args:
        doc: Parsed JSON document (a dict).
        base_dir: Directory against which relative table paths resolve
            (normally the scenario file's directory).

    Returns:
        ``(scenario, resolved)`` where ``resolved`` is the canonical
        document with all defaults filled in — exactly the parameters
        the run will use, suitable for echoing into output metadata.

    Raises:
        ScenarioValidationError: On the first offence, naming the key
            path.
    """
    base_dir = Path(base_dir)
    doc = _as_mapping(doc, "scenario")
    _check_keys(doc, "", required=("markov", "radio", "propagation", "primary", "users", "run"))

    markov_sec = _as_mapping(doc["markov"], "markov")
    _check_keys(markov_sec, "markov", required=("lambda", "mu"))
    markov = MarkovParams(
        lam=_number(markov_sec, "markov", "lambda", lo=0.0, hi=1.0),
        mu=_number(markov_sec, "markov", "mu", lo=0.0, hi=1.0),
    )

    radio_sec = _as_mapping(doc["radio"], "radio")
    _check_keys(radio_sec, "radio", required=("p_tx_dbm", "g_t_dbi", "g_r_dbi", "p_th_dbm"))
    radio = RadioParams(
        p_tx_dbm=_number(radio_sec, "radio", "p_tx_dbm"),
        g_t_dbi=_number(radio_sec, "radio", "g_t_dbi"),
        g_r_dbi=_number(radio_sec, "radio", "g_r_dbi"),
        p_th_dbm=_number(radio_sec, "radio", "p_th_dbm"),
    )

    model, resolved_propagation = _build_propagation(
        _as_mapping(doc["propagation"], "propagation"), base_dir
    )

    primary_sec = _as_mapping(doc["primary"], "primary")
    _check_keys(primary_sec, "primary", required=("h_tx_m", "freq_mhz"), optional=("time_pct",))
    h_tx_m = _number(primary_sec, "primary", "h_tx_m", lo=1.0)
    freq_mhz = _number(primary_sec, "primary", "freq_mhz", lo=0.0, lo_open=True)
    time_pct = _number(primary_sec, "primary", "time_pct", default=50.0, lo=0.0, hi=100.0, lo_open=True, hi_open=True)

    users_sec = doc["users"]
    if not isinstance(users_sec, list) or not users_sec:
        raise _fail("users", "expected a non-empty array of user objects")
    users: list[tuple[str, LinkGeometry]] = []
    resolved_users: list[dict] = []
    seen_ids: set[str] = set()
    for k, entry in enumerate(users_sec):
        upath = f"users[{k}]"
        entry = _as_mapping(entry, upath)
        _check_keys(entry, upath, required=("id", "distance_km", "h_rx_m"), optional=("clutter_env", "loc_pct"))
        uid = entry["id"]
        if not isinstance(uid, str) or not _USER_ID_RE.match(uid):
            raise _fail(f"{upath}.id", f"expected a name matching [A-Za-z0-9_.-]+, got {uid!r}")
        if uid in seen_ids:
            raise _fail(f"{upath}.id", f"duplicate user id {uid!r}")
        seen_ids.add(uid)
        distance_km = _number(entry, upath, "distance_km", lo=0.0, lo_open=True)
        h_rx_m = _number(entry, upath, "h_rx_m", lo=1.0)
        env_name = _choice(entry, upath, "clutter_env", ("open", "suburban", "urban"), default="open")
        loc_pct = _number(entry, upath, "loc_pct", default=50.0, lo=0.0, hi=100.0, lo_open=True, hi_open=True)
        users.append(
            (
                uid,
                LinkGeometry(
                    distance_km=distance_km,
                    h_tx_m=h_tx_m,
                    h_rx_m=h_rx_m,
                    freq_mhz=freq_mhz,
                    time_pct=time_pct,
                    clutter_env=ClutterEnvironment(env_name),
                    loc_pct=loc_pct,
                ),
            )
        )
        resolved_users.append(
            {
                "id": uid,
                "distance_km": distance_km,
                "h_rx_m": h_rx_m,
                "clutter_env": env_name,
                "loc_pct": loc_pct,
            }
        )

    run_sec = _as_mapping(doc["run"], "run")
    _check_keys(run_sec, "run", required=("n_steps", "mode"), optional=("seed", "n_replicas", "initial"))
    n_steps = _integer(run_sec, "run", "n_steps", lo=1)
    mode_name = _choice(run_sec, "run", "mode", ("monte_carlo", "analytic"))
    initial_name = _choice(run_sec, "run", "initial", ("stationary", "idle", "active"), default="stationary")
    initial = None if initial_name == "stationary" else ChannelState[initial_name.upper()]

    mode: Mode
    resolved_run: dict = {"n_steps": n_steps, "mode": mode_name, "initial": initial_name}
    if mode_name == "monte_carlo":
        if "seed" not in run_sec:
            raise _fail("run.seed", "required for monte_carlo mode (or pass --seed)")
        seed = _integer(run_sec, "run", "seed", lo=0, hi=(1 << 64) - 1)
        n_replicas = _integer(run_sec, "run", "n_replicas", default=1, lo=1)
        mode = MonteCarlo(seed=seed, n_replicas=n_replicas)
        resolved_run["seed"] = seed
        resolved_run["n_replicas"] = n_replicas
    else:
        # seed / n_replicas are legal but meaningless for analytic runs
        # (so one file can flip modes via --mode); still type-check them.
        _integer(run_sec, "run", "seed", default=0, lo=0, hi=(1 << 64) - 1)
        _integer(run_sec, "run", "n_replicas", default=1, lo=1)
        mode = Analytic()

    scenario = Scenario(
        markov=markov,
        radio=radio,
        users=tuple(users),
        model=model,
        n_steps=n_steps,
        mode=mode,
        initial=initial,
    )
    resolved = {
        "markov": {"lambda": markov.lam, "mu": markov.mu},
        "radio": {
            "p_tx_dbm": radio.p_tx_dbm,
            "g_t_dbi": radio.g_t_dbi,
            "g_r_dbi": radio.g_r_dbi,
            "p_th_dbm": radio.p_th_dbm,
        },
        "propagation": resolved_propagation,
        "primary": {"h_tx_m": h_tx_m, "freq_mhz": freq_mhz, "time_pct": time_pct},
        "users": resolved_users,
        "run": resolved_run,
    }
    return scenario, resolved


def load_scenario_file(path: str | Path, **overrides) -> tuple[Scenario, dict, dict]:
    """Read, override, validate, and build a scenario from a JSON file.

    Returns ``(scenario, resolved_doc, applied_overrides)``.

    Raises:
        ScenarioValidationError: For unreadable files, invalid JSON, or
            any schema violation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioValidationError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"{path}: not valid JSON: {exc}") from exc
    applied = apply_overrides(doc if isinstance(doc, dict) else {}, **overrides)
    scenario, resolved = build_scenario(doc, base_dir=path.resolve().parent)
    return scenario, resolved, applied
