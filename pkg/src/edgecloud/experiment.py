"""Config loading, parameter sweeps and CSV/plot emission.

Configs are flat YAML mappings.  Every key is optional; missing ones take
the defaults of :class:`~edgecloud.scenario.Scenario`.  Recognised keys:

    n_frames, pixels, raw_bits, feature_bits, bandwidth, se_up, se_down,
    m_min, m_max, ladder (list or comma-separated bits/pixel),
    cloud_map_feature_only, cloud_map_ceiling, cloud_kappa_g, cloud_table,
    edge_map_baseline, edge_map_max, edge_kappa_h, edge_table

``*_table`` values are paths (relative to the config file) of two-column
breakpoint tables.  Alternative model pairs for the ``model_config`` sweep
axis are written as ``model_config.<name>.<cloud_/edge_ key>``.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from .allocator import AllocationPlan, solve, solve_cloud_only, solve_edge_only
from .errors import InfeasibleError, InvalidInputError
from .oracle import OracleGrid, exhaustive_search
from .response_models import CloudResponseModel, EdgeResponseModel, load_table
from .scenario import QuantizationLadder, Scenario

log = logging.getLogger(__name__)

SCENARIO_KEYS = ("n_frames", "pixels", "raw_bits", "feature_bits", "bandwidth", "se_up", "se_down")
CLOUD_KEYS = {
    "cloud_map_feature_only": "map_feature_only",
    "cloud_map_ceiling": "map_ceiling",
    "cloud_kappa_g": "kappa_g",
}
EDGE_KEYS = {
    "edge_map_baseline": "map_baseline",
    "edge_map_max": "map_max",
    "edge_kappa_h": "kappa_h",
    "m_min": "m_min",
    "m_max": "m_max",
}
MODEL_KEYS = set(CLOUD_KEYS) | (set(EDGE_KEYS) - {"m_min", "m_max"}) | {"cloud_table", "edge_table"}

AXES = {
    "bandwidth": "bandwidth",
    "frames_per_second": "n_frames",
    "se_up": "se_up",
    "se_down": "se_down",
    "model_config": None,
}
OUTPUTS = (
    "map_joint",
    "map_cloud_only",
    "map_edge_only",
    "map_oracle",
    "beta",
    "b_up",
    "b_down",
    "m_update",
    "rate_feature",
    "rate_data",
    "avg_bits",
)
CSV_HEADER = (
    "axis",
    "map_joint",
    "map_cloud_only",
    "map_edge_only",
    "map_oracle",
    "beta",
    "b_up_hz",
    "b_down_hz",
    "m_update_bps",
    "rate_feature_bps",
    "rate_data_bps",
    "avg_bits_per_pixel",
)


class ConfigError(InvalidInputError):
    pass


@dataclass(frozen=True)
class Experiment:
    scenario: Scenario
    model_configs: dict[str, tuple[CloudResponseModel, EdgeResponseModel]] = field(default_factory=dict)


def _number(key: str, value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{where}: {key} must be a number, got {value!r}")
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{where}: {key} must be a number, got {value!r}") from None


def _ladder(value: Any, where: str) -> QuantizationLadder:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{where}: ladder must be a list of bits/pixel values")
    return QuantizationLadder(tuple(_number("ladder", v, where) for v in value))


def _models(raw: dict[str, Any], base_dir: Path, where: str, defaults=None):
    cloud_kw: dict[str, Any] = {}
    edge_kw: dict[str, Any] = {}
    if defaults is not None:
        c, e = defaults
        cloud_kw = dict(map_feature_only=c.map_feature_only, map_ceiling=c.map_ceiling, kappa_g=c.kappa_g, table=c.table)
        edge_kw = dict(
            map_baseline=e.map_baseline, map_max=e.map_max, m_min=e.m_min, m_max=e.m_max, kappa_h=e.kappa_h, table=e.table
        )
    for key, attr in CLOUD_KEYS.items():
        if key in raw:
            cloud_kw[attr] = _number(key, raw[key], where)
    for key, attr in EDGE_KEYS.items():
        if key in raw:
            edge_kw[attr] = _number(key, raw[key], where)
    if "cloud_table" in raw:
        cloud_kw["table"] = load_table(base_dir / str(raw["cloud_table"]))
    if "edge_table" in raw:
        edge_kw["table"] = load_table(base_dir / str(raw["edge_table"]))
    try:
        return CloudResponseModel(**cloud_kw), EdgeResponseModel(**edge_kw)
    except InvalidInputError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(raw: dict[str, Any] | None, base_dir: Path = Path("."), where: str = "<config>") -> Experiment:
    raw = dict(raw or {})
    variants: dict[str, dict[str, Any]] = {}
    plain: dict[str, Any] = {}
    for key, value in raw.items():
        key = str(key)
        if isinstance(value, dict):
            raise ConfigError(f"{where}: nested mapping under {key!r}; config must be flat")
        if key.startswith("model_config."):
            try:
                _, name, sub = key.split(".", 2)
            except ValueError:
                raise ConfigError(f"{where}: expected model_config.<name>.<key>, got {key!r}") from None
            if sub not in MODEL_KEYS:
                raise ConfigError(f"{where}: {key!r}: unknown model key {sub!r}")
            variants.setdefault(name, {})[sub] = value
        elif key in SCENARIO_KEYS or key in CLOUD_KEYS or key in EDGE_KEYS or key in ("ladder", "cloud_table", "edge_table"):
            plain[key] = value
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")

    kwargs: dict[str, Any] = {k: _number(k, plain[k], where) for k in SCENARIO_KEYS if k in plain}
    if "ladder" in plain:
        try:
            kwargs["ladder"] = _ladder(plain["ladder"], where)
        except InvalidInputError as exc:
            raise ConfigError(f"{where}: ladder: {exc}") from None
    cloud, edge = _models(plain, base_dir, where)
    try:
        scenario = Scenario(cloud_model=cloud, edge_model=edge, **kwargs)
    except InvalidInputError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    configs = {
        name: _models(sub, base_dir, f"{where}: model_config.{name}", defaults=(cloud, edge))
        for name, sub in variants.items()
    }
    return Experiment(scenario, configs)


def load_experiment(path: str | Path) -> Experiment:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark is not None else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{path}{line}: parse error: {problem}") from None
    if raw is not None and not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a key-value mapping")
    return parse_config(raw, path.parent, str(path))


def load_scenario(path: str | Path) -> Scenario:
    """Scenario from a flat YAML config; missing keys take the default values."""
    return load_experiment(path).scenario


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    outputs: tuple[str, ...] = OUTPUTS

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidInputError(f"unknown sweep axis {self.axis!r}; choose from {', '.join(AXES)}")
        if not self.values:
            raise InvalidInputError("sweep needs at least one value")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise InvalidInputError(f"unknown outputs: {', '.join(sorted(unknown))}")
        if self.axis != "model_config":
            vals = [float(v) for v in self.values]
            diffs = np.diff(vals)
            if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise InvalidInputError("numeric sweep values must be strictly monotone")
            object.__setattr__(self, "values", tuple(vals))
        else:
            object.__setattr__(self, "values", tuple(str(v) for v in self.values))


@dataclass
class RunRecord:
    axis: str
    value: Any
    scenario: dict[str, Any]
    plan: AllocationPlan | None = None
    map_cloud_only: float | None = None
    map_edge_only: float | None = None
    map_oracle: float | None = None
    wall_time: float = 0.0
    errors: list[str] = field(default_factory=list)

    def row(self, outputs: Sequence[str] = OUTPUTS) -> dict[str, Any]:
        p = self.plan
        values = {
            "map_joint": p.map_joint if p else None,
            "map_cloud_only": self.map_cloud_only,
            "map_edge_only": self.map_edge_only,
            "map_oracle": self.map_oracle,
            "beta": p.beta if p else None,
            "b_up": p.b_up if p else None,
            "b_down": p.b_down if p else None,
            "m_update": p.m_update if p else None,
            "rate_feature": p.rate_feature if p else None,
            "rate_data": p.rate_data if p else None,
            "avg_bits": p.avg_bits if p else None,
        }
        return {k: (v if k in outputs else None) for k, v in values.items()}


def _snapshot(s: Scenario) -> dict[str, Any]:
    c, e = s.cloud_model, s.edge_model
    return {
        "n_frames": s.n_frames,
        "pixels": s.pixels,
        "feature_bits": s.feature_bits,
        "bandwidth": s.bandwidth,
        "se_up": s.se_up,
        "se_down": s.se_down,
        "m_min": s.m_min,
        "m_max": s.m_max,
        "ladder": list(s.ladder.levels),
        "cloud": "table" if c.is_table else [c.map_feature_only, c.map_ceiling, c.kappa_g],
        "edge": "table" if e.is_table else [e.map_baseline, e.map_max, e.kappa_h],
    }


def point_scenario(experiment: Experiment, axis: str, value) -> Scenario:
    s = experiment.scenario
    if axis == "model_config":
        try:
            cloud, edge = experiment.model_configs[value]
        except KeyError:
            raise InvalidInputError(f"no model_config named {value!r} in config") from None
        return s.replace(cloud_model=cloud, edge_model=edge)
    return s.replace(**{AXES[axis]: float(value)})


def run_point(experiment: Experiment, axis: str, value, with_oracle: bool = False, oracle_grid: OracleGrid | None = None) -> RunRecord:
    start = time.perf_counter()
    try:
        s = point_scenario(experiment, axis, value)
    except InvalidInputError as exc:
        return RunRecord(axis, value, {}, errors=[str(exc)])
    rec = RunRecord(axis, value, _snapshot(s))
    steps = [
        ("solve", lambda: setattr(rec, "plan", solve(s))),
        ("cloud-only", lambda: setattr(rec, "map_cloud_only", solve_cloud_only(s).map_joint)),
        ("edge-only", lambda: setattr(rec, "map_edge_only", solve_edge_only(s).map_joint)),
    ]
    if with_oracle:
        steps.append(("oracle", lambda: setattr(rec, "map_oracle", exhaustive_search(s, oracle_grid).map_joint)))
    for name, step in steps:
        try:
            step()
        except (InvalidInputError, InfeasibleError, ArithmeticError) as exc:
            log.warning("%s=%s: %s failed: %s", axis, value, name, exc)
            rec.errors.append(f"{name}: {exc}")
    rec.wall_time = time.perf_counter() - start
    return rec


def run_sweep(
    experiment: Experiment | Scenario,
    spec: SweepSpec,
    with_oracle: bool = False,
    oracle_grid: OracleGrid | None = None,
    workers: int = 1,
) -> list[RunRecord]:
    """One record per axis value, in the order the values were given.

    Failures at a point are stored on its record and the sweep moves on.
    ``workers > 1`` evaluates points in separate processes; the result is
    identical to the serial run.
    """
    if isinstance(experiment, Scenario):
        experiment = Experiment(experiment)
    args = [(experiment, spec.axis, v, with_oracle, oracle_grid) for v in spec.values]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_point_star, args))
    return [run_point(*a) for a in args]


def _run_point_star(args):
    return run_point(*args)


def format_number(value) -> str:
    """Fixed-point text with 6 significant digits; empty for missing values."""
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return ""
    return np.format_float_positional(float(value), precision=6, unique=False, fractional=False, trim="-")


def emit_csv(records: Sequence[RunRecord], path: str | Path, outputs: Sequence[str] = OUTPUTS) -> Path:
    if not records:
        raise InvalidInputError("no records to write")
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for rec in records:
                row = rec.row(outputs)
                axis = rec.value if isinstance(rec.value, str) else format_number(rec.value)
                writer.writerow([axis] + [format_number(row[k]) for k in OUTPUTS])
    except OSError as exc:
        raise InvalidInputError(f"{path}: cannot write CSV: {exc.strerror}") from None
    return path


def read_csv(path: str | Path) -> list[dict[str, float | str | None]]:
    """Parse a CSV written by :func:`emit_csv` back into numbers (None for blanks)."""
    rows = []
    with Path(path).open(newline="") as fh:
        for raw in csv.DictReader(fh):
            row: dict[str, float | str | None] = {}
            for key, text in raw.items():
                if text == "":
                    row[key] = None
                else:
                    try:
                        row[key] = float(text)
                    except ValueError:
                        row[key] = text
            rows.append(row)
    return rows


def emit_plot(records: Sequence[RunRecord], path: str | Path) -> Path:
    """mAP of the planner, both baselines and (if run) the oracle against the sweep axis."""
    if not records:
        raise InvalidInputError("no records to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    axis = records[0].axis
    categorical = axis == "model_config"
    xs = list(range(len(records))) if categorical else [float(r.value) for r in records]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    series = [
        ("joint", lambda r: r.plan.map_joint if r.plan else None, "o-"),
        ("cloud only", lambda r: r.map_cloud_only, "s--"),
        ("edge only", lambda r: r.map_edge_only, "^--"),
        ("exhaustive search", lambda r: r.map_oracle, "x:"),
    ]
    for label, get, style in series:
        ys = [get(r) for r in records]
        if all(y is None for y in ys):
            continue
        ax.plot(xs, [np.nan if y is None else y for y in ys], style, label=label)
    if categorical:
        ax.set_xticks(xs, [str(r.value) for r in records])
    ax.set_xlabel(axis)
    ax.set_ylabel("mAP")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path)
    except OSError as exc:
        raise InvalidInputError(f"{path}: cannot write plot: {exc.strerror}") from None
    finally:
        plt.close(fig)
    return path
