"""Fitted accuracy-response curves.

``g`` maps residual-data quantization depth (bits/pixel) to cloud-model mAP,
``h`` maps the model-update rate (bits/s) to edge-model mAP.  Both come in two
shapes: a saturating exponential with a single rate parameter, or a
breakpoint table interpolated linearly.  Tables are checked for monotonicity
and concavity when constructed, so either shape can be handed to the
allocator unchanged.

The default coefficients are repository defaults chosen to land in a
plausible range (edge 0.75-0.82, cloud 0.50 on features alone up to 0.92);
they are not measured values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

_TABLE_TOL = 1e-12


def _as_table(table: Sequence[Sequence[float]] | np.ndarray | None):
    if table is None:
        return None
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise InvalidInputError("a breakpoint table needs at least two (x, y) rows")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise InvalidInputError("breakpoint abscissae must be strictly increasing")
    if np.any(np.diff(arr[:, 1]) < -_TABLE_TOL):
        raise InvalidInputError("breakpoint table must be non-decreasing")
    slopes = np.diff(arr[:, 1]) / np.diff(arr[:, 0])
    if np.any(np.diff(slopes) > _TABLE_TOL):
        raise InvalidInputError("breakpoint table must be concave (slopes non-increasing)")
    if np.any(arr[:, 1] < 0) or np.any(arr[:, 1] > 1):
        raise InvalidInputError("table mAP values must lie in [0, 1]")
    arr.setflags(write=False)
    return arr


def load_table(path: str | Path) -> np.ndarray:
    """Read a two-column breakpoint table (x, mAP) from text."""
    return np.loadtxt(path, ndmin=2, comments="#")


def _table_slope(table: np.ndarray, x: float) -> float:
    # right-hand secant at a breakpoint, left-hand at the last one
    xs, ys = table[:, 0], table[:, 1]
    if x < xs[0] or x >= xs[-1]:
        return 0.0
    i = int(np.searchsorted(xs, x, side="right")) - 1
    return float((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))


@dataclass(frozen=True)
class CloudResponseModel:
    """Cloud mAP as a function of residual-data bits per pixel.

    With ``table=None`` the curve is
    ``map_feature_only + (map_ceiling - map_feature_only) * (1 - exp(-kappa_g * b))``.
    Otherwise ``table`` holds (bits/pixel, mAP) rows and must start at 0.
    """

    map_feature_only: float = 0.50
    map_ceiling: float = 0.92
    kappa_g: float = 7.0
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        table = _as_table(self.table)
        object.__setattr__(self, "table", table)
        if table is not None:
            if table[0, 0] != 0.0:
                raise InvalidInputError("cloud table must start at 0 bits/pixel")
            object.__setattr__(self, "map_feature_only", float(table[0, 1]))
            object.__setattr__(self, "map_ceiling", float(table[-1, 1]))
        if not 0.0 <= self.map_feature_only <= self.map_ceiling <= 1.0:
            raise InvalidInputError(
                "need 0 <= map_feature_only <= map_ceiling <= 1, got "
                f"{self.map_feature_only}, {self.map_ceiling}"
            )
        if table is None and not self.kappa_g > 0:
            raise InvalidInputError(f"kappa_g must be positive, got {self.kappa_g}")

    @property
    def is_table(self) -> bool:
        return self.table is not None

    def __call__(self, bits_per_pixel: float) -> float:
        return g_eval(self, bits_per_pixel)


@dataclass(frozen=True)
class EdgeResponseModel:
    """Edge mAP as a function of the model-update rate M (bits/s).

    Below ``m_min`` there is no usable update and the curve returns
    ``map_baseline``; above ``m_max`` it saturates at ``map_max``.  In the
    closed form the rise over [m_min, m_max] is a normalised saturating
    exponential with rate ``kappa_h``.  A table gives (M, mAP) rows spanning
    exactly [m_min, m_max].
    """

    map_baseline: float = 0.75
    map_max: float = 0.82
    m_min: float = 230e3
    m_max: float = 23e6
    kappa_h: float = 5.0
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        table = _as_table(self.table)
        object.__setattr__(self, "table", table)
        if table is not None:
            object.__setattr__(self, "m_min", float(table[0, 0]))
            object.__setattr__(self, "m_max", float(table[-1, 0]))
            object.__setattr__(self, "map_baseline", float(table[0, 1]))
            object.__setattr__(self, "map_max", float(table[-1, 1]))
        if not 0.0 <= self.map_baseline <= self.map_max <= 1.0:
            raise InvalidInputError(
                "need 0 <= map_baseline <= map_max <= 1, got "
                f"{self.map_baseline}, {self.map_max}"
            )
        if not 0.0 < self.m_min < self.m_max:
            raise InvalidInputError(
                f"need 0 < m_min < m_max, got m_min={self.m_min}, m_max={self.m_max}"
            )
        if table is None and not self.kappa_h > 0:
            raise InvalidInputError(f"kappa_h must be positive, got {self.kappa_h}")

    @property
    def is_table(self) -> bool:
        return self.table is not None

    def __call__(self, m: float) -> float:
        return h_eval(self, m)


def g_eval(model: CloudResponseModel, bits_per_pixel: float) -> float:
    """Cloud mAP at a uniform quantization depth of ``bits_per_pixel``."""
    b = float(bits_per_pixel)
    if b < 0 or math.isnan(b):
        raise InvalidInputError(f"bits_per_pixel must be >= 0, got {bits_per_pixel!r}")
    if model.table is not None:
        return float(np.interp(b, model.table[:, 0], model.table[:, 1]))
    span = model.map_ceiling - model.map_feature_only
    return model.map_feature_only - span * math.expm1(-model.kappa_g * b)


def g_derivative(model: CloudResponseModel, bits_per_pixel: float) -> float:
    b = float(bits_per_pixel)
    if b < 0:
        raise InvalidInputError(f"bits_per_pixel must be >= 0, got {bits_per_pixel!r}")
    if model.table is not None:
        return _table_slope(model.table, b)
    span = model.map_ceiling - model.map_feature_only
    return model.kappa_g * span * math.exp(-model.kappa_g * b)


def _h_unit(model: EdgeResponseModel, m: float) -> float:
    # position on [m_min, m_max] scaled to [0, 1]
    return (m - model.m_min) / (model.m_max - model.m_min)


def h_eval(model: EdgeResponseModel, m: float) -> float:
    """Edge mAP under an update stream of ``m`` bits/s."""
    m = float(m)
    if m < 0 or math.isnan(m):
        raise InvalidInputError(f"update rate must be >= 0, got {m!r}")
    if m < model.m_min:
        return model.map_baseline
    if m >= model.m_max:
        return model.map_max
    if model.table is not None:
        return float(np.interp(m, model.table[:, 0], model.table[:, 1]))
    k = model.kappa_h
    frac = math.expm1(-k * _h_unit(model, m)) / math.expm1(-k)
    return model.map_baseline + (model.map_max - model.map_baseline) * frac


def h_derivative(model: EdgeResponseModel, m: float) -> float:
    m = float(m)
    if m < model.m_min or m >= model.m_max:
        return 0.0
    if model.table is not None:
        return _table_slope(model.table, m)
    k = model.kappa_h
    span = model.map_max - model.map_baseline
    return span * k * math.exp(-k * _h_unit(model, m)) / (-math.expm1(-k)) / (model.m_max - model.m_min)
