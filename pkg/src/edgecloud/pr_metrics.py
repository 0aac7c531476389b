"""Precision-recall curves, their mAP, and edge/cloud fusion of curves and mAPs.

A curve is a list of (recall, precision) pairs indexed by IoU threshold
k = 1..K.  mAP is the trapezoid area under the curve with an implicit
anchor (0, p^1) at k = 0.

Splitting a frame stream so a fraction ``beta`` goes to the cloud model and
the rest to the edge model fuses per-threshold precision and recall as a
weighted harmonic mean.  :func:`joint_map_exact` applies that fusion to full
curves; :func:`joint_map_lower_bound` is the closed form that only needs the
two models' mAPs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError


def _check_fraction(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or np.isnan(value):
        raise InvalidInputError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float

    def __post_init__(self):
        object.__setattr__(self, "recall", _check_fraction(self.recall, "recall"))
        object.__setattr__(self, "precision", _check_fraction(self.precision, "precision"))


@dataclass(frozen=True)
class PRCurve:
    """Ordered recall/precision pairs, one per IoU threshold.

    Points are sorted by recall on construction (stable, so ties keep their
    given order).
    """

    points: tuple[PRPoint, ...]

    def __post_init__(self):
        pts = tuple(p if isinstance(p, PRPoint) else PRPoint(*p) for p in self.points)
        if not pts:
            raise InvalidInputError("a PR curve needs at least one point")
        pts = tuple(sorted(pts, key=lambda p: p.recall))
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "PRCurve":
        return cls(tuple(PRPoint(float(r), float(p)) for r, p in pairs))

    @classmethod
    def from_text(cls, path: str | Path) -> "PRCurve":
        """Load a curve from two whitespace-separated columns: recall precision."""
        data = np.loadtxt(path, ndmin=2, comments="#")
        if data.size == 0:
            raise InvalidInputError(f"{path}: no points")
        if data.shape[1] != 2:
            raise InvalidInputError(f"{path}: expected 2 columns, got {data.shape[1]}")
        return cls.from_pairs(data)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def recalls(self) -> np.ndarray:
        return np.array([p.recall for p in self.points])

    @property
    def precisions(self) -> np.ndarray:
        return np.array([p.precision for p in self.points])


@dataclass(frozen=True)
class FusionWeights:
    """Fraction ``beta`` of frames analysed by the cloud model."""

    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", _check_fraction(self.beta, "beta"))


def _beta(w: FusionWeights | float) -> float:
    return w.beta if isinstance(w, FusionWeights) else _check_fraction(w, "beta")


def _trapezoid(recalls: np.ndarray, precisions: np.ndarray) -> float:
    r = np.concatenate(([0.0], recalls))
    p = np.concatenate(([precisions[0]], precisions))
    return _clamp01(np.sum(np.diff(r) * (p[1:] + p[:-1]) / 2.0))


def map_from_curve(curve: PRCurve) -> float:
    """Trapezoid area under ``curve``, anchored at (0, p^1), clamped to [0, 1]."""
    if len(curve) == 0:
        raise InvalidInputError("empty curve")
    return _trapezoid(curve.recalls, curve.precisions)


def _harmonic(cloud, edge, beta: float):
    """Weighted harmonic mean; a zero operand with nonzero weight gives 0."""
    cloud = np.asarray(cloud, dtype=float)
    edge = np.asarray(edge, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        denom = np.where(beta > 0, beta / cloud, 0.0) + np.where(beta < 1, (1.0 - beta) / edge, 0.0)
        out = 1.0 / denom
    zero = ((beta > 0) & (cloud == 0)) | ((beta < 1) & (edge == 0))
    return np.where(zero, 0.0, out)


def fuse_precision(p_cloud: float, p_edge: float, w: FusionWeights | float) -> float:
    beta = _beta(w)
    p_cloud = _check_fraction(p_cloud, "p_cloud")
    p_edge = _check_fraction(p_edge, "p_edge")
    return float(_harmonic(p_cloud, p_edge, beta))


def fuse_recall(r_cloud: float, r_edge: float, w: FusionWeights | float) -> float:
    beta = _beta(w)
    r_cloud = _check_fraction(r_cloud, "r_cloud")
    r_edge = _check_fraction(r_edge, "r_edge")
    return float(_harmonic(r_cloud, r_edge, beta))


def _fused_arrays(cloud: PRCurve, edge: PRCurve, beta: float):
    if len(cloud) != len(edge):
        raise InvalidInputError(f"curves have different K: {len(cloud)} vs {len(edge)}")
    r = np.clip(_harmonic(cloud.recalls, edge.recalls, beta), 0.0, 1.0)
    p = np.clip(_harmonic(cloud.precisions, edge.precisions, beta), 0.0, 1.0)
    return r, p


def fuse_curves(cloud: PRCurve, edge: PRCurve, w: FusionWeights | float) -> PRCurve:
    """Pointwise fusion of two curves sharing the same IoU grid."""
    r, p = _fused_arrays(cloud, edge, _beta(w))
    return PRCurve.from_pairs(zip(r, p))


def joint_map_exact(cloud: PRCurve, edge: PRCurve, w: FusionWeights | float) -> float:
    """System mAP from the two models' full curves (harmonic fusion per threshold).

    Fused points are summed in threshold order k = 1..K, exactly as the
    per-threshold expansion is written.
    """
    r, p = _fused_arrays(cloud, edge, _beta(w))
    return _trapezoid(r, p)


def joint_map_lower_bound(map_cloud: float, map_edge: float, w: FusionWeights | float) -> float:
    """Closed-form system mAP from the two models' mAPs.

    ``map_cloud * map_edge / ((1 - beta) * map_cloud + beta * map_edge)``,
    which reduces to ``map_edge`` at beta = 0 and ``map_cloud`` at beta = 1.
    """
    beta = _beta(w)
    map_cloud = _check_fraction(map_cloud, "map_cloud")
    map_edge = _check_fraction(map_edge, "map_edge")
    return _clamp01(lower_bound_unchecked(map_cloud, map_edge, beta))


def lower_bound_unchecked(map_cloud: float, map_edge: float, beta: float) -> float:
    # hot path for the allocator; callers guarantee ranges
    if beta <= 0.0:
        return map_edge
    if beta >= 1.0:
        return map_cloud
    denom = (1 - beta) * map_cloud + beta * map_edge
    if denom <= 0.0:
        return 0.0
    return map_cloud * map_edge / denom


def delta_gap(cloud: PRCurve, edge: PRCurve, k: int) -> float:
    """Capacity difference (p_L - p_S)(r_L - r_S) at threshold ``k`` (1-based)."""
    if len(cloud) != len(edge):
        raise InvalidInputError(f"curves have different K: {len(cloud)} vs {len(edge)}")
    if not 1 <= k <= len(cloud):
        raise InvalidInputError(f"k={k} outside 1..{len(cloud)}")
    c, e = cloud.points[k - 1], edge.points[k - 1]
    return (c.precision - e.precision) * (c.recall - e.recall)
