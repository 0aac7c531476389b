"""Physical and system parameters of one UAV / cloud-server link."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import InvalidInputError
from .response_models import CloudResponseModel, EdgeResponseModel

DEFAULT_LEVELS = (0.125, 0.25, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class QuantizationLadder:
    """Allowed residual-data depths in bits/pixel.  Level 0 (nothing sent) is implicit."""

    levels: tuple[float, ...] = DEFAULT_LEVELS

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        if not levels:
            raise InvalidInputError("quantization ladder is empty")
        if any(v <= 0 for v in levels):
            raise InvalidInputError("ladder levels must be positive")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise InvalidInputError("ladder levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @property
    def with_zero(self) -> tuple[float, ...]:
        return (0.0,) + self.levels

    @property
    def top(self) -> float:
        return self.levels[-1]

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Scenario:
    """Everything the allocator needs to know about one deployment.

    Rates are in bits/s, bandwidths in Hz, spectrum efficiencies in
    bits/s/Hz.  ``feature_bits`` is the extracted-feature size per frame.
    The model-update bounds live on ``edge_model`` and are exposed here as
    :attr:`m_min` / :attr:`m_max`.
    """

    n_frames: float = 10.0
    pixels: float = 1e7
    raw_bits: float = 8.0
    feature_bits: float = 860.0
    bandwidth: float = 10e6
    se_up: float = 2.55
    se_down: float = 5.0
    ladder: QuantizationLadder = field(default_factory=QuantizationLadder)
    cloud_model: CloudResponseModel = field(default_factory=CloudResponseModel)
    edge_model: EdgeResponseModel = field(default_factory=EdgeResponseModel)

    def __post_init__(self):
        for name in ("n_frames", "pixels", "raw_bits", "feature_bits", "se_up", "se_down"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidInputError(f"{name} must be positive, got {value!r}")
        if not self.bandwidth >= 0:
            raise InvalidInputError(f"bandwidth must be >= 0, got {self.bandwidth!r}")

    @property
    def m_min(self) -> float:
        return self.edge_model.m_min

    @property
    def m_max(self) -> float:
        return self.edge_model.m_max

    @property
    def data_rate(self) -> float:
        """Raw capture rate D = N * x * b."""
        return self.n_frames * self.pixels * self.raw_bits

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)
