"""Exhaustive search over a discretised decision grid.

Used as the comparator for :func:`edgecloud.allocator.solve`.  Every cloud
frame gets the same ladder level, so the search space is
beta x b_up x M x level with M drawn from {0} and an even grid on
[m_min, m_max].  Infeasible points are skipped, not penalised.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .allocator import AllocationPlan
from .data_stream import plan_from_mix
from .errors import InvalidInputError
from .pr_metrics import lower_bound_unchecked
from .response_models import g_eval, h_eval
from .scenario import Scenario

log = logging.getLogger(__name__)

MAX_COMBINATIONS = 10**8


@dataclass(frozen=True)
class OracleGrid:
    beta_steps: int = 201
    b_up_steps: int = 201
    m_steps: int = 51

    def __post_init__(self):
        for name in ("beta_steps", "b_up_steps", "m_steps"):
            if getattr(self, name) < 2:
                raise InvalidInputError(f"{name} must be >= 2")

    def combinations(self, scenario: Scenario) -> int:
        levels = len(scenario.ladder) + 1
        return self.beta_steps * self.b_up_steps * (self.m_steps + 1) * levels


def grid_axes(scenario: Scenario, grid: OracleGrid):
    """The four enumeration axes: betas, b_ups, update rates, levels (with 0)."""
    s = scenario
    betas = np.linspace(0.0, 1.0, grid.beta_steps)
    b_ups = np.linspace(0.0, s.bandwidth, grid.b_up_steps)
    ms = np.concatenate(([0.0], np.linspace(s.m_min, s.m_max, grid.m_steps)))
    levels = np.array(s.ladder.with_zero)
    return betas, b_ups, ms, levels


def exhaustive_search(scenario: Scenario, grid: OracleGrid | None = None, backend=None) -> AllocationPlan:
    """Best feasible grid point, as a plan.

    ``backend`` overrides the kernel (a callable with the
    ``enumerate_grid`` signature); by default the compiled one is used when
    available.
    """
    grid = grid or OracleGrid()
    s = scenario
    total = grid.combinations(s)
    if total > MAX_COMBINATIONS:
        raise InvalidInputError(f"oracle grid has {total} combinations, limit is {MAX_COMBINATIONS}")
    log.info("oracle: enumerating %d combinations (%s backend)", total, kernels.BACKEND)

    betas, b_ups, ms, levels = grid_axes(s, grid)
    h_vals = np.array([h_eval(s.edge_model, m) for m in ms])
    g_vals = np.array([g_eval(s.cloud_model, b) for b in levels])
    enumerate_grid = backend or kernels.enumerate_grid
    best, i, j, k, l = enumerate_grid(
        betas, b_ups, ms, h_vals, levels, g_vals,
        float(s.n_frames), float(s.feature_bits), float(s.pixels),
        float(s.se_up), float(s.se_down), float(s.bandwidth),
    )
    if i < 0:
        raise InvalidInputError("no feasible point on the oracle grid")
    return _plan(s, float(betas[i]), float(b_ups[j]), float(ms[k]), float(levels[l]))


def _plan(s: Scenario, beta: float, b_up: float, m: float, level: float) -> AllocationPlan:
    frames = beta * s.n_frames
    mix = ((level, frames),) if frames > 0 and level > 0 else ()
    quant = plan_from_mix(mix, s.cloud_model, s.pixels, s.n_frames, frames)
    map_edge = h_eval(s.edge_model, m)
    b_down = s.bandwidth - b_up
    rate_feature = s.feature_bits * frames
    return AllocationPlan(
        beta=beta,
        quant=quant,
        b_up=b_up,
        b_down=b_down,
        m_update=m,
        map_joint=lower_bound_unchecked(quant.map_cloud, map_edge, beta),
        map_cloud=quant.map_cloud,
        map_edge=map_edge,
        rate_feature=rate_feature,
        rate_data=quant.rate_data,
        slack_bandwidth=s.bandwidth - b_up - b_down,
        slack_uplink=b_up * s.se_up - rate_feature - quant.rate_data,
        slack_downlink=b_down * s.se_down - m,
    )
