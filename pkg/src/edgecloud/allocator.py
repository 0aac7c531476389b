"""Joint task split and uplink/downlink bandwidth allocation.

The planner picks the cloud fraction ``beta`` and the uplink bandwidth
``b_up``.  Whatever is left goes downlink and carries the largest edge-model
update that fits.  Residual-data quantization is delegated to
:mod:`edgecloud.data_stream`.  The objective is the closed-form lower bound
:func:`edgecloud.pr_metrics.joint_map_lower_bound`.

:func:`solve` sweeps ``b_up`` on an even grid.  For each grid point it
brackets ``beta`` on a coarse scan and then polishes the bracket by
golden-section search.  Two halving passes around the incumbent refine the
``b_up`` grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data_stream import RATE_RTOL, QuantizationPlan, solve_data_stream
from .errors import InfeasibleError, InvalidInputError
from .pr_metrics import lower_bound_unchecked
from .response_models import g_derivative, h_derivative, h_eval
from .scenario import QuantizationLadder, Scenario

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

__all__ = [
    "AllocationPlan",
    "QuantizationLadder",
    "Scenario",
    "SolverSettings",
    "StationarityResiduals",
    "beta_cap",
    "edge_update_from_downlink",
    "evaluate",
    "objective",
    "solve",
    "solve_cloud_only",
    "solve_edge_only",
    "stationarity_residuals",
    "theorem7_residual",
]


@dataclass(frozen=True)
class SolverSettings:
    b_up_points: int = 201
    beta_tol: float = 1e-4
    beta_scan: int = 11
    refine_passes: int = 2


@dataclass(frozen=True)
class AllocationPlan:
    beta: float
    quant: QuantizationPlan
    b_up: float
    b_down: float
    m_update: float
    map_joint: float
    map_cloud: float
    map_edge: float
    rate_feature: float
    rate_data: float
    slack_bandwidth: float = field(default=0.0)
    slack_uplink: float = field(default=0.0)
    slack_downlink: float = field(default=0.0)

    @property
    def rates(self) -> tuple[float, float, float]:
        return (self.rate_feature, self.rate_data, self.m_update)

    @property
    def avg_bits(self) -> float:
        return self.quant.avg_bits

    def check_constraints(self, scenario: Scenario, rtol: float = 1e-9) -> list[str]:
        """Names of violated constraints (empty when the plan is feasible)."""
        s = scenario
        bad = []
        scale_b = max(s.bandwidth, 1.0)
        if self.b_up < -rtol * scale_b or self.b_down < -rtol * scale_b:
            bad.append("bandwidth_nonnegative")
        if self.b_up + self.b_down > s.bandwidth + rtol * scale_b:
            bad.append("bandwidth_total")
        cap_up = self.b_up * s.se_up
        if self.rate_feature + self.rate_data > cap_up + rtol * max(cap_up, 1.0):
            bad.append("uplink_rate")
        cap_down = self.b_down * s.se_down
        if self.m_update > cap_down + rtol * max(cap_down, 1.0):
            bad.append("downlink_rate")
        if self.m_update != 0.0 and not s.m_min <= self.m_update <= s.m_max:
            bad.append("update_range")
        if not 0.0 <= self.quant.rho <= self.beta + 1e-12 or self.beta > 1.0:
            bad.append("split_order")
        if any(level not in s.ladder.with_zero for level, _ in self.quant.mix):
            bad.append("ladder")
        return bad


def edge_update_from_downlink(b_down: float, scenario: Scenario) -> float:
    """Largest admissible update rate on ``b_down`` Hz, or 0 when below the minimum."""
    capacity = max(b_down, 0.0) * scenario.se_down
    if capacity < scenario.m_min:
        return 0.0
    return min(scenario.m_max, capacity)


def beta_cap(scenario: Scenario, b_up: float) -> float:
    """Largest beta whose feature stream alone fits the uplink."""
    denom = scenario.feature_bits * scenario.n_frames
    return min(1.0, b_up * scenario.se_up / denom)


def _clip_beta(scenario: Scenario, beta: float, b_up: float) -> float:
    beta = min(max(beta, 0.0), 1.0)
    cap = beta_cap(scenario, b_up)
    return cap if beta > cap else beta


def evaluate(scenario: Scenario, beta: float, b_up: float) -> AllocationPlan:
    """Full plan for a given split; ``beta`` above the uplink cap is pulled down to it."""
    s = scenario
    b_up = min(max(b_up, 0.0), s.bandwidth)
    beta = _clip_beta(s, beta, b_up)
    b_down = s.bandwidth - b_up
    m = edge_update_from_downlink(b_down, s)
    map_edge = h_eval(s.edge_model, m)
    try:
        quant = solve_data_stream(s, b_up, beta)
    except InfeasibleError:
        # rounding at the cap boundary; shave beta to the exact feasible edge
        beta = math.nextafter(beta, 0.0)
        quant = solve_data_stream(s, b_up, beta)
    map_cloud = quant.map_cloud
    map_joint = lower_bound_unchecked(map_cloud, map_edge, beta)
    rate_feature = s.feature_bits * beta * s.n_frames
    return AllocationPlan(
        beta=beta,
        quant=quant,
        b_up=b_up,
        b_down=b_down,
        m_update=m,
        map_joint=min(1.0, max(0.0, map_joint)),
        map_cloud=map_cloud,
        map_edge=map_edge,
        rate_feature=rate_feature,
        rate_data=quant.rate_data,
        slack_bandwidth=s.bandwidth - b_up - b_down,
        slack_uplink=b_up * s.se_up - rate_feature - quant.rate_data,
        slack_downlink=b_down * s.se_down - m,
    )


def objective(scenario: Scenario, beta: float, b_up: float) -> float:
    """Joint mAP lower bound achieved by splitting at (``beta``, ``b_up``)."""
    return evaluate(scenario, beta, b_up).map_joint


def _better(value: float, beta: float, b_up: float, best) -> bool:
    # higher mAP wins; ties prefer smaller beta, then smaller b_up
    if best is None:
        return True
    bv, bb, bu = best
    if value != bv:
        return value > bv
    if beta != bb:
        return beta < bb
    return b_up < bu


def _golden_max(f, lo: float, hi: float, tol: float):
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _best_beta(scenario: Scenario, b_up: float, settings: SolverSettings):
    """(mAP, beta) maximising the objective over [0, beta_cap] at fixed ``b_up``."""
    cap = beta_cap(scenario, b_up)

    def f(beta):
        return objective(scenario, beta, b_up)

    best = None
    if cap <= 0.0:
        return f(0.0), 0.0
    grid = np.linspace(0.0, cap, settings.beta_scan)
    values = [f(b) for b in grid]
    for v, b in zip(values, grid):
        if _better(v, float(b), b_up, best):
            best = (v, float(b), b_up)
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi - lo > settings.beta_tol:
        b, v = _golden_max(f, float(lo), float(hi), settings.beta_tol)
        if _better(v, b, b_up, best):
            best = (v, b, b_up)
    return best[0], best[1]


def solve(scenario: Scenario, settings: SolverSettings | None = None) -> AllocationPlan:
    """Maximise the joint mAP over the task split and bandwidth split.

    Deterministic: identical inputs give an identical plan.
    """
    settings = settings or SolverSettings()
    s = scenario
    if s.bandwidth <= 0:
        return evaluate(s, 0.0, 0.0)
    best = None
    grid = np.linspace(0.0, s.bandwidth, settings.b_up_points)
    for b_up in grid:
        v, beta = _best_beta(s, float(b_up), settings)
        if _better(v, beta, float(b_up), best):
            best = (v, beta, float(b_up))
    step = s.bandwidth / (settings.b_up_points - 1)
    for _ in range(settings.refine_passes):
        center = best[2]
        step /= 2.0
        for b_up in (center - step, center + step):
            if 0.0 <= b_up <= s.bandwidth:
                v, beta = _best_beta(s, b_up, settings)
                if _better(v, beta, b_up, best):
                    best = (v, beta, b_up)
    return evaluate(s, best[1], best[2])


def solve_cloud_only(scenario: Scenario) -> AllocationPlan:
    """Every frame analysed in the cloud, all bandwidth on the uplink."""
    s = scenario
    if s.feature_bits * s.n_frames > s.bandwidth * s.se_up * (1 + RATE_RTOL):
        raise InfeasibleError(
            f"feature stream {s.feature_bits * s.n_frames:.6g} bit/s exceeds uplink "
            f"capacity {s.bandwidth * s.se_up:.6g} bit/s"
        )
    return evaluate(s, 1.0, s.bandwidth)


def solve_edge_only(scenario: Scenario) -> AllocationPlan:
    """Every frame analysed on the UAV, all bandwidth spent on model updates."""
    return evaluate(scenario, 0.0, 0.0)


@dataclass(frozen=True)
class StationarityResiduals:
    """First-order optimality diagnostics at an interior plan.

    ``verbatim`` evaluates the single-line relation
    ``L/S = sqrt(g' * (N*(F + x*b)*L/(L - S) - S*S_u/(h'*S_d)) / (x*beta*N))``
    as written, with ``F`` the feature bits per frame and ``b`` the mean
    depth.  ``split`` and ``bandwidth`` are the two underlying
    equal-marginal-gain conditions written as relative mismatches:
    ``split`` compares more cloud frames against deeper residual data,
    ``bandwidth`` compares the model stream against the data stream.
    ``combined`` eliminates beta between them and has the same
    ``L/S`` shape but no ``h'`` term.
    """

    verbatim: float
    combined: float
    split: float
    bandwidth: float


def stationarity_residuals(scenario: Scenario, plan: AllocationPlan) -> Optional[StationarityResiduals]:
    """Diagnostics for ``plan``, or ``None`` when the plan is not strictly interior."""
    s = scenario
    b_hat = plan.avg_bits
    L, S, beta = plan.map_cloud, plan.map_edge, plan.beta
    interior = (
        0.0 < beta < 1.0
        and 0.0 < plan.b_up < s.bandwidth
        and s.m_min < plan.m_update < s.m_max
        and 0.0 < b_hat < s.ladder.top
        and L > S > 0.0
    )
    if not interior:
        return None
    gp = g_derivative(s.cloud_model, b_hat)
    hp = h_derivative(s.edge_model, plan.m_update)
    if gp <= 0.0 or hp <= 0.0:
        return None
    n, x, fbar = s.n_frames, s.pixels, s.feature_bits
    frames = beta * n
    per_frame = fbar + x * b_hat

    # g' is per bit/pixel, so the cloud-frame count is scaled by x
    inner = n * per_frame * L / (L - S) - S / hp * s.se_up / s.se_down
    rhs_sq = inner * gp / (x * frames)
    verbatim = L / S - math.sqrt(rhs_sq) if rhs_sq >= 0 else float("nan")

    combined = L / S - math.sqrt(L * gp * per_frame / (x * S * (L - S)))

    # marginal mAP per Hz through each option
    den = (1.0 - beta) * L + beta * S
    d_l = beta * S * S / den**2
    d_s = (1.0 - beta) * L * L / den**2
    d_beta = L * S * (L - S) / den**2
    via_model = s.se_down * d_s * hp
    via_depth = s.se_up * d_l * gp / (x * frames)
    via_frames = s.se_up * d_beta / (n * per_frame)
    split = (via_frames - via_depth) / max(via_frames, via_depth)
    bandwidth = (via_model - via_depth) / max(via_model, via_depth)
    return StationarityResiduals(verbatim, combined, split, bandwidth)


def theorem7_residual(scenario: Scenario, plan: AllocationPlan, form: str = "combined") -> Optional[float]:
    """Signed optimality residual of ``plan`` (``None`` at a boundary plan).

    ``form="combined"`` (default) is the beta-free relation derived from the
    two equal-marginal-gain conditions; ``form="verbatim"`` evaluates the
    single-line relation documented on :class:`StationarityResiduals`.
    """
    if form not in ("combined", "verbatim", "split", "bandwidth"):
        raise InvalidInputError(f"unknown residual form {form!r}")
    res = stationarity_residuals(scenario, plan)
    if res is None:
        return None
    return getattr(res, form)
