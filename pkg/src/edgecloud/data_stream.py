"""Residual-data stream design: which cloud frames carry residual data, at what depth.

With a shared concave per-frame curve the best plan sends residual data for
every cloud frame at one common depth, the uplink left over after the
feature stream divided evenly.  That depth is then split across the two
neighbouring ladder levels.  When frames have their own curves a greedy
marginal-gain allocator takes over.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import InfeasibleError, InvalidInputError
from .response_models import CloudResponseModel, g_eval
from .scenario import QuantizationLadder, Scenario

# relative slack tolerated when comparing a rate against its budget
RATE_RTOL = 1e-12


@dataclass(frozen=True)
class QuantizationPlan:
    """Outcome of the data-stream design.

    ``mix`` holds (bits/pixel, frames/s) pairs for frames that carry
    residual data, so its counts sum to ``rho * N``.  ``frames`` is the
    number of cloud frames per second; the ones missing from ``mix`` are
    analysed on features alone.
    """

    rho: float
    mix: tuple[tuple[float, float], ...]
    rate_data: float
    map_cloud: float
    frames: float = 0.0

    @property
    def avg_bits(self) -> float:
        """Mean depth over all cloud frames, feature-only frames counting as 0."""
        if self.frames <= 0:
            return 0.0
        return sum(level * c for level, c in self.mix) / self.frames


def residual_budget(b_up: float, se_up: float, beta: float, n_frames: float, feature_bits: float) -> float:
    """Uplink rate left for residual data once features of the cloud frames are sent."""
    if min(b_up, se_up, beta, n_frames, feature_bits) < 0:
        raise InvalidInputError("residual_budget arguments must be non-negative")
    budget = b_up * se_up - feature_bits * beta * n_frames
    if budget < 0:
        raise InfeasibleError(
            f"feature stream {feature_bits * beta * n_frames:.6g} bit/s exceeds uplink "
            f"{b_up * se_up:.6g} bit/s (beta={beta:.6g})"
        )
    return budget


def equal_bits_relaxed(budget: float, beta: float, n_frames: float, pixels: float) -> float:
    """Common per-pixel depth that spends ``budget`` evenly over the beta*N cloud frames."""
    if budget < 0:
        raise InvalidInputError(f"budget must be >= 0, got {budget!r}")
    frames = beta * n_frames
    if frames <= 0:
        raise InvalidInputError("beta * n_frames must be positive to split a budget")
    return budget / (pixels * frames)


def _mix_rate(mix, pixels: float) -> float:
    return sum(pixels * level * count for level, count in mix)


def discretize(
    b_opt: float,
    ladder: QuantizationLadder,
    frames: float,
    pixels: float,
    budget: float,
) -> tuple[tuple[float, float], ...]:
    """Round a relaxed depth onto the ladder by mixing its two neighbours.

    ``round(frames * (b_opt - lo) / (hi - lo))`` frames go to the upper level
    and the rest to the lower one; if that overshoots ``budget`` one frame is
    moved back down.  ``frames`` may be fractional (a per-second rate), in
    which case only the upper-level count is integral.  Level-0 frames are
    left out of the returned mix.
    """
    if b_opt < 0:
        raise InvalidInputError(f"b_opt must be >= 0, got {b_opt!r}")
    if frames <= 0 or b_opt == 0:
        return ()
    levels = ladder.with_zero
    if b_opt >= ladder.top:
        mix = ((ladder.top, float(frames)),)
        if _mix_rate(mix, pixels) <= budget * (1 + RATE_RTOL):
            return mix
        # b_opt == top up to rounding; fall through to the neighbour split
        b_opt = ladder.top
    if b_opt in levels:
        mix = ((b_opt, float(frames)),)
        if _mix_rate(mix, pixels) <= budget * (1 + RATE_RTOL):
            return mix
    hi_idx = next(i for i, v in enumerate(levels) if v >= b_opt)
    lo, hi = levels[hi_idx - 1], levels[hi_idx]
    n_hi = min(round(frames * (b_opt - lo) / (hi - lo)), int(frames))
    while n_hi > 0:
        mix = ((lo, frames - n_hi), (hi, float(n_hi)))
        if _mix_rate(mix, pixels) <= budget * (1 + RATE_RTOL):
            break
        n_hi -= 1
    mix = ((lo, frames - n_hi), (hi, float(n_hi)))
    return tuple((lv, float(c)) for lv, c in mix if c > 0 and lv > 0)


def plan_from_mix(
    mix, model: CloudResponseModel, pixels: float, n_frames: float, frames: float | None = None
) -> QuantizationPlan:
    """Score a shared-curve mix over ``frames`` cloud frames.

    map_cloud is the frame-weighted mean of g, with frames absent from the
    mix scored at g(0).  ``frames`` defaults to the mix total.
    """
    mix = tuple((float(lv), float(c)) for lv, c in mix if lv > 0 and c > 0)
    sent = sum(c for _, c in mix)
    if frames is None:
        frames = sent
    if frames <= 0:
        return QuantizationPlan(0.0, (), 0.0, g_eval(model, 0.0), 0.0)
    idle = max(frames - sent, 0.0)
    map_cloud = (sum(g_eval(model, lv) * c for lv, c in mix) + g_eval(model, 0.0) * idle) / frames
    return QuantizationPlan(sent / n_frames, mix, _mix_rate(mix, pixels), min(1.0, map_cloud), float(frames))


def greedy_heuristic(
    per_frame_models: Sequence[CloudResponseModel],
    budget: float,
    ladder: QuantizationLadder,
    pixels: float,
    n_frames: float | None = None,
) -> QuantizationPlan:
    """Marginal-gain allocation for frames with individual response curves.

    Starting from no residual data, repeatedly lift the one frame whose next
    ladder step buys the most mAP per extra bit/pixel, among steps that still
    fit the remaining budget.  Ties go to the lowest frame index.  Since the
    budget only shrinks, a step that does not fit now is dropped for good.
    """
    if budget < 0:
        raise InvalidInputError(f"budget must be >= 0, got {budget!r}")
    n = len(per_frame_models)
    levels = ladder.with_zero
    idx = [0] * n
    remaining = budget

    def push(heap, i):
        j = idx[i]
        if j + 1 < len(levels):
            model = per_frame_models[i]
            step = levels[j + 1] - levels[j]
            gain = g_eval(model, levels[j + 1]) - g_eval(model, levels[j])
            heapq.heappush(heap, (-gain / step, i, j))

    heap: list = []
    for i in range(n):
        push(heap, i)
    while heap:
        _, i, j = heapq.heappop(heap)
        cost = pixels * (levels[j + 1] - levels[j])
        if cost > remaining * (1 + RATE_RTOL):
            continue
        remaining -= cost
        idx[i] = j + 1
        push(heap, i)

    per_level: dict[float, float] = {}
    for j in idx:
        if j > 0:
            per_level[levels[j]] = per_level.get(levels[j], 0.0) + 1.0
    mix = tuple(sorted(per_level.items()))
    scores = [g_eval(m, levels[j]) for m, j in zip(per_frame_models, idx)]
    map_cloud = sum(scores) / n if n else 0.0
    sent = sum(1 for j in idx if j > 0)
    total = n_frames if n_frames else max(n, 1)
    return QuantizationPlan(sent / total, mix, _mix_rate(mix, pixels), min(1.0, map_cloud), float(n))


def solve_data_stream(
    scenario: Scenario,
    b_up: float,
    beta: float,
    per_frame_models: Sequence[CloudResponseModel] | None = None,
) -> QuantizationPlan:
    """Best residual-data plan for a given uplink bandwidth and task split.

    Without ``per_frame_models`` every cloud frame shares
    ``scenario.cloud_model`` and the even-split + rounding path is used.
    Passing one model per cloud frame switches to :func:`greedy_heuristic`.
    """
    s = scenario
    budget = residual_budget(b_up, s.se_up, beta, s.n_frames, s.feature_bits)
    frames = beta * s.n_frames
    if per_frame_models is not None:
        return greedy_heuristic(per_frame_models, budget, s.ladder, s.pixels, s.n_frames)
    if frames <= 0:
        return QuantizationPlan(0.0, (), 0.0, g_eval(s.cloud_model, 0.0), 0.0)
    b_opt = equal_bits_relaxed(budget, beta, s.n_frames, s.pixels)
    mix = discretize(b_opt, s.ladder, frames, s.pixels, budget)
    return plan_from_mix(mix, s.cloud_model, s.pixels, s.n_frames, frames)
