import itertools

import numpy as np
import pytest

from edgecloud import (
    CloudResponseModel,
    EdgeResponseModel,
    InvalidInputError,
    OracleGrid,
    QuantizationLadder,
    Scenario,
    exhaustive_search,
    g_eval,
    h_eval,
    solve,
)
from edgecloud import kernels
from edgecloud.oracle import MAX_COMBINATIONS, grid_axes

BACKENDS = [pytest.param(kernels.enumerate_grid_py, id="numpy")]
if kernels.enumerate_grid_compiled is not None:
    BACKENDS.append(pytest.param(kernels.enumerate_grid_compiled, id="cython"))


@pytest.fixture
def toy():
    return Scenario(
        n_frames=2,
        pixels=100.0,
        feature_bits=50.0,
        bandwidth=200.0,
        se_up=1.0,
        se_down=1.0,
        ladder=QuantizationLadder((1.0,)),
        cloud_model=CloudResponseModel(0.5, 0.9, 2.0),
        edge_model=EdgeResponseModel(0.6, 0.7, m_min=50.0, m_max=150.0, kappa_h=1.0),
    )


def by_hand(s, betas, b_ups, ms, levels):
    """Plain loop over every candidate; ties keep the first one seen."""
    best = None
    for beta, b_up, m, level in itertools.product(betas, b_ups, ms, levels):
        b_down = s.bandwidth - b_up
        if b_up < 0 or b_down < 0:
            continue
        if beta * s.n_frames * (s.feature_bits + s.pixels * level) > b_up * s.se_up:
            continue
        if m > b_down * s.se_down:
            continue
        L, S = g_eval(s.cloud_model, level), h_eval(s.edge_model, m)
        if beta == 0:
            value = S
        elif beta == 1:
            value = L
        else:
            value = L * S / ((1 - beta) * L + beta * S)
        if best is None or value > best[0]:
            best = (value, beta, b_up, m, level)
    return best


@pytest.mark.parametrize("enumerate_grid", BACKENDS)
def test_two_by_two_by_two_by_two(toy, enumerate_grid):
    s = toy
    betas, b_ups, ms, levels = [0.0, 1.0], [0.0, 200.0], [0.0, 150.0], [0.0, 1.0]
    h_vals = [h_eval(s.edge_model, m) for m in ms]
    g_vals = [g_eval(s.cloud_model, b) for b in levels]
    best, i, j, k, l = enumerate_grid(
        np.array(betas), np.array(b_ups), np.array(ms), np.array(h_vals),
        np.array(levels), np.array(g_vals),
        s.n_frames, s.feature_bits, s.pixels, s.se_up, s.se_down, s.bandwidth,
    )
    expected = by_hand(s, betas, b_ups, ms, levels)
    assert best == pytest.approx(expected[0], abs=1e-15)
    assert (betas[i], b_ups[j], ms[k], levels[l]) == expected[1:]
    # cloud frames with residual data need 2 * (50 + 100) = 300 bit/s, which never fits
    assert expected == (pytest.approx(0.7), 0.0, 0.0, 150.0, 0.0)


def test_smallest_grid_matches_hand_enumeration(toy):
    grid = OracleGrid(beta_steps=3, b_up_steps=3, m_steps=2)
    plan = exhaustive_search(toy, grid)
    expected = by_hand(toy, *grid_axes(toy, grid))
    assert plan.map_joint == pytest.approx(expected[0], abs=1e-15)
    assert (plan.beta, plan.b_up, plan.m_update, plan.avg_bits) == pytest.approx(expected[1:])
    assert plan.check_constraints(toy) == []


def test_single_feasible_point():
    s = Scenario(bandwidth=0.0)
    plan = exhaustive_search(s, OracleGrid(2, 2, 2))
    assert (plan.beta, plan.b_up, plan.m_update) == (0.0, 0.0, 0.0)
    assert plan.map_joint == s.edge_model.map_baseline


def test_guard_refuses_huge_grid(scenario):
    grid = OracleGrid(beta_steps=2001, b_up_steps=2001, m_steps=51)
    assert grid.combinations(scenario) > MAX_COMBINATIONS
    with pytest.raises(InvalidInputError, match=str(grid.combinations(scenario))):
        exhaustive_search(scenario, grid)


def test_grid_size_validated():
    with pytest.raises(InvalidInputError):
        OracleGrid(beta_steps=1)


def test_combination_count(scenario):
    assert OracleGrid().combinations(scenario) == 201 * 201 * 52 * 6


@pytest.mark.parametrize("bandwidth", [1e6, 5e6, 10e6, 40e6])
def test_oracle_plan_feasible_and_close_to_solver(scenario, bandwidth):
    s = scenario.replace(bandwidth=bandwidth)
    oracle = exhaustive_search(s)
    assert oracle.check_constraints(s) == []
    assert abs(solve(s).map_joint - oracle.map_joint) <= 5e-3


def test_deterministic(scenario):
    assert exhaustive_search(scenario) == exhaustive_search(scenario)


@pytest.mark.parametrize("enumerate_grid", BACKENDS)
def test_backend_override(scenario, enumerate_grid):
    grid = OracleGrid(41, 41, 11)
    assert exhaustive_search(scenario, grid, backend=enumerate_grid) == exhaustive_search(scenario, grid)
