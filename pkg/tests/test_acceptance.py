"""Acceptance suite: ten end-to-end checks at their stated tolerances.

Each check returns ``(passed, detail)``.  Under pytest every check is one
test and a PASS/FAIL line per criterion is printed in the terminal summary;
``python tests/test_acceptance.py`` prints the same lines directly.
"""

import math
import sys
from fractions import Fraction
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from edgecloud import (
    CloudResponseModel,
    PRCurve,
    Scenario,
    SweepSpec,
    edge_update_from_downlink,
    emit_csv,
    equal_bits_relaxed,
    evaluate,
    exhaustive_search,
    g_eval,
    joint_map_exact,
    joint_map_lower_bound,
    map_from_curve,
    residual_budget,
    run_sweep,
    solve,
    solve_cloud_only,
    solve_edge_only,
    stationarity_residuals,
    theorem7_residual,
)
from edgecloud.experiment import read_csv
from edgecloud.pr_metrics import lower_bound_unchecked
from edgecloud.scenario import QuantizationLadder

RESULTS = {}
MHZ = 1e6
BANDWIDTHS = (1, 2, 5, 10, 20, 40)
FRAMES = (5, 10, 15, 20)


def smooth_scenario():
    return Scenario(ladder=QuantizationLadder(tuple(round(0.005 * k, 6) for k in range(1, 401))))


def criterion_1():
    budget = residual_budget(8.55 * MHZ, 2.55, 0.385, 10, 860)
    b = equal_bits_relaxed(budget, 0.385, 10, 1e7)
    return abs(b - 0.5662) <= 5e-4, f"b_hat={b:.6f} (target 0.5662 +/- 0.0005)"


def criterion_2():
    s = Scenario()
    m = edge_update_from_downlink(1.45 * MHZ, s)
    plan = evaluate(s, 0.385, 8.55 * MHZ)
    ok = m == 1.45 * MHZ * 5 == 7.25e6 and plan.m_update == plan.b_down * s.se_down
    return ok, f"M={m!r} bit/s, plan slack_downlink={plan.slack_downlink!r}"


def criterion_3():
    s = Scenario()
    gaps, start = [], time.perf_counter()
    for b in BANDWIDTHS:
        sb = s.replace(bandwidth=b * MHZ)
        gaps.append(abs(solve(sb).map_joint - exhaustive_search(sb).map_joint))
    elapsed = time.perf_counter() - start
    ok = max(gaps) <= 5e-3 and elapsed < 60.0
    return ok, f"max |solve - oracle| = {max(gaps):.2e} (<= 5e-3), {elapsed:.1f} s (< 60 s)"


def criterion_4():
    s = Scenario()
    points = [s.replace(bandwidth=b * MHZ) for b in BANDWIDTHS] + [s.replace(n_frames=n) for n in FRAMES]
    worst = math.inf
    for sp in points:
        base = solve_edge_only(sp).map_joint
        try:
            base = max(base, solve_cloud_only(sp).map_joint)
        except ValueError:
            pass  # cloud-only infeasible at this point
        worst = min(worst, solve(sp).map_joint - base)
    return worst >= -1e-9, f"min(map_joint - best baseline) = {worst:.3e} over {len(points)} points"


def criterion_5():
    s = Scenario()
    joint = [solve(s.replace(bandwidth=b * MHZ)).map_joint for b in BANDWIDTHS]
    at80 = solve(s.replace(bandwidth=80 * MHZ)).map_joint
    a = all(y >= x - 1e-9 for x, y in zip(joint, joint[1:])) and abs(at80 - joint[-1]) <= 1e-3
    b = len({solve_edge_only(s.replace(n_frames=n)).map_joint for n in FRAMES}) == 1
    beta_n = [solve(s.replace(n_frames=n)).beta for n in FRAMES]
    beta_b = [solve(s.replace(bandwidth=bw * MHZ)).beta for bw in BANDWIDTHS + (80,)]
    c = all(y < x for x, y in zip(beta_n, beta_n[1:])) and all(y >= x for x, y in zip(beta_b, beta_b[1:]))
    fast = s.replace(se_up=10.0)
    sd = [solve(fast.replace(se_down=float(d))).map_joint for d in range(1, 11)]
    d = max(sd) - min(sd) <= 1e-9
    detail = (
        f"(a) {'ok' if a else 'FAIL'} |B80-B40|={abs(at80 - joint[-1]):.1e}; (b) {'ok' if b else 'FAIL'}; "
        f"(c) {'ok' if c else 'FAIL'} beta(N)={[round(x, 3) for x in beta_n]}; "
        f"(d) {'ok' if d else 'FAIL'} spread over S_d={max(sd) - min(sd):.1e}"
    )
    return a and b and c and d, detail


def dominated_pair(rng):
    """Cloud curve dominating the edge curve at every threshold."""
    k = int(rng.integers(1, 11))
    r_edge = np.sort(rng.uniform(0, 1, k))
    r_cloud = np.maximum.accumulate(r_edge + (1 - r_edge) * rng.uniform(0, 1, k))
    p_edge = np.sort(rng.uniform(0, 1, k))[::-1]
    p_cloud = p_edge + (1 - p_edge) * rng.uniform(0, 1, k)
    return r_cloud, p_cloud, r_edge, p_edge


def bound_gap(r_cloud, p_cloud, r_edge, p_edge, beta):
    cloud = PRCurve.from_pairs(zip(r_cloud, p_cloud))
    edge = PRCurve.from_pairs(zip(r_edge, p_edge))
    lb = joint_map_lower_bound(map_from_curve(cloud), map_from_curve(edge), beta)
    return joint_map_exact(cloud, edge, beta) - lb


def criterion_6():
    rng = np.random.default_rng(6)
    violations, worst, not_shrinking = 0, 0.0, 0
    for _ in range(1000):
        rc, pc, re, pe = dominated_pair(rng)
        beta = float(rng.uniform())
        gap = bound_gap(rc, pc, re, pe, beta)
        if gap < -1e-12:
            violations += 1
            worst = min(worst, gap)
        seq = [abs(bound_gap(rc, pc, rc - e * (rc - re), pc - e * (pc - pe), beta)) for e in (1, 0.5, 0.25, 0.125)]
        if seq[0] > 1e-15 and not all(y < x for x, y in zip(seq, seq[1:])):
            not_shrinking += 1
    ok = violations == 0 and not_shrinking == 0
    return ok, (
        f"{violations}/1000 pairs with exact < bound (worst {worst:.3e}); "
        f"{not_shrinking}/1000 convergence sequences not strictly shrinking"
    )


def criterion_7():
    rng = np.random.default_rng(7)
    worst = math.inf
    for _ in range(500):
        lo = rng.uniform(0, 0.6)
        model = CloudResponseModel(lo, rng.uniform(lo, 1.0), rng.uniform(0.1, 20))
        rho, b_hat = rng.uniform(0.01, 0.99), float(rng.choice(QuantizationLadder().levels))
        case_one = rho * g_eval(model, b_hat) + (1 - rho) * g_eval(model, 0.0)
        case_two = g_eval(model, rho * b_hat)
        worst = min(worst, case_two - case_one)
    return worst >= -1e-12, f"min(case2 - case1) = {worst:.3e} over 500 triples"


def _hessian(f, x, y, h):
    """Fourth-order central-difference Hessian; exact when fed Fractions."""
    offs = [k * h for k in range(-2, 3)]
    c = [Fraction(v, 12) / (h * h) for v in (-1, 16, -30, 16, -1)]
    w = [Fraction(v, 12) / h for v in (1, -8, 0, 8, -1)]
    fxx = sum(ci * f(x + o, y) for ci, o in zip(c, offs))
    fyy = sum(ci * f(x, y + o) for ci, o in zip(c, offs))
    fxy = sum(wi * wj * f(x + oi, y + oj) for wi, oi in zip(w, offs) for wj, oj in zip(w, offs) if wi and wj)
    return fxx, fxy, fyy


def criterion_8():
    # the bound's own arithmetic evaluated on rationals, so the stencil
    # carries truncation error only (about h**4) and no roundoff
    rng = np.random.default_rng(8)
    h = Fraction(1, 10**5)
    worst_first, worst_det = -math.inf, -math.inf
    for _ in range(100):
        L, S, beta = (Fraction(float(v)) for v in (rng.uniform(0.1, 0.95), rng.uniform(0.1, 0.95), rng.uniform(0.05, 0.95)))
        fxx, fxy, fyy = _hessian(lambda a, b: lower_bound_unchecked(a, b, beta), L, S, h)
        worst_first = max(worst_first, float(fxx), float(fyy))
        worst_det = max(worst_det, float(fxx * fyy - fxy * fxy))
    ok = worst_first <= 1e-9 and worst_det <= 1e-9
    return ok, f"max diagonal entry {worst_first:.3e}, max det {worst_det:.3e} (both <= 1e-9)"


def criterion_9():
    s = smooth_scenario()
    plan = solve(s)
    res = stationarity_residuals(s, plan)
    if res is None:
        return False, "solver optimum is not strictly interior"
    at_opt = abs(res.combined)
    shifted = [theorem7_residual(s, evaluate(s, plan.beta + d, plan.b_up)) for d in (-0.1, 0.1)]
    ok = at_opt < 0.05 and all(r is not None and abs(r) > at_opt for r in shifted)
    verbatim = [theorem7_residual(s, evaluate(s, plan.beta + d, plan.b_up), form="verbatim") for d in (-0.1, 0.1)]
    return ok, (
        f"beta*={plan.beta:.3f} residual {res.combined:+.4f} vs {shifted[0]:+.4f}/{shifted[1]:+.4f} at -/+0.1; "
        f"verbatim form {res.verbatim:+.4f} vs {verbatim[0]:+.4f}/{verbatim[1]:+.4f}"
    )


def criterion_10():
    s = Scenario()
    spec = SweepSpec("bandwidth", tuple(b * MHZ for b in BANDWIDTHS))
    with tempfile.TemporaryDirectory() as tmp:
        paths = [emit_csv(run_sweep(s, spec), Path(tmp) / f"run{i}.csv") for i in range(2)]
        identical = paths[0].read_bytes() == paths[1].read_bytes()
        records = run_sweep(s, spec)
        rows = read_csv(paths[0])
    worst = 0.0
    for rec, row in zip(records, rows):
        for key, value in (("map_joint", rec.plan.map_joint), ("beta", rec.plan.beta), ("b_up_hz", rec.plan.b_up)):
            if value:
                worst = max(worst, abs(row[key] - value) / abs(value))
    ok = identical and worst <= 5e-6
    return ok, f"byte-identical={identical}, max relative round-trip error {worst:.1e} (<= 5e-6)"


CRITERIA = [
    (1, "quantization arithmetic", criterion_1),
    (2, "downlink tightness", criterion_2),
    (3, "oracle proximity", criterion_3),
    (4, "dominance over baselines", criterion_4),
    (5, "sweep shapes", criterion_5),
    (6, "joint mAP lower bound", criterion_6),
    (7, "uniform depth beats concentration", criterion_7),
    (8, "bound concavity", criterion_8),
    (9, "stationarity at the optimum", criterion_9),
    (10, "determinism and CSV", criterion_10),
]


def _line(number, name, ok, detail):
    return f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {name}: {detail}"


@pytest.mark.parametrize("number,name,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, check):
    ok, detail = check()
    RESULTS[number] = _line(number, name, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, name, check in CRITERIA:
        ok, detail = check()
        failed += not ok
        print(_line(number, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
