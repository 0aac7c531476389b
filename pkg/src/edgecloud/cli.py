"""Command-line front end: ``edgecloud plan | sweep | validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .allocator import AllocationPlan, solve, solve_cloud_only, solve_edge_only
from .errors import InfeasibleError, InvalidInputError
from .experiment import AXES, SweepSpec, emit_csv, emit_plot, load_experiment, run_sweep
from .oracle import exhaustive_search

MODES = {
    "solve": solve,
    "cloud-only": solve_cloud_only,
    "edge-only": solve_edge_only,
    "oracle": exhaustive_search,
}


def plan_to_dict(plan: AllocationPlan) -> dict:
    return {
        "beta": plan.beta,
        "b_up_hz": plan.b_up,
        "b_down_hz": plan.b_down,
        "m_update_bps": plan.m_update,
        "map_joint": plan.map_joint,
        "map_cloud": plan.map_cloud,
        "map_edge": plan.map_edge,
        "rate_feature_bps": plan.rate_feature,
        "rate_data_bps": plan.rate_data,
        "rho": plan.quant.rho,
        "avg_bits_per_pixel": plan.avg_bits,
        "mix": [list(m) for m in plan.quant.mix],
        "slack": {
            "bandwidth_hz": plan.slack_bandwidth,
            "uplink_bps": plan.slack_uplink,
            "downlink_bps": plan.slack_downlink,
        },
    }


def _cmd_plan(args) -> int:
    scenario = load_experiment(args.config).scenario
    plan = MODES[args.mode](scenario)
    json.dump(plan_to_dict(plan), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    experiment = load_experiment(args.config)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    spec = SweepSpec(args.axis, tuple(values))
    records = run_sweep(experiment, spec, with_oracle=args.oracle, workers=args.workers)
    emit_csv(records, args.out)
    if args.plot:
        emit_plot(records, args.plot)
    failed = [r for r in records if r.errors]
    for r in failed:
        for err in r.errors:
            print(f"warning: {r.axis}={r.value}: {err}", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    experiment = load_experiment(args.config)
    s = experiment.scenario
    print(
        f"ok: N={s.n_frames:g} x={s.pixels:g} B={s.bandwidth:g} Hz S_u={s.se_up:g} S_d={s.se_down:g} "
        f"M=[{s.m_min:g}, {s.m_max:g}] ladder={list(s.ladder.levels)} "
        f"model_configs={sorted(experiment.model_configs)}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgecloud", description="Edge/cloud inference split planner.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve one scenario and print the plan as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=sorted(MODES), default="solve")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("sweep", help="sweep one parameter and write a CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, choices=sorted(AXES))
    p.add_argument("--values", required=True, help="comma-separated axis values (SI units, or model_config names)")
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive search at every point")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="optional image path for an mAP plot")
    p.add_argument("--workers", type=int, default=1, help="processes used for sweep points (default 1)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="check a config and print the resolved scenario")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidInputError, InfeasibleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
