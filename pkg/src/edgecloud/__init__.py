"""Joint edge/cloud inference planning: task split, bandwidth split, residual-data
quantization and edge-model update rate chosen to maximise system mAP."""

from .allocator import (
    AllocationPlan,
    SolverSettings,
    edge_update_from_downlink,
    evaluate,
    objective,
    solve,
    solve_cloud_only,
    solve_edge_only,
    stationarity_residuals,
    theorem7_residual,
)
from .data_stream import (
    QuantizationPlan,
    discretize,
    equal_bits_relaxed,
    greedy_heuristic,
    residual_budget,
    solve_data_stream,
)
from .errors import InfeasibleError, InvalidInputError
from .experiment import SweepSpec, emit_csv, emit_plot, load_scenario, run_sweep
from .oracle import OracleGrid, exhaustive_search
from .pr_metrics import (
    FusionWeights,
    PRCurve,
    PRPoint,
    delta_gap,
    fuse_precision,
    fuse_recall,
    joint_map_exact,
    joint_map_lower_bound,
    map_from_curve,
)
from .response_models import (
    CloudResponseModel,
    EdgeResponseModel,
    g_derivative,
    g_eval,
    h_derivative,
    h_eval,
)
from .scenario import QuantizationLadder, Scenario

__version__ = "0.1.0"
