"""First-order descent methods for smooth multiobjective problems."""
from .bench import (
    BenchConfig,
    BenchmarkSummary,
    RunRecord,
    SummaryRow,
    derive_run_seed,
    dump_trace,
    read_summary_csv,
    run_benchmark,
    write_summary,
)
from .core import Evaluation, Evaluator, FevalCounter, Problem, check_jacobian_fd, evaluate, jacobian
from .dual import DualNonConvergence, DualSolution, direction_from_weights, is_critical, kkt_residual, solve_dual
from .linesearch import (
    LineSearchFailure,
    LineSearchOutcome,
    LineSearchParams,
    NonmonotoneState,
    armijo,
    avg_nonmonotone,
    max_nonmonotone,
    update_avg_reference,
)
from .problems import EXTRA_NAMES, PROBLEM_NAMES, ParetoReference, make_problem, pareto_reference, sample_initial_point
from .scaling import ScalingState, scale_gradients, update_alphas
from .solvers import SolverConfig, SolveTrace, criticality_report, run_bbdmo, run_bbmo, run_sdmo, solve

__version__ = "0.1.0"
