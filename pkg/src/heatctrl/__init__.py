"""Time-parallel optimal control of the heat equation via intermediate targets."""

from .grid import (
    Grid,
    build_grid,
    inject,
    inner_control,
    inner_omega,
    laplacian_apply,
    norm_control,
    norm_omega,
    restrict,
)
from .linsolve import CGError, MatvecCounter, cg_solve
from .propagators import TimeGrid, solve_adjoint, solve_state, step_operator
from .problem import (
    ControlProblem,
    DescentResult,
    EvaluationRecord,
    evaluate,
    evaluate_with_gradient,
    gradient,
    inner_h,
    norm_h,
    optimal_step_gradient,
    oracle_kkt_solve,
)
from .targets import (
    SubProblem,
    TargetTrajectory,
    TimePartition,
    assemble_subproblems,
    concat_controls,
    make_partition,
    restrict_control,
    solve_subproblem,
    target_trajectory,
    targets_from_solutions,
)
from .driver import (
    IterationMetrics,
    OuterConfig,
    RunResult,
    line_search_theta,
    outer_iteration,
    run,
)
from .config import ConfigError, RunConfig, build_instance, make_field, parse_config

__all__ = [
    "CGError",
    "ConfigError",
    "ControlProblem",
    "DescentResult",
    "EvaluationRecord",
    "Grid",
    "IterationMetrics",
    "MatvecCounter",
    "OuterConfig",
    "RunConfig",
    "RunResult",
    "SubProblem",
    "TargetTrajectory",
    "TimeGrid",
    "TimePartition",
    "assemble_subproblems",
    "build_grid",
    "build_instance",
    "cg_solve",
    "concat_controls",
    "evaluate",
    "evaluate_with_gradient",
    "gradient",
    "inject",
    "inner_control",
    "inner_h",
    "inner_omega",
    "laplacian_apply",
    "line_search_theta",
    "make_field",
    "make_partition",
    "norm_control",
    "norm_h",
    "norm_omega",
    "optimal_step_gradient",
    "oracle_kkt_solve",
    "outer_iteration",
    "parse_config",
    "restrict",
    "restrict_control",
    "run",
    "solve_adjoint",
    "solve_state",
    "solve_subproblem",
    "step_operator",
    "target_trajectory",
    "targets_from_solutions",
]
