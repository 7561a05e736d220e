"""LQ optimal control with min-of-quadratics terminal costs.

Piece indices are 1-based throughout this package.
"""
from ._core import (
    BackwardSolution,
    ControlProblem,
    NumericError,
    ParseError,
    ValidationError,
    acceptance_suite,
    builtin_names,
    constant_example,
    feedback,
    load_problem,
    newton_example,
    resolve_problem,
    residual,
    rollout,
    scalar_example,
    scalar_riccati_oracle,
    solve_backward,
    timedep_example,
    value_at,
)

__all__ = [
    "BackwardSolution",
    "ControlProblem",
    "NumericError",
    "ParseError",
    "ValidationError",
    "acceptance_suite",
    "builtin_names",
    "constant_example",
    "feedback",
    "load_problem",
    "newton_example",
    "resolve_problem",
    "residual",
    "rollout",
    "scalar_example",
    "scalar_riccati_oracle",
    "solve_backward",
    "timedep_example",
    "value_at",
]
