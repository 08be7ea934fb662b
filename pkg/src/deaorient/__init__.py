"""Generalized oriented data envelopment analysis.

Linear-oriented and quadratic-CRS-oriented evaluations of decision-making
units, max-slack projections, Farrell oriented efficiency scores, and an
exact rational oracle for checking the solver on small instances.
"""

from .batch import RunConfig, emit_bars, evaluate_dmus, read_csv, five_unit_example
from .core import (
    CRS,
    NDRS,
    NIRS,
    RTS,
    VRS,
    Activity,
    DataError,
    Evaluation,
    Orientation,
    ReturnsToScale,
    SubjectOutsideTechnology,
    Technology,
    ZeroAdjustmentLog,
    ZeroPolicy,
    dominates,
    in_technology,
    preprocess_zeros,
    validate_technology,
)
from .lo import evaluate_lo_external, solve_lo
from .lp import LpProblem, LpSolution, Status, feasible, solve_lp
from .oracle import brute_beta, fm_feasible, monotonicity_scan
from .projection import is_efficient, is_weakly_efficient, second_stage_max_slack
from .qo import QoConsistencyError, beta_q_from_beta_l, evaluate_qo_external, solve_qo, solve_qo_fast_path
from .scores import (
    CostGradient,
    farrell_oriented_efficiency,
    orientation_from_cost_gradient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
