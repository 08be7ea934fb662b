"""Linear oriented (directional) model.

For an activity ``(x, y)`` and orientation ``(d-, d+)`` it finds the largest
``beta`` such that ``((1 - beta d-) x, (1 + beta d+) y)`` is still feasible.
Contractions, dilations and relative slacks then follow linearly from ``beta``.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .core import (
    Activity,
    DataError,
    Evaluation,
    Orientation,
    SubjectOutsideTechnology,
    Technology,
    ZeroAdjustmentLog,
    check_activity,
    require_valid,
)
from .lp import LpProblem, Status, solve_lp
from .projection import assemble, outside

Subject = Union[Activity, int, str]


def resolve_subject(tech: Technology, subject: Subject):
    """``(activity, dmu name)`` for an activity or a reference DMU index/name."""
    if isinstance(subject, Activity):
        return subject, None
    j = tech.index(subject)
    return tech.activity(j), tech.names[j]


def lo_program(tech: Technology, a: Activity, d: Orientation) -> LpProblem:
    """The LP ``max beta`` over ``(beta, lambda)``.

    Row ``i`` reads ``X[i] lambda / x_i + beta d-_i <= 1`` and row ``r`` reads
    ``Y[r] lambda / y_r - beta d+_r >= 1``; a zero coordinate keeps its row
    unscaled by the activity (divided by the row maximum instead) with
    right-hand side 0. Returns-to-scale rows follow.
    """
    n = tech.n
    rows, rel, rhs = [], [], []
    for i in range(tech.m):
        row = np.zeros(n + 1)
        if a.x[i] > 0:
            row[0] = d.d_minus[i]
            row[1:] = tech.X[i] / a.x[i]
            rhs.append(1.0)
        else:
            row[1:] = tech.X[i] / tech.X[i].max()
            rhs.append(0.0)
        rows.append(row)
        rel.append("<=")
    for r in range(tech.s):
        row = np.zeros(n + 1)
        if a.y[r] > 0:
            row[0] = -d.d_plus[r]
            row[1:] = tech.Y[r] / a.y[r]
            rhs.append(1.0)
        else:
            row[1:] = tech.Y[r] / tech.Y[r].max()
            rhs.append(0.0)
        rows.append(row)
        rel.append(">=")
    for coeffs, relation, b in tech.rts.rows(n):
        rows.append(np.concatenate([[0.0], coeffs]))
        rel.append(relation)
        rhs.append(b)
    c = np.zeros(n + 1)
    c[0] = 1.0
    return LpProblem(c, np.array(rows), tuple(rel), np.array(rhs), sense="max")


def _sensitivity(a: Activity, d: Orientation, beta: float, duals: np.ndarray) -> Activity:
    # d beta / d x_i and d beta / d y_r of the external function, reference set fixed
    m = a.m
    gx = np.zeros(m)
    gy = np.zeros(a.s)
    pos_x = a.x > 0
    pos_y = a.y > 0
    gx[pos_x] = duals[:m][pos_x] * (1.0 - beta * d.d_minus[pos_x]) / a.x[pos_x]
    gy[pos_y] = duals[m : m + a.s][pos_y] * (1.0 + beta * d.d_plus[pos_y]) / a.y[pos_y]
    return Activity(gx, gy)


def solve_lo(
    tech: Technology,
    subject: Subject,
    d: Orientation,
    *,
    second_stage: bool = True,
    log: ZeroAdjustmentLog | None = None,
) -> Evaluation:
    """Evaluate an activity of the technology with the linear oriented model.

    ``subject`` is an :class:`Activity` or the index/name of a reference DMU.
    Raises :class:`SubjectOutsideTechnology` when the activity is not
    feasible and :class:`DataError` for invalid data or an unbounded program.
    """
    require_valid(tech)
    a, dmu = resolve_subject(tech, subject)
    check_activity(tech, a)
    d.check_subject(a)
    if d.inf_norm != 1.0:
        # tiny coefficients would vanish below the pivot tolerance
        return solve_lo(tech, subject, d.normalized(), second_stage=second_stage, log=log).for_orientation(d)
    sol = solve_lp(lo_program(tech, a, d))
    if sol.status is Status.INFEASIBLE:
        raise SubjectOutsideTechnology(f"{dmu or a!r} is not in the production possibility set")
    if sol.status is Status.UNBOUNDED:
        raise DataError(
            f"linear oriented program for {dmu or a!r} is unbounded; "
            "some output can be produced without inputs"
        )
    beta = max(float(sol.x[0]), 0.0)
    lam = np.maximum(sol.x[1:], 0.0)
    notes = ["first-stage vertex may not be unique"] if sol.multiple_optima else []
    return assemble(
        "lo",
        tech,
        a,
        d,
        beta,
        1.0 - beta * d.d_minus,
        1.0 + beta * d.d_plus,
        beta * d.d_minus,
        beta * d.d_plus,
        lam,
        second_stage=second_stage,
        log=log,
        dmu=dmu,
        notes=notes,
        sensitivity=_sensitivity(a, d, beta, sol.duals),
    )


def evaluate_lo_external(
    tech: Technology,
    a: Activity,
    d: Orientation,
    *,
    second_stage: bool = True,
    log: ZeroAdjustmentLog | None = None,
) -> Evaluation:
    """Linear oriented model for an arbitrary activity against the reference DMUs.

    The activity is not added to the reference set. Activities outside the
    technology get ``beta = 0``, ``rho = 1`` and ``outside_technology=True``.
    """
    try:
        return solve_lo(tech, a, d, second_stage=second_stage, log=log)
    except SubjectOutsideTechnology:
        return outside("lo", a, d)
