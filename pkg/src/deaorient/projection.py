"""Max-slack second stage, efficient projections and frontier membership tests."""

from __future__ import annotations

import numpy as np

from .core import (
    Activity,
    Evaluation,
    Orientation,
    SubjectOutsideTechnology,
    Technology,
    ZeroAdjustmentLog,
    check_activity,
)
from .lp import LpProblem, Status, solve_lp
from .scores import attach_score

EFFICIENCY_TOL = 1e-8


def _max_slack(tech: Technology, target: Activity):
    """Solve the additive program on relative slacks.

    Variables are ``lambda`` followed by the relative input and output slacks;
    each row is divided by the target coordinate (row maximum where it is 0).
    """
    n, m, s = tech.n, tech.m, tech.s
    rows, rel, rhs = [], [], []
    for i in range(m):
        scale = target.x[i] if target.x[i] > 0 else tech.X[i].max()
        row = np.zeros(n + m + s)
        row[:n] = tech.X[i] / scale
        row[n + i] = 1.0
        rows.append(row)
        rel.append("=")
        rhs.append(target.x[i] / scale)
    for r in range(s):
        scale = target.y[r] if target.y[r] > 0 else tech.Y[r].max()
        row = np.zeros(n + m + s)
        row[:n] = tech.Y[r] / scale
        row[n + m + r] = -1.0
        rows.append(row)
        rel.append("=")
        rhs.append(target.y[r] / scale)
    for coeffs, relation, b in tech.rts.rows(n):
        row = np.zeros(n + m + s)
        row[:n] = coeffs
        rows.append(row)
        rel.append(relation)
        rhs.append(b)
    c = np.concatenate([np.zeros(n), np.ones(m + s)])
    sol = solve_lp(LpProblem(c, np.array(rows), tuple(rel), np.array(rhs), sense="max"))
    if sol.status is Status.INFEASIBLE:
        raise SubjectOutsideTechnology("target is not in the production possibility set")
    if sol.status is Status.UNBOUNDED:
        raise SubjectOutsideTechnology("max-slack program is unbounded")
    lam = np.maximum(sol.x[:n], 0.0)
    return lam, sol.x[n : n + m], sol.x[n + m :], sol.multiple_optima


def second_stage_max_slack(tech: Technology, target: Activity):
    """Max-slack intensity vector and absolute slacks for a target in the technology.

    Maximizes the sum of input and output slacks, each relative to the
    target coordinate, under the technology's returns to scale.
    Returns ``(lambda_star, s_minus, s_plus)``.
    """
    check_activity(tech, target)
    lam, _, _, _ = _max_slack(tech, target)
    s_minus = np.maximum(target.x - tech.X @ lam, 0.0)
    s_plus = np.maximum(tech.Y @ lam - target.y, 0.0)
    return lam, s_minus, s_plus


def is_efficient(tech: Technology, a: Activity, tol: float = EFFICIENCY_TOL) -> bool:
    """Whether no feasible activity dominates ``a`` (``a`` outside the technology: False)."""
    check_activity(tech, a)
    try:
        _, sig_minus, sig_plus, _ = _max_slack(tech, a)
    except SubjectOutsideTechnology:
        return False
    return bool(np.all(sig_minus <= tol) and np.all(sig_plus <= tol))


def is_weakly_efficient(tech: Technology, a: Activity, tol: float = EFFICIENCY_TOL) -> bool:
    """Whether no feasible activity strictly improves every variable of ``a``.

    Runs the linear oriented model with unit weights on every variable;
    ``a`` is on the weak frontier iff the optimal step is zero.
    """
    from .lo import lo_program

    check_activity(tech, a)
    ones = Orientation(np.ones(tech.m), np.ones(tech.s))
    sol = solve_lp(lo_program(tech, a, ones))
    if sol.status is not Status.OPTIMAL:
        return False
    return bool(sol.x[0] <= tol)


def assemble(
    model: str,
    tech: Technology,
    subject: Activity,
    d: Orientation,
    beta: float,
    theta: np.ndarray,
    phi: np.ndarray,
    tau_minus: np.ndarray,
    tau_plus: np.ndarray,
    lam: np.ndarray,
    *,
    second_stage: bool,
    log: ZeroAdjustmentLog | None,
    dmu: str | None,
    notes=(),
    sensitivity=None,
    method="lp",
) -> Evaluation:
    """Build a scored :class:`Evaluation` from the first-stage solution."""
    target = Activity(theta * subject.x, phi * subject.y)
    notes = list(notes)
    if second_stage:
        lam, _, _, multiple = _max_slack(tech, target)
        if multiple:
            notes.append("max-slack solution may not be unique")
    else:
        notes.append("projection from first-stage vertex, not necessarily max-slack")
    projection = Activity(tech.X @ lam, tech.Y @ lam)
    s_minus = np.maximum(target.x - projection.x, 0.0)
    s_plus = np.maximum(projection.y - target.y, 0.0)
    ev = Evaluation(
        model=model,
        subject=subject,
        orientation=d,
        beta=float(beta),
        theta=theta,
        phi=phi,
        tau_minus=tau_minus,
        tau_plus=tau_plus,
        target=target,
        lambda_star=lam,
        projection=projection,
        s_minus=s_minus,
        s_plus=s_plus,
        max_slack=second_stage,
        dmu=dmu,
        notes=tuple(notes),
        sensitivity=sensitivity,
        method=method,
    )
    return attach_score(ev, log)


def outside(model: str, subject: Activity, d: Orientation, dmu: str | None = None) -> Evaluation:
    """Conventional result for an activity outside the technology: ``beta = 0``, ``rho = 1``."""
    m, s = subject.m, subject.s
    return Evaluation(
        model=model,
        subject=subject,
        orientation=d,
        beta=0.0,
        theta=np.ones(m),
        phi=np.ones(s),
        tau_minus=np.zeros(m),
        tau_plus=np.zeros(s),
        target=subject,
        lambda_star=None,
        projection=subject,
        s_minus=np.zeros(m),
        s_plus=np.zeros(s),
        rho=1.0,
        outside_technology=True,
        dmu=dmu,
        notes=("activity outside the technology",),
        method="none",
    )
