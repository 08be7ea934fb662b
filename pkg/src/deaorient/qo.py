"""Quadratic-CRS oriented model.

Inputs contract linearly, ``theta = 1 - beta d-``, while outputs dilate by
``phi = 1 / (1 - beta d+)``, so an output with weight ``d`` dilates by the
inverse of the contraction an input with weight ``d`` receives.

For a fixed ``beta`` the program is a linear feasibility problem in
``lambda`` (the dilation becomes a constant lower bound), and feasibility
can only be lost as ``beta`` grows. :func:`solve_qo` therefore bisects on
``beta`` with LP feasibility checks. Under CRS with one weight for all
inputs and one for all outputs, the optimum follows in closed form from the
linear oriented model (:func:`solve_qo_fast_path`).
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Activity,
    DataError,
    Evaluation,
    Orientation,
    RTS,
    SubjectOutsideTechnology,
    Technology,
    ZeroAdjustmentLog,
    check_activity,
    require_valid,
)
from .lo import Subject, lo_program, resolve_subject, solve_lo
from .lp import LpProblem, Status, feasible, find_feasible, solve_lp
from .projection import assemble, outside

BISECTION_TOL = 1e-9
MAX_BISECTIONS = 200
FAST_PATH_TOL = 1e-7


class QoConsistencyError(RuntimeError):
    """Two routes to the same optimum disagree (a solver bug, not a data problem)."""


def dilation(beta: float, d_plus: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 - beta * d_plus)


def fixed_beta_lp(tech: Technology, a: Activity, d: Orientation, beta: float) -> LpProblem:
    """Feasibility LP in ``lambda`` for a fixed step ``beta``.

    ``X[i] lambda / x_i <= 1 - beta d-_i`` and
    ``Y[r] lambda / y_r >= 1 / (1 - beta d+_r)``, plus returns-to-scale rows.
    Zero coordinates of ``a`` give unscaled rows with right-hand side 0.
    """
    n = tech.n
    rows, rel, rhs = [], [], []
    for i in range(tech.m):
        if a.x[i] > 0:
            rows.append(tech.X[i] / a.x[i])
            rhs.append(1.0 - beta * d.d_minus[i])
        else:
            rows.append(tech.X[i] / tech.X[i].max())
            rhs.append(0.0)
        rel.append("<=")
    for r in range(tech.s):
        if a.y[r] > 0:
            rows.append(tech.Y[r] / a.y[r])
            rhs.append(1.0 / (1.0 - beta * d.d_plus[r]))
        else:
            rows.append(tech.Y[r] / tech.Y[r].max())
            rhs.append(0.0)
        rel.append(">=")
    for coeffs, relation, b in tech.rts.rows(n):
        rows.append(coeffs)
        rel.append(relation)
        rhs.append(b)
    return LpProblem(np.zeros(n), np.array(rows), tuple(rel), np.array(rhs), sense="max")


def beta_upper_limit(a: Activity, d: Orientation) -> float:
    """Supremum of admissible steps: ``1 / max`` weight over nonzero variables."""
    w = np.concatenate([d.d_minus[a.x > 0], d.d_plus[a.y > 0]])
    return 1.0 / w.max()


def frozen_dilation_step(tech: Technology, a: Activity, d: Orientation, beta0: float) -> float | None:
    """Largest input step with the output dilations frozen at their value for ``beta0``.

    This is the linear oriented program with output weights set to zero and
    output right-hand sides ``1 / (1 - beta0 d+)``, the step left free in sign.
    ``beta0`` is feasible for the quadratic model iff the result is at least
    ``beta0``, and the result decreases as ``beta0`` grows, so the optimum is
    the root of ``frozen_dilation_step(beta) - beta``. Returns ``None`` when no
    input contraction reaches those outputs.
    """
    p = lo_program(tech, a, Orientation(d.d_minus, np.zeros_like(d.d_plus)))
    b = p.b.copy()
    b[tech.m : tech.m + tech.s] = np.where(a.y > 0, dilation(beta0, d.d_plus), 0.0)
    lower = np.zeros(p.c.size)
    lower[0] = -np.inf
    sol = solve_lp(LpProblem(p.c, p.A, p.relations, b, sense="max", lower=lower))
    if sol.status is not Status.OPTIMAL:
        return None
    return float(sol.x[0])


def output_reach(tech: Technology, a: Activity, d: Orientation, beta: float) -> float | None:
    """Largest ``g`` with ``g * phi(beta) * y`` producible from ``(1 - beta d-) * x``.

    ``beta`` is feasible iff the result is at least 1; it decreases as
    ``beta`` grows. ``None`` when the contracted inputs admit no intensity
    vector at all, ``inf`` when outputs can grow without bound.
    """
    p = fixed_beta_lp(tech, a, d, beta)
    n = tech.n
    A = np.hstack([np.zeros((p.A.shape[0], 1)), p.A])
    b = p.b.copy()
    for r in range(tech.s):
        row = tech.m + r
        A[row, 0] = -b[row]
        b[row] = 0.0
    c = np.zeros(n + 1)
    c[0] = 1.0
    sol = solve_lp(LpProblem(c, A, p.relations, b, sense="max"))
    if sol.status is Status.UNBOUNDED:
        return math.inf
    if sol.status is not Status.OPTIMAL:
        return None
    return float(sol.x[0])


def bisect_beta(
    tech: Technology,
    a: Activity,
    d: Orientation,
    *,
    tol: float = BISECTION_TOL,
    max_iter: int = MAX_BISECTIONS,
) -> tuple[float, int]:
    """Largest feasible step, to within ``tol``; returns ``(beta, iterations)``.

    Keeps a bracket ``[lo, hi)`` with ``lo`` feasible and ``hi`` infeasible
    and shrinks it by Illinois-style regula falsi on a decreasing residual
    whose root is the optimum, falling back to midpoints when the residual
    gives no usable secant. The residual is ``frozen_dilation_step(beta) -
    beta`` when some nonzero input carries weight and ``log(output_reach)``
    otherwise. The returned step always passes the fixed-step feasibility LP.
    """
    if not feasible(fixed_beta_lp(tech, a, d, 0.0)):
        raise SubjectOutsideTechnology(f"{a!r} is not in the production possibility set")
    lo = 0.0
    hi = beta_upper_limit(a, d) - 1e-12
    input_weighted = bool(np.any(d.d_minus[a.x > 0] > 0))

    def residual(beta):
        g = output_reach(tech, a, d, beta)
        if g is None or g <= 0.0:
            return None
        return math.inf if g == math.inf else math.log(g)

    f_lo = residual(lo)
    if f_lo is not None and f_lo <= 0.0:
        return 0.0, 0
    # with input weight, the frozen step at zero bounds the optimum from above
    if input_weighted:
        ub = frozen_dilation_step(tech, a, d, 0.0)
        if ub is not None and ub < hi:
            if feasible(fixed_beta_lp(tech, a, d, ub)):
                return ub, 0
            hi = ub
    if feasible(fixed_beta_lp(tech, a, d, hi)):
        return hi, 0
    f_hi = residual(hi)
    if f_lo == math.inf:
        f_lo = None
    it = 0
    # Illinois: weights are the residuals, halved on an endpoint kept twice in a row
    w_lo, w_hi = f_lo, f_hi
    last = 0
    while hi - lo > tol and it < max_iter:
        it += 1
        if w_lo is not None and w_hi is not None and math.isfinite(w_hi) and w_lo > w_hi:
            trial = lo + w_lo * (hi - lo) / (w_lo - w_hi)
            if not lo < trial < hi:
                trial = 0.5 * (lo + hi)
        else:
            trial = 0.5 * (lo + hi)
        f = residual(trial)
        if f is not None and abs(f) <= 1e-14:
            lo = trial
            break
        if f is not None and f >= 0.0:
            lo, w_lo = trial, (f if math.isfinite(f) else None)
            if last == 1 and w_hi is not None:
                w_hi *= 0.5
            last = 1
        else:
            hi, w_hi = trial, f
            if last == -1 and w_lo is not None:
                w_lo *= 0.5
            last = -1
    # the residual decides the bracket; the answer must also pass the fixed-step LP
    step = max(hi - lo, tol)
    while lo > 0.0 and not feasible(fixed_beta_lp(tech, a, d, lo)):
        lo = max(lo - step, 0.0)
        step *= 2.0
    return lo, it


def beta_q_from_beta_l(beta_l: float, d_minus: float, d_plus: float) -> float:
    """Quadratic-CRS step from the linear oriented step, uniform weights, CRS.

    Smaller root of ``dm dp b^2 - (dm + dp) b + beta_l (dm + dp) / (1 + beta_l dp) = 0``.
    """
    if not (d_minus > 0 and d_plus > 0):
        raise ValueError("both weights must be positive")
    if not (0.0 <= beta_l < 1.0 / d_minus):
        raise ValueError(f"beta_l must lie in [0, {1.0 / d_minus:g})")
    ssum = d_minus + d_plus
    disc = ssum * ssum - 4.0 * beta_l * d_minus * d_plus * ssum / (1.0 + beta_l * d_plus)
    # rationalized form of (ssum - sqrt(disc)) / (2 dm dp), no cancellation
    c = beta_l * ssum / (1.0 + beta_l * d_plus)
    return float(2.0 * c / (ssum + math.sqrt(max(disc, 0.0))))


def fast_path_applies(tech: Technology, a: Activity, d: Orientation) -> bool:
    return (
        tech.rts.kind is RTS.CRS
        and d.is_uniform()
        and d.d_minus[0] > 0
        and d.d_plus[0] > 0
        and bool(np.all(a.x > 0) and np.all(a.y > 0))
    )


def _qo_vectors(beta, d):
    theta = 1.0 - beta * d.d_minus
    phi = dilation(beta, d.d_plus)
    return theta, phi, beta * d.d_minus, phi - 1.0


def solve_qo_fast_path(
    tech: Technology,
    subject: Subject,
    d: Orientation,
    *,
    second_stage: bool = True,
    log: ZeroAdjustmentLog | None = None,
) -> Evaluation:
    """Quadratic-CRS model through one linear oriented solve.

    Requires CRS and uniform positive weights. The QO target lies on the ray
    of the LO target, scaled by ``theta_Q / theta_L`` (equal to
    ``phi_Q / phi_L``); intensities and projection scale by the same factor.
    """
    require_valid(tech)
    a, dmu = resolve_subject(tech, subject)
    check_activity(tech, a)
    d.check_subject(a)
    if not fast_path_applies(tech, a, d):
        raise ValueError("fast path needs CRS, uniform positive weights and a positive subject")
    ev_l = solve_lo(tech, a, d, second_stage=second_stage, log=log)
    dm, dp = float(d.d_minus[0]), float(d.d_plus[0])
    beta = beta_q_from_beta_l(ev_l.beta, dm, dp)
    theta, phi, tau_minus, tau_plus = _qo_vectors(beta, d)
    k = (1.0 - beta * dm) / (1.0 - ev_l.beta * dm)
    target = Activity(theta * a.x, phi * a.y)
    lam = k * ev_l.lambda_star
    projection = ev_l.projection.scaled(k)
    ev = Evaluation(
        model="qo",
        subject=a,
        orientation=d,
        beta=beta,
        theta=theta,
        phi=phi,
        tau_minus=tau_minus,
        tau_plus=tau_plus,
        target=target,
        lambda_star=lam,
        projection=projection,
        s_minus=np.maximum(target.x - projection.x, 0.0),
        s_plus=np.maximum(projection.y - target.y, 0.0),
        max_slack=second_stage,
        dmu=dmu,
        notes=tuple(n for n in ev_l.notes if "first-stage" not in n),
        method="fast-path",
    )
    from .scores import attach_score

    return attach_score(ev, log)


def solve_qo(
    tech: Technology,
    subject: Subject,
    d: Orientation,
    *,
    method: str = "auto",
    second_stage: bool = True,
    log: ZeroAdjustmentLog | None = None,
    tol: float = BISECTION_TOL,
    cross_check: bool = False,
) -> Evaluation:
    """Evaluate an activity of the technology with the quadratic-CRS oriented model.

    ``method`` is ``"auto"`` (fast path when it applies, else bisection),
    ``"bisection"`` or ``"fast"``. With ``cross_check=True`` both routes run
    whenever the fast path applies and a :class:`QoConsistencyError` is
    raised if their steps differ by more than ``1e-7``.
    """
    if method not in ("auto", "bisection", "fast"):
        raise ValueError(f"unknown method {method!r}")
    require_valid(tech)
    a, dmu = resolve_subject(tech, subject)
    check_activity(tech, a)
    d.check_subject(a)
    if d.inf_norm != 1.0:
        return solve_qo(tech, subject, d.normalized(), method=method, second_stage=second_stage, log=log,
                        tol=tol, cross_check=cross_check).for_orientation(d)
    fast_ok = fast_path_applies(tech, a, d)
    if method == "fast" or (method == "auto" and fast_ok):
        ev = solve_qo_fast_path(tech, subject, d, second_stage=second_stage, log=log)
        if cross_check:
            other = _bisection(tech, a, d, dmu, second_stage, log, tol)
            _compare(ev, other)
        return ev
    ev = _bisection(tech, a, d, dmu, second_stage, log, tol)
    if cross_check and fast_ok:
        _compare(solve_qo_fast_path(tech, subject, d, second_stage=second_stage, log=log), ev)
    return ev


def _compare(fast: Evaluation, bis: Evaluation) -> None:
    if abs(fast.beta - bis.beta) > FAST_PATH_TOL:
        raise QoConsistencyError(
            f"fast-path/bisection disagreement: beta {fast.beta!r} vs {bis.beta!r}"
        )


def _bisection(tech, a, d, dmu, second_stage, log, tol) -> Evaluation:
    beta, iterations = bisect_beta(tech, a, d, tol=tol)
    if beta > 0 and not feasible(fixed_beta_lp(tech, a, d, 0.5 * beta)):
        raise QoConsistencyError(f"feasibility lost at half the optimal step for {dmu or a!r}")
    lam = find_feasible(fixed_beta_lp(tech, a, d, beta))
    if lam is None:
        raise QoConsistencyError("no intensity vector at the last feasible step")
    theta, phi, tau_minus, tau_plus = _qo_vectors(beta, d)
    return assemble(
        "qo",
        tech,
        a,
        d,
        beta,
        theta,
        phi,
        tau_minus,
        tau_plus,
        np.maximum(lam, 0.0),
        second_stage=second_stage,
        log=log,
        dmu=dmu,
        notes=(f"bracketed search, {iterations} steps",),
        method="bisection",
    )


def evaluate_qo_external(
    tech: Technology,
    a: Activity,
    d: Orientation,
    *,
    method: str = "auto",
    second_stage: bool = True,
    log: ZeroAdjustmentLog | None = None,
) -> Evaluation:
    """Quadratic-CRS model for an arbitrary activity; see :func:`evaluate_lo_external`."""
    try:
        return solve_qo(tech, a, d, method=method, second_stage=second_stage, log=log)
    except SubjectOutsideTechnology:
        return outside("qo", a, d)
