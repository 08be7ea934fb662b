"""Dense linear programs and a two-phase primal simplex solver.

The problems solved in this package have a handful of rows and at most a few
dozen columns, so a dense tableau is simpler and fast enough. Pricing is
Dantzig's rule, switching to Bland's rule after a run of degenerate pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
BLAND_AFTER = 50

_RELATIONS = ("<=", "=", ">=")


class LpFormatError(ValueError):
    """The problem is malformed (shapes, relations or non-finite data)."""


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """``sense c.x`` subject to ``A x (relations) b`` and ``lower <= x <= upper``.

    ``lower`` defaults to zero; ``-inf`` makes a variable free from below.
    ``upper`` defaults to ``+inf``.
    """

    c: np.ndarray
    A: np.ndarray
    relations: tuple
    b: np.ndarray
    sense: str = "max"
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if c.ndim != 1:
            raise LpFormatError("c must be a vector")
        if A.size == 0:
            A = A.reshape(0, c.size)
        if A.ndim != 2 or A.shape[1] != c.size:
            raise LpFormatError(f"A has shape {A.shape}, expected (rows, {c.size})")
        if b.shape != (A.shape[0],):
            raise LpFormatError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
        rel = tuple(self.relations)
        if len(rel) != A.shape[0] or any(r not in _RELATIONS for r in rel):
            raise LpFormatError(f"relations must be {A.shape[0]} entries from {_RELATIONS}")
        if self.sense not in ("max", "min"):
            raise LpFormatError("sense must be 'max' or 'min'")
        lower = np.zeros(c.size) if self.lower is None else np.asarray(self.lower, dtype=float)
        upper = np.full(c.size, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if lower.shape != c.shape or upper.shape != c.shape:
            raise LpFormatError("bounds must match the number of variables")
        for name, arr in (("c", c), ("A", A), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise LpFormatError(f"{name} has non-finite entries")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise LpFormatError("invalid variable bounds")
        if np.any(lower > upper):
            raise LpFormatError("lower bound exceeds upper bound")
        for name, arr in (("c", c), ("A", A), ("b", b), ("lower", lower), ("upper", upper)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "relations", rel)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class LpSolution:
    """Solver output.

    ``duals[i]`` is the rate of change of the optimal objective with respect
    to ``b[i]``. ``multiple_optima`` is set when a nonbasic column has zero
    reduced cost at the optimum, i.e. the optimal vertex may not be unique.
    """

    status: Status
    objective: float = float("nan")
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    iterations: int = 0
    multiple_optima: bool = False
    phase1_objective: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Standard:
    """Equality form ``A z = b, z >= 0, b >= 0`` plus the maps back to the user problem."""

    def __init__(self, p: LpProblem):
        n = p.n_vars
        cols = []  # (user var, sign) per structural column
        offset = np.zeros(n)
        extra_rows = []
        for j in range(n):
            lo, up = p.lower[j], p.upper[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(up):
                    extra_rows.append((len(cols) - 1, up - lo))
            elif np.isfinite(up):
                offset[j] = up
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ncols = len(cols)
        T = np.zeros((n, ncols))
        for k, (j, sign) in enumerate(cols):
            T[j, k] = sign
        # user x = offset + T z
        A = p.A @ T
        b = p.b - p.A @ offset
        rel = list(p.relations)
        if extra_rows:
            A_ub = np.zeros((len(extra_rows), ncols))
            for r, (k, ub) in enumerate(extra_rows):
                A_ub[r, k] = 1.0
            A = np.vstack([A, A_ub])
            b = np.concatenate([b, [ub for _, ub in extra_rows]])
            rel += ["<="] * len(extra_rows)
        flip = b < 0
        A[flip] *= -1
        b[flip] *= -1
        rel = [{"<=": ">=", ">=": "<=", "=": "="}[r] if f else r for r, f in zip(rel, flip)]
        nslack = sum(r != "=" for r in rel)
        rows = A.shape[0]
        S = np.zeros((rows, nslack))
        basis = [-1] * rows
        k = 0
        for i, r in enumerate(rel):
            if r == "<=":
                S[i, k] = 1.0
                basis[i] = ncols + k
                k += 1
            elif r == ">=":
                S[i, k] = -1.0
                k += 1
        need_art = [i for i in range(rows) if basis[i] < 0]
        R = np.zeros((rows, len(need_art)))
        for a, i in enumerate(need_art):
            R[i, a] = 1.0
            basis[i] = ncols + nslack + a
        self.A = np.hstack([A, S, R])
        self.b = b
        self.basis = basis
        self.n_struct = ncols
        self.n_real = ncols + nslack
        self.n_art = len(need_art)
        self.T = T
        self.offset = offset
        self.flip = flip
        self.n_user_rows = p.n_rows
        sign = -1.0 if p.sense == "max" else 1.0
        self.cost = np.zeros(self.A.shape[1])
        self.cost[:ncols] = sign * (p.c @ T)
        self.cost_const = sign * float(p.c @ offset)
        self.sense_sign = sign


class _Tableau:
    def __init__(self, A, b, basis, tol, bland_after, max_iter):
        self.M = np.hstack([A, b[:, None]]).astype(float)
        self.basis = list(basis)
        self.tol = tol
        self.bland_after = bland_after
        self.max_iter = max_iter
        self.iterations = 0

    @property
    def rhs(self):
        return self.M[:, -1]

    def reduced_costs(self, cost, allowed):
        cb = cost[self.basis]
        r = cost - cb @ self.M[:, :-1]
        r[~allowed] = 0.0
        return r

    def pivot(self, i, j):
        M = self.M
        M[i] /= M[i, j]
        col = M[:, j].copy()
        col[i] = 0.0
        M -= np.outer(col, M[i])
        self.basis[i] = j

    def run(self, cost, allowed):
        """Minimize ``cost`` over the current basis. Returns 'optimal' or 'unbounded'."""
        bland = False
        degenerate_run = 0
        while True:
            if self.iterations >= self.max_iter:
                raise RuntimeError("simplex iteration limit reached")
            r = self.reduced_costs(cost, allowed)
            candidates = np.flatnonzero(r < -self.tol)
            if candidates.size == 0:
                return "optimal"
            if bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmin(r[candidates])])
            col = self.M[:, j]
            rows = np.flatnonzero(col > self.tol)
            if rows.size == 0:
                return "unbounded"
            ratios = self.rhs[rows] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + self.tol * max(1.0, abs(best))]
            i = int(min(ties, key=lambda k: self.basis[k]))
            if best <= self.tol:
                degenerate_run += 1
                if degenerate_run >= self.bland_after:
                    bland = True
            else:
                degenerate_run = 0
            self.pivot(i, j)
            self.iterations += 1


def _solve(p: LpProblem, tol, bland_after, max_iter, phase1_only):
    std = _Standard(p)
    rows, ncols = std.A.shape
    tab = _Tableau(std.A, std.b, std.basis, tol, bland_after, max_iter)
    art = np.zeros(ncols, dtype=bool)
    art[std.n_real:] = True
    phase1 = 0.0
    if std.n_art:
        c1 = art.astype(float)
        tab.run(c1, np.ones(ncols, dtype=bool))
        phase1 = float(c1[tab.basis] @ tab.rhs)
        if phase1 > FEAS_TOL:
            return LpSolution(Status.INFEASIBLE, iterations=tab.iterations, phase1_objective=phase1), None
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for i in range(rows):
            if art[tab.basis[i]]:
                cand = np.flatnonzero(np.abs(tab.M[i, : std.n_real]) > tol)
                if cand.size:
                    tab.pivot(i, int(cand[0]))
                    keep.append(i)
            else:
                keep.append(i)
        tab.M = tab.M[keep]
        tab.basis = [tab.basis[i] for i in keep]
        kept_rows = keep
    else:
        kept_rows = list(range(rows))
    if phase1_only:
        return LpSolution(Status.OPTIMAL, 0.0, _user_x(std, tab), iterations=tab.iterations, phase1_objective=phase1), None
    allowed = ~art
    status = tab.run(std.cost, allowed)
    if status == "unbounded":
        return LpSolution(Status.UNBOUNDED, iterations=tab.iterations, phase1_objective=phase1), None
    x = _user_x(std, tab)
    obj = float(p.c @ x)
    r = tab.reduced_costs(std.cost, allowed)
    nonbasic = np.ones(ncols, dtype=bool)
    nonbasic[tab.basis] = False
    multiple = bool(np.any(np.abs(r[nonbasic & allowed]) <= tol))
    duals = _duals(std, tab, kept_rows)
    return (
        LpSolution(Status.OPTIMAL, obj, x, duals, tab.iterations, multiple, phase1),
        tab,
    )


def _user_x(std, tab):
    z = np.zeros(std.A.shape[1])
    z[tab.basis] = tab.rhs
    z = np.maximum(z, 0.0)
    return std.offset + std.T @ z[: std.n_struct]


def _duals(std, tab, kept_rows):
    B = std.A[np.ix_(kept_rows, tab.basis)]
    cb = std.cost[tab.basis]
    try:
        y_kept = np.linalg.solve(B.T, cb)
    except np.linalg.LinAlgError:
        y_kept = np.linalg.lstsq(B.T, cb, rcond=None)[0]
    y = np.zeros(std.A.shape[0])
    y[kept_rows] = y_kept
    y = np.where(std.flip, -y, y) * std.sense_sign
    return y[: std.n_user_rows]


def solve_lp(p: LpProblem, *, tol: float = PIVOT_TOL, bland_after: int = BLAND_AFTER, max_iter: int = 50_000) -> LpSolution:
    """Solve ``p`` with the two-phase primal simplex method.

    Phase 1 minimizes the sum of artificial variables and declares the problem
    infeasible when that minimum exceeds ``1e-9``; phase 2 optimizes ``c``.
    Identical inputs give identical pivot sequences.
    """
    if not isinstance(p, LpProblem):
        raise LpFormatError("expected an LpProblem")
    return _solve(p, tol, bland_after, max_iter, phase1_only=False)[0]


def feasible(p: LpProblem, *, tol: float = PIVOT_TOL) -> bool:
    """Phase 1 only: whether the constraints of ``p`` admit a solution."""
    return _solve(p, tol, BLAND_AFTER, 50_000, phase1_only=True)[0].status is Status.OPTIMAL


def find_feasible(p: LpProblem, *, tol: float = PIVOT_TOL) -> np.ndarray | None:
    """A feasible point of ``p`` (the phase-1 vertex), or ``None``."""
    sol = _solve(p, tol, BLAND_AFTER, 50_000, phase1_only=True)[0]
    return sol.x if sol.optimal else None
