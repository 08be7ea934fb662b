"""Independent desk-scale checks.

Feasibility is decided exactly by Fourier-Motzkin elimination over
:class:`fractions.Fraction`, without any tolerance, and optimal steps are
recovered by exact bisection on top of it. Also provides the dominated-pair
monotonicity scanner used by the self-check and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Activity, Orientation, Technology, in_technology

MAX_VARS = 6
MAX_CONSTRAINTS = 12


class OracleSizeError(ValueError):
    """Instance exceeds the oracle's size caps."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(float(v))


def _normalize(coeffs, rhs):
    """Scale a ``<=`` row so its first nonzero coefficient has magnitude 1."""
    for c in coeffs:
        if c:
            k = abs(c)
            return tuple(x / k for x in coeffs), rhs / k
    return coeffs, rhs


def _eliminate(rows, nvars):
    """Decide feasibility of ``{z : a.z <= b}`` for rows ``(a, b, history)``."""
    rows = _dedupe(rows)
    remaining = list(range(nvars))
    eliminated = 0
    while remaining:
        # pick the variable producing the fewest new rows
        def cost(j):
            p = sum(1 for a, _, _ in rows if a[j] > 0)
            q = sum(1 for a, _, _ in rows if a[j] < 0)
            return p * q - p - q

        j = min(remaining, key=cost)
        remaining.remove(j)
        eliminated += 1
        pos = [r for r in rows if r[0][j] > 0]
        neg = [r for r in rows if r[0][j] < 0]
        out = [r for r in rows if r[0][j] == 0]
        for ap, bp, hp in pos:
            for an, bn, hn in neg:
                h = hp | hn
                # Chernikov: a combination of more than k+1 original rows is redundant
                if len(h) > eliminated + 1:
                    continue
                cp, cn = -an[j], ap[j]
                a = tuple(cp * x + cn * y for x, y in zip(ap, an))
                b = cp * bp + cn * bn
                a, b = _normalize(a, b)
                out.append((a, b, h))
        rows = _dedupe(out)
        for a, b, _ in rows:
            if not any(a) and b < 0:
                return False
    return all(b >= 0 for _, b, _ in rows)


def _dedupe(rows):
    # only exact duplicates may go: dropping a looser row with the same
    # coefficients would discard the history the pruning rule relies on
    best = {}
    for a, b, h in rows:
        if not any(a):
            if b >= 0:
                continue
            return [(a, b, h)]
        prev = best.get((a, b))
        if prev is None or len(h) < len(prev):
            best[(a, b)] = h
    return [(a, b, h) for (a, b), h in best.items()]


def fm_feasible(A, relations: Sequence[str], b, nonneg_mask=None, *, check_caps: bool = True) -> bool:
    """Exact feasibility of ``A z (relations) b`` with ``z_j >= 0`` where ``nonneg_mask``.

    Entries are converted to exact rationals (floats exactly, not rounded).
    At most 6 variables and 12 constraints unless ``check_caps=False``.
    """
    A = [[_frac(v) for v in row] for row in A]
    b = [_frac(v) for v in b]
    nvars = len(A[0]) if A else (len(nonneg_mask) if nonneg_mask is not None else 0)
    if check_caps and (nvars > MAX_VARS or len(A) > MAX_CONSTRAINTS):
        raise OracleSizeError(
            f"{nvars} variables / {len(A)} constraints exceed the caps {MAX_VARS}/{MAX_CONSTRAINTS}"
        )
    if nonneg_mask is None:
        nonneg_mask = [True] * nvars
    rows = []
    idx = 0

    def add(a, rhs):
        nonlocal idx
        a, rhs = _normalize(tuple(a), rhs)
        rows.append((a, rhs, frozenset([idx])))
        idx += 1

    for a, rel, rhs in zip(A, relations, b):
        if rel in ("<=", "="):
            add(a, rhs)
        if rel in (">=", "="):
            add([-v for v in a], -rhs)
        if rel not in ("<=", "=", ">="):
            raise ValueError(f"bad relation {rel!r}")
    for j, nn in enumerate(nonneg_mask):
        if nn:
            add([Fraction(-1) if k == j else Fraction(0) for k in range(nvars)], Fraction(0))
    if nvars == 0:
        return all(rhs >= 0 for _, rhs, _ in rows)
    return _eliminate(rows, nvars)


# -- exact optimal steps ---------------------------------------------------------


def _exact_system(tech: Technology, a: Activity, d: Orientation, beta: Fraction, model: str):
    """Constraint rows in ``lambda`` for a fixed step, in exact arithmetic."""
    X = [[_frac(v) for v in row] for row in tech.X]
    Y = [[_frac(v) for v in row] for row in tech.Y]
    x = [_frac(v) for v in a.x]
    y = [_frac(v) for v in a.y]
    dm = [_frac(v) for v in d.d_minus]
    dp = [_frac(v) for v in d.d_plus]
    A, rel, b = [], [], []
    for i in range(tech.m):
        A.append(X[i])
        rel.append("<=")
        b.append((1 - beta * dm[i]) * x[i])
    for r in range(tech.s):
        A.append(Y[r])
        rel.append(">=")
        if model == "lo":
            b.append((1 + beta * dp[r]) * y[r])
        else:
            b.append(y[r] / (1 - beta * dp[r]))
    for coeffs, relation, rhs in tech.rts.rows(tech.n):
        A.append([Fraction(1)] * tech.n)
        rel.append(relation)
        b.append(_frac(rhs))
    return A, rel, b


def exact_feasible_at(tech, a, d, beta, model: str) -> bool:
    A, rel, b = _exact_system(tech, a, d, _frac(beta), model)
    return fm_feasible(A, rel, b)


class FarkasCertificates:
    """Fourier-Motzkin elimination run once for a fixed coefficient matrix.

    Every row left after eliminating all variables has zero coefficients and
    is a nonnegative combination ``mu`` of the ``<=``-form input rows. The
    system is feasible for a right-hand side ``b`` iff ``mu . b >= 0`` for
    every such ``mu``, so repeated checks with varying ``b`` (as in a
    bisection) only need exact dot products.
    """

    def __init__(self, A, relations: Sequence[str], nonneg_mask=None):
        A = [[_frac(v) for v in row] for row in A]
        nvars = len(A[0])
        if nonneg_mask is None:
            nonneg_mask = [True] * nvars
        self._expand = []  # (source row, sign) per <=-form row; source None for sign rows
        rows = []
        for k, (a, rel) in enumerate(zip(A, relations)):
            if rel not in ("<=", "=", ">="):
                raise ValueError(f"bad relation {rel!r}")
            if rel in ("<=", "="):
                self._expand.append((k, 1))
                rows.append(list(a))
            if rel in (">=", "="):
                self._expand.append((k, -1))
                rows.append([-v for v in a])
        for j, nn in enumerate(nonneg_mask):
            if nn:
                self._expand.append((None, 0))
                rows.append([Fraction(-1) if i == j else Fraction(0) for i in range(nvars)])
        total = len(rows)
        state = []
        for k, a in enumerate(rows):
            mu = [Fraction(0)] * total
            mu[k] = Fraction(1)
            state.append((tuple(a), tuple(mu), frozenset([k])))
        remaining = list(range(nvars))
        eliminated = 0
        while remaining:
            def cost(j):
                p = sum(1 for a, _, _ in state if a[j] > 0)
                q = sum(1 for a, _, _ in state if a[j] < 0)
                return p * q - p - q

            j = min(remaining, key=cost)
            remaining.remove(j)
            eliminated += 1
            pos = [r for r in state if r[0][j] > 0]
            neg = [r for r in state if r[0][j] < 0]
            out = [r for r in state if r[0][j] == 0]
            for ap, mp, hp in pos:
                for an, mn, hn in neg:
                    h = hp | hn
                    if len(h) > eliminated + 1:
                        continue
                    cp, cn = -an[j], ap[j]
                    a = tuple(cp * x + cn * y for x, y in zip(ap, an))
                    mu = tuple(cp * x + cn * y for x, y in zip(mp, mn))
                    out.append((a, mu, h))
            seen = {}
            for a, mu, h in out:
                k = next(v for v in mu if v)
                key = tuple(v / k for v in mu)
                if key not in seen:
                    seen[key] = (tuple(v / k for v in a), key, h)
            state = list(seen.values())
        self.certificates = [mu for _, mu, _ in state]

    def feasible(self, b) -> bool:
        b = [_frac(v) for v in b]
        rhs = [b[k] * sign if k is not None else Fraction(0) for k, sign in self._expand]
        return all(sum(m * r for m, r in zip(mu, rhs) if m) >= 0 for mu in self.certificates)


def brute_beta(tech: Technology, subject: Activity, d: Orientation, model: str, iterations: int = 60) -> Fraction:
    """Optimal step of the ``"lo"`` or ``"qo"`` model by exact bisection.

    Every midpoint is an exact rational. Feasibility verdicts come from one
    Fourier-Motzkin elimination of the (step-independent) constraint matrix,
    see :class:`FarkasCertificates`. Returns the last feasible midpoint.
    """
    model = model.lower()
    if model not in ("lo", "qo"):
        raise ValueError("model must be 'lo' or 'qo'")
    A, rel, _ = _exact_system(tech, subject, d, Fraction(0), model)
    if tech.n > MAX_VARS or len(A) > MAX_CONSTRAINTS:
        raise OracleSizeError(f"{tech.n} intensities / {len(A)} rows exceed the oracle caps")
    certs = FarkasCertificates(A, rel)

    def exact_feasible_at(tech, subject, d, beta, model):
        return certs.feasible(_exact_system(tech, subject, d, _frac(beta), model)[2])

    if not exact_feasible_at(tech, subject, d, Fraction(0), model):
        raise ValueError("subject is outside the technology")
    w = [_frac(v) for v, pos in zip(d.d_minus, subject.x > 0) if pos]
    if model == "qo":
        w += [_frac(v) for v, pos in zip(d.d_plus, subject.y > 0) if pos]
    top = max(w) if w else Fraction(0)
    lo = Fraction(0)
    if top > 0:
        hi = 1 / top
        if model == "lo" and exact_feasible_at(tech, subject, d, hi, model):
            return hi
    else:
        hi = Fraction(1)
        while exact_feasible_at(tech, subject, d, hi, model):
            lo, hi = hi, 2 * hi
            if hi > 2**40:
                raise ValueError("step is unbounded")
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if exact_feasible_at(tech, subject, d, mid, model):
            lo = mid
        else:
            hi = mid
    return lo


# -- monotonicity ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    worse: Activity
    better: Activity
    quantity: str
    worse_value: float
    better_value: float


def monotonicity_scan(
    tech: Technology,
    d: Orientation,
    model: str,
    samples: int = 200,
    seed: int = 0,
    *,
    tol: float = 1e-9,
    invert: bool = False,
    pairs=None,
) -> list[Violation]:
    """Evaluate dominated pairs externally and report monotonicity failures.

    Each sample scales a random reference DMU's inputs by factors in
    ``[1, 1.5]`` and outputs by factors in ``[0.6, 1]`` to get a dominated
    activity, then draws a point between it and the DMU that dominates it.
    A violation is a step increase or score decrease beyond ``tol`` when
    moving to the better activity. ``invert=True`` flips the comparison
    (suite self-test: it must find violations). ``pairs`` overrides sampling
    with explicit ``(worse, better)`` activities.
    """
    from .lo import evaluate_lo_external
    from .qo import evaluate_qo_external

    evaluate = {"lo": evaluate_lo_external, "qo": evaluate_qo_external}[model.lower()]
    rng = np.random.default_rng(seed)
    if pairs is None:
        pairs = []
        while len(pairs) < samples:
            j = int(rng.integers(tech.n))
            ref = tech.activity(j)
            worse = Activity(ref.x * rng.uniform(1.0, 1.5, tech.m), ref.y * rng.uniform(0.6, 1.0, tech.s))
            if not in_technology(tech, worse):
                continue
            t = rng.uniform(0.0, 1.0)
            better = Activity(worse.x + t * (ref.x - worse.x), worse.y + t * (ref.y - worse.y))
            pairs.append((worse, better))
    out = []
    for worse, better in pairs:
        ew, eb = evaluate(tech, worse, d), evaluate(tech, better, d)
        checks = (("beta", ew.beta, eb.beta, eb.beta > ew.beta + tol), ("rho", ew.rho, eb.rho, eb.rho < ew.rho - tol))
        for name, vw, vb, bad in checks:
            if invert:
                bad = (vb <= vw) if name == "beta" else (vb >= vw)
            if bad:
                out.append(Violation(worse, better, name, vw, vb))
    return out
