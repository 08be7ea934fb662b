"""Domain types, data validation and zeros-in-data preprocessing.

Conventions: ``X`` is the ``m x n`` input matrix and ``Y`` the ``s x n``
output matrix, one column per DMU. Activities are ``(x, y)`` pairs of 1-d
arrays. All types are immutable; arrays are stored read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence, Union

import numpy as np

from .lp import LpProblem, feasible


class DataError(ValueError):
    """Input data cannot be evaluated (invalid values, bad orientation...)."""

    def __init__(self, message: str, diagnostics: Sequence[str] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics) or [message]


class SubjectOutsideTechnology(ValueError):
    """The evaluated activity does not belong to the production possibility set."""


def _frozen(a, name: str, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Activity:
    """An (inputs, outputs) pair."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, "x", 1))
        object.__setattr__(self, "y", _frozen(self.y, "y", 1))

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def s(self) -> int:
        return self.y.size

    def scaled(self, c: float) -> "Activity":
        return Activity(c * self.x, c * self.y)

    def __eq__(self, other):
        if not isinstance(other, Activity):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __hash__(self):
        return hash((self.x.tobytes(), self.y.tobytes()))

    def __repr__(self):
        xs = ",".join(f"{v:.6g}" for v in self.x)
        ys = ",".join(f"{v:.6g}" for v in self.y)
        return f"Activity({xs};{ys})"


class RTS(str, Enum):
    CRS = "crs"
    VRS = "vrs"
    NIRS = "nirs"
    NDRS = "ndrs"
    GRS = "grs"


@dataclass(frozen=True)
class ReturnsToScale:
    """Returns-to-scale regime, i.e. the constraint placed on ``sum(lambda)``.

    ``lower``/``upper`` are only meaningful for GRS, where
    ``0 <= lower <= 1 <= upper`` is required.
    """

    kind: RTS = RTS.CRS
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        kind = RTS(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is RTS.GRS:
            if self.lower is None or self.upper is None:
                raise ValueError("GRS needs both lower and upper bounds")
            if not (0.0 <= self.lower <= 1.0 <= self.upper):
                raise ValueError(
                    f"GRS bounds must satisfy 0 <= L <= 1 <= U, got L={self.lower}, U={self.upper}"
                )
        elif self.lower is not None or self.upper is not None:
            raise ValueError(f"{kind.value.upper()} takes no bounds")

    @classmethod
    def parse(cls, text: str) -> "ReturnsToScale":
        """Parse ``crs``, ``vrs``, ``nirs``, ``ndrs`` or ``grs:L:U``."""
        parts = text.strip().lower().split(":")
        kind = RTS(parts[0])
        if kind is RTS.GRS:
            if len(parts) != 3:
                raise ValueError("GRS must be written grs:L:U")
            return cls(kind, float(parts[1]), float(parts[2]))
        if len(parts) != 1:
            raise ValueError(f"unexpected bounds for {kind.value}")
        return cls(kind)

    def __str__(self):
        if self.kind is RTS.GRS:
            return f"grs:{self.lower:g}:{self.upper:g}"
        return self.kind.value

    def rows(self, n: int):
        """Constraint rows ``(coeffs, relation, rhs)`` on the intensity vector."""
        ones = np.ones(n)
        if self.kind is RTS.CRS:
            return []
        if self.kind is RTS.VRS:
            return [(ones, "=", 1.0)]
        if self.kind is RTS.NIRS:
            return [(ones, "<=", 1.0)]
        if self.kind is RTS.NDRS:
            return [(ones, ">=", 1.0)]
        return [(ones, ">=", float(self.lower)), (ones, "<=", float(self.upper))]


CRS = ReturnsToScale(RTS.CRS)
VRS = ReturnsToScale(RTS.VRS)
NIRS = ReturnsToScale(RTS.NIRS)
NDRS = ReturnsToScale(RTS.NDRS)


@dataclass(frozen=True)
class Technology:
    """Reference DMUs plus a returns-to-scale regime.

    Construction only checks shapes; call :func:`validate_technology` for
    the value-level diagnostics (negative entries, zero rows...).
    """

    X: np.ndarray
    Y: np.ndarray
    names: tuple = None
    rts: ReturnsToScale = CRS
    input_names: tuple = None
    output_names: tuple = None

    def __post_init__(self):
        X = _frozen(self.X, "X", 2)
        Y = _frozen(self.Y, "Y", 2)
        if X.shape[1] != Y.shape[1]:
            raise ValueError(f"X has {X.shape[1]} DMUs but Y has {Y.shape[1]}")
        if min(X.shape) < 1 or Y.shape[0] < 1:
            raise ValueError("need at least one DMU, one input and one output")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        n, m, s = X.shape[1], X.shape[0], Y.shape[0]
        names = tuple(self.names) if self.names is not None else tuple(f"DMU{j + 1}" for j in range(n))
        inames = tuple(self.input_names) if self.input_names is not None else tuple(f"x{i + 1}" for i in range(m))
        onames = tuple(self.output_names) if self.output_names is not None else tuple(f"y{r + 1}" for r in range(s))
        if (len(names), len(inames), len(onames)) != (n, m, s):
            raise ValueError("label counts do not match the data dimensions")
        if len(set(names)) != n:
            raise ValueError("DMU names must be unique")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "input_names", inames)
        object.__setattr__(self, "output_names", onames)
        if not isinstance(self.rts, ReturnsToScale):
            rts = ReturnsToScale.parse(self.rts) if isinstance(self.rts, str) else ReturnsToScale(self.rts)
            object.__setattr__(self, "rts", rts)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def s(self) -> int:
        return self.Y.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def index(self, dmu: Union[int, str]) -> int:
        if isinstance(dmu, str):
            if dmu not in self.names:
                raise KeyError(f"unknown DMU {dmu!r}")
            return self.names.index(dmu)
        j = int(dmu)
        if not 0 <= j < self.n:
            raise KeyError(f"DMU index {j} out of range")
        return j

    def activity(self, dmu: Union[int, str]) -> Activity:
        j = self.index(dmu)
        return Activity(self.X[:, j], self.Y[:, j])

    def with_rts(self, rts: ReturnsToScale | str) -> "Technology":
        if isinstance(rts, str):
            rts = ReturnsToScale.parse(rts)
        return Technology(self.X, self.Y, self.names, rts, self.input_names, self.output_names)

    def with_data(self, X, Y) -> "Technology":
        return Technology(X, Y, self.names, self.rts, self.input_names, self.output_names)


@dataclass(frozen=True)
class Orientation:
    """Input contraction weights ``d_minus`` and output dilation weights ``d_plus``."""

    d_minus: np.ndarray
    d_plus: np.ndarray

    def __post_init__(self):
        dm = _frozen(self.d_minus, "d_minus", 1)
        dp = _frozen(self.d_plus, "d_plus", 1)
        if not (np.all(np.isfinite(dm)) and np.all(np.isfinite(dp))):
            raise ValueError("orientation coefficients must be finite")
        if np.any(dm < 0) or np.any(dp < 0):
            raise ValueError("orientation coefficients must be non-negative")
        if not (np.any(dm > 0) or np.any(dp > 0)):
            raise ValueError("orientation must be nonzero")
        object.__setattr__(self, "d_minus", dm)
        object.__setattr__(self, "d_plus", dp)

    @classmethod
    def parse(cls, text: str) -> "Orientation":
        """Parse the inline form ``d1,...,dm:d1,...,ds``."""
        try:
            left, right = text.split(":")
            return cls([float(v) for v in left.split(",")], [float(v) for v in right.split(",")])
        except ValueError as exc:
            if "orientation" in str(exc):
                raise
            raise ValueError(f"cannot parse orientation {text!r}; expected d1,...,dm:d1,...,ds") from exc

    @classmethod
    def uniform(cls, m: int, s: int, d_minus: float = 1.0, d_plus: float = 1.0) -> "Orientation":
        return cls(np.full(m, float(d_minus)), np.full(s, float(d_plus)))

    @property
    def inf_norm(self) -> float:
        return float(max(self.d_minus.max(initial=0.0), self.d_plus.max(initial=0.0)))

    def normalized(self) -> "Orientation":
        """Same orientation scaled to unit infinity norm."""
        k = self.inf_norm
        return Orientation(self.d_minus / k, self.d_plus / k)

    def scaled(self, c: float) -> "Orientation":
        return Orientation(c * self.d_minus, c * self.d_plus)

    def is_uniform(self) -> bool:
        """All inputs share one coefficient and all outputs share another."""
        return bool(np.all(self.d_minus == self.d_minus[0]) and np.all(self.d_plus == self.d_plus[0]))

    def check_subject(self, subject: Activity) -> None:
        """Raise :class:`DataError` unless a nonzero weight sits on a nonzero variable."""
        if subject.m != self.d_minus.size or subject.s != self.d_plus.size:
            raise DataError(
                f"orientation has {self.d_minus.size}:{self.d_plus.size} coefficients, "
                f"subject has {subject.m}:{subject.s} variables"
            )
        if not (np.any((self.d_minus > 0) & (subject.x > 0)) or np.any((self.d_plus > 0) & (subject.y > 0))):
            raise DataError("orientation puts no weight on a nonzero variable of the subject")

    def __str__(self):
        return ",".join(f"{v:g}" for v in self.d_minus) + ":" + ",".join(f"{v:g}" for v in self.d_plus)


@dataclass(frozen=True)
class Evaluation:
    """Result of evaluating one activity with a generalized oriented model.

    ``tau_minus``/``tau_plus`` are relative target slacks, ``s_minus``/``s_plus``
    the absolute inefficiency slacks between target and efficient projection.
    ``lambda_star`` is ``None`` for activities outside the technology.
    """

    model: str
    subject: Activity
    orientation: Orientation
    beta: float
    theta: np.ndarray
    phi: np.ndarray
    tau_minus: np.ndarray
    tau_plus: np.ndarray
    target: Activity
    lambda_star: np.ndarray | None
    projection: Activity
    s_minus: np.ndarray
    s_plus: np.ndarray
    rho: float = 1.0
    outside_technology: bool = False
    max_slack: bool = False
    dmu: str | None = None
    notes: tuple = ()
    sensitivity: Activity | None = None
    method: str = "lp"

    def replace(self, **changes) -> "Evaluation":
        from dataclasses import replace

        return replace(self, **changes)

    def for_orientation(self, d: "Orientation") -> "Evaluation":
        """Re-express a result computed with ``d.normalized()`` in terms of ``d``.

        Targets and scores do not depend on the scale of the orientation; the
        step and its sensitivities scale with ``1 / ||d||_inf``.
        """
        k = d.inf_norm
        sens = self.sensitivity
        if sens is not None:
            sens = Activity(sens.x / k, sens.y / k)
        return self.replace(orientation=d, beta=self.beta / k, sensitivity=sens)


# -- validation ---------------------------------------------------------------


def validate_technology(tech: Technology) -> list[str]:
    """Return one diagnostic per violated data invariant (empty list: valid).

    Scan order is inputs then outputs, row-major, then per-DMU checks.
    """
    diags = []
    for label, M, names in (("input", tech.X, tech.input_names), ("output", tech.Y, tech.output_names)):
        for i in range(M.shape[0]):
            for j in range(M.shape[1]):
                v = M[i, j]
                if not math.isfinite(v):
                    diags.append(f"{label} {names[i]!r} of DMU {tech.names[j]!r} is not finite")
                elif v < 0:
                    diags.append(
                        f"{label} {names[i]!r} of DMU {tech.names[j]!r} is negative ({v:g}); "
                        "negative data are not supported"
                    )
        for i in range(M.shape[0]):
            row = M[i]
            if np.all(np.isfinite(row)) and not np.any(row > 0):
                diags.append(f"degenerate variable row: {label} {names[i]!r} is zero for every DMU")
    for j, name in enumerate(tech.names):
        if not np.any(tech.X[:, j] > 0):
            diags.append(f"DMU {name!r} has no positive input")
        if not np.any(tech.Y[:, j] > 0):
            diags.append(f"DMU {name!r} has no positive output")
    return diags


def require_valid(tech: Technology) -> None:
    diags = validate_technology(tech)
    if diags:
        raise DataError(diags[0], diags)


def check_activity(tech: Technology, a: Activity) -> None:
    if a.m != tech.m or a.s != tech.s:
        raise DataError(f"activity has {a.m}:{a.s} variables, technology has {tech.m}:{tech.s}")
    if not (np.all(np.isfinite(a.x)) and np.all(np.isfinite(a.y))):
        raise DataError("activity has non-finite entries")
    if np.any(a.x < 0) or np.any(a.y < 0):
        raise DataError("activity has negative entries; negative data are not supported")


# -- zeros in data --------------------------------------------------------------


class ZeroPolicy(str, Enum):
    POTENTIAL = "potential"
    IMPOSSIBLE = "impossible"


@dataclass(frozen=True)
class ZeroAdjustmentLog:
    """What :func:`preprocess_zeros` did, keyed by DMU name.

    ``substitutions``: ``(dmu, output, old, new)`` for replaced zero outputs.
    ``excluded_outputs``: ``(dmu, output)`` zero outputs the DMU cannot produce;
    they are frozen and dropped from the score denominator.
    ``frozen_inputs``: ``(dmu, input)`` zero inputs, frozen at zero.
    """

    substitutions: tuple = ()
    excluded_outputs: tuple = ()
    frozen_inputs: tuple = ()
    input_names: tuple = ()
    output_names: tuple = ()

    def __bool__(self):
        return bool(self.substitutions or self.excluded_outputs or self.frozen_inputs)

    def entries(self) -> list[str]:
        lines = [f"output {o} of DMU {d} replaced: {old:g} -> {new:g}" for d, o, old, new in self.substitutions]
        lines += [f"output {o} of DMU {d} excluded from the score (cannot be produced)" for d, o in self.excluded_outputs]
        lines += [f"input {i} of DMU {d} frozen" for d, i in self.frozen_inputs]
        return lines

    def masks(self, dmu: str, m: int, s: int) -> tuple[np.ndarray, np.ndarray]:
        """Boolean (inputs, outputs) masks of the variables frozen for ``dmu``."""
        fin = np.zeros(m, dtype=bool)
        fout = np.zeros(s, dtype=bool)
        for d, i in self.frozen_inputs:
            if d == dmu:
                fin[self.input_names.index(i)] = True
        for d, r in self.excluded_outputs:
            if d == dmu:
                fout[self.output_names.index(r)] = True
        return fin, fout


PolicySpec = Union[str, ZeroPolicy, Mapping[Union[str, int], Union[str, ZeroPolicy]]]


def _policies(tech: Technology, policy: PolicySpec, default) -> list[ZeroPolicy]:
    if isinstance(policy, (str, ZeroPolicy)):
        return [ZeroPolicy(policy)] * tech.s
    out = [ZeroPolicy(default)] * tech.s
    for key, value in policy.items():
        r = tech.output_names.index(key) if isinstance(key, str) else int(key)
        out[r] = ZeroPolicy(value)
    return out


def preprocess_zeros(
    tech: Technology,
    policy: PolicySpec = ZeroPolicy.POTENTIAL,
    *,
    factor: float = 0.1,
    default: ZeroPolicy = ZeroPolicy.POTENTIAL,
) -> tuple[Technology, ZeroAdjustmentLog]:
    """Apply the zeros-in-data conventions to a valid technology.

    Zero outputs under the ``potential`` policy become ``factor`` times the
    smallest positive value of that output row. Under ``impossible`` they stay
    zero and are logged as excluded. Zero inputs are never changed, only logged.
    ``policy`` is one policy for all outputs or a mapping from output name or
    index to policy (unlisted outputs get ``default``).
    """
    require_valid(tech)
    pols = _policies(tech, policy, default)
    Y = tech.Y.copy()
    subs, excl, frozen = [], [], []
    for r in range(tech.s):
        row = tech.Y[r]
        zeros = np.flatnonzero(row == 0)
        if zeros.size == 0:
            continue
        if pols[r] is ZeroPolicy.POTENTIAL:
            small = row[row > 0].min() * factor
            for j in zeros:
                Y[r, j] = small
                subs.append((tech.names[j], tech.output_names[r], 0.0, float(small)))
        else:
            for j in zeros:
                excl.append((tech.names[j], tech.output_names[r]))
    for j in range(tech.n):
        for i in np.flatnonzero(tech.X[:, j] == 0):
            frozen.append((tech.names[j], tech.input_names[i]))
    log = ZeroAdjustmentLog(
        tuple(subs), tuple(excl), tuple(frozen), tech.input_names, tech.output_names
    )
    return tech.with_data(tech.X, Y), log


# -- dominance and membership ---------------------------------------------------


def dominates(a: Activity, b: Activity) -> bool:
    """True iff ``a`` uses no more of every input and makes no less of every output than ``b``."""
    if a.m != b.m or a.s != b.s:
        raise ValueError(f"dimension mismatch: {a.m}:{a.s} vs {b.m}:{b.s}")
    return bool(np.all(a.x <= b.x) and np.all(a.y >= b.y))


def membership_lp(tech: Technology, a: Activity) -> LpProblem:
    """Feasibility LP in ``lambda`` deciding whether ``a`` lies in the technology.

    Rows are scaled by the activity's own values (or the row maximum where the
    activity is zero) so the program is invariant to the units of each variable.
    """
    check_activity(tech, a)
    rows, rel, rhs = [], [], []
    for i in range(tech.m):
        scale = a.x[i] if a.x[i] > 0 else tech.X[i].max()
        rows.append(tech.X[i] / scale)
        rel.append("<=")
        rhs.append(a.x[i] / scale)
    for r in range(tech.s):
        scale = a.y[r] if a.y[r] > 0 else tech.Y[r].max()
        rows.append(tech.Y[r] / scale)
        rel.append(">=")
        rhs.append(a.y[r] / scale)
    for coeffs, relation, b in tech.rts.rows(tech.n):
        rows.append(coeffs)
        rel.append(relation)
        rhs.append(b)
    return LpProblem(np.zeros(tech.n), np.array(rows), tuple(rel), np.array(rhs), sense="max")


def in_technology(tech: Technology, a: Activity) -> bool:
    return feasible(membership_lp(tech, a))
