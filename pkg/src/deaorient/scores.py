"""Farrell oriented efficiency and the cost-gradient orientation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataError, Evaluation, Orientation, ZeroAdjustmentLog


def farrell_oriented_efficiency(theta, phi, active_inputs=None, active_outputs=None) -> float:
    """Average input contraction divided by average output dilation.

    ``active_inputs``/``active_outputs`` select the variables that count:
    either boolean masks, or integer counts. With counts the frozen variables
    are assumed to carry ``theta = 1`` / ``phi = 1`` (zero relative slack), so
    the score is ``(1 - sum(tau-)/m_a) / (1 + sum(tau+)/s_a)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if active_inputs is None:
        active_inputs = theta.size
    if active_outputs is None:
        active_outputs = phi.size
    if isinstance(active_inputs, (int, np.integer)):
        if active_inputs < 1 or active_inputs > theta.size:
            raise ValueError(f"active input count must be in 1..{theta.size}")
        num = 1.0 - np.sum(1.0 - theta) / active_inputs
    else:
        mask = np.asarray(active_inputs, dtype=bool)
        if not mask.any():
            raise ValueError("no active input")
        num = theta[mask].mean()
    if isinstance(active_outputs, (int, np.integer)):
        if active_outputs < 1 or active_outputs > phi.size:
            raise ValueError(f"active output count must be in 1..{phi.size}")
        den = 1.0 + np.sum(phi - 1.0) / active_outputs
    else:
        mask = np.asarray(active_outputs, dtype=bool)
        if not mask.any():
            raise ValueError("no active output")
        den = phi[mask].mean()
    return float(num / den)


def rho_lo_closed_form(beta_l: float, d: Orientation) -> float:
    """Score of a linear-oriented solution written in terms of ``beta``."""
    return float((1.0 - beta_l * d.d_minus.mean()) / (1.0 + beta_l * d.d_plus.mean()))


def rho_qo_closed_form(beta_q: float, d: Orientation) -> float:
    """Score of a quadratic-CRS-oriented solution written in terms of ``beta``."""
    return float((1.0 - beta_q * d.d_minus.mean()) / np.mean(1.0 / (1.0 - beta_q * d.d_plus)))


@dataclass(frozen=True)
class CostGradient:
    """Marginal improvement costs at the evaluated DMU.

    ``grad`` has ``m + s`` entries (inputs first); entries where
    ``controllable`` is False are ignored.
    """

    grad: np.ndarray
    controllable: np.ndarray
    n_inputs: int

    def __post_init__(self):
        g = np.asarray(self.grad, dtype=float)
        c = np.asarray(self.controllable, dtype=bool)
        if g.shape != c.shape or g.ndim != 1:
            raise ValueError("grad and controllable must be vectors of the same length")
        if not 0 <= self.n_inputs <= g.size:
            raise ValueError("n_inputs out of range")
        if not c.any():
            raise ValueError("no controllable variable")
        if np.any(~np.isfinite(g[c])) or np.any(g[c] <= 0):
            raise ValueError("gradient must be strictly positive on controllable variables")
        object.__setattr__(self, "grad", g)
        object.__setattr__(self, "controllable", c)

    @classmethod
    def all_controllable(cls, grad, n_inputs: int) -> "CostGradient":
        grad = np.asarray(grad, dtype=float)
        return cls(grad, np.ones(grad.size, dtype=bool), n_inputs)


def orientation_from_cost_gradient(cg: CostGradient, normalize: str = "count") -> tuple[Orientation, float]:
    """Orientation inversely proportional to marginal improvement costs.

    ``normalize="count"`` divides ``1/grad`` by the number of controllable
    variables; then ``beta`` itself approximates the cost of reaching the
    target and the returned multiplier is 1. ``normalize="inf_norm"`` uses
    ``max(grad) / grad``, so the cheapest variable gets coefficient 1 and the
    rest more; the same target results, and ``beta`` times the returned
    multiplier gives the cost approximation.
    """
    c = cg.controllable
    k = int(c.sum())
    d = np.zeros(cg.grad.size)
    if normalize == "count":
        d[c] = 1.0 / (k * cg.grad[c])
        mult = 1.0
    elif normalize == "inf_norm":
        top = cg.grad[c].max()
        d[c] = top / cg.grad[c]
        mult = float(top * k)
    else:
        raise ValueError(f"unknown normalization {normalize!r}")
    return Orientation(d[: cg.n_inputs], d[cg.n_inputs :]), mult


def attach_score(ev: Evaluation, log: ZeroAdjustmentLog | None = None) -> Evaluation:
    """Freeze zero variables and set ``rho`` on an evaluation.

    Zero inputs of the subject, and zero outputs it cannot produce (logged
    exclusions or zeros left in the data), get zero relative slack, unit
    contraction/dilation, and are left out of the averages.
    """
    m, s = ev.subject.m, ev.subject.s
    frozen_in = ev.subject.x == 0
    frozen_out = ev.subject.y == 0
    if log is not None and ev.dmu is not None:
        fi, fo = log.masks(ev.dmu, m, s)
        frozen_in |= fi
        frozen_out |= fo
    if frozen_in.all():
        raise DataError("subject has no positive input")
    if frozen_out.all():
        raise DataError("subject has no positive output")
    theta = np.where(frozen_in, 1.0, ev.theta)
    phi = np.where(frozen_out, 1.0, ev.phi)
    tau_minus = np.where(frozen_in, 0.0, ev.tau_minus)
    tau_plus = np.where(frozen_out, 0.0, ev.tau_plus)
    if ev.beta == 0.0:
        rho = 1.0
    else:
        rho = farrell_oriented_efficiency(theta, phi, ~frozen_in, ~frozen_out)
    return ev.replace(theta=theta, phi=phi, tau_minus=tau_minus, tau_plus=tau_plus, rho=rho)
