import itertools

import numpy as np
import pytest

from deaorient import (
    Activity,
    Technology,
    is_efficient,
    is_weakly_efficient,
    second_stage_max_slack,
    solve_lo,
    solve_qo,
)
from deaorient.core import VRS

from conftest import ORIENTATION_CASES, orient


def test_slacks_of_b_target(tech):
    target = solve_lo(tech, "B", orient((1, 1), (1, 1))).target
    lam, s_minus, s_plus = second_stage_max_slack(tech, target)
    assert np.allclose(s_minus, [0, 2 / 3], atol=1e-9)
    assert np.allclose(s_plus, [4 / 3, 0], atol=1e-9)
    assert np.allclose(tech.X @ lam, [2 / 3, 2 / 3], atol=1e-9)
    assert np.allclose(tech.Y @ lam, [8 / 3, 8 / 3], atol=1e-9)


def test_efficient_target_has_no_slack(tech):
    _, s_minus, s_plus = second_stage_max_slack(tech, tech.activity("A"))
    assert np.all(s_minus == 0) and np.all(s_plus == 0)


def _vertex_enumeration_max_slack(tech, t):
    """Best relative-slack sum over all basic solutions of the equality form."""
    n, m, s = tech.n, tech.m, tech.s
    A = np.zeros((m + s + 1, n + m + s))
    b = np.zeros(m + s + 1)
    for i in range(m):
        A[i, :n] = tech.X[i] / t.x[i]
        A[i, n + i] = 1.0
        b[i] = 1.0
    for r in range(s):
        A[m + r, :n] = tech.Y[r] / t.y[r]
        A[m + r, n + m + r] = -1.0
        b[m + r] = 1.0
    A[-1, :n] = 1.0  # variable returns to scale
    b[-1] = 1.0
    c = np.concatenate([np.zeros(n), np.ones(m + s)])
    best = -np.inf
    k = A.shape[0]
    for cols in itertools.combinations(range(A.shape[1]), k):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if np.all(xb >= -1e-12):
            best = max(best, float(c[list(cols)] @ xb))
    return best


def test_max_slack_matches_vertex_enumeration():
    # two efficient DMUs and one that is only weakly efficient
    X = np.array([[1.0, 2.0, 4.0], [2.0, 1.0, 1.0]])
    Y = np.array([[1.0, 1.0, 1.0]])
    tech = Technology(X, Y, names=("P", "Q", "R"), rts=VRS)
    for t in (Activity([4, 1], [1]), Activity([3, 2], [0.8]), Activity([2.5, 1.5], [1])):
        lam, s_minus, s_plus = second_stage_max_slack(tech, t)
        total = np.sum(s_minus / t.x) + np.sum(s_plus / t.y)
        assert total == pytest.approx(_vertex_enumeration_max_slack(tech, t), abs=1e-9)
    lam, s_minus, _ = second_stage_max_slack(tech, Activity([4, 1], [1]))
    assert s_minus == pytest.approx([2.0, 0.0])


def test_weak_efficiency():
    X = np.array([[1.0, 2.0, 4.0], [2.0, 1.0, 1.0]])
    Y = np.array([[1.0, 1.0, 1.0]])
    tech = Technology(X, Y, names=("P", "Q", "R"), rts=VRS)
    r = tech.activity("R")
    assert is_weakly_efficient(tech, r)
    assert not is_efficient(tech, r)


def test_five_unit_efficiency(tech):
    a = tech.activity("A")
    assert is_efficient(tech, a)
    assert is_efficient(tech, a.scaled(2.0))
    assert not is_efficient(tech, tech.activity("B"))
    assert not is_weakly_efficient(tech, tech.activity("E"))
    assert not is_efficient(tech, Activity([0.1, 0.1], [9, 9]))  # outside


@pytest.mark.parametrize("dm,dp", ORIENTATION_CASES)
def test_targets_and_projections_are_on_the_frontier(tech, dm, dp):
    d = orient(dm, dp)
    for solve in (solve_lo, solve_qo):
        for j in range(tech.n):
            ev = solve(tech, j, d)
            assert is_weakly_efficient(tech, ev.target)
            assert is_efficient(tech, ev.projection)
            # bisection steps are feasible up to the LP's relative tolerance
            assert np.all(ev.projection.x <= ev.target.x * (1 + 1e-8))
            assert np.all(ev.projection.y >= ev.target.y * (1 - 1e-8))


def test_second_stage_off_notes_vertex(tech):
    ev = solve_lo(tech, "B", orient((1, 1), (1, 1)), second_stage=False)
    assert any("first-stage vertex" in n for n in ev.notes)
    assert not ev.max_slack
