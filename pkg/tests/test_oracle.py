import math
from fractions import Fraction

import numpy as np
import pytest

from deaorient import Activity, Orientation, feasible, solve_lo, solve_qo
from deaorient.core import membership_lp
from deaorient.lp import LpProblem
from deaorient.oracle import (
    FarkasCertificates,
    OracleSizeError,
    brute_beta,
    fm_feasible,
    monotonicity_scan,
)
from deaorient.qo import fixed_beta_lp

from conftest import orient, random_technology

ONES = orient((1, 1), (1, 1))


def test_contradictory_bounds():
    assert not fm_feasible([[1], [1]], ["<=", ">="], [1, 2])
    assert fm_feasible([[1], [1]], ["<=", ">="], [2, 1])


def test_equalities_and_free_variables():
    # x + y = 1, x - y = 3 -> x = 2, y = -1: needs y free
    assert not fm_feasible([[1, 1], [1, -1]], ["=", "="], [1, 3])
    assert fm_feasible([[1, 1], [1, -1]], ["=", "="], [1, 3], nonneg_mask=[True, False])


def test_exact_rationals():
    third = Fraction(1, 3)
    assert fm_feasible([[3]], ["="], [1]) and fm_feasible([[1]], ["<="], [third])
    assert not fm_feasible([[3], [1]], ["=", ">="], [1, Fraction(1, 3) + Fraction(1, 10**30)])


def test_size_caps():
    with pytest.raises(OracleSizeError):
        fm_feasible(np.ones((1, 7)), ["<="], [1])
    with pytest.raises(OracleSizeError):
        fm_feasible(np.ones((13, 2)), ["<="] * 13, np.ones(13))


def test_five_unit_membership(tech):
    p = membership_lp(tech, Activity([0.5, 0.5], [2, 2]))
    assert fm_feasible(p.A, p.relations, p.b)


def test_fixed_step_block_just_above_optimum(tech):
    b = tech.activity("B")
    best = 1 - math.sqrt(0.5)
    for beta, expect in ((0.29, True), (best - 1e-9, True), (best + 1e-9, False), (0.30, False)):
        p = fixed_beta_lp(tech, b, ONES, beta)
        assert fm_feasible(p.A, p.relations, p.b) is expect


def test_brute_beta_examples(tech):
    b = tech.activity("B")
    assert abs(float(brute_beta(tech, b, ONES, "lo")) - 1 / 3) <= 1e-12
    assert abs(float(brute_beta(tech, b, ONES, "qo")) - (1 - math.sqrt(0.5))) <= 1e-9
    for d in (ONES, orient((1, 0.5), (1, 0.5)), orient((0, 0), (1, 1))):
        assert brute_beta(tech, tech.activity("A"), d, "lo") == 0
        assert brute_beta(tech, tech.activity("A"), d, "qo") == 0


def test_fm_agrees_with_lp_feasibility():
    rng = np.random.default_rng(77)
    agree = 0
    for _ in range(150):
        n = int(rng.integers(1, 6))
        k = int(rng.integers(1, 8))
        A = np.round(rng.uniform(-4, 4, (k, n)), 1)
        b = np.round(rng.uniform(-2, 5, k), 1)
        rel = tuple(rng.choice(["<=", ">=", "="], size=k, p=[0.5, 0.35, 0.15]))
        exact = fm_feasible(A, rel, b)
        assert exact == feasible(LpProblem(np.zeros(n), A, rel, b))
        assert exact == FarkasCertificates(A, rel).feasible(b)
        agree += 1
    assert agree == 150


def test_brute_beta_agrees_with_solvers():
    rng = np.random.default_rng(8)
    for _ in range(12):
        t = random_technology(rng, n=int(rng.integers(2, 6)), m=2, s=2,
                              rts=str(rng.choice(["crs", "vrs", "nirs", "ndrs"])))
        d = Orientation(rng.uniform(0.1, 1, 2), rng.uniform(0, 1, 2))
        j = int(rng.integers(t.n))
        a = t.activity(j)
        assert abs(float(brute_beta(t, a, d, "lo")) - solve_lo(t, j, d).beta) <= 1e-7
        assert abs(float(brute_beta(t, a, d, "qo")) - solve_qo(t, j, d).beta) <= 1e-7


def test_monotonicity_scan_clean(tech):
    assert monotonicity_scan(tech, ONES, "lo", samples=200, seed=1) == []


def test_monotonicity_identical_pair(tech):
    b = tech.activity("B")
    assert monotonicity_scan(tech, ONES, "qo", pairs=[(b, b)]) == []


def test_monotonicity_corrupted_comparator_fires(tech):
    assert monotonicity_scan(tech, ONES, "lo", samples=10, seed=2, invert=True)
