import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from deaorient import (
    Orientation,
    ReturnsToScale,
    Technology,
    dominates,
    evaluate_lo_external,
    evaluate_qo_external,
    is_weakly_efficient,
    solve_lo,
    solve_qo,
)

values = st.floats(0.1, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def instances(draw, rts_choices=("crs", "vrs", "nirs", "ndrs")):
    n = draw(st.integers(2, 6))
    m = draw(st.integers(1, 3))
    s = draw(st.integers(1, 3))
    X = draw(arrays(float, (m, n), elements=values))
    Y = draw(arrays(float, (s, n), elements=values))
    rts = ReturnsToScale.parse(draw(st.sampled_from(rts_choices)))
    dm = draw(arrays(float, m, elements=st.floats(0.0, 1.0)))
    dp = draw(arrays(float, s, elements=st.floats(0.0, 1.0)))
    if not dm.any():
        dm[0] = 1.0
    j = draw(st.integers(0, n - 1))
    return Technology(X, Y, rts=rts), Orientation(dm, dp), j


common = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@common
@given(instances())
def test_quadratic_step_never_exceeds_linear(inst):
    tech, d, j = inst
    el, eq = solve_lo(tech, j, d), solve_qo(tech, j, d)
    assert eq.beta <= el.beta + 1e-9
    assert 0 < el.rho <= 1 + 1e-12 and 0 < eq.rho <= 1 + 1e-12


@common
@given(instances())
def test_targets_weakly_efficient_and_dominate_subject(inst):
    tech, d, j = inst
    a = tech.activity(j)
    for ev in (solve_lo(tech, j, d), solve_qo(tech, j, d)):
        assert dominates(ev.target, a)
        assert is_weakly_efficient(tech, ev.target)
        assert np.allclose(ev.tau_minus, 1 - ev.theta) and np.allclose(ev.tau_plus, ev.phi - 1)


@common
@given(instances(), st.floats(0.1, 10.0))
def test_orientation_scale_changes_only_beta(inst, c):
    tech, d, j = inst
    for solve in (solve_lo, solve_qo):
        e1, e2 = solve(tech, j, d), solve(tech, j, d.scaled(c))
        assert abs(e2.beta * c - e1.beta) <= 1e-7 * max(1.0, e1.beta)
        assert abs(e1.rho - e2.rho) <= 1e-7


@common
@given(instances(), st.floats(0.0, 1.0), st.floats(1.0, 1.5), st.floats(0.6, 1.0))
def test_improving_never_raises_the_step(inst, t, fx, fy):
    tech, d, j = inst
    ref = tech.activity(j)
    worse = type(ref)(ref.x * fx, ref.y * fy)
    better = type(ref)(worse.x + t * (ref.x - worse.x), worse.y + t * (ref.y - worse.y))
    for evaluate in (evaluate_lo_external, evaluate_qo_external):
        ew, eb = evaluate(tech, worse, d), evaluate(tech, better, d)
        if ew.outside_technology:
            continue
        assert eb.beta <= ew.beta + 1e-9
        assert eb.rho >= ew.rho - 1e-9
