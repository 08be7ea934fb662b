import numpy as np
import pytest
from scipy.optimize import linprog

from deaorient import Orientation, Technology, five_unit_example

# Published results for the five-DMU example, rounded to three decimals.
# key: (model, d_minus, d_plus) -> {dmu: (beta, rho, target, projection)}
PUBLISHED = {
    ("lo", (1, 1), (1, 1)): {
        "B": (0.333, 0.5, (0.667, 1.333, 1.333, 2.667), (0.667, 0.667, 2.667, 2.667)),
        "C": (0.333, 0.5, (0.667, 1.333, 2.667, 1.333), (0.667, 0.667, 2.667, 2.667)),
        "D": (0.333, 0.5, (1.333, 0.667, 1.333, 2.667), (0.667, 0.667, 2.667, 2.667)),
        "E": (0.333, 0.5, (1.333, 0.667, 2.667, 1.333), (0.667, 0.667, 2.667, 2.667)),
    },
    ("qo", (1, 1), (1, 1)): {
        "B": (0.293, 0.5, (0.707, 1.414, 1.414, 2.828), (0.707, 0.707, 2.828, 2.828)),
        "C": (0.293, 0.5, (0.707, 1.414, 2.828, 1.414), (0.707, 0.707, 2.828, 2.828)),
        "D": (0.293, 0.5, (1.414, 0.707, 1.414, 2.828), (0.707, 0.707, 2.828, 2.828)),
        "E": (0.293, 0.5, (1.414, 0.707, 2.828, 1.414), (0.707, 0.707, 2.828, 2.828)),
    },
    ("lo", (1, 1), (0.5, 0.5)): {
        "B": (0.4, 0.5, (0.6, 1.2, 1.2, 2.4), (0.6, 0.6, 2.4, 2.4)),
        "C": (0.4, 0.5, (0.6, 1.2, 2.4, 1.2), (0.6, 0.6, 2.4, 2.4)),
        "D": (0.4, 0.5, (1.2, 0.6, 1.2, 2.4), (0.6, 0.6, 2.4, 2.4)),
        "E": (0.4, 0.5, (1.2, 0.6, 2.4, 1.2), (0.6, 0.6, 2.4, 2.4)),
    },
    ("qo", (1, 1), (0.5, 0.5)): {
        "B": (0.382, 0.5, (0.618, 1.236, 1.236, 2.472), (0.618, 0.618, 2.472, 2.472)),
        "C": (0.382, 0.5, (0.618, 1.236, 2.472, 1.236), (0.618, 0.618, 2.472, 2.472)),
        "D": (0.382, 0.5, (1.236, 0.618, 1.236, 2.472), (0.618, 0.618, 2.472, 2.472)),
        "E": (0.382, 0.5, (1.236, 0.618, 2.472, 1.236), (0.618, 0.618, 2.472, 2.472)),
    },
    ("lo", (1, 0.5), (1, 0.5)): {
        "B": (0.4, 0.538, (0.6, 1.6, 1.4, 2.4), (0.6, 0.6, 2.4, 2.4)),
        "C": (0.333, 0.6, (0.667, 1.667, 2.667, 1.167), (0.667, 0.667, 2.667, 2.667)),
        "D": (0.667, 0.333, (0.667, 0.667, 1.667, 2.667), (0.667, 0.667, 2.667, 2.667)),
        "E": (0.5, 0.455, (1, 0.75, 3, 1.25), (0.75, 0.75, 3, 3)),
    },
    ("qo", (1, 0.5), (1, 0.5)): {
        "B": (0.382, 0.5, (0.618, 1.618, 1.618, 2.472), (0.618, 0.618, 2.472, 2.472)),
        "C": (0.293, 0.604, (0.707, 1.707, 2.828, 1.172), (0.707, 0.707, 2.828, 2.828)),
        "D": (0.586, 0.293, (0.828, 0.707, 2.414, 2.828), (0.707, 0.707, 2.828, 2.828)),
        "E": (0.382, 0.5, (1.236, 0.809, 3.236, 1.236), (0.809, 0.809, 3.236, 3.236)),
    },
}

# DMU B: (model, d_minus, d_plus) -> (theta, phi, tau_minus, tau_plus)
PUBLISHED_B = {
    ("lo", (1, 1), (1, 1)): ((0.667, 0.667), (1.333, 1.333), (0.333, 0.333), (0.333, 0.333)),
    ("qo", (1, 1), (1, 1)): ((0.707, 0.707), (1.414, 1.414), (0.293, 0.293), (0.414, 0.414)),
    ("lo", (1, 1), (0.5, 0.5)): ((0.6, 0.6), (1.2, 1.2), (0.4, 0.4), (0.2, 0.2)),
    ("qo", (1, 1), (0.5, 0.5)): ((0.618, 0.618), (1.236, 1.236), (0.382, 0.382), (0.236, 0.236)),
    ("lo", (1, 0.5), (1, 0.5)): ((0.6, 0.8), (1.4, 1.2), (0.4, 0.2), (0.4, 0.2)),
    ("qo", (1, 0.5), (1, 0.5)): ((0.618, 0.809), (1.618, 1.236), (0.382, 0.191), (0.618, 0.236)),
}

ORIENTATION_CASES = [((1, 1), (1, 1)), ((1, 1), (0.5, 0.5)), ((1, 0.5), (1, 0.5))]


def orient(dm, dp) -> Orientation:
    return Orientation(np.array(dm, float), np.array(dp, float))


@pytest.fixture
def tech() -> Technology:
    return five_unit_example()


def random_technology(rng, n=None, m=None, s=None, rts="crs"):
    from deaorient import ReturnsToScale

    n = n or int(rng.integers(2, 7))
    m = m or int(rng.integers(1, 4))
    s = s or int(rng.integers(1, 4))
    X = rng.uniform(0.1, 10.0, (m, n))
    Y = rng.uniform(0.1, 10.0, (s, n))
    return Technology(X, Y, rts=ReturnsToScale.parse(rts))


def scipy_lo_beta(tech: Technology, j: int, d: Orientation) -> float:
    """Linear oriented step via HiGHS, in raw (unnormalized) units."""
    n, m, s = tech.n, tech.m, tech.s
    x, y = tech.X[:, j], tech.Y[:, j]
    A_in = np.hstack([(d.d_minus * x)[:, None], tech.X])
    A_out = np.hstack([(d.d_plus * y)[:, None], -tech.Y])
    A_ub = np.vstack([A_in, A_out])
    b_ub = np.concatenate([x, -y])
    c = np.zeros(n + 1)
    c[0] = -1.0
    A_eq = b_eq = None
    kind = tech.rts.kind.value
    extra_ub, extra_b = [], []
    if kind == "vrs":
        A_eq, b_eq = np.concatenate([[0.0], np.ones(n)])[None, :], [1.0]
    elif kind == "nirs":
        extra_ub.append(np.concatenate([[0.0], np.ones(n)]))
        extra_b.append(1.0)
    elif kind == "ndrs":
        extra_ub.append(np.concatenate([[0.0], -np.ones(n)]))
        extra_b.append(-1.0)
    if extra_ub:
        A_ub = np.vstack([A_ub, extra_ub])
        b_ub = np.concatenate([b_ub, extra_b])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=[(None, None)] + [(0, None)] * n,
                  method="highs")
    assert res.status == 0, res.message
    return float(res.x[0])


def scipy_ccr_input(tech: Technology, j: int) -> float:
    """Input-oriented radial CCR score via HiGHS."""
    n = tech.n
    x, y = tech.X[:, j], tech.Y[:, j]
    c = np.zeros(n + 1)
    c[0] = 1.0
    A_ub = np.vstack([np.hstack([-x[:, None], tech.X]), np.hstack([np.zeros((tech.s, 1)), -tech.Y])])
    b_ub = np.concatenate([np.zeros(tech.m), -y])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] + [(0, None)] * n, method="highs")
    assert res.status == 0, res.message
    return float(res.x[0])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
