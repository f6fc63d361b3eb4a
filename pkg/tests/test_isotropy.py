from math import sqrt

import numpy as np
import pytest

from traceforms.bodies import LpBody, SmoothSupportBody, cross_polytope, cube, hexagon, random_polytope
from traceforms.errors import InvalidInputError
from traceforms.exterior import lambda_k_minors
from traceforms.isotropy import (
    anisotropy_tensor,
    compute_T,
    discrete_trace,
    hs_identity_defect,
    trace_average,
)
from traceforms.measures import MeasureSpec, boundary_nodes, facet_rule, montecarlo_rule, sphere_rule
from traceforms.spherefun import SphereFunction

MU = MeasureSpec("hypersurface")
NU = MeasureSpec("cone")
NILPOTENT = np.array([[0.0, 1.0], [0.0, 0.0]])


def cos2(eps):
    return SmoothSupportBody.perturbation(SphereFunction.cos_mode(2), eps)


def test_hexagon_T(oracles):
    rep = compute_T(hexagon(), MU)
    assert np.allclose(rep.T, oracles["hexagon"]["T"], atol=1e-14)
    off = 2 - 3 * sqrt(2) / 2
    assert rep.T[0, 1] == pytest.approx(off, abs=1e-12)


def test_hexagon_trace_average():
    res = trace_average(NILPOTENT, 1, hexagon(), MU)
    assert res.exact == 0
    # n_k * int <A w, w*> d mu = tr(A T)
    assert res.estimate == pytest.approx(2 - 3 * sqrt(2) / 2, abs=1e-12)
    assert res.mean_coefficient == pytest.approx(1 - 3 * sqrt(2) / 4, abs=1e-12)
    assert res.identity_defect < 1e-14


def test_cone_T_is_identity_without_symmetry(rng):
    for m in (3, 4):
        for _ in range(3):
            P = random_polytope(m, 14, rng)
            assert not P.symmetric
            assert np.allclose(compute_T(P, NU).T, np.eye(m), atol=1e-12)


def test_cone_T_smooth():
    rep = compute_T(cos2(0.05), NU, sphere_rule(2, "angular", 4096))
    assert np.allclose(rep.T, np.eye(2), atol=1e-8)


def test_smooth_T_first_order():
    eps = 1e-3
    rep = compute_T(cos2(eps), MU, sphere_rule(2, "angular", 4096))
    assert np.allclose(rep.T, np.eye(2) + eps / 2 * np.diag([-1, 1]), atol=5 * eps**2)


def test_smooth_trace_average():
    eps = 1e-3
    res = trace_average(np.diag([1.0, -1.0]), 1, cos2(eps), MU, sphere_rule(2, "angular", 4096))
    assert res.estimate == pytest.approx(-eps, abs=5 * eps**2)


def test_wedge_cone_average_montecarlo():
    A = np.random.default_rng(3).uniform(-1, 1, (4, 4))
    res = trace_average(A, 2, LpBody(6, np.inf), NU, montecarlo_rule(10**6, seed=7, m=6))
    assert res.exact == pytest.approx(lambda_k_minors(A, 2))
    assert abs(res.discrepancy) <= 3 * res.stderr
    assert res.identity_defect <= 1e-10 * max(1.0, abs(res.estimate))


def test_wrong_wedge_dimension():
    with pytest.raises(InvalidInputError):
        trace_average(np.eye(4), 2, cube(4), NU)


@pytest.mark.parametrize(
    "body,rule",
    [
        (hexagon(), facet_rule()),
        (random_polytope(3, 12, np.random.default_rng(1)), facet_rule()),
        (cos2(0.05), sphere_rule(2, "angular", 1024)),
        (LpBody(3, 3.0), montecarlo_rule(20_000, seed=2, m=3)),
    ],
    ids=["hexagon", "random3", "smooth", "l3-mc"],
)
@pytest.mark.parametrize("measure", [MU, NU, MeasureSpec("alpha_cone", 2.5)], ids=["mu", "nu", "alpha"])
def test_hs_duality_and_trace(body, rule, measure, rng):
    nodes = boundary_nodes(body, rule)
    for _ in range(20):
        assert hs_identity_defect(nodes, measure, rng.standard_normal((body.m, body.m))) < 1e-10
    assert np.trace(compute_T(body, measure, rule).T) == pytest.approx(body.m, abs=1e-12)


def test_anisotropy_bound(rng):
    for m in (2, 3, 4):
        for _ in range(4):
            a = anisotropy_tensor(random_polytope(m, 10, rng))
            assert a.hs_norm <= m + sqrt(m) + 1e-12
            assert abs(a.trace) < 1e-12


def test_anisotropy_examples():
    assert np.allclose(anisotropy_tensor(SmoothSupportBody.ball(3), sphere_rule(3, "product", 8)).tensor, 0, atol=1e-14)
    off = 2 - 3 * sqrt(2) / 2
    assert np.allclose(anisotropy_tensor(hexagon()).tensor, [[0, off], [off, 0]], atol=1e-14)
    S = np.diag([1.0, -1.0, 0.0])
    eps = 1e-3
    body = SmoothSupportBody.perturbation(SphereFunction.quadratic(S), eps)
    a = anisotropy_tensor(body, sphere_rule(3, "product", 32))
    assert np.allclose(a.tensor, -2 * eps / 5 * S, atol=5 * eps**2)


def test_discrete_trace(rng):
    A = rng.standard_normal((3, 3))
    assert discrete_trace(A, cube(3)) == pytest.approx(np.trace(A), abs=1e-13)
    assert discrete_trace(NILPOTENT, hexagon()) == pytest.approx(0, abs=1e-15)
    assert discrete_trace(np.eye(4), cross_polytope(4)) == pytest.approx(4, abs=1e-13)
    with pytest.raises(InvalidInputError):
        discrete_trace(np.eye(2), cube(3))
