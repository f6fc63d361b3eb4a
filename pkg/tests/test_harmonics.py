import numpy as np
import pytest

from traceforms.errors import InvalidInputError, StrictConvexityError
from traceforms.harmonics import (
    alpha_cone_derivative,
    alpha_normalization,
    closed_form_L,
    differential_identities_check,
    extrapolate_to_zero,
    first_variation_L,
    geodesic_laplacian_fd,
    moment2_4,
    project_degree2,
)
from traceforms.measures import sphere_rule
from traceforms.specs import random_traceless
from traceforms.spherefun import SphereFunction

ANG = sphere_rule(2, "angular", 4096)
PROD = sphere_rule(3, "product", 32)
COS2 = SphereFunction.cos_mode(2)


def test_extrapolation_removes_quadratic_term():
    eps = [1e-1, 5e-2, 2.5e-2]
    vals = [3 + 2 * e**2 - 7 * e**4 for e in eps]
    assert extrapolate_to_zero(eps, vals) == pytest.approx(3, abs=1e-13)


def test_moments_m3(oracles):
    chk = moment2_4(3, sphere_rule(3, "product", 12))
    o = oracles["moments"]["3"]
    assert chk.M2_defect < 1e-14 and chk.M4_defect < 1e-14
    i = {tuple(q): v for q, v in zip(chk.quads.tolist(), chk.M4)}
    assert i[(0, 0, 0, 0)] == pytest.approx(o["u1^4"], abs=1e-14)
    assert i[(0, 0, 1, 1)] == pytest.approx(o["u1^2u2^2"], abs=1e-14)


def test_moments_montecarlo():
    chk = moment2_4(6, sphere_rule(6, "montecarlo", 200_000, seed=4))
    assert chk.max_z < 4


def test_projection_examples():
    S = np.diag([1.0, -1.0, 0.0])
    p = project_degree2(SphereFunction.quadratic(S), PROD)
    assert np.allclose(p.raw_moment, 2 / 15 * S, atol=1e-14)
    assert np.allclose(p.ell2_component, S, atol=1e-13)
    assert p.residual_norm < 1e-6
    p = project_degree2(COS2, ANG)
    assert np.allclose(p.raw_moment, np.diag([0.25, -0.25]), atol=1e-14)
    p = project_degree2(SphereFunction.cos_mode(4), ANG)
    assert np.allclose(p.ell2_component, 0, atol=1e-13)
    assert p.residual_norm == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_projection_is_traceless_symmetric(rng):
    g = SphereFunction.quadratic(random_traceless(3, rng)) + SphereFunction.constant(3, 0.3)
    p = project_degree2(g, PROD)
    assert abs(np.trace(p.ell2_component)) < 1e-13
    assert p.ell0_component == pytest.approx(0.3, abs=1e-13)


def test_first_variation_circle():
    fv = first_variation_L(COS2, None, ANG)
    assert np.allclose(fv.extrapolated, np.diag([-0.5, 0.5]), atol=1e-8)
    assert np.allclose(fv.closed_form, np.diag([-0.5, 0.5]), atol=1e-14)


def test_first_variation_sphere_calibration(rng):
    for _ in range(3):
        S = random_traceless(3, rng)
        fv = first_variation_L(SphereFunction.quadratic(S), [1e-3], PROD)
        # one-step central difference: error O(eps^2)
        assert np.linalg.norm(fv.extrapolated - fv.closed_form) <= 5e-3 * np.linalg.norm(fv.closed_form)
        assert np.allclose(fv.closed_form, -0.4 * S, atol=1e-13)


def test_selection_rule():
    for g, rule in ((SphereFunction.cos_mode(4), ANG), (SphereFunction.cubic_harmonic4(3), PROD)):
        assert np.linalg.norm(first_variation_L(g, None, rule).extrapolated) < 1e-8
    g = SphereFunction.planar_harmonic4(3)
    assert np.linalg.norm(first_variation_L(g, None, PROD).extrapolated) < 1e-8


def test_first_variation_rejects_odd():
    odd = SphereFunction.from_monomials(2, {(1, 0): 1.0})
    with pytest.raises(InvalidInputError):
        first_variation_L(odd, None, ANG)


def test_ladder_guard():
    with pytest.raises(StrictConvexityError):
        first_variation_L(COS2, [0.2], ANG)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_alpha_cone_derivative_carries_dimension(alpha):
    B = np.diag([1.0, -1.0])
    r = alpha_cone_derivative(COS2, B, alpha, [1e-2, 1e-3], ANG)
    assert r.integral_term == pytest.approx((alpha - 1) / 2, abs=1e-13)
    assert r.numeric == pytest.approx(2 * r.integral_term, abs=1e-6)


def test_alpha_cone_m3(rng):
    S = random_traceless(3, rng)
    B = rng.standard_normal((3, 3))
    r = alpha_cone_derivative(SphereFunction.quadratic(S), B, 2.5, None, PROD)
    assert r.numeric == pytest.approx(r.predicted, abs=1e-7)


def test_alpha_cone_degree4_is_flat(rng):
    r = alpha_cone_derivative(SphereFunction.cubic_harmonic4(3), rng.standard_normal((3, 3)), 3.0, None, PROD)
    assert abs(r.numeric) < 1e-8 and abs(r.predicted) < 1e-13


def test_alpha_cone_needs_mean_zero():
    g = COS2 + SphereFunction.constant(2, 0.1)
    with pytest.raises(InvalidInputError):
        alpha_cone_derivative(g, np.eye(2), 2.0, None, ANG)


def test_normalization_is_flat():
    for alpha in (0.5, 2.0, 3.0):
        c = [alpha_normalization(COS2, alpha, e, ANG) for e in (1e-3, -1e-3)]
        assert abs(c[0] - c[1]) / 2e-3 < 1e-10
        assert c[0] == pytest.approx(1, abs=1e-5)


def test_differential_identities():
    rep = differential_identities_check(np.diag([1.0, -1.0]), 2, ANG, g=COS2)
    assert rep.divergence_lhs == pytest.approx(1, abs=1e-12)
    assert rep.divergence_rhs == pytest.approx(1, abs=1e-12)
    rep = differential_identities_check(np.eye(3), 3, PROD)
    assert abs(rep.divergence_lhs) < 1e-12 and abs(rep.divergence_rhs) < 1e-12
    B = np.random.default_rng(5).standard_normal((3, 3))
    rep = differential_identities_check(B, 3, PROD, g=SphereFunction.quadratic(np.diag([1.0, 0.5, -1.5])))
    assert rep.divergence_defect < 1e-12
    assert rep.laplacian_max_defect < 1e-5


def test_laplacian_fd_matches_analytic(rng):
    g = SphereFunction.cubic_harmonic4(3)
    U = rng.standard_normal((10, 3))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    # degree-4 harmonic: eigenvalue -l(l+m-2) = -20
    assert np.allclose(geodesic_laplacian_fd(g.value, U), -20 * g.value(U), atol=1e-4)
    assert np.allclose(g.laplacian(U), -20 * g.value(U), atol=1e-12)


def test_closed_form_default_rule():
    assert np.allclose(closed_form_L(COS2), np.diag([-0.5, 0.5]), atol=1e-14)
