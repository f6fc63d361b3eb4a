"""First-variation analysis of T around the Euclidean ball.

Perturb the support function as ``h = 1 + eps * g`` and differentiate T in
``eps`` numerically (central differences on an eps ladder, extrapolated in
``eps**2``). The closed forms checked here are

* hypersurface measure: ``dT/deps = -m int g (u u^T - I/m) d omega``
* alpha-cone measure:   ``d<B, T>/deps = m (alpha - 1) int g <B u, u> d omega``

with ``omega`` the uniform probability measure on S^{m-1}. The degree-2
projection is normalized so that ``u -> u^T S u`` (S traceless) projects back to S.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import SmoothSupportBody
from .errors import InvalidInputError
from .isotropy import compute_T, hs
from .measures import MeasureSpec, QuadratureRule, sphere_rule
from .spherefun import SphereFunction

DEFAULT_LADDER = (1e-2, 1e-3, 1e-4)


def extrapolate_to_zero(eps, values) -> np.ndarray:
    """Value at ``eps = 0`` of the polynomial in ``eps**2`` through ``(eps_i, values_i)``."""
    x = np.asarray(eps, dtype=float) ** 2
    V = np.asarray(values, dtype=float)
    if x.size == 1:
        return V[0]
    # Lagrange weights at 0
    w = np.ones(x.size)
    for i in range(x.size):
        for j in range(x.size):
            if i != j:
                w[i] *= x[j] / (x[j] - x[i])
    return np.tensordot(w, V, axes=(0, 0))


def _ladder(eps) -> tuple[float, ...]:
    if eps is None:
        return DEFAULT_LADDER
    if np.isscalar(eps):
        return (float(eps),)
    out = tuple(sorted((float(e) for e in eps), reverse=True))
    if len(set(out)) != len(out) or any(e <= 0 for e in out):
        raise InvalidInputError("eps ladder must hold distinct positive values")
    return out


def _default_rule(m: int) -> QuadratureRule:
    return sphere_rule(2, "angular", 4096) if m == 2 else sphere_rule(m, "product", 32)


# ---------------------------------------------------------------------------
# moments


@dataclass
class MomentCheck:
    m: int
    M2: np.ndarray
    M2_defect: float
    quads: np.ndarray
    M4: np.ndarray
    M4_expected: np.ndarray
    M4_stderr: np.ndarray | None
    M4_defect: float
    rule: dict

    @property
    def max_z(self) -> float | None:
        if self.M4_stderr is None:
            return None
        return float(np.max(np.abs(self.M4 - self.M4_expected) / np.maximum(self.M4_stderr, 1e-300)))


def _fourth_exact(m: int, quads) -> np.ndarray:
    q = np.asarray(quads)
    i, j, k, l = q.T
    pairings = ((i == j) & (k == l)).astype(float) + ((i == k) & (j == l)) + ((i == l) & (j == k))
    return pairings / (m * (m + 2))


def moment2_4(m: int, rule: QuadratureRule, n_random_quads: int = 50, seed: int = 0) -> MomentCheck:
    """Second and fourth moments of the uniform measure on S^{m-1} under ``rule``.

    All index quadruples are checked for m <= 4, otherwise ``n_random_quads``
    random ones plus (0,0,0,0) and (0,0,1,1).
    """
    if rule.m != m:
        raise InvalidInputError("rule dimension differs from m")
    U, w = rule.directions, rule.weights
    M2 = np.einsum("n,ni,nj->ij", w, U, U)
    if m <= 4:
        quads = np.array(np.meshgrid(*[np.arange(m)] * 4, indexing="ij")).reshape(4, -1).T
    else:
        rng = np.random.default_rng(seed)
        quads = np.vstack([[0, 0, 0, 0], [0, 0, 1, 1], rng.integers(0, m, size=(n_random_quads, 4))])
    M4 = np.zeros(len(quads))
    sq = np.zeros(len(quads))
    step = 65536
    for s in range(0, U.shape[0], step):
        Uc, wc = U[s : s + step], w[s : s + step]
        F = Uc[:, quads[:, 0]] * Uc[:, quads[:, 1]] * Uc[:, quads[:, 2]] * Uc[:, quads[:, 3]]
        M4 += wc @ F
        sq += wc @ (F * F)
    stderr = None
    if rule.randomized:
        n = U.shape[0]
        stderr = np.sqrt(np.maximum(sq - M4**2, 0.0) / (n - 1))
    expected = _fourth_exact(m, quads)
    return MomentCheck(
        m=m,
        M2=M2,
        M2_defect=float(np.max(np.abs(M2 - np.eye(m) / m))),
        quads=quads,
        M4=M4,
        M4_expected=expected,
        M4_stderr=stderr,
        M4_defect=float(np.max(np.abs(M4 - expected))),
        rule=rule.describe(),
    )


# ---------------------------------------------------------------------------
# degree-2 projection


@dataclass
class HarmonicProjection:
    ell0_component: float
    ell2_component: np.ndarray  # traceless S_hat with P_2 g(u) = u^T S_hat u
    raw_moment: np.ndarray  # int g (u u^T - I/m) d omega
    residual_norm: float  # L^2(omega) norm of g outside degrees 0 and 2


def project_degree2(g: SphereFunction, rule: QuadratureRule | None = None) -> HarmonicProjection:
    m = g.m
    rule = rule or _default_rule(m)
    U, w = rule.directions, rule.weights
    gv = g.value(U)
    mean = float(w @ gv)
    raw = np.einsum("n,n,ni,nj->ij", w, gv, U, U) - mean * np.eye(m) / m
    S_hat = m * (m + 2) / 2 * raw
    S_hat = (S_hat + S_hat.T) / 2
    # ||u^T S u||^2 = 2 tr(S^2) / (m (m+2)) for traceless S
    p2_sq = 2 * np.trace(S_hat @ S_hat) / (m * (m + 2))
    resid_sq = float(w @ gv**2) - mean**2 - p2_sq
    return HarmonicProjection(
        ell0_component=mean,
        ell2_component=S_hat,
        raw_moment=raw,
        residual_norm=float(np.sqrt(max(resid_sq, 0.0))),
    )


def closed_form_L(g: SphereFunction, rule: QuadratureRule | None = None) -> np.ndarray:
    """``-m int g (u u^T - I/m) d omega``."""
    return -g.m * project_degree2(g, rule).raw_moment


# ---------------------------------------------------------------------------
# first variation of T


@dataclass
class FirstVariationResult:
    eps: tuple[float, ...]
    central_differences: np.ndarray  # (len(eps), m, m)
    extrapolated: np.ndarray
    closed_form: np.ndarray
    rule: dict = field(default_factory=dict)

    @property
    def hs_error(self) -> float:
        return float(np.linalg.norm(self.extrapolated - self.closed_form))

    def to_dict(self) -> dict:
        return {
            "eps": list(self.eps),
            "central_differences": self.central_differences.tolist(),
            "extrapolated": self.extrapolated.tolist(),
            "closed_form": self.closed_form.tolist(),
            "hs_error": self.hs_error,
            "rule": self.rule,
        }


def perturbed_T(g: SphereFunction, eps: float, measure: MeasureSpec, rule: QuadratureRule) -> np.ndarray:
    return compute_T(SmoothSupportBody.perturbation(g, eps), measure, rule).T


def first_variation_L(
    g: SphereFunction,
    eps=None,
    rule: QuadratureRule | None = None,
    measure: MeasureSpec | None = None,
) -> FirstVariationResult:
    """``dT/deps`` at the ball for the hypersurface measure (or ``measure``)."""
    if not g.is_even:
        raise InvalidInputError("perturbation direction g must be even")
    m = g.m
    rule = rule or _default_rule(m)
    measure = measure or MeasureSpec("hypersurface")
    ladder = _ladder(eps)
    D = np.array([(perturbed_T(g, e, measure, rule) - perturbed_T(g, -e, measure, rule)) / (2 * e) for e in ladder])
    return FirstVariationResult(
        eps=ladder,
        central_differences=D,
        extrapolated=extrapolate_to_zero(ladder, D),
        closed_form=closed_form_L(g, rule),
        rule=rule.describe(),
    )


@dataclass
class AlphaConeDerivative:
    alpha: float
    eps: tuple[float, ...]
    central_differences: np.ndarray
    numeric: float
    integral_term: float  # (alpha - 1) int g <B u, u> d omega
    predicted: float  # dim * integral_term: the derivative of <B, T>, T carrying the factor dim

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "eps": list(self.eps),
            "central_differences": self.central_differences.tolist(),
            "numeric": self.numeric,
            "integral_term": self.integral_term,
            "predicted": self.predicted,
        }


def quadratic_moment(g: SphereFunction, B, rule: QuadratureRule) -> float:
    """``int g(u) <B u, u> d omega``."""
    U, w = rule.directions, rule.weights
    B = np.asarray(B, dtype=float)
    return float(w @ (g.value(U) * np.einsum("ni,ij,nj->n", U, B, U)))


def alpha_cone_derivative(
    g: SphereFunction,
    B,
    alpha: float,
    eps=None,
    rule: QuadratureRule | None = None,
) -> AlphaConeDerivative:
    """``d/deps <B, T_alpha(1 + eps g)>`` at 0, numerically and in closed form.

    ``g`` must have zero mean. Because ``T`` includes the factor ``dim V``,
    the derivative is ``dim * (alpha - 1) * int g <B u, u> d omega``; both
    that value (``predicted``) and the bare integral term are returned.
    """
    m = g.m
    rule = rule or _default_rule(m)
    B = np.asarray(B, dtype=float)
    U, w = rule.directions, rule.weights
    if abs(float(w @ g.value(U))) > 1e-10 * max(1.0, float(np.abs(g.value(U)).max())):
        raise InvalidInputError("g must have zero mean on the sphere")
    measure = MeasureSpec("alpha_cone", alpha)
    ladder = _ladder(eps)
    D = np.array(
        [
            (hs(B, perturbed_T(g, e, measure, rule)) - hs(B, perturbed_T(g, -e, measure, rule))) / (2 * e)
            for e in ladder
        ]
    )
    term = (alpha - 1) * quadratic_moment(g, B, rule)
    return AlphaConeDerivative(
        alpha=float(alpha),
        eps=ladder,
        central_differences=D,
        numeric=float(extrapolate_to_zero(ladder, D)),
        integral_term=term,
        predicted=m * term,
    )


def alpha_normalization(g: SphereFunction, alpha: float, eps: float, rule: QuadratureRule | None = None) -> float:
    """``int h^alpha det(hess_S h + h I) d omega`` for ``h = 1 + eps g`` (1 at eps = 0)."""
    rule = rule or _default_rule(g.m)
    body = SmoothSupportBody.perturbation(g, eps)
    U, w = rule.directions, rule.weights
    return float(w @ (body.support(U) ** alpha * body.curvature_det(U)))


# ---------------------------------------------------------------------------
# the two sphere identities behind the alpha-cone derivative


def geodesic_laplacian_fd(f, U: np.ndarray, step: float = 1e-3) -> np.ndarray:
    """Laplace-Beltrami of ``f`` at unit rows of ``U`` via geodesic second differences."""
    n, m = U.shape
    out = np.zeros(n)
    f0 = f(U)
    for r in range(n):
        u = U[r]
        _, _, vt = np.linalg.svd(u[None, :])
        for e in vt[1:]:
            plus = np.cos(step) * u + np.sin(step) * e
            minus = np.cos(step) * u - np.sin(step) * e
            out[r] += (f(plus[None])[0] - 2 * f0[r] + f(minus[None])[0]) / step**2
    return out


@dataclass
class IdentityReport:
    divergence_lhs: float  # int <B grad_S g, u> d omega
    divergence_rhs: float  # m int g <B u, u> d omega
    divergence_defect: float
    laplacian_max_defect: float
    n_points: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def default_test_function(m: int) -> SphereFunction:
    """A mean-zero mixture of degree 2 and degree 4 used when no ``g`` is given."""
    S = np.zeros((m, m))
    S[0, 0], S[1, 1] = 1.0, -1.0
    return SphereFunction.quadratic(S) + SphereFunction.cubic_harmonic4(m).scaled(0.5)


def differential_identities_check(
    B,
    m: int,
    rule: QuadratureRule | None = None,
    g: SphereFunction | None = None,
    n_points: int = 64,
    seed: int = 0,
) -> IdentityReport:
    """Weak divergence identity and pointwise Laplacian-of-quadratic identity.

    * ``int <B grad_S g, u> d omega = m int g <B u, u> d omega`` for mean-zero g
    * ``Laplacian_S <B u, u> = -2m (<B u, u> - tr(B)/m)`` at random points
    """
    B = np.asarray(B, dtype=float)
    rule = rule or _default_rule(m)
    g = g or default_test_function(m)
    U, w = rule.directions, rule.weights
    lhs = float(w @ np.einsum("ni,ij,nj->n", U, B, g.grad(U)))
    rhs = m * quadratic_moment(g, B, rule)

    rng = np.random.default_rng(seed)
    P = rng.standard_normal((n_points, m))
    P /= np.linalg.norm(P, axis=1, keepdims=True)

    def quad(V):
        return np.einsum("ni,ij,nj->n", V, B, V)

    lap_fd = geodesic_laplacian_fd(quad, P)
    lap_cf = -2 * m * (quad(P) - np.trace(B) / m)
    return IdentityReport(
        divergence_lhs=lhs,
        divergence_rhs=rhs,
        divergence_defect=abs(lhs - rhs),
        laplacian_max_defect=float(np.max(np.abs(lap_fd - lap_cf))),
        n_points=n_points,
    )
