"""Boundary measures and quadrature.

A quadrature rule turns a body into :class:`BoundaryNodes`: boundary points
with outer normals, norming functionals and Euclidean surface-area weights.
The three probability measures are reweightings of the same nodes::

    hypersurface   d sigma
    cone           <n_e, x> d sigma
    alpha-cone     <n_e, x>^alpha d sigma

and each is normalized by its own total over those nodes, so leading-order
quadrature error cancels between numerator and normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np
from scipy.special import roots_gegenbauer

from .bodies import LpBody, PolytopeBody, SmoothSupportBody
from .errors import InvalidInputError, NonlinearIntegrandError, RuleMismatchError, StrictConvexityError

MEASURE_KINDS = ("hypersurface", "cone", "alpha_cone")
SCHEMES = ("angular", "product", "montecarlo", "facet")


@dataclass(frozen=True)
class MeasureSpec:
    kind: str = "hypersurface"
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise InvalidInputError(f"unknown measure kind {self.kind!r}")
        if self.kind == "alpha_cone" and not (self.alpha is not None and self.alpha > 0):
            raise InvalidInputError("alpha_cone needs alpha > 0")

    @classmethod
    def parse(cls, text: str) -> "MeasureSpec":
        """``hypersurface`` | ``cone`` | ``alpha_cone:2.0``."""
        kind, _, arg = text.partition(":")
        kind = kind.replace("-", "_")
        if kind in ("alpha", "alpha_cone"):
            return cls("alpha_cone", float(arg))
        return cls(kind)

    def density_exponent(self) -> float:
        return {"hypersurface": 0.0, "cone": 1.0}.get(self.kind, self.alpha)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha}


def sphere_area(m: int) -> float:
    """Surface area of the unit sphere S^{m-1}."""
    return 2 * pi ** (m / 2) / gamma(m / 2)


@dataclass
class QuadratureRule:
    """A node/weight scheme. Direction nodes are only materialized for sphere rules.

    ``weights`` sum to one (probability normalization on S^{m-1}).
    """

    scheme: str
    m: int | None
    n: int
    seed: int | None = None
    _directions: np.ndarray | None = field(default=None, repr=False)
    _weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"unknown quadrature scheme {self.scheme!r}")
        if self.scheme == "montecarlo" and self.seed is None:
            raise InvalidInputError("Monte Carlo rules need an explicit seed")

    @property
    def randomized(self) -> bool:
        return self.scheme == "montecarlo"

    @property
    def directions(self) -> np.ndarray:
        if self._directions is None:
            self._build()
        return self._directions

    @property
    def weights(self) -> np.ndarray:
        if self._weights is None:
            self._build()
        return self._weights

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def _build(self):
        m, n = self.m, self.n
        if m is None:
            raise RuleMismatchError("rule has no sphere dimension")
        if self.scheme == "angular":
            phi = 2 * pi * np.arange(n) / n
            U = np.column_stack([np.cos(phi), np.sin(phi)])
            w = np.full(n, 1.0 / n)
        elif self.scheme == "montecarlo":
            rng = np.random.default_rng(self.seed)
            U = rng.standard_normal((n, m))
            U /= np.linalg.norm(U, axis=1, keepdims=True)
            w = np.full(n, 1.0 / n)
        elif self.scheme == "product":
            U, w = _product_rule(m, n)
        else:
            raise RuleMismatchError("facet rules have no sphere directions")
        self._directions, self._weights = U, w

    def describe(self) -> dict:
        out = {"scheme": self.scheme, "m": self.m, "n": self.n, "seed": self.seed}
        if self.scheme in ("angular", "product"):
            out["nodes"] = int(self.directions.shape[0])
        return out


def _product_rule(m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor rule in hyperspherical coordinates.

    Polar angles ``psi_i`` carry weight ``sin(psi_i)^(m-1-i)``; with
    ``t = cos(psi)`` that is a Gauss-Gegenbauer weight (Gauss-Legendre for the
    last polar angle, and for every polar angle when m = 3). The azimuth uses
    ``2n`` equispaced nodes.
    """
    if m < 3:
        raise RuleMismatchError("product rule needs m >= 3; use angular for m = 2")
    axes_t, axes_w = [], []
    for i in range(m - 2):
        j = m - 2 - i  # exponent of sin(psi) in the volume element
        t, wt = roots_gegenbauer(n, j / 2.0)
        axes_t.append(t)
        axes_w.append(wt / wt.sum())
    nphi = 2 * n
    phi = 2 * pi * np.arange(nphi) / nphi
    grids = np.meshgrid(*axes_t, phi, indexing="ij")
    wgrids = np.meshgrid(*axes_w, np.full(nphi, 1.0 / nphi), indexing="ij")
    T = [g.ravel() for g in grids[:-1]]
    ph = grids[-1].ravel()
    W = np.prod([g.ravel() for g in wgrids], axis=0)
    U = np.empty((W.size, m))
    s = np.ones(W.size)
    for i, t in enumerate(T):
        U[:, i] = s * t
        s = s * np.sqrt(np.clip(1 - t * t, 0.0, None))
    U[:, m - 2] = s * np.cos(ph)
    U[:, m - 1] = s * np.sin(ph)
    return U, W / W.sum()


def sphere_rule(m: int, scheme: str, n: int, seed: int | None = None) -> QuadratureRule:
    """Rule on S^{m-1}: ``angular`` (m = 2), ``product`` (m >= 3) or ``montecarlo``."""
    if m < 2:
        raise InvalidInputError("sphere rules need m >= 2")
    if scheme == "angular" and m != 2:
        raise RuleMismatchError("angular rule is only defined for m = 2")
    if scheme == "facet":
        raise RuleMismatchError("facet rule is not a sphere rule")
    return QuadratureRule(scheme=scheme, m=m, n=int(n), seed=seed)


def facet_rule() -> QuadratureRule:
    """One node per polytope facet at its centroid: exact for facet-wise affine integrands."""
    return QuadratureRule(scheme="facet", m=None, n=0)


def montecarlo_rule(n: int, seed: int, m: int | None = None) -> QuadratureRule:
    return QuadratureRule(scheme="montecarlo", m=m, n=int(n), seed=seed)


@dataclass
class BoundaryNodes:
    x: np.ndarray
    n_e: np.ndarray
    x_star: np.ndarray
    dsigma: np.ndarray  # Euclidean surface-area weight per node (absolute)
    randomized: bool
    meta: dict = field(default_factory=dict)

    @property
    def support(self) -> np.ndarray:
        return np.sum(self.n_e * self.x, axis=1)

    def __len__(self) -> int:
        return self.x.shape[0]


def surface_element_smooth(body: SmoothSupportBody, u) -> np.ndarray | float:
    """Jacobian ``det(hess_S h + h I)`` of the Gauss parametrization at normal(s) ``u``."""
    U = np.atleast_2d(np.asarray(u, dtype=float))
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    J = body.curvature_det(U)
    if np.any(J <= 0):
        raise StrictConvexityError("curvature matrix not positive definite")
    return float(J[0]) if np.ndim(u) == 1 else J


def boundary_nodes(body, rule: QuadratureRule) -> BoundaryNodes:
    if isinstance(body, SmoothSupportBody):
        return _smooth_nodes(body, rule)
    if isinstance(body, PolytopeBody):
        return _polytope_nodes(body, rule)
    if isinstance(body, LpBody):
        if rule.scheme == "facet":
            if body.p == 1 or np.isinf(body.p):
                return _polytope_nodes(body.as_polytope(), rule)
            raise RuleMismatchError("facet rule needs a polytope (p in {1, inf})")
        return _lp_nodes(body, rule)
    raise RuleMismatchError(f"unsupported body type {type(body).__name__}")


def _smooth_nodes(body: SmoothSupportBody, rule: QuadratureRule) -> BoundaryNodes:
    if rule.scheme == "facet":
        raise RuleMismatchError("facet rule needs a polytope")
    if rule.m != body.m:
        raise RuleMismatchError(f"rule dimension {rule.m} != body dimension {body.m}")
    U, w = rule.directions, rule.weights
    hv = body.h.value(U)
    if np.any(hv <= 0):
        raise StrictConvexityError("nonpositive support value at a node")
    J = body.curvature_det(U)
    if np.any(J <= 0):
        raise StrictConvexityError("curvature matrix not positive definite at a node")
    x = hv[:, None] * U + body.h.grad(U)
    return BoundaryNodes(
        x=x,
        n_e=U,
        x_star=U / hv[:, None],
        dsigma=sphere_area(body.m) * w * J,
        randomized=rule.randomized,
        meta=rule.describe(),
    )


def _polytope_nodes(body: PolytopeBody, rule: QuadratureRule) -> BoundaryNodes:
    N, h = body.normals, body.offsets
    if rule.scheme == "facet":
        return BoundaryNodes(
            x=body.centroids,
            n_e=N,
            x_star=N / h[:, None],
            dsigma=body.areas,
            randomized=False,
            meta={**rule.describe(), "nodes": len(body.facets)},
        )
    if rule.scheme != "montecarlo":
        raise RuleMismatchError(f"polytopes support facet or montecarlo rules, not {rule.scheme}")
    rng = np.random.default_rng(rule.seed)
    areas = body.areas
    counts = rng.multinomial(rule.n, areas / areas.sum())
    xs, fidx = [], []
    for j, (f, c) in enumerate(zip(body.facets, counts)):
        if c == 0:
            continue
        s = rng.choice(len(f.simplex_areas), size=c, p=f.simplex_areas / f.simplex_areas.sum())
        bary = rng.dirichlet(np.ones(body.m), size=c)
        xs.append(np.einsum("nk,nkd->nd", bary, f.simplices[s]))
        fidx.append(np.full(c, j))
    fidx = np.concatenate(fidx)
    return BoundaryNodes(
        x=np.concatenate(xs),
        n_e=N[fidx],
        x_star=N[fidx] / h[fidx, None],
        dsigma=np.full(rule.n, areas.sum() / rule.n),
        randomized=True,
        meta=rule.describe(),
    )


def _lp_nodes(body: LpBody, rule: QuadratureRule) -> BoundaryNodes:
    if rule.scheme != "montecarlo":
        raise RuleMismatchError("l_p bodies support montecarlo (or facet for p in {1, inf})")
    rng = np.random.default_rng(rule.seed)
    x = body.sample_cone(rule.n, rng)
    xs = body.norming_functional(x)
    ne = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    supp = np.sum(ne * x, axis=1)
    # cone-measure samples reweighted to surface area: d sigma = m vol / <n_e, x> d nu
    return BoundaryNodes(
        x=x,
        n_e=ne,
        x_star=xs,
        dsigma=body.m * body.volume / (rule.n * supp),
        randomized=True,
        meta=rule.describe(),
    )


def measure_weights(nodes: BoundaryNodes, measure: MeasureSpec) -> tuple[np.ndarray, float]:
    """Normalized node weights for ``measure`` and the unnormalized total mass."""
    a = measure.density_exponent()
    raw = nodes.dsigma if a == 0 else nodes.dsigma * nodes.support**a
    total = float(raw.sum())
    if not total > 0:
        raise InvalidInputError("zero normalization")
    return raw / total, total


@dataclass
class IntegralResult:
    value: np.ndarray
    stderr: np.ndarray | None
    normalization: float
    n_nodes: int
    rule: dict


def integrate_boundary(body, measure: MeasureSpec, f, rule: QuadratureRule) -> IntegralResult:
    """``int f d eta`` for the boundary probability measure ``eta`` given by ``measure``.

    ``f`` receives a :class:`BoundaryNodes` batch and returns an array whose
    leading axis runs over nodes. Randomized rules report the standard error
    of the self-normalized estimator.
    """
    nodes = boundary_nodes(body, rule)
    return integrate_nodes(nodes, measure, f)


def integrate_nodes(nodes: BoundaryNodes, measure: MeasureSpec, f) -> IntegralResult:
    w, total = measure_weights(nodes, measure)
    F = np.asarray(f(nodes), dtype=float)
    if F.shape[0] != len(nodes):
        raise InvalidInputError("integrand must return one row per node")
    value = np.tensordot(w, F, axes=(0, 0))
    stderr = None
    if nodes.randomized:
        resid = F - value
        stderr = np.sqrt(np.tensordot(w**2, resid**2, axes=(0, 0)))
    return IntegralResult(value=value, stderr=stderr, normalization=total, n_nodes=len(nodes), rule=nodes.meta)


def _facet_points_nodes(body: PolytopeBody, j: int, X: np.ndarray) -> BoundaryNodes:
    f = body.facets[j]
    k = X.shape[0]
    return BoundaryNodes(
        x=X,
        n_e=np.tile(f.normal, (k, 1)),
        x_star=np.tile(f.normal / f.offset, (k, 1)),
        dsigma=np.full(k, f.area / k),
        randomized=False,
    )


def check_facet_affine(body: PolytopeBody, f, trials: int = 3, seed: int = 0, rtol: float = 1e-9) -> bool:
    """True iff ``f`` restricted to each facet is affine (checked on random convex combinations)."""
    rng = np.random.default_rng(seed)
    for j, fac in enumerate(body.facets):
        V = fac.vertices
        FV = np.asarray(f(_facet_points_nodes(body, j, V)), dtype=float)
        lam = rng.dirichlet(np.ones(V.shape[0]), size=trials)
        FX = np.asarray(f(_facet_points_nodes(body, j, lam @ V)), dtype=float)
        expect = np.tensordot(lam, FV, axes=(1, 0))
        scale = max(1.0, float(np.abs(FV).max()))
        if np.max(np.abs(FX - expect)) > rtol * scale:
            return False
    return True


def polytope_facet_integrate(body: PolytopeBody, measure: MeasureSpec, f, check_linear: bool = True) -> np.ndarray:
    """Exact ``int f d eta`` on a polytope for integrands affine on each facet.

    Facet weights are ``area_j * h_j^a`` with ``a`` = 0, 1 or alpha, and the
    integrand is evaluated once at each facet centroid.
    """
    if check_linear and not check_facet_affine(body, f):
        raise NonlinearIntegrandError("integrand is not affine on facets; use a Monte Carlo rule")
    return integrate_nodes(_polytope_nodes(body, facet_rule()), measure, f).value
