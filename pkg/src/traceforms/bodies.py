"""Convex bodies used as unit balls: polytopes, smooth support-function bodies and l_p balls.

Each body exposes the same small surface:

* ``m``: ambient dimension
* ``gauge(x)``: Minkowski functional (the norm when the body is symmetric)
* ``norming_functional(x)``: a functional ``x*`` with ``<x, x*> = 1`` and dual gauge 1
* ``volume``

Boundary parametrizations used for integration live in :mod:`traceforms.measures`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, gamma

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, Delaunay, HalfspaceIntersection, QhullError

from .errors import InvalidBodyError, InvalidInputError, StrictConvexityError
from .spherefun import SphereFunction

RIDGE_TOL = 1e-9


@dataclass
class BoundarySample:
    x: np.ndarray
    n_e: np.ndarray
    x_star: np.ndarray
    valid: bool = True


def min_norm_point(P: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Minimum Euclidean norm point of conv(rows of P), by Wolfe's algorithm."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape[0] == 1:
        return P[0].copy()
    scale = max(1.0, float(np.max(np.sum(P * P, axis=1))))
    S = [int(np.argmin(np.sum(P * P, axis=1)))]
    lam = np.array([1.0])
    x = P[S[0]].copy()
    for _ in range(100 * P.shape[0]):
        i = int(np.argmin(P @ x))
        if x @ x - P[i] @ x <= tol * scale or i in S:
            break
        S.append(i)
        lam = np.append(lam, 0.0)
        while True:
            Ps = P[S]
            k = len(S)
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = Ps @ Ps.T
            K[:k, k] = K[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            mu = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
            if np.all(mu > tol):
                lam = mu
                x = lam @ Ps
                break
            drop = (mu <= tol) & (lam - mu > 0)
            theta = np.min(lam[drop] / (lam[drop] - mu[drop])) if drop.any() else 1.0
            lam = (1 - theta) * lam + theta * mu
            keep = lam > tol
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep] / lam[keep].sum()
            x = lam @ P[S]
    return x


# ---------------------------------------------------------------------------
# polytopes


@dataclass
class Facet:
    normal: np.ndarray
    offset: float
    vertices: np.ndarray
    area: float
    centroid: np.ndarray
    # (n_simplices, m, m) vertex coordinates and their (m-1)-volumes, for sampling
    simplices: np.ndarray = field(repr=False)
    simplex_areas: np.ndarray = field(repr=False)


@dataclass
class PolytopeBody:
    """Polytope ``{x : <n_j, x> <= h_j}`` with exact facet data.

    ``normals`` are Euclidean unit outer normals; ``offsets`` are the support
    values ``h_j > 0``, so the origin is interior.
    """

    m: int
    facets: list[Facet]
    vertices: np.ndarray
    volume: float
    symmetric: bool
    name: str = "polytope"

    @property
    def normals(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets])

    @property
    def areas(self) -> np.ndarray:
        return np.array([f.area for f in self.facets])

    @property
    def centroids(self) -> np.ndarray:
        return np.array([f.centroid for f in self.facets])

    @property
    def surface_area(self) -> float:
        return float(self.areas.sum())

    def gauge(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        vals = x @ (self.normals / self.offsets[:, None]).T
        out = np.maximum(vals.max(axis=-1), 0.0)
        return float(out) if out.ndim == 0 else out

    def active_facets(self, x, tol: float = RIDGE_TOL) -> np.ndarray:
        vals = (self.normals @ np.asarray(x, dtype=float)) / self.offsets
        return np.flatnonzero(vals >= vals.max() - tol)

    def norming_functional(self, x) -> np.ndarray:
        """Minimum-norm element of the subdifferential of the gauge at ``x``.

        Unique at smooth points; at ridges the minimum-norm choice commutes
        with orthogonal symmetries of the body.
        """
        x = np.asarray(x, dtype=float)
        act = self.active_facets(x)
        duals = self.normals[act] / self.offsets[act, None]
        return min_norm_point(duals) / max(self.gauge(x), 1e-300)

    def describe(self) -> dict:
        return {
            "kind": "polytope-h",
            "name": self.name,
            "m": self.m,
            "n_facets": len(self.facets),
            "volume": self.volume,
            "normals": self.normals.tolist(),
            "offsets": self.offsets.tolist(),
        }


def _facet_geometry(normal: np.ndarray, pts: np.ndarray) -> tuple:
    m = normal.size
    # orthonormal basis of the facet hyperplane
    _, _, vt = np.linalg.svd(normal[None, :])
    E = vt[1:].T
    base = pts.mean(axis=0)
    Y = (pts - base) @ E
    if m == 2:
        order = np.argsort(Y[:, 0])
        a, b = pts[order[0]], pts[order[-1]]
        length = float(np.linalg.norm(b - a))
        simp = np.array([[a, b]])
        return length, (a + b) / 2, simp, np.array([length])
    tri = Delaunay(Y)
    simp = pts[tri.simplices]  # (s, m, m)
    local = Y[tri.simplices]
    edges = local[:, 1:, :] - local[:, :1, :]
    vols = np.abs(np.linalg.det(edges)) / factorial(m - 1)
    keep = vols > 1e-14 * max(vols.max(), 1e-300)
    simp, vols = simp[keep], vols[keep]
    area = float(vols.sum())
    centroid = (vols[:, None] * simp.mean(axis=1)).sum(axis=0) / area
    return area, centroid, simp, vols


def _dedupe_rows(A: np.ndarray, decimals: int = 9) -> np.ndarray:
    _, idx = np.unique(np.round(A, decimals), axis=0, return_index=True)
    return np.sort(idx)


def polytope_from_halfspaces(normals, offsets, require_symmetric: bool = True, name: str = "polytope") -> PolytopeBody:
    """Build a polytope from rows ``<n_j, x> <= h_j``.

    Normals need not be unit; each row is rescaled. Redundant halfspaces are
    dropped. With ``require_symmetric`` the halfspace set must be closed
    under negation (origin-symmetric body).
    """
    N = np.atleast_2d(np.asarray(normals, dtype=float))
    h = np.asarray(offsets, dtype=float).ravel()
    if N.shape[0] != h.size:
        raise InvalidInputError("normals and offsets have different lengths")
    m = N.shape[1]
    if m < 2 or m > 8:
        raise InvalidInputError(f"polytopes supported for 2 <= m <= 8, got m={m}")
    norms = np.linalg.norm(N, axis=1)
    if np.any(norms == 0):
        raise InvalidBodyError("zero normal vector")
    N = N / norms[:, None]
    h = h / norms
    if np.any(h <= 0):
        raise InvalidBodyError("origin must be interior: all offsets must be positive (degenerate body)")
    keep = _dedupe_rows(np.column_stack([N, h]))
    N, h = N[keep], h[keep]

    if require_symmetric:
        key = {tuple(np.round(np.append(n, hh), 9)) for n, hh in zip(N, h)}
        for n, hh in zip(N, h):
            if tuple(np.round(np.append(-n, hh), 9)) not in key:
                raise InvalidBodyError("halfspaces are not symmetric under negation")

    for i in range(m):
        for sgn in (1.0, -1.0):
            c = np.zeros(m)
            c[i] = -sgn
            res = linprog(c, A_ub=N, b_ub=h, bounds=[(None, None)] * m, method="highs")
            if res.status == 3:
                raise InvalidBodyError("halfspace intersection is unbounded")

    try:
        hs = HalfspaceIntersection(np.column_stack([N, -h]), np.zeros(m))
    except QhullError as exc:
        raise InvalidBodyError(f"halfspace intersection failed: {exc}") from exc
    V = hs.intersections
    V = V[np.all(np.isfinite(V), axis=1)]
    V = V[_dedupe_rows(V)]
    scale = max(1.0, float(np.abs(V).max()))

    facets = []
    for n, hh in zip(N, h):
        on = np.abs(V @ n - hh) <= 1e-9 * scale
        pts = V[on]
        if pts.shape[0] < m:
            continue
        if np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-9 * scale) < m - 1:
            continue
        area, centroid, simp, vols = _facet_geometry(n, pts)
        facets.append(Facet(n, float(hh), pts, area, centroid, simp, vols))
    if len(facets) <= m:
        raise InvalidBodyError("degenerate (lower-dimensional) body")
    # fan triangulation from the origin: each facet cones to volume h_j * area_j / m
    volume = float(sum(f.offset * f.area for f in facets) / m)
    if volume <= 0:
        raise InvalidBodyError("zero volume")
    symmetric = _is_symmetric([f.normal for f in facets], [f.offset for f in facets])
    return PolytopeBody(m=m, facets=facets, vertices=V, volume=volume, symmetric=symmetric, name=name)


def _is_symmetric(normals, offsets) -> bool:
    key = {tuple(np.round(np.append(n, h), 9)) for n, h in zip(normals, offsets)}
    return all(tuple(np.round(np.append(-n, h), 9)) in key for n, h in zip(normals, offsets))


def polytope_from_vertices(points, name: str = "polytope") -> PolytopeBody:
    """Convex hull of ``points``; the origin must lie in the interior. No symmetry required."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    try:
        hull = ConvexHull(P)
    except QhullError as exc:
        raise InvalidBodyError(f"convex hull failed: {exc}") from exc
    eq = hull.equations
    eq = eq[_dedupe_rows(eq)]
    return polytope_from_halfspaces(eq[:, :-1], -eq[:, -1], require_symmetric=False, name=name)


def cube(m: int, r: float = 1.0) -> PolytopeBody:
    I = np.eye(m)
    return polytope_from_halfspaces(np.vstack([I, -I]), np.full(2 * m, r), name=f"cube{m}")


def cross_polytope(m: int) -> PolytopeBody:
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * m, indexing="ij")).reshape(m, -1).T
    return polytope_from_halfspaces(signs, np.ones(len(signs)), name=f"cross{m}")


def hexagon() -> PolytopeBody:
    """Unit ball of ``max(|x|, |y|, |y - x|)``."""
    N = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [-1, 1], [1, -1]], dtype=float)
    return polytope_from_halfspaces(N, np.ones(6), name="hexagon")


def random_polytope(m: int, n_points: int, rng: np.random.Generator, symmetric: bool = False) -> PolytopeBody:
    """Hull of random points around an off-center shift; the origin stays interior."""
    while True:
        P = rng.standard_normal((n_points, m)) * rng.uniform(0.5, 2.0, size=m)
        if symmetric:
            P = np.vstack([P, -P])
        else:
            P = P + 0.2 * rng.standard_normal(m)
        try:
            return polytope_from_vertices(P, name=f"random{m}d")
        except InvalidBodyError:
            continue


def boundary_sample_polytope(body: PolytopeBody, j: int, barycentric) -> BoundarySample:
    """Boundary point ``sum_i b_i v_i`` over the vertices of facet ``j``."""
    f = body.facets[j]
    b = np.asarray(barycentric, dtype=float)
    if b.size != f.vertices.shape[0] or np.any(b < 0) or abs(b.sum() - 1) > 1e-12:
        raise InvalidInputError("barycentric weights must be nonnegative, sum to 1, one per facet vertex")
    x = b @ f.vertices
    vals = (body.normals @ x) / body.offsets
    others = np.delete(vals, j)
    valid = bool(others.size == 0 or others.max() < 1 - RIDGE_TOL)
    return BoundarySample(x=x, n_e=f.normal.copy(), x_star=f.normal / f.offset, valid=valid)


# ---------------------------------------------------------------------------
# smooth bodies given by a support function


def _sphere_check_nodes(m: int, n: int = 2000) -> np.ndarray:
    if m == 2:
        phi = 2 * np.pi * np.arange(512) / 512
        return np.column_stack([np.cos(phi), np.sin(phi)])
    rng = np.random.default_rng(12345)
    U = rng.standard_normal((n, m))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


@dataclass
class SmoothSupportBody:
    """Convex body with support function ``h`` (a :class:`SphereFunction`).

    When built by :meth:`perturbation`, ``h = 1 + eps * g`` and the pair
    ``(eps, g)`` is kept for reporting.
    """

    h: SphereFunction
    eps: float | None = None
    g: SphereFunction | None = None
    name: str = "support-fn"

    def __post_init__(self):
        U = _sphere_check_nodes(self.m)
        hv = self.h.value(U)
        if np.any(hv <= 0):
            raise InvalidBodyError("support function must be positive")
        if np.max(np.abs(self.h.value(-U) - hv)) > 1e-12 * max(1.0, np.abs(hv).max()):
            raise InvalidBodyError("support function must be even (origin-symmetric body)")
        if np.any(self.curvature_det(U) <= 0):
            raise StrictConvexityError("hess_S h + h I is not positive definite")

    @property
    def m(self) -> int:
        return self.h.m

    @classmethod
    def perturbation(cls, g: SphereFunction, eps: float) -> "SmoothSupportBody":
        U = _sphere_check_nodes(g.m)
        gv = np.abs(g.value(U)).max()
        hv = np.abs(np.linalg.eigvalsh(g.hess(U))).max()
        if abs(eps) * max(gv, hv) >= 0.5:
            raise StrictConvexityError(f"|eps| * max(|g|, |hess g|) = {abs(eps) * max(gv, hv):.3g} >= 0.5")
        h = SphereFunction.constant(g.m, 1.0) + g.scaled(eps)
        return cls(h=h, eps=float(eps), g=g, name=f"1+{eps:g}*{g.name}")

    @classmethod
    def ball(cls, m: int) -> "SmoothSupportBody":
        return cls(h=SphereFunction.constant(m, 1.0), name="euclidean-ball")

    def support(self, U) -> np.ndarray:
        return self.h.value(U)

    def boundary_point(self, U) -> np.ndarray:
        U = np.atleast_2d(U)
        return self.h.value(U)[:, None] * U + self.h.grad(U)

    def curvature_det(self, U) -> np.ndarray:
        """``det(hess_S h + h I)`` restricted to the tangent space at each row of ``U``."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        m = U.shape[1]
        hv = self.h.value(U)
        P = np.eye(m)[None] - U[:, :, None] * U[:, None, :]
        # the radial direction contributes a unit eigenvalue
        M = self.h.hess(U) + hv[:, None, None] * P + U[:, :, None] * U[:, None, :]
        return np.linalg.det(M)

    def _argmax_direction(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        """Maximize ``<x, u> / h(u)`` over the sphere; the maximizer is the normal at x/|x|_K."""
        U0 = _sphere_check_nodes(self.m, 400)
        cand = np.vstack([U0, x / np.linalg.norm(x)])
        vals = cand @ x / self.h.value(cand)
        v0 = cand[np.argmax(vals)]

        def obj(v):
            r = np.linalg.norm(v)
            u = v / r
            hv = self.h.value(u[None])[0]
            gh = self.h.grad(u[None])[0]
            f = (x @ u) / hv
            # d/du of <x,u>/h on the sphere, pulled back through u = v/|v|
            gs = (x - (x @ u) * u) / hv - (x @ u) * gh / hv**2
            return -f, -gs / r

        res = minimize(obj, v0, jac=True, method="BFGS", options={"gtol": 1e-14, "maxiter": 200})
        u = res.x / np.linalg.norm(res.x)
        return u, float(-obj(res.x)[0])

    def gauge(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self.gauge(r) for r in x])
        if not np.any(x):
            return 0.0
        return self._argmax_direction(x)[1]

    def norming_functional(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u, val = self._argmax_direction(x)
        return u / self.h.value(u[None])[0]

    @property
    def volume(self) -> float:
        """Enclosed volume ``(1/m) int h dsigma`` on a fine deterministic rule."""
        from .measures import sphere_area, sphere_rule

        rule = sphere_rule(self.m, "angular", 4096) if self.m == 2 else sphere_rule(self.m, "product", 48)
        U, w = rule.directions, rule.weights
        return float(sphere_area(self.m) * np.sum(w * self.h.value(U) * self.curvature_det(U)) / self.m)

    def describe(self) -> dict:
        out = {"kind": "support-fn", "name": self.name, "m": self.m}
        if self.g is not None:
            out.update(g=self.g.describe(), eps=self.eps)
        return out


def boundary_sample_smooth(body: SmoothSupportBody, u) -> BoundarySample:
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    hv = body.h.value(u[None])[0]
    if hv <= 0:
        raise InvalidBodyError("nonpositive support value")
    x = body.boundary_point(u[None])[0]
    return BoundarySample(x=x, n_e=u.copy(), x_star=u / hv, valid=True)


# ---------------------------------------------------------------------------
# l_p balls


@dataclass
class LpBody:
    m: int
    p: float

    def __post_init__(self):
        if not (self.p >= 1):
            raise InvalidBodyError(f"l_p needs p >= 1, got {self.p}")
        if self.m < 1:
            raise InvalidBodyError("dimension must be positive")

    @property
    def name(self) -> str:
        return f"l{'inf' if np.isinf(self.p) else f'{self.p:g}'}"

    def gauge(self, x) -> np.ndarray | float:
        out = np.linalg.norm(np.asarray(x, dtype=float), ord=self.p, axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def norming_functional(self, x) -> np.ndarray:
        """Gradient of the norm; at kinks the minimum-norm subgradient."""
        x = np.asarray(x, dtype=float)
        y = x / np.asarray(self.gauge(x))[..., None]
        if np.isinf(self.p):
            a = np.abs(y)
            act = a >= a.max(axis=-1, keepdims=True) - RIDGE_TOL
            return np.sign(y) * act / act.sum(axis=-1, keepdims=True)
        if self.p == 1:
            return np.where(np.abs(y) > RIDGE_TOL, np.sign(y), 0.0)
        return np.sign(y) * np.abs(y) ** (self.p - 1)

    def euclidean_normal(self, x) -> np.ndarray:
        s = self.norming_functional(x)
        return s / np.linalg.norm(s, axis=-1, keepdims=True)

    @property
    def volume(self) -> float:
        if np.isinf(self.p):
            return 2.0**self.m
        return (2 * gamma(1 + 1 / self.p)) ** self.m / gamma(1 + self.m / self.p)

    def sample_cone(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Exact cone-measure samples: radial projection of i.i.d. exp(-|t|^p) coordinates."""
        if np.isinf(self.p):
            Y = rng.uniform(-1.0, 1.0, size=(n, self.m))
        else:
            G = rng.gamma(1.0 / self.p, 1.0, size=(n, self.m))
            Y = G ** (1.0 / self.p) * rng.choice([-1.0, 1.0], size=(n, self.m))
        return Y / self.gauge(Y)[:, None]

    def as_polytope(self) -> PolytopeBody:
        if self.p == 1:
            return cross_polytope(self.m)
        if np.isinf(self.p):
            return cube(self.m)
        raise InvalidBodyError("only p in {1, inf} are polytopes")

    def describe(self) -> dict:
        return {"kind": "lp", "m": self.m, "p": "inf" if np.isinf(self.p) else self.p}


def norm_eval(body, x):
    """Minkowski gauge of ``x`` with respect to ``body``."""
    return body.gauge(x)
