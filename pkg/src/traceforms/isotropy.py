"""Isotropy operator T, trace averages of higher traces, and the polytope trace formula.

Convention: ``T[i, j] = n * int x*_i x_j d eta``, so that the Hilbert-Schmidt
pairing ``<B, T> = sum_ij B_ij T_ij`` equals ``n * int <B x, x*> d eta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .bodies import PolytopeBody
from .errors import InvalidInputError
from .exterior import compound_matrix, lambda_k_minors
from .measures import (
    BoundaryNodes,
    MeasureSpec,
    QuadratureRule,
    boundary_nodes,
    facet_rule,
    integrate_nodes,
    measure_weights,
)


def hs(A, B) -> float:
    """Hilbert-Schmidt pairing ``tr(A^T B)``."""
    return float(np.sum(np.asarray(A) * np.asarray(B)))


@dataclass
class IsotropyReport:
    T: np.ndarray
    measure: MeasureSpec
    body: dict
    quadrature: dict
    n_nodes: int
    normalization: float
    T_stderr: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    @property
    def anisotropy(self) -> np.ndarray:
        return self.T - np.eye(self.dim)

    @property
    def hs_norm_anisotropy(self) -> float:
        return float(np.linalg.norm(self.anisotropy))

    @property
    def asymmetry(self) -> float:
        return float(np.linalg.norm(self.T - self.T.T))

    def to_dict(self) -> dict:
        out = {
            "body": self.body,
            "measure": self.measure.to_dict(),
            "T": self.T.tolist(),
            "anisotropy_hs": self.hs_norm_anisotropy,
            "trace_T": float(np.trace(self.T)),
            "asymmetry": self.asymmetry,
            "quadrature": self.quadrature,
            "n_nodes": self.n_nodes,
        }
        if self.T_stderr is not None:
            out["T_stderr"] = self.T_stderr.tolist()
        return out


@dataclass
class TraceAverageResult:
    k: int
    estimate: float
    exact: float
    predicted: float
    stderr: float | None
    report: IsotropyReport = field(repr=False)

    @property
    def discrepancy(self) -> float:
        return self.estimate - self.exact

    @property
    def mean_coefficient(self) -> float:
        """Plain average of the matrix coefficient, ``estimate / n_k``."""
        return self.estimate / self.report.dim

    @property
    def identity_defect(self) -> float:
        """``|discrepancy - predicted|``: zero up to rounding when nodes are shared."""
        return abs(self.discrepancy - self.predicted)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "estimate": self.estimate,
            "exact": self.exact,
            "discrepancy": self.discrepancy,
            "predicted": self.predicted,
            "stderr": self.stderr,
            "mean_coefficient": self.mean_coefficient,
        }


def _xstar_x(nodes: BoundaryNodes) -> np.ndarray:
    return nodes.x_star[:, :, None] * nodes.x[:, None, :]


def _report_from_nodes(body, nodes: BoundaryNodes, measure: MeasureSpec) -> IsotropyReport:
    n = nodes.x.shape[1]
    res = integrate_nodes(nodes, measure, _xstar_x)
    return IsotropyReport(
        T=n * res.value,
        measure=measure,
        body=body.describe(),
        quadrature=res.rule,
        n_nodes=res.n_nodes,
        normalization=res.normalization,
        T_stderr=None if res.stderr is None else n * res.stderr,
    )


def default_rule(body) -> QuadratureRule:
    if isinstance(body, PolytopeBody):
        return facet_rule()
    raise InvalidInputError("a quadrature rule is required for non-polytope bodies")


def compute_T(body, measure: MeasureSpec, rule: QuadratureRule | None = None) -> IsotropyReport:
    """``T_eta = n int x* x^T d eta`` over the boundary of ``body``.

    With the facet rule on a polytope the result is exact: the integrand is
    affine on each facet because ``x*`` is constant there.
    """
    rule = rule or default_rule(body)
    nodes = boundary_nodes(body, rule)
    return _report_from_nodes(body, nodes, measure)


def trace_average_nodes(A, k: int, body, nodes: BoundaryNodes, measure: MeasureSpec) -> TraceAverageResult:
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    nk = comb(N, k)
    if nodes.x.shape[1] != nk:
        raise InvalidInputError(f"body dimension {nodes.x.shape[1]} != C({N},{k}) = {nk}")
    B = compound_matrix(A, k)
    report = _report_from_nodes(body, nodes, measure)
    w, _ = measure_weights(nodes, measure)
    coeff = np.einsum("ni,ij,nj->n", nodes.x_star, B, nodes.x)
    mean = float(w @ coeff)
    stderr = None
    if nodes.randomized:
        stderr = nk * float(np.sqrt(np.sum(w**2 * (coeff - mean) ** 2)))
    estimate = nk * mean
    exact = lambda_k_minors(A, k)
    predicted = hs(B, report.T - np.eye(nk))
    return TraceAverageResult(k=k, estimate=estimate, exact=exact, predicted=predicted, stderr=stderr, report=report)


def trace_average(A, k: int, body, measure: MeasureSpec, rule: QuadratureRule | None = None) -> TraceAverageResult:
    """Estimate ``λ_k(A) = n_k int <(Λ^k A) w, w*> d eta`` on a body living in Λ^k R^N.

    The same nodes give ``T``, so ``discrepancy`` and ``predicted`` (the
    pairing ``<Λ^k A, T - I>``) agree to rounding whatever the rule.
    """
    rule = rule or default_rule(body)
    return trace_average_nodes(A, k, body, boundary_nodes(body, rule), measure)


def discrete_trace(A, body: PolytopeBody) -> float:
    """``(1/vol) sum_j area_j <A c_j, n_j>``: the facet-centroid trace formula."""
    A = np.asarray(A, dtype=float)
    if A.shape != (body.m, body.m):
        raise InvalidInputError("matrix size does not match polytope dimension")
    C, Nn = body.centroids, body.normals
    return float(np.sum(body.areas * np.einsum("ij,nj,ni->n", A, C, Nn)) / body.volume)


@dataclass
class AnisotropyResult:
    tensor: np.ndarray  # symmetrized
    raw: np.ndarray
    asymmetry: float
    trace: float
    hs_norm: float
    report: IsotropyReport = field(repr=False)


def anisotropy_tensor(body, rule: QuadratureRule | None = None) -> AnisotropyResult:
    """``N int x* x^T d mu - I`` for the hypersurface measure, symmetrized for reporting."""
    rep = compute_T(body, MeasureSpec("hypersurface"), rule)
    raw = rep.anisotropy
    sym = (raw + raw.T) / 2
    return AnisotropyResult(
        tensor=sym,
        raw=raw,
        asymmetry=float(np.linalg.norm(raw - raw.T)),
        trace=float(np.trace(raw)),
        hs_norm=float(np.linalg.norm(sym)),
        report=rep,
    )


def hs_identity_defect(report_nodes: BoundaryNodes, measure: MeasureSpec, B) -> float:
    """Relative mismatch between ``n int <B w, w*> - tr B`` and ``<B, T - I>`` on shared nodes."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    w, _ = measure_weights(report_nodes, measure)
    lhs = n * float(w @ np.einsum("ni,ij,nj->n", report_nodes.x_star, B, report_nodes.x)) - np.trace(B)
    T = n * np.tensordot(w, _xstar_x(report_nodes), axes=(0, 0))
    rhs = hs(B, T - np.eye(n))
    return abs(lhs - rhs) / max(1.0, abs(lhs), np.linalg.norm(B))
