"""Euclidean Grassmannian averages of compressions: Monte Carlo λ_k estimates."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import InvalidInputError
from .exterior import compound_matrix, lambda_k_minors, wedge

CHUNK = 100_000


@dataclass
class FrameSample:
    V: np.ndarray  # (N, k) orthonormal columns
    seed: int | None = None


def orthonormal_frames(G: np.ndarray) -> np.ndarray:
    """QR of a stack of Gaussian matrices with the R diagonal made positive.

    The sign fix is what makes the frames exactly Haar distributed; plain
    Householder QR output is not.
    """
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    return Q * d[..., None, :]


def haar_frame(N: int, k: int, seed: int | np.random.Generator) -> FrameSample:
    if not 1 <= k <= N:
        raise InvalidInputError(f"need 1 <= k <= N, got k={k}, N={N}")
    rng = np.random.default_rng(seed)
    V = orthonormal_frames(rng.standard_normal((N, k)))
    return FrameSample(V=V, seed=seed if isinstance(seed, int) else None)


def haar_frames(N: int, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return orthonormal_frames(rng.standard_normal((n, N, k)))


def compression_det(A, frame) -> float:
    """``det [<A v_i, v_j>]`` for the orthonormal columns ``v_i`` of the frame."""
    V = frame.V if isinstance(frame, FrameSample) else np.asarray(frame, dtype=float)
    A = np.asarray(A, dtype=float)
    return float(np.linalg.det(V.T @ A @ V))


def compression_det_wedge(A, frame) -> float:
    """Same quantity as ``<(Λ^k A) w_E, w_E>`` with ``w_E`` the Plucker vector of the frame."""
    V = frame.V if isinstance(frame, FrameSample) else np.asarray(frame, dtype=float)
    w = wedge(V)
    return float(w @ compound_matrix(A, V.shape[1]) @ w)


def _gram_compression(A: np.ndarray, G: np.ndarray) -> np.ndarray:
    # det(P_E A|_E) on E = span(G): the matrix in the basis G is (G^T G)^{-1} G^T A G
    Gt = np.swapaxes(G, -1, -2)
    return np.linalg.det(Gt @ A @ G) / np.linalg.det(Gt @ G)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TRACEFORMS_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class EberleinResult:
    estimate: float
    stderr: float
    exact: float
    n_samples: int
    seed: int
    k: int

    @property
    def z(self) -> float:
        return (self.estimate - self.exact) / self.stderr if self.stderr > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "exact": self.exact,
            "z": self.z,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def eberlein_lambda(A, k: int, n_samples: int, seed: int, antithetic: bool = False) -> EberleinResult:
    """``C(N,k) * mean det(P_E A|_E)`` over uniformly random k-planes ``E``.

    Samples are drawn in fixed-size chunks, each from its own spawned seed
    stream, and merged in chunk order, so the result does not depend on the
    worker count (``TRACEFORMS_WORKERS``).

    With ``antithetic`` each Gaussian basis ``G`` is paired with the reflected
    basis ``R G`` (``R`` a fixed random reflection); off by default.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    if not 1 <= k <= N:
        raise InvalidInputError(f"need 1 <= k <= N, got k={k}, N={N}")
    if n_samples < 2:
        raise InvalidInputError("need at least 2 samples")
    sizes = [min(CHUNK, n_samples - i) for i in range(0, n_samples, CHUNK)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    refl = None
    if antithetic:
        r = np.random.default_rng(np.random.SeedSequence(seed).spawn(len(sizes) + 1)[-1]).standard_normal(N)
        r /= np.linalg.norm(r)
        refl = np.eye(N) - 2 * np.outer(r, r)

    def chunk(args):
        size, ss = args
        rng = np.random.default_rng(ss)
        if refl is None:
            G = rng.standard_normal((size, N, k))
            return _gram_compression(A, G)
        G = rng.standard_normal(((size + 1) // 2, N, k))
        vals = 0.5 * (_gram_compression(A, G) + _gram_compression(A, refl @ G))
        return np.repeat(vals, 2)[:size]

    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(chunk, zip(sizes, streams)))
    else:
        parts = [chunk(a) for a in zip(sizes, streams)]
    vals = np.concatenate(parts)
    c = comb(N, k)
    if refl is None:
        mean, var, n_eff = vals.mean(), vals.var(ddof=1), vals.size
    else:
        # pairs are the independent units
        pairs = vals[::2]
        mean, var, n_eff = pairs.mean(), pairs.var(ddof=1), pairs.size
    return EberleinResult(
        estimate=float(c * mean),
        stderr=float(c * np.sqrt(var / n_eff)),
        exact=lambda_k_minors(A, k),
        n_samples=n_samples,
        seed=seed,
        k=k,
    )
