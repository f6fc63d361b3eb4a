"""Exterior powers: k-subset indexing, compound matrices and higher traces.

Every module indexes wedge coordinates the same way: the basis vector
``e_{i1} ^ ... ^ e_{ik}`` sits at the lexicographic rank of ``(i1, ..., ik)``
among all k-subsets of ``{0, ..., N-1}``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import InvalidInputError


@lru_cache(maxsize=64)
def _subsets(n: int, k: int) -> np.ndarray:
    out = np.array(list(combinations(range(n), k)), dtype=np.intp)
    out.setflags(write=False)
    return out.reshape(comb(n, k), k)


def subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of ``range(n)`` in lexicographic order, shape ``(C(n,k), k)``."""
    if not 0 <= k <= n:
        raise InvalidInputError(f"need 0 <= k <= n, got k={k}, n={n}")
    return _subsets(n, k)


def subset_rank(elements, n: int) -> int:
    """Lexicographic rank of a strictly increasing index list among k-subsets of range(n)."""
    elems = [int(e) for e in elements]
    k = len(elems)
    if any(e < 0 or e >= n for e in elems):
        raise InvalidInputError(f"elements {elems} out of range [0, {n})")
    if any(a >= b for a, b in zip(elems, elems[1:])):
        raise InvalidInputError(f"elements {elems} not strictly increasing")
    rank = 0
    prev = -1
    for pos, e in enumerate(elems):
        # count subsets whose entry at `pos` is smaller than e (with the same prefix)
        for j in range(prev + 1, e):
            rank += comb(n - 1 - j, k - 1 - pos)
        prev = e
    return rank


def subset_unrank(rank: int, n: int, k: int) -> list[int]:
    """Inverse of :func:`subset_rank`."""
    total = comb(n, k)
    if not 0 <= rank < total:
        raise InvalidInputError(f"rank {rank} out of range [0, {total})")
    out = []
    j = 0
    for pos in range(k):
        while True:
            block = comb(n - 1 - j, k - 1 - pos)
            if rank < block:
                break
            rank -= block
            j += 1
        out.append(j)
        j += 1
    return out


def _check_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    return A


def compound_matrix(A, k: int) -> np.ndarray:
    """k-th compound of ``A``: the matrix of Λ^k A in the lexicographic wedge basis.

    Entry ``(I, J)`` is ``det(A[I, J])``. Minors are evaluated in one batched
    LU call, which is fine for the N <= 12 range this package targets.
    """
    A = _check_square(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"exterior degree k={k} outside [1, {n}]")
    if k == 1:
        return A.copy()
    if k == n:
        return np.array([[np.linalg.det(A)]])
    idx = subsets(n, k)
    sub = A[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def lambda_k_minors(A, k: int) -> float:
    """λ_k(A) as the sum of all principal k×k minors."""
    A = _check_square(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"exterior degree k={k} outside [1, {n}]")
    idx = subsets(n, k)
    return float(np.linalg.det(A[idx[:, :, None], idx[:, None, :]]).sum())


def char_poly_coeffs(A) -> np.ndarray:
    """Higher traces ``(λ_0, ..., λ_N)`` via the Faddeev-LeVerrier recurrence.

    ``det(I - tA) = sum_k (-1)^k λ_k t^k``. The recurrence stays in real
    arithmetic; it loses accuracy for badly conditioned or large-norm A, where
    :func:`lambda_k_minors` is the safer reference.
    """
    A = _check_square(A)
    n = A.shape[0]
    lam = np.empty(n + 1)
    lam[0] = 1.0
    M = np.zeros_like(A)
    c = 1.0  # coefficient of s^(n-j+1) in det(sI - A)
    eye = np.eye(n)
    for j in range(1, n + 1):
        M = A @ M + c * eye
        c = -np.trace(A @ M) / j
        # det(sI - A) = sum_j (-1)^j λ_j s^(n-j)
        lam[j] = (-1) ** j * c
    return lam


def charpoly_eval(lam, t) -> np.ndarray:
    """Evaluate ``sum_k (-1)^k λ_k t^k`` for higher traces ``lam``."""
    lam = np.asarray(lam, dtype=float)
    signs = (-1.0) ** np.arange(lam.size)
    return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), signs * lam)


def wedge(vectors) -> np.ndarray:
    """Coordinates of ``v_1 ^ ... ^ v_k`` for the columns of an N×k array.

    Accepts a stack ``(..., N, k)``; returns ``(..., C(N, k))``.
    """
    V = np.asarray(vectors, dtype=float)
    n, k = V.shape[-2:]
    idx = subsets(n, k)
    return np.linalg.det(V[..., idx, :])


# columns: images of e0^e1 -> e2, e0^e2 -> -e1, e1^e2 -> e0
_HODGE = np.array(
    [
        [0.0, 0.0, 1.0],
        [0.0, -1.0, 0.0],
        [1.0, 0.0, 0.0],
    ]
)


def hodge_matrix_3d() -> np.ndarray:
    """Matrix of the Hodge star Λ²R³ -> R³ in the lex basis (e0^e1, e0^e2, e1^e2)."""
    return _HODGE.copy()


def hodge_star_3d(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != 3:
        raise InvalidInputError("Λ²R³ vectors have 3 coordinates")
    return w @ _HODGE.T
