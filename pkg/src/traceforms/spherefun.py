"""Polynomial functions on the unit sphere with exact spherical derivatives.

A :class:`SphereFunction` is a sum of homogeneous components, each stored as
a fully symmetric tensor ``T`` of order ``d`` so that the component evaluates
to ``T[u, u, ..., u]``. Ambient derivatives of a homogeneous form are again
contractions of ``T``, which makes the spherical gradient and Hessian exact::

    grad_S g = P grad g
    hess_S g = P (hess g) P - <grad g, u> P,      P = I - u u^T

All the registered families (constants, traceless quadratics ``u^T S u``,
``cos(l phi)`` in the plane, degree-4 harmonics) fit this form.
"""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np

from .errors import InvalidInputError

_CHUNK = 32768


def _symmetrize(T: np.ndarray) -> np.ndarray:
    d = T.ndim
    if d < 2:
        return T.copy()
    perms = list(itertools.permutations(range(d)))
    return sum(np.transpose(T, p) for p in perms) / len(perms)


def _contract(T: np.ndarray, U: np.ndarray, times: int) -> np.ndarray:
    """Contract the last ``times`` slots of ``T`` with each row of ``U``."""
    n = U.shape[0]
    R = np.broadcast_to(T, (n,) + T.shape)
    for _ in range(times):
        R = np.einsum("n...i,ni->n...", R, U)
    return np.asarray(R)


class SphereFunction:
    """Sum of homogeneous symmetric-tensor forms restricted to S^{m-1}."""

    def __init__(self, m: int, components=(), name: str | None = None):
        self.m = int(m)
        comps = []
        for T in components:
            T = np.asarray(T, dtype=float)
            if T.ndim and any(s != self.m for s in T.shape):
                raise InvalidInputError(f"component shape {T.shape} does not match m={self.m}")
            comps.append(_symmetrize(T))
        self.components = tuple(comps)
        self.name = name or "polynomial"

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, m: int, c: float = 1.0) -> "SphereFunction":
        return cls(m, [np.array(float(c))], name=f"constant:{c}")

    @classmethod
    def quadratic(cls, S, require_traceless: bool = True) -> "SphereFunction":
        S = np.asarray(S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise InvalidInputError("quadratic form needs a square matrix")
        if not np.allclose(S, S.T, atol=1e-12):
            raise InvalidInputError("quadratic form matrix must be symmetric")
        if require_traceless and abs(np.trace(S)) > 1e-12 * max(1.0, np.abs(S).max()):
            raise InvalidInputError(f"quadratic form must be traceless, tr S = {np.trace(S)}")
        return cls(S.shape[0], [S], name="quadratic")

    @classmethod
    def from_monomials(cls, m: int, terms: dict, name: str | None = None) -> "SphereFunction":
        """Build from ``{exponent_tuple: coefficient}``; mixed degrees are allowed."""
        by_degree: dict[int, np.ndarray] = {}
        for expo, coef in terms.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != m:
                raise InvalidInputError(f"exponent {expo} has wrong length for m={m}")
            d = sum(expo)
            T = by_degree.setdefault(d, np.zeros((m,) * d))
            idx = tuple(i for i, e in enumerate(expo) for _ in range(e))
            perms = set(itertools.permutations(idx))
            for p in perms:
                T[p] += coef / len(perms)
        return cls(m, [by_degree[d] for d in sorted(by_degree)], name=name)

    @classmethod
    def cos_mode(cls, ell: int) -> "SphereFunction":
        """``cos(ell * phi)`` on the circle, written as ``Re (u1 + i u2)^ell``."""
        terms = {}
        for j in range(0, ell + 1, 2):
            # real part picks even powers of i: i^j = (-1)^(j/2)
            coef = (-1) ** (j // 2) * factorial(ell) / (factorial(j) * factorial(ell - j))
            terms[(ell - j, j)] = coef
        return cls.from_monomials(2, terms, name=f"cos{ell}phi")

    @classmethod
    def cubic_harmonic4(cls, m: int = 3) -> "SphereFunction":
        """``sum u_i^4 - 3/(m+2) |u|^4``: the degree-4 harmonic with cubic symmetry."""
        terms: dict = {}
        for i in range(m):
            e = [0] * m
            e[i] = 4
            terms[tuple(e)] = terms.get(tuple(e), 0.0) + 1.0
        # |u|^4 = sum_i u_i^4 + 2 sum_{i<j} u_i^2 u_j^2
        c = -3.0 / (m + 2)
        for i in range(m):
            e = [0] * m
            e[i] = 4
            terms[tuple(e)] += c
            for j in range(i + 1, m):
                e = [0] * m
                e[i] = e[j] = 2
                terms[tuple(e)] = terms.get(tuple(e), 0.0) + 2 * c
        return cls.from_monomials(m, terms, name="cubic-harmonic4")

    @classmethod
    def planar_harmonic4(cls, m: int = 3) -> "SphereFunction":
        """``Re (u1 + i u2)^4`` embedded in R^m (harmonic of degree 4 for any m >= 2)."""
        base = cls.cos_mode(4).components[0]
        T = np.zeros((m,) * 4)
        T[:2, :2, :2, :2] = base
        return cls(m, [T], name="planar-harmonic4")

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "SphereFunction") -> "SphereFunction":
        if other.m != self.m:
            raise InvalidInputError("cannot add sphere functions of different dimension")
        merged: dict[int, np.ndarray] = {}
        for T in self.components + other.components:
            merged[T.ndim] = merged.get(T.ndim, 0) + T
        return SphereFunction(self.m, [merged[d] for d in sorted(merged)], name=f"{self.name}+{other.name}")

    def scaled(self, c: float) -> "SphereFunction":
        return SphereFunction(self.m, [c * T for T in self.components], name=f"{c}*{self.name}")

    def rotated(self, Q) -> "SphereFunction":
        """``u -> g(Q^T u)``."""
        Q = np.asarray(Q, dtype=float)
        comps = []
        for T in self.components:
            R = T
            for axis in range(T.ndim):
                R = np.moveaxis(np.tensordot(Q, R, axes=([1], [axis])), 0, axis)
            comps.append(R)
        return SphereFunction(self.m, comps, name=f"rot({self.name})")

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(T.ndim for T in self.components)

    @property
    def is_even(self) -> bool:
        return all(d % 2 == 0 for d in self.degrees)

    # -- evaluation ---------------------------------------------------

    def _eval(self, U: np.ndarray, order: int) -> np.ndarray:
        n, m = U.shape
        out = np.zeros((n,) + (m,) * order)
        for T in self.components:
            d = T.ndim
            if d < order:
                continue
            coef = factorial(d) / factorial(d - order)
            out += coef * _contract(T, U, d - order)
        return out

    def _apply(self, U, fn):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[0] <= _CHUNK:
            return fn(U)
        return np.concatenate([fn(U[i : i + _CHUNK]) for i in range(0, U.shape[0], _CHUNK)])

    def value(self, U) -> np.ndarray:
        return self._apply(U, lambda V: self._eval(V, 0))

    __call__ = value

    def ambient_grad(self, U) -> np.ndarray:
        return self._apply(U, lambda V: self._eval(V, 1))

    def ambient_hess(self, U) -> np.ndarray:
        return self._apply(U, lambda V: self._eval(V, 2))

    def grad(self, U) -> np.ndarray:
        """Spherical gradient at unit vectors ``U`` (rows), tangent to the sphere."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        G = self.ambient_grad(U)
        return G - np.sum(G * U, axis=1, keepdims=True) * U

    def hess(self, U) -> np.ndarray:
        """Spherical (Riemannian) Hessian as tangential m×m matrices."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        G = self.ambient_grad(U)
        H = self.ambient_hess(U)
        m = U.shape[1]
        P = np.eye(m)[None] - U[:, :, None] * U[:, None, :]
        radial = np.sum(G * U, axis=1)
        return P @ H @ P - radial[:, None, None] * P

    def laplacian(self, U) -> np.ndarray:
        return np.trace(self.hess(U), axis1=1, axis2=2)

    def describe(self) -> dict:
        return {"name": self.name, "m": self.m, "degrees": list(self.degrees)}
