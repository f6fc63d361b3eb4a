"""Finite orthogonal groups, induced Λ^k actions and orthogonal 2-design checks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product
from math import comb, cos, factorial, pi, sin, sqrt

import numpy as np

from .errors import GroupTooLargeError, InvalidInputError, InvariantViolationError
from .exterior import compound_matrix, subsets
from .isotropy import IsotropyReport
from .measures import MeasureSpec

ROUND_DECIMALS = 9
MAX_ORDER = 10**6
DESIGN_TOL = 1e-10


@dataclass
class GroupSpec:
    name: str
    elements: np.ndarray  # (|G|, n, n)
    generators: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def describe(self) -> dict:
        return {"name": self.name, "order": self.order, "dim": self.dim}


def _key(Q: np.ndarray) -> bytes:
    # +0.0 folds negative zeros so that -0 and 0 hash alike
    return (np.round(Q, ROUND_DECIMALS) + 0.0).tobytes()


def group_closure(generators, name: str = "custom", max_order: int = MAX_ORDER) -> GroupSpec:
    """All products of ``generators`` (breadth-first, deduplicated on rounded entries)."""
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise InvalidInputError("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise InvalidInputError("generators must be square and of equal size")
        if np.max(np.abs(g.T @ g - np.eye(n))) > 1e-9:
            raise InvalidInputError("generators must be orthogonal")
    eye = np.eye(n)
    seen = {_key(eye): eye}
    queue = deque([eye])
    while queue:
        Q = queue.popleft()
        for g in gens:
            P = g @ Q
            k = _key(P)
            if k not in seen:
                if len(seen) >= max_order:
                    raise GroupTooLargeError(f"closure exceeds {max_order} elements: group too large or infinite")
                seen[k] = P
                queue.append(P)
    return GroupSpec(name=name, elements=np.array(list(seen.values())), generators=np.array(gens))


def hyperoctahedral(n: int) -> GroupSpec:
    """All 2^n n! signed permutation matrices."""
    els = []
    eye = np.eye(n)
    for perm in permutations(range(n)):
        P = eye[list(perm)]
        for signs in product((1.0, -1.0), repeat=n):
            els.append(np.asarray(signs)[:, None] * P)
    return GroupSpec(name=f"hyperoctahedral:{n}", elements=np.array(els))


def rotation2(theta: float) -> np.ndarray:
    return np.array([[cos(theta), -sin(theta)], [sin(theta), cos(theta)]])


def dihedral(m: int) -> GroupSpec:
    """Symmetries of the regular m-gon: m rotations and m reflections."""
    return group_closure([rotation2(2 * pi / m), np.diag([1.0, -1.0])], name=f"dihedral:{m}")


def cyclic(m: int) -> GroupSpec:
    """Rotations by multiples of 2 pi / m (C_2 = {I, -I})."""
    return group_closure([rotation2(2 * pi / m)], name=f"cyclic:{m}")


def axis_rotation(axis, angle: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + sin(angle) * K + (1 - cos(angle)) * K @ K


_PHI = (1 + sqrt(5)) / 2

# vetted generator sets; closure is always recomputed
PLATONIC_GENERATORS = {
    "tetrahedral": [axis_rotation([1, 1, 1], 2 * pi / 3), axis_rotation([0, 0, 1], pi)],
    "octahedral": [axis_rotation([1, 1, 1], 2 * pi / 3), axis_rotation([0, 0, 1], pi / 2)],
    "icosahedral": [axis_rotation([1, 1, 1], 2 * pi / 3), axis_rotation([0, 1, _PHI], 2 * pi / 5)],
}
PLATONIC_ORDERS = {"tetrahedral": 12, "octahedral": 24, "icosahedral": 60}


def platonic(name: str) -> GroupSpec:
    G = group_closure(PLATONIC_GENERATORS[name], name=name)
    if G.order != PLATONIC_ORDERS[name]:
        raise InvariantViolationError(f"{name} closure has {G.order} elements, expected {PLATONIC_ORDERS[name]}")
    return G


def group_from_name(text: str) -> GroupSpec:
    """Parse ``hyperoctahedral:4``, ``dihedral:5``, ``cyclic:2``, ``octahedral`` ..."""
    name, _, arg = text.partition(":")
    if name == "hyperoctahedral":
        return hyperoctahedral(int(arg))
    if name == "dihedral":
        return dihedral(int(arg))
    if name == "cyclic":
        return cyclic(int(arg))
    if name in PLATONIC_GENERATORS:
        return platonic(name)
    raise InvalidInputError(f"unknown group {text!r}")


@dataclass
class InducedAction:
    base: GroupSpec
    k: int
    matrices: np.ndarray  # (|G|, n_k, n_k)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]


def _signed_perm_compound(Q: np.ndarray, k: int) -> np.ndarray:
    """Λ^k of a signed permutation, built combinatorially (no determinants)."""
    n = Q.shape[0]
    idx = subsets(n, k)
    col = np.argmax(np.abs(Q), axis=0)  # Q e_j = s_j e_col[j]
    sgn = Q[col, np.arange(n)]
    pos = {tuple(s): r for r, s in enumerate(idx.tolist())}
    out = np.zeros((len(idx), len(idx)))
    for c, J in enumerate(idx):
        img = col[J]
        order = np.argsort(img)
        # sign of the sorting permutation via inversion count
        inv = sum(1 for a in range(k) for b in range(a + 1, k) if order[a] > order[b])
        s = (-1) ** inv * np.prod(sgn[J])
        out[pos[tuple(np.sort(img))], c] = s
    return out


def _is_signed_perm(Q: np.ndarray) -> bool:
    A = np.abs(np.round(Q, ROUND_DECIMALS))
    return bool(np.all((A == 0) | (A == 1)) and np.all(A.sum(axis=0) == 1) and np.all(A.sum(axis=1) == 1))


def induced_action(G: GroupSpec, k: int) -> InducedAction:
    if not 1 <= k <= G.dim:
        raise InvalidInputError(f"k={k} outside [1, {G.dim}]")
    mats = []
    for Q in G.elements:
        mats.append(_signed_perm_compound(Q, k) if _is_signed_perm(Q) else compound_matrix(Q, k))
    return InducedAction(base=G, k=k, matrices=np.array(mats))


@dataclass
class DesignCheck:
    is_design: bool
    max_defect: float
    basis_defect: float
    random_defect: float
    dim: int
    order: int

    def to_dict(self) -> dict:
        return {
            "is_design": self.is_design,
            "max_defect": self.max_defect,
            "basis_defect": self.basis_defect,
            "random_defect": self.random_defect,
            "dim": self.dim,
            "order": self.order,
        }


def twirl(matrices: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``(1/|G|) sum Q^T B Q``."""
    return np.einsum("gji,jk,gkl->il", matrices, B, matrices) / matrices.shape[0]


def twirl_superoperator(matrices: np.ndarray) -> np.ndarray:
    """Matrix of ``B -> (1/|G|) sum Q^T B Q`` acting on row-major ``vec(B)``."""
    d = matrices.shape[1]
    S = np.zeros((d * d, d * d))
    for Q in matrices:
        S += np.kron(Q.T, Q.T)
    return S / matrices.shape[0]


def check_2design(action: InducedAction, trials: int = 20, seed: int = 0, tol: float = DESIGN_TOL) -> DesignCheck:
    """Twirl a full basis of End(W) plus ``trials`` random operators.

    The defect of ``B`` is ``||twirl(B) - (tr B / dim W) I||_HS``.
    """
    M = action.matrices
    d = action.dim
    S = twirl_superoperator(M)
    # column (a, b) of S is the twirl of the basis element E_ab
    vec_id = np.ravel(np.eye(d))
    target = np.outer(vec_id, vec_id) / d
    basis_defect = float(np.max(np.linalg.norm(S - target, axis=0)))
    rng = np.random.default_rng(seed)
    random_defect = 0.0
    for _ in range(trials):
        B = rng.standard_normal((d, d))
        D = twirl(M, B) - np.trace(B) / d * np.eye(d)
        random_defect = max(random_defect, float(np.linalg.norm(D)))
    max_defect = max(basis_defect, random_defect)
    return DesignCheck(
        is_design=max_defect < tol,
        max_defect=max_defect,
        basis_defect=basis_defect,
        random_defect=random_defect,
        dim=d,
        order=action.base.order,
    )


def commutant_dimension(action: InducedAction, tol: float = 1e-8) -> int:
    """Dimension of the space of operators commuting with the action (1 iff scalar)."""
    S = twirl_superoperator(action.matrices)
    ev = np.linalg.eigvalsh((S + S.T) / 2)
    return int(np.sum(ev > 1 - tol))


def check_invariance(body, matrices: np.ndarray, samples: int = 50, seed: int = 0, tol: float = 1e-9) -> float:
    """Largest relative change of the body gauge under the action on random points."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((samples, matrices.shape[1]))
    base = np.atleast_1d(body.gauge(Z))
    worst = 0.0
    for Q in matrices:
        worst = max(worst, float(np.max(np.abs(np.atleast_1d(body.gauge(Z @ Q.T)) - base) / base)))
    if worst > tol:
        raise InvariantViolationError(f"body is not invariant under the group (gauge change {worst:.3g})")
    return worst


def orbit_measure_T(action: InducedAction, w0, body) -> IsotropyReport:
    """``T`` for the uniform measure on the orbit ``G . w0`` with the body's norming functionals."""
    M = action.matrices
    w0 = np.asarray(w0, dtype=float)
    if w0.size != action.dim or body.m != action.dim:
        raise InvalidInputError("orbit point, body and action dimensions differ")
    r = body.gauge(w0)
    if abs(r - 1) > 1e-9:
        raise InvalidInputError(f"base point must lie on the unit sphere (gauge {r})")
    check_invariance(body, M)
    W = M @ w0
    Ws = np.array([body.norming_functional(w) for w in W])
    T = action.dim * np.einsum("gi,gj->ij", Ws, W) / W.shape[0]
    return IsotropyReport(
        T=T,
        measure=MeasureSpec("hypersurface"),
        body=body.describe(),
        quadrature={"scheme": "orbit", "group": action.base.name, "k": action.k, "n": int(W.shape[0])},
        n_nodes=int(W.shape[0]),
        normalization=1.0,
    )


def expected_order(name: str) -> int | None:
    kind, _, arg = name.partition(":")
    if kind == "hyperoctahedral":
        n = int(arg)
        return 2**n * factorial(n)
    if kind == "dihedral":
        return 2 * int(arg)
    return PLATONIC_ORDERS.get(kind)


def wedge_dim(n: int, k: int) -> int:
    return comb(n, k)
