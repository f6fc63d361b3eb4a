"""Text and file formats for bodies, matrices, sphere functions and quadrature rules."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .bodies import LpBody, SmoothSupportBody, cross_polytope, cube, hexagon, polytope_from_halfspaces
from .errors import InvalidInputError
from .measures import QuadratureRule, facet_rule, sphere_rule
from .spherefun import SphereFunction


def _load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InvalidInputError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from exc


def _kv(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        key, sep, val = part.partition("=")
        if not sep:
            raise InvalidInputError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


# -- matrices -------------------------------------------------------------


def parse_matrix(source: str, n: int | None = None) -> np.ndarray:
    """``random:seed=3[,n=4]``, ``diag:1,-1``, ``identity``, inline JSON or a JSON file.

    Random matrices have i.i.d. uniform entries in [-1, 1].
    """
    src = source.strip()
    if src.startswith("random"):
        opts = _kv(src.partition(":")[2])
        size = int(opts.get("n", n or 0))
        if size < 1:
            raise InvalidInputError("random matrix needs a size (n=... or --N)")
        if "seed" not in opts:
            raise InvalidInputError("random matrix needs an explicit seed")
        return np.random.default_rng(int(opts["seed"])).uniform(-1.0, 1.0, (size, size))
    if src.startswith("diag:"):
        return np.diag(_floats(src[5:]))
    if src == "identity":
        if not n:
            raise InvalidInputError("identity needs --N")
        return np.eye(n)
    data = json.loads(src) if src.startswith("[") else _load_json(src)
    if isinstance(data, dict):
        data = data.get("A", data.get("matrix"))
    A = np.asarray(data, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {A.shape}")
    if n is not None and A.shape[0] != n:
        raise InvalidInputError(f"matrix is {A.shape[0]}x{A.shape[0]} but N={n}")
    return A


# -- sphere functions -----------------------------------------------------


def parse_sphere_function(text: str, m: int) -> SphereFunction:
    """``cos2phi`` / ``cos:4`` (m=2), ``quadratic:diag=1,-1,0`` or ``quadratic:S.json``,
    ``quadratic:random:seed=3``, ``harmonic:l=4``."""
    name, _, arg = text.partition(":")
    mcos = re.fullmatch(r"cos(\d+)phi", name)
    if mcos or name == "cos":
        if m != 2:
            raise InvalidInputError("cosine modes live on the circle (m=2)")
        return SphereFunction.cos_mode(int(mcos.group(1)) if mcos else int(arg))
    if name == "quadratic":
        if arg.startswith("diag="):
            S = np.diag(_floats(arg[5:]))
        elif arg.startswith("random"):
            seed = int(_kv(arg.partition(":")[2]).get("seed", "0"))
            S = random_traceless(m, np.random.default_rng(seed))
        else:
            S = np.asarray(_load_json(arg), dtype=float)
        if S.shape != (m, m):
            raise InvalidInputError(f"quadratic form has shape {S.shape}, expected ({m}, {m})")
        return SphereFunction.quadratic(S)
    if name == "harmonic":
        ell = int(_kv(arg).get("l", "4")) if arg else 4
        if ell != 4:
            raise InvalidInputError("only the degree-4 harmonic is registered")
        return SphereFunction.cos_mode(4) if m == 2 else SphereFunction.cubic_harmonic4(m)
    raise InvalidInputError(f"unknown sphere function {text!r}")


def random_traceless(m: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric traceless matrix with unit spectral norm."""
    S = rng.standard_normal((m, m))
    S = S + S.T
    S -= np.trace(S) / m * np.eye(m)
    return S / np.abs(np.linalg.eigvalsh(S)).max()


# -- bodies ---------------------------------------------------------------

NAMED_BODIES = ("hexagon", "cube", "cross", "ball", "l1", "linf", "lp:<p>")


def body_from_dict(d: dict, m: int | None = None):
    kind = d.get("kind")
    if kind == "polytope-h":
        return polytope_from_halfspaces(
            d["normals"], d["offsets"], require_symmetric=d.get("symmetric", True), name=d.get("name", "polytope")
        )
    if kind == "lp":
        p = float(d["p"]) if str(d["p"]) not in ("inf", "infinity") else np.inf
        return LpBody(int(d.get("m", m or 0)), p)
    if kind == "support-fn":
        dim = int(d.get("m", m or 0))
        g = parse_sphere_function(d["g"], dim)
        return SmoothSupportBody.perturbation(g, float(d["eps"]))
    raise InvalidInputError(f"unknown body kind {kind!r} (expected polytope-h, lp or support-fn)")


def parse_body(text: str, m: int | None = None):
    """A named body (``hexagon``, ``cube``, ``cross``, ``ball``, ``l1``, ``linf``, ``lp:3``)
    in dimension ``m``, or a JSON body definition file."""
    name, _, arg = text.partition(":")
    if name == "hexagon":
        return hexagon()
    if name in ("cube", "cross", "ball", "l1", "linf", "lp"):
        if not m:
            raise InvalidInputError(f"body {text!r} needs a dimension")
        if name == "cube":
            return cube(m)
        if name == "cross":
            return cross_polytope(m)
        if name == "ball":
            return SmoothSupportBody.ball(m)
        p = {"l1": 1.0, "linf": np.inf}.get(name)
        return LpBody(m, p if p is not None else (np.inf if arg in ("inf", "infinity") else float(arg)))
    if text.endswith(".json"):
        return body_from_dict(_load_json(text), m)
    raise InvalidInputError(f"unknown body {text!r}; expected one of {', '.join(NAMED_BODIES)} or a .json file")


# -- quadrature -----------------------------------------------------------


def parse_rule(text: str, m: int | None, seed: int | None = None) -> QuadratureRule:
    """``facet``, ``angular:4096``, ``product:32``, ``montecarlo:1e6`` (needs ``seed``)."""
    scheme, _, arg = text.partition(":")
    if scheme == "facet":
        return facet_rule()
    if scheme not in ("angular", "product", "montecarlo"):
        raise InvalidInputError(f"unknown quadrature {text!r}")
    n = int(float(arg)) if arg else {"angular": 4096, "product": 32, "montecarlo": 10**5}[scheme]
    if scheme == "montecarlo":
        if seed is None:
            raise InvalidInputError("Monte Carlo quadrature needs --seed")
        return QuadratureRule("montecarlo", m, n, seed)
    return sphere_rule(m, scheme, n)
