"""``trace-forms``: experiment driver emitting JSON reports and CSV sweep tables.

Every subcommand builds an :class:`ExperimentConfig` and hands it to
:func:`run`, so ``trace-forms run --config file.json`` replays any report
exactly. Reports carry the config hash, seed, node counts and tolerances
and contain no timestamps, so identical configs give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb, sqrt
from pathlib import Path

import numpy as np

from . import __version__
from .bodies import (
    RIDGE_TOL,
    LpBody,
    PolytopeBody,
    SmoothSupportBody,
    cross_polytope,
    cube,
    hexagon,
    random_polytope,
)
from .errors import InvalidInputError, TraceFormsError
from .exterior import char_poly_coeffs, lambda_k_minors
from .grassmann import _workers, eberlein_lambda
from .groups import DESIGN_TOL, check_2design, commutant_dimension, group_from_name, induced_action
from .harmonics import (
    DEFAULT_LADDER,
    alpha_cone_derivative,
    alpha_normalization,
    differential_identities_check,
    first_variation_L,
    project_degree2,
)
from .isotropy import compute_T, discrete_trace, hs_identity_defect, trace_average_nodes
from .measures import MeasureSpec, boundary_nodes, sphere_rule
from .specs import parse_body, parse_matrix, parse_rule, parse_sphere_function, random_traceless
from .spherefun import SphereFunction

SCHEMA_VERSION = 1
KINDS = (
    "exact",
    "cone-avg",
    "hyper-avg",
    "isotropy",
    "discrete",
    "design-check",
    "grassmann",
    "perturb",
    "alpha-scan",
    "repro",
)
REPRO_TARGETS = ("hexagon", "smooth", "cone", "discrete", "anisotropy", "selection", "alpha", "designs", "eberlein")


@dataclass
class ExperimentConfig:
    kind: str
    body: str | None = None
    matrix: str | None = None
    measure: str = "hypersurface"
    quadrature: str | None = None
    seed: int | None = None
    output: str | None = None
    params: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown experiment kind {self.kind!r}")
        if self.schema_version != SCHEMA_VERSION:
            raise InvalidInputError(f"unsupported schema version {self.schema_version}")
        if self.randomized and self.seed is None:
            raise InvalidInputError(f"{self.kind}: a seed is required for randomized experiments")

    @property
    def randomized(self) -> bool:
        mc = (self.quadrature or "").startswith("montecarlo") or "samples" in self.params
        return mc or self.kind == "grassmann"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
        if "kind" not in d:
            raise InvalidInputError("config needs a 'kind'")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
        return cls.from_dict(data)

    def hash(self) -> str:
        d = self.to_dict()
        d.pop("output")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


@dataclass
class Outcome:
    result: dict
    tolerances: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> list of row dicts
    passed: bool | None = None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _p(cfg: ExperimentConfig, key: str, default=None):
    return cfg.params.get(key, default)


def _ladder(cfg: ExperimentConfig) -> list[float]:
    eps = _p(cfg, "eps", list(DEFAULT_LADDER))
    return [float(e) for e in (eps if isinstance(eps, list) else [eps])]


def _sphere_rule_for(m: int, text: str | None, seed):
    return parse_rule(text or ("angular:4096" if m == 2 else "product:32"), m, seed)


# -- experiments ----------------------------------------------------------


def _exact(cfg):
    A = parse_matrix(cfg.matrix or "", _p(cfg, "N"))
    n = A.shape[0]
    minors = [1.0] + [lambda_k_minors(A, k) for k in range(1, n + 1)]
    fl = char_poly_coeffs(A)
    return Outcome(
        {
            "N": n,
            "lambda_minors": minors,
            "lambda_faddeev_leverrier": fl,
            "max_abs_difference": float(np.max(np.abs(np.asarray(minors) - fl))),
        },
        {"agreement_rtol": 1e-9},
    )


def _trace_avg(cfg, measure: MeasureSpec):
    A = parse_matrix(cfg.matrix or "", _p(cfg, "N"))
    N = A.shape[0]
    k = int(_p(cfg, "k", 1))
    nk = comb(N, k)
    body = parse_body(cfg.body or "linf", nk)
    quad = cfg.quadrature
    if quad is None:
        samples = _p(cfg, "samples")
        quad = f"montecarlo:{int(float(samples))}" if samples else "facet"
    rule = parse_rule(quad, nk, cfg.seed)
    if rule.scheme == "facet" and isinstance(body, LpBody):
        body = body.as_polytope()
    nodes = boundary_nodes(body, rule)
    res = trace_average_nodes(A, k, body, nodes, measure)
    out = res.to_dict()
    out.update(
        N=N,
        n_k=nk,
        body=body.describe(),
        measure=measure.to_dict(),
        T=res.report.T,
        anisotropy_hs=res.report.hs_norm_anisotropy,
        identity_defect=res.identity_defect,
        n_nodes=res.report.n_nodes,
        quadrature=res.report.quadrature,
    )
    if res.stderr:
        out["z"] = res.discrepancy / res.stderr
    return Outcome(out, {"ridge_tol": RIDGE_TOL, "identity_rtol": 1e-10})


def _isotropy(cfg):
    m = _p(cfg, "m")
    body = parse_body(cfg.body or "hexagon", m)
    measure = MeasureSpec.parse(cfg.measure)
    if cfg.quadrature:
        rule = parse_rule(cfg.quadrature, body.m, cfg.seed)
    elif isinstance(body, PolytopeBody):
        rule = parse_rule("facet", None)
    else:
        rule = _sphere_rule_for(body.m, None, cfg.seed)
    if rule.scheme == "facet" and isinstance(body, LpBody):
        body = body.as_polytope()
    nodes = boundary_nodes(body, rule)
    rep = compute_T(body, measure, rule)
    rng = np.random.default_rng(cfg.seed or 0)
    defect = max(hs_identity_defect(nodes, measure, rng.standard_normal((body.m, body.m))) for _ in range(20))
    out = rep.to_dict()
    out["anisotropy"] = rep.anisotropy
    out["hs_identity_defect"] = defect
    return Outcome(out, {"identity_rtol": 1e-10})


def _discrete(cfg):
    m = _p(cfg, "m")
    body = parse_body(cfg.body or "cube", m)
    if isinstance(body, LpBody):
        body = body.as_polytope()
    if not isinstance(body, PolytopeBody):
        raise InvalidInputError("discrete trace formula needs a polytope")
    A = parse_matrix(cfg.matrix or "", body.m)
    val = discrete_trace(A, body)
    return Outcome(
        {"body": body.describe(), "discrete_trace": val, "trace": float(np.trace(A)), "error": val - np.trace(A)},
        {"atol": 1e-12},
    )


def _design(cfg):
    G = group_from_name(_p(cfg, "group", "hyperoctahedral:3"))
    ks = range(1, G.dim + 1) if _p(cfg, "all_k") else [int(_p(cfg, "k", 1))]
    rows = []
    for k in ks:
        act = induced_action(G, k)
        chk = check_2design(act, trials=int(_p(cfg, "trials", 20)), seed=cfg.seed or 0)
        rows.append({"k": k, **chk.to_dict(), "commutant_dim": commutant_dimension(act)})
    return Outcome(
        {"group": G.describe(), "per_k": rows, "all_designs": all(r["is_design"] for r in rows)},
        {"design_tol": DESIGN_TOL},
        {"design": rows},
    )


def _grassmann(cfg):
    A = parse_matrix(cfg.matrix or "", _p(cfg, "N"))
    N = A.shape[0]
    ks = range(1, N + 1) if _p(cfg, "k") in (None, "all") else [int(_p(cfg, "k"))]
    n = int(float(_p(cfg, "samples", 10**5)))
    rows = [eberlein_lambda(A, k, n, cfg.seed, antithetic=bool(_p(cfg, "antithetic"))).to_dict() for k in ks]
    return Outcome({"N": N, "estimates": rows}, {"z_bound": 3.0}, {"grassmann": rows})


def _perturb(cfg):
    m = int(_p(cfg, "m", 2))
    g = parse_sphere_function(_p(cfg, "g", "cos2phi" if m == 2 else "quadratic:random:seed=0"), m)
    rule = _sphere_rule_for(m, cfg.quadrature, cfg.seed)
    eps = _ladder(cfg)
    checks = _p(cfg, "check", ["L"])
    out: dict = {"m": m, "g": g.describe(), "eps": eps, "quadrature": rule.describe()}
    tables = {}
    proj = project_degree2(g, rule)
    out["projection"] = {
        "ell0": proj.ell0_component,
        "ell2": proj.ell2_component,
        "residual_norm": proj.residual_norm,
    }
    if "L" in checks:
        fv = first_variation_L(g, eps, rule)
        out["first_variation"] = fv.to_dict()
        tables["eps_ladder"] = [
            {"eps": e, **{f"D_{i}{j}": D[i, j] for i in range(m) for j in range(m)}}
            for e, D in zip(fv.eps, fv.central_differences)
        ]
    if "alpha" in checks:
        B = parse_matrix(cfg.matrix, m) if cfg.matrix else np.diag([1.0, -1.0] + [0.0] * (m - 2))
        alpha = float(_p(cfg, "alpha", 2.0))
        out["alpha_cone"] = alpha_cone_derivative(g, B, alpha, eps, rule).to_dict()
        out["alpha_normalization"] = {str(e): alpha_normalization(g, alpha, e, rule) for e in eps}
    if "identities" in checks:
        B = parse_matrix(cfg.matrix, m) if cfg.matrix else np.random.default_rng(cfg.seed or 0).standard_normal((m, m))
        out["identities"] = differential_identities_check(B, m, rule).to_dict()
    return Outcome(out, {"laplacian_atol": 1e-5, "fd_step": 1e-3}, tables)


def _alpha_scan(cfg):
    m = int(_p(cfg, "m", 2))
    g = parse_sphere_function(_p(cfg, "g", "cos2phi"), m)
    B = parse_matrix(cfg.matrix, m) if cfg.matrix else np.diag([1.0, -1.0] + [0.0] * (m - 2))
    rule = _sphere_rule_for(m, cfg.quadrature, cfg.seed)
    eps = _ladder(cfg)
    rows = []
    for a in _p(cfg, "alphas", [0.5, 1.0, 2.0, 3.0]):
        r = alpha_cone_derivative(g, B, float(a), eps, rule)
        rows.append(
            {"alpha": r.alpha, "numeric": r.numeric, "predicted": r.predicted, "integral_term": r.integral_term}
        )
    return Outcome({"m": m, "g": g.describe(), "B": B, "eps": eps, "rows": rows}, {"eps": eps}, {"alpha_scan": rows})


# -- reproduction suite ---------------------------------------------------


def _repro_hexagon():
    body = hexagon()
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    mu = MeasureSpec("hypersurface")
    res = trace_average_nodes(A, 1, body, boundary_nodes(body, parse_rule("facet", None)), mu)
    off = 2 - 3 * sqrt(2) / 2
    return {
        "T": res.report.T,
        "T_offdiag_expected": off,
        "estimate": res.estimate,
        "half_trace_AT": 0.5 * float(np.trace(A @ res.report.T)),
        "half_trace_AT_expected": 1 - 3 * sqrt(2) / 4,
        "exact": res.exact,
        "predicted": res.predicted,
        "cone_T": compute_T(body, MeasureSpec("cone")).T,
        "discrete_trace": discrete_trace(A, body),
    }


def _repro_smooth():
    g = SphereFunction.cos_mode(2)
    rule = sphere_rule(2, "angular", 4096)
    A = np.diag([1.0, -1.0])
    rows = []
    for e in (1e-2, 1e-3):
        body = SmoothSupportBody.perturbation(g, e)
        res = trace_average_nodes(A, 1, body, boundary_nodes(body, rule), MeasureSpec("hypersurface"))
        rows.append({"eps": e, "T": res.report.T, "discrepancy": res.discrepancy, "predicted": res.predicted})
    fv = first_variation_L(g, [1e-2, 1e-3], rule)
    return {"per_eps": rows, "first_order": fv.extrapolated, "first_order_expected": np.diag([-0.5, 0.5])}


def _repro_cone():
    rng = np.random.default_rng(11)
    worst = 0.0
    for m in (3, 4):
        for _ in range(3):
            P = random_polytope(m, 12, rng)
            worst = max(worst, float(np.abs(compute_T(P, MeasureSpec("cone")).T - np.eye(m)).max()))
    return {"max_cone_T_defect": worst, "seed": 11}


def _repro_discrete():
    rng = np.random.default_rng(5)
    worst = 0.0
    for P in (hexagon(), cube(3), cross_polytope(4)):
        A = rng.standard_normal((P.m, P.m))
        worst = max(worst, abs(discrete_trace(A, P) - np.trace(A)))
    return {"max_abs_error": worst, "seed": 5}


def _repro_anisotropy():
    rng = np.random.default_rng(3)
    S = random_traceless(3, rng)
    fv = first_variation_L(SphereFunction.quadratic(S), None, sphere_rule(3, "product", 32))
    return {"S": S, "first_order": fv.extrapolated, "expected": -0.4 * S, "hs_error": fv.hs_error}


def _repro_selection():
    out = {}
    for m, g in ((2, SphereFunction.cos_mode(4)), (3, SphereFunction.cubic_harmonic4(3))):
        fv = first_variation_L(g, None, sphere_rule(m, "angular", 4096) if m == 2 else sphere_rule(3, "product", 32))
        out[f"m{m}"] = float(np.linalg.norm(fv.extrapolated))
    return out


def _repro_alpha():
    g = SphereFunction.cos_mode(2)
    rule = sphere_rule(2, "angular", 4096)
    rows = []
    for a in (0.5, 1.0, 2.0, 3.0):
        r = alpha_cone_derivative(g, np.diag([1.0, -1.0]), a, [1e-2, 1e-3], rule)
        rows.append({"alpha": a, "numeric": r.numeric, "integral_term": r.integral_term, "predicted": r.predicted})
    return {"rows": rows}


def _repro_designs():
    rows = []
    for name in ("hyperoctahedral:3", "dihedral:3", "cyclic:2", "octahedral"):
        G = group_from_name(name)
        for k in range(1, G.dim + 1) if G.dim > 2 else (1,):
            chk = check_2design(induced_action(G, k))
            rows.append({"group": name, "k": k, "is_design": chk.is_design, "max_defect": chk.max_defect})
    return {"rows": rows}


def _repro_eberlein():
    A = np.random.default_rng(3).uniform(-1, 1, (5, 5))
    return {"rows": [eberlein_lambda(A, k, 10**5, seed=7).to_dict() for k in (1, 2, 3)]}


_REPRO = {
    "hexagon": _repro_hexagon,
    "smooth": _repro_smooth,
    "cone": _repro_cone,
    "discrete": _repro_discrete,
    "anisotropy": _repro_anisotropy,
    "selection": _repro_selection,
    "alpha": _repro_alpha,
    "designs": _repro_designs,
    "eberlein": _repro_eberlein,
}


def _repro(cfg):
    target = _p(cfg, "target", "all")
    names = list(REPRO_TARGETS) if target == "all" else [target]
    for n in names:
        if n not in _REPRO:
            raise InvalidInputError(f"unknown repro target {n!r}; choose from {', '.join(REPRO_TARGETS)} or all")
    workers = _workers()
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda n: _REPRO[n](), names))
    else:
        parts = [_REPRO[n]() for n in names]
    return Outcome(dict(zip(names, parts)), {"exact_atol": 1e-12, "design_tol": DESIGN_TOL})


_RUNNERS = {
    "exact": _exact,
    "cone-avg": lambda c: _trace_avg(c, MeasureSpec("cone")),
    "hyper-avg": lambda c: _trace_avg(c, MeasureSpec("hypersurface")),
    "isotropy": _isotropy,
    "discrete": _discrete,
    "design-check": _design,
    "grassmann": _grassmann,
    "perturb": _perturb,
    "alpha-scan": _alpha_scan,
    "repro": _repro,
}


def build_report(cfg: ExperimentConfig) -> tuple[dict, dict]:
    """Run ``cfg`` and return ``(report, tables)``."""
    outcome = _RUNNERS[cfg.kind](cfg)
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "tolerances": outcome.tolerances,
        "result": outcome.result,
    }
    return _jsonable(report), _jsonable(outcome.tables)


def write_csv(path, rows: list[dict]) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def run(cfg: ExperimentConfig, csv_dir: str | None = None, stream=None) -> dict:
    """Execute ``cfg``; write the JSON report to ``cfg.output`` (or ``stream``) and CSV tables."""
    report, tables = build_report(cfg)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        (stream or sys.stdout).write(text)
    if csv_dir:
        d = Path(csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, rows in tables.items():
            write_csv(d / f"{name}.csv", rows)
    return report


# -- argument parsing -----------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInputError(message)


def _csv_floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _count(text: str) -> int:
    return int(float(text))


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trace-forms", description="Higher traces as averages over normed unit spheres.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--csv-dir", help="directory for CSV sweep tables")
        sp.add_argument("--dump-config", action="store_true", help="print the config and exit")
        if seed:
            sp.add_argument("--seed", type=int)

    sp = sub.add_parser("run", help="run a saved experiment config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--csv-dir")

    sp = sub.add_parser("exact", help="higher traces by minors and Faddeev-LeVerrier")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--N", type=int)
    common(sp)

    for name in ("cone-avg", "hyper-avg"):
        sp = sub.add_parser(name, help=f"trace-average estimate of lambda_k ({name.split('-')[0]} measure)")
        sp.add_argument("--N", type=int)
        sp.add_argument("--k", type=int, default=1)
        sp.add_argument("--body", default="linf", help="body in the wedge space (named or .json)")
        sp.add_argument("--matrix", required=True)
        sp.add_argument("--samples", type=_count)
        sp.add_argument("--quadrature")
        common(sp)

    sp = sub.add_parser("isotropy", help="isotropy operator T of a body")
    sp.add_argument("--body", required=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--measure", default="hypersurface")
    sp.add_argument("--quadrature")
    common(sp)

    sp = sub.add_parser("discrete", help="facet-centroid trace formula on a polytope")
    sp.add_argument("--body", required=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--matrix", required=True)
    common(sp)

    sp = sub.add_parser("design-check", help="orthogonal 2-design test of an induced action")
    sp.add_argument("--group", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--all-k", action="store_true")
    sp.add_argument("--trials", type=int, default=20)
    common(sp)

    sp = sub.add_parser("grassmann", help="Monte Carlo Grassmannian average of compressions")
    sp.add_argument("--N", type=int)
    sp.add_argument("--k", default="all")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--samples", type=_count, default=10**5)
    sp.add_argument("--antithetic", action="store_true")
    common(sp)

    sp = sub.add_parser("perturb", help="first variation of T around the ball")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--g")
    sp.add_argument("--eps", type=_csv_floats)
    sp.add_argument("--check", default="L")
    sp.add_argument("--alpha", type=float, default=2.0)
    sp.add_argument("--matrix", help="B for the alpha and identity checks")
    sp.add_argument("--quadrature")
    common(sp)

    sp = sub.add_parser("alpha-scan", help="alpha-cone derivative over a grid of alpha")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--g", default="cos2phi")
    sp.add_argument("--alphas", type=_csv_floats, default=[0.5, 1.0, 2.0, 3.0])
    sp.add_argument("--eps", type=_csv_floats)
    sp.add_argument("--matrix", help="B (default diag(1,-1,0,...))")
    sp.add_argument("--quadrature")
    common(sp)

    sp = sub.add_parser("repro", help="reproduction suite")
    sp.add_argument("target", nargs="?", default="all", choices=REPRO_TARGETS + ("all",))
    common(sp, seed=False)
    return p


def config_from_args(a: argparse.Namespace) -> ExperimentConfig:
    kind = a.command
    params: dict = {}
    get = lambda name: getattr(a, name, None)  # noqa: E731
    for key in ("N", "k", "m", "samples", "trials", "g", "alpha"):
        if get(key) is not None:
            params[key] = get(key)
    if get("all_k"):
        params["all_k"] = True
        params.pop("k", None)
    if get("group"):
        params["group"] = a.group
    if get("eps"):
        params["eps"] = a.eps
    if kind == "alpha-scan":
        params["alphas"] = a.alphas
    if kind == "perturb":
        params["check"] = [c.strip() for c in a.check.split(",") if c.strip()]
    if get("antithetic"):
        params["antithetic"] = True
    if kind == "repro":
        params["target"] = a.target
    return ExperimentConfig(
        kind=kind,
        body=get("body"),
        matrix=get("matrix"),
        measure=get("measure") or "hypersurface",
        quadrature=get("quadrature"),
        seed=get("seed"),
        output=get("out"),
        params=params,
    )


def _error_payload(exc: Exception, context: str) -> dict:
    code = getattr(exc, "code", "error")
    return {"error": {"type": type(exc).__name__, "code": code, "message": str(exc), "context": context}}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    context = argv[0] if argv else ""
    try:
        args = _parser().parse_args(argv)
        if args.command == "run":
            cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        else:
            cfg = config_from_args(args)
            if args.dump_config:
                sys.stdout.write(cfg.to_json() + "\n")
                return 0
        run(cfg, csv_dir=getattr(args, "csv_dir", None))
        return 0
    except InvalidInputError as exc:
        json.dump(_error_payload(exc, context), sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (TraceFormsError, ValueError, OSError, KeyError) as exc:
        json.dump(_error_payload(exc, context), sys.stderr)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
