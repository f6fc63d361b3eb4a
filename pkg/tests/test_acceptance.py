"""Acceptance battery: one check per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import time
from math import comb, sqrt
from pathlib import Path

import numpy as np
import pytest

from traceforms.bodies import LpBody, SmoothSupportBody, cross_polytope, cube, hexagon, random_polytope
from traceforms.exterior import hodge_matrix_3d
from traceforms.grassmann import eberlein_lambda
from traceforms.groups import check_2design, cyclic, dihedral, hyperoctahedral, induced_action, platonic
from traceforms.harmonics import alpha_cone_derivative, first_variation_L, moment2_4
from traceforms.isotropy import compute_T, discrete_trace, trace_average_nodes
from traceforms.measures import MeasureSpec, boundary_nodes, facet_rule, montecarlo_rule, sphere_rule
from traceforms.specs import random_traceless
from traceforms.spherefun import SphereFunction

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
MU, NU = MeasureSpec("hypersurface"), MeasureSpec("cone")
LINES: list[str] = []
# (estimate - exact) vs <Λ^k A, T - I> pairs gathered by criteria 1-9, checked in 10
SHARED_NODE_PAIRS: list[tuple[str, float, float, float]] = []


def record(cid: str, ok: bool, detail: str, elapsed: float, limit: float | None) -> bool:
    within = limit is None or elapsed < limit
    passed = ok and within
    timing = f"{elapsed:.2f}s" + (f" < {limit:g}s" if limit and within else f" (limit {limit:g}s)" if limit else "")
    LINES.append(f"criterion {cid}: {'PASS' if passed else 'FAIL'} | {detail} | {timing}")
    print(LINES[-1])
    return passed


def shared(label, res):
    SHARED_NODE_PAIRS.append((label, res.discrepancy, res.predicted, max(1.0, abs(res.estimate))))


# ---------------------------------------------------------------------------


def c1a():
    body = hexagon()
    res = trace_average_nodes(np.array([[0.0, 1.0], [0.0, 0.0]]), 1, body, boundary_nodes(body, facet_rule()), MU)
    shared("hexagon", res)
    off = 2 - 3 * sqrt(2) / 2
    target = np.array([[1, off], [off, 1]])
    err = max(np.abs(res.report.T - target).max(), np.abs(res.report.T - np.array(ORACLES["hexagon"]["T"])).max())
    return err <= 1e-12, f"max |T - [[1, 2-3*sqrt2/2], ...]| = {err:.2e} (tol 1e-12)", 1.0


def c1b():
    body = hexagon()
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    res = trace_average_nodes(A, 1, body, boundary_nodes(body, facet_rule()), MU)
    target = 1 - 3 * sqrt(2) / 4
    err = abs(res.estimate - target)
    detail = (
        f"trace-average n_k*int<Aw,w*>dmu = tr(AT) = {res.estimate:.12f}, target 1-3*sqrt2/4 = {target:.12f}, "
        f"|diff| = {err:.2e} (tol 1e-12); plain mean coefficient tr(AT)/2 = {res.mean_coefficient:.12f}"
    )
    return err <= 1e-12, detail, 1.0


def c2():
    rng = np.random.default_rng(2024)
    worst = 0.0
    asym = 0
    for m in (3, 4):
        for _ in range(10):
            P = random_polytope(m, 16, rng)
            asym += not P.symmetric
            rep = compute_T(P, NU)
            worst = max(worst, float(np.abs(rep.T - np.eye(m)).max()))
            A = rng.standard_normal((m, m))
            shared(f"cone-{m}d", trace_average_nodes(A, 1, P, boundary_nodes(P, facet_rule()), NU))
    smooth = 0.0
    for g in (SphereFunction.cos_mode(2), SphereFunction.cos_mode(4), SphereFunction.cos_mode(2) + SphereFunction.cos_mode(6).scaled(0.3)):
        body = SmoothSupportBody.perturbation(g, 0.01)
        smooth = max(smooth, float(np.abs(compute_T(body, NU, sphere_rule(2, "angular", 4096)).T - np.eye(2)).max()))
    ok = worst <= 1e-12 and smooth <= 1e-8 and asym == 20
    return ok, f"20 asymmetric polytopes: max|T-I| = {worst:.2e} (tol 1e-12); smooth m=2: {smooth:.2e} (tol 1e-8)", 10.0


def c3():
    rng = np.random.default_rng(7)
    bodies = [hexagon(), cube(3), cross_polytope(4), random_polytope(3, 15, rng), random_polytope(4, 20, rng)]
    worst = 0.0
    for P in bodies:
        for _ in range(20):
            A = rng.standard_normal((P.m, P.m))
            worst = max(worst, abs(discrete_trace(A, P) - np.trace(A)))
    return worst <= 1e-12, f"100 (A, polytope) pairs: max |centroid formula - tr A| = {worst:.2e} (tol 1e-12)", 5.0


def c4():
    worst_b = 0.0
    for n in range(1, 6):
        G = hyperoctahedral(n)
        for k in range(1, n + 1):
            worst_b = max(worst_b, check_2design(induced_action(G, k), trials=5).max_defect)
    dih = [check_2design(induced_action(dihedral(m), 1)) for m in (3, 4, 5, 6)]
    plat = []
    for name in ("tetrahedral", "octahedral", "icosahedral"):
        G = platonic(name)
        act2 = induced_action(G, 2)
        H = hodge_matrix_3d()
        act2.matrices = np.einsum("ij,gjk,lk->gil", H, act2.matrices, H)
        plat += [check_2design(induced_action(G, 1)), check_2design(act2)]
    c2g = check_2design(induced_action(cyclic(2), 1))
    ok = (
        worst_b < 1e-10
        and all(d.is_design for d in dih)
        and all(p.is_design for p in plat)
        and not c2g.is_design
        and c2g.max_defect >= 0.5
    )
    detail = (
        f"B_1..B_5 all k max defect {worst_b:.2e}; D_3..D_6 {max(d.max_defect for d in dih):.2e}; "
        f"Platonic on Λ¹/Λ² {max(p.max_defect for p in plat):.2e}; C_2 defect {c2g.max_defect:.3f} (>= 0.5, not a design)"
    )
    return ok, detail, 120.0


def c5():
    g = SphereFunction.cos_mode(2)
    rule = sphere_rule(2, "angular", 4096)
    fv = first_variation_L(g, [1e-2, 1e-3], rule)
    target = np.diag([-0.5, 0.5])
    rel = np.linalg.norm(fv.extrapolated - target) / np.linalg.norm(target)
    worst = 0.0
    for eps in (1e-2, 1e-3):
        body = SmoothSupportBody.perturbation(g, eps)
        res = trace_average_nodes(np.diag([1.0, -1.0]), 1, body, boundary_nodes(body, rule), MU)
        shared(f"smooth-{eps:g}", res)
        worst = max(worst, abs(res.discrepancy + eps) / (5 * eps**2 + 1e-12))
    ok = rel <= 1e-3 and worst <= 1
    return ok, f"first-order rel err {rel:.2e} (tol 1e-3); max |err + eps| / (5 eps^2 + 1e-12) = {worst:.3f} (<= 1)", 10.0


def c6():
    rng = np.random.default_rng(6)
    rule = sphere_rule(3, "product", 32)
    worst = 0.0
    for _ in range(5):
        S = random_traceless(3, rng)
        fv = first_variation_L(SphereFunction.quadratic(S), None, rule)
        worst = max(worst, np.linalg.norm(fv.extrapolated + 0.4 * S) / np.linalg.norm(0.4 * S))
    return worst <= 0.01, f"5 random traceless S: max rel |A(eps)/eps -> L - (-0.4 S)| = {worst:.2e} (tol 1e-2)", 60.0


def c7():
    cases = [
        (SphereFunction.cos_mode(4), sphere_rule(2, "angular", 4096)),
        (SphereFunction.cubic_harmonic4(3), sphere_rule(3, "product", 32)),
        (SphereFunction.planar_harmonic4(3), sphere_rule(3, "product", 32)),
        (SphereFunction.cubic_harmonic4(3).rotated(np.linalg.qr(np.random.default_rng(1).standard_normal((3, 3)))[0]),
         sphere_rule(3, "product", 32)),
    ]
    worst = max(float(np.linalg.norm(first_variation_L(g, None, r).extrapolated)) for g, r in cases)
    return worst < 1e-6, f"degree-4 harmonics (m=2, m=3 x3): max ||L(g)||_HS = {worst:.2e} (tol 1e-6)", 30.0


def c8():
    g = SphereFunction.cos_mode(2)
    B = np.diag([1.0, -1.0])
    rule = sphere_rule(2, "angular", 4096)
    rows, ok = [], True
    for a in (0.5, 1.0, 2.0, 3.0):
        r = alpha_cone_derivative(g, B, a, [1e-2, 1e-3], rule)
        target = (a - 1) / 2
        tol = 1e-6 if a == 1 else 1e-3
        good = abs(r.numeric - target) <= tol
        ok &= good
        rows.append(f"a={a:g}: {r.numeric:+.6f} vs {target:+.3f} {'ok' if good else 'MISS'}")
    return ok, "numeric d<B,T>/deps vs (a-1)/2: " + "; ".join(rows), 60.0


def c9():
    worst_hits = 20
    zs = []
    for k in (1, 2, 3):
        hits = 0
        for i, case in enumerate(ORACLES["eberlein"]):
            A = np.array(case["A"])
            r = eberlein_lambda(A, k, 10**6, seed=1000 * k + i)
            z = (r.estimate - case["lambda"][k]) / r.stderr
            zs.append(z)
            hits += abs(z) <= 3
        worst_hits = min(worst_hits, hits)
    return worst_hits >= 19, f"min over k of #(|z| <= 3) = {worst_hits}/20; max |z| = {np.max(np.abs(zs)):.2f}", 120.0


def c10():
    # also a Monte Carlo wedge-space case, k = 2 on the l_inf ball of R^6
    A = np.random.default_rng(3).uniform(-1, 1, (4, 4))
    body = LpBody(6, np.inf)
    shared("linf-wedge-mc", trace_average_nodes(A, 2, body, boundary_nodes(body, montecarlo_rule(10**5, seed=7, m=6)), NU))
    worst = max(abs(d - p) / s for _, d, p, s in SHARED_NODE_PAIRS)
    return worst <= 1e-10, f"{len(SHARED_NODE_PAIRS)} shared-node pairs: max rel |discrepancy - <Λ^kA, T-I>| = {worst:.2e}", None


def c11():
    rng = np.random.default_rng(11)
    exact_err = 0.0
    for P in (hexagon(), cube(3), cross_polytope(4), random_polytope(3, 15, rng), random_polytope(4, 18, rng)):
        nodes = boundary_nodes(P, facet_rule())
        for _ in range(5):
            B = rng.standard_normal((P.m, P.m))
            lhs = nodes.dsigma @ np.einsum("ni,ij,nj->n", nodes.n_e, B, nodes.x)
            exact_err = max(exact_err, abs(lhs - np.trace(B) * P.volume) / max(1.0, abs(np.trace(B) * P.volume)))
    smooth_err = 0.0
    o = ORACLES["smooth_m2"]
    smooth_cases = [
        (SmoothSupportBody.perturbation(SphereFunction.cos_mode(2), o["eps"]), sphere_rule(2, "angular", 4096), o["area"]),
        (SmoothSupportBody.perturbation(SphereFunction.quadratic(np.diag([1.0, -0.5, -0.5])), 0.05),
         sphere_rule(3, "product", 48), None),
    ]
    for body, rule, vol in smooth_cases:
        vol = vol if vol is not None else body.volume
        nodes = boundary_nodes(body, rule)
        for _ in range(5):
            B = rng.standard_normal((body.m, body.m))
            lhs = nodes.dsigma @ np.einsum("ni,ij,nj->n", nodes.n_e, B, nodes.x)
            smooth_err = max(smooth_err, abs(lhs - np.trace(B) * vol) / max(1.0, abs(np.trace(B)) * vol))
    worst_z = 0.0
    for body, seed in ((LpBody(3, 3.0), 1), (LpBody(4, 1.5), 2), (LpBody(3, np.inf), 3)):
        nodes = boundary_nodes(body, montecarlo_rule(200_000, seed=seed, m=body.m))
        B = rng.standard_normal((body.m, body.m))
        vals = len(nodes) * nodes.dsigma * np.einsum("ni,ij,nj->n", nodes.n_e, B, nodes.x)
        se = vals.std(ddof=1) / np.sqrt(len(nodes))
        worst_z = max(worst_z, abs(vals.mean() - np.trace(B) * body.volume) / se)
    ok = exact_err <= 1e-12 and smooth_err <= 1e-8 and worst_z <= 3
    detail = f"polytopes rel err {exact_err:.2e}; smooth rel err {smooth_err:.2e} (tol 1e-8); l_p Monte Carlo max |z| {worst_z:.2f}"
    return ok, detail, 30.0


def c12():
    det = 0.0
    for m, rule in ((2, sphere_rule(2, "angular", 64)), (3, sphere_rule(3, "product", 12)), (4, sphere_rule(4, "product", 12))):
        chk = moment2_4(m, rule)
        o = ORACLES["moments"][str(m)]
        det = max(det, chk.M2_defect, chk.M4_defect, abs(chk.M2[0, 0] - o["u1^2"]))
    mc = moment2_4(6, sphere_rule(6, "montecarlo", 10**6, seed=7))
    z2 = np.abs(mc.M4 - mc.M4_expected) / mc.M4_stderr
    frac = float(np.mean(z2 <= 3))
    ok = det <= 1e-12 and z2[:2].max() <= 3 and frac >= 0.95
    detail = (
        f"m=2,3,4 max moment defect {det:.2e} (tol 1e-12); m=6 Monte Carlo: u1^4, u1^2u2^2 |z| = "
        f"{z2[0]:.2f}, {z2[1]:.2f}; {100 * frac:.0f}% of {len(z2)} quadruples within 3 stderr"
    )
    return ok, detail, 60.0


CRITERIA = [
    ("1a", c1a), ("1b", c1b), ("2", c2), ("3", c3), ("4", c4), ("5", c5), ("6", c6),
    ("7", c7), ("8", c8), ("9", c9), ("10", c10), ("11", c11), ("12", c12),
]


def run_criterion(cid, fn) -> bool:
    t0 = time.perf_counter()
    ok, detail, limit = fn()
    return record(cid, bool(ok), detail, time.perf_counter() - t0, limit)


@pytest.mark.parametrize("cid,fn", CRITERIA, ids=[c for c, _ in CRITERIA])
def test_criterion(cid, fn):
    assert run_criterion(cid, fn), LINES[-1]


if __name__ == "__main__":
    results = [run_criterion(cid, fn) for cid, fn in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
