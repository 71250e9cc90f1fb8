"""Named, self-checking numerical experiments with pass/fail verdicts and tables."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .bodies import (
    Ball,
    Cone,
    Ellipsoid,
    HPolytope,
    PolarOfPolytope,
    cube,
    hausdorff_distance,
    hemisphere_margin,
    regular_polygon,
)
from .errors import InvalidInputError
from .functionals import (
    DensityMeasure,
    DiscreteMeasure,
    check_growth_condition,
    dual_volume,
    exponential_g,
    general_volume,
    homogeneous_dual_volume,
    homogeneous_general_volume,
    isoperimetric_ratio,
    objective_integral,
    orlicz_mixed_volume,
    orlicz_norm,
    polynomial_g,
    power_g,
    power_phi,
    texp_phi,
    weighted_power_g,
)
from .solver import (
    brute_force_oracle,
    continuity_experiment,
    counterexample_sweep,
    make_problem,
    petty_problem,
    search_bound,
    solve_discrete,
    uniqueness_probe,
)
from .sphere import ball_volume, product_rule, random_directions, rotation_sending


@dataclass
class ExperimentReport:
    name: str
    passed: bool
    metrics: dict
    table: str | None = None
    runtime_ms: int = 0
    criterion: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "criterion": self.criterion,
            "metrics": self.metrics,
            "table": self.table,
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class Experiment:
    func: Callable[[dict], tuple]
    defaults: dict
    criterion: str
    claims: tuple = ()


REGISTRY: dict[str, Experiment] = {}

# Theorem-level claims and the experiments that reproduce them.
CLAIMS = {
    "rotation invariance of the general dual volume": ("rotation-invariance",),
    "integrals converge under uniform and weak convergence": ("weak-convergence-integrals",),
    "homogeneous dual volume is homogeneous of degree one": ("hat-homogeneity",),
    "homogeneous dual volume is continuous": ("hat-continuity",),
    "homogeneous dual volume is strictly monotone under inclusion": ("hat-monotonicity",),
    "growth condition certificates and failure for decreasing G": ("growth-condition",),
    "dual volume of the cone": ("cone-dual-volume",),
    "polar dual volume diverges for flattening bodies": ("flattening-divergence",),
    "discrete problems have polytope solutions with the given facet normals": ("polytope-solution",),
    "extrema over the homogeneous constraint set are unattained": (
        "counterexample-inf-decreasing",
        "counterexample-sup-increasing",
        "counterexample-sup-decreasing",
    ),
    "optimal values and bodies depend continuously on the measure": ("continuity",),
    "solutions are unique for convex phi and G": ("uniqueness",),
    "Orlicz norm normalization, homogeneity and monotonicity": ("orlicz-norm-identities",),
    "Orlicz norm objectives: existence, uniqueness and continuity": ("norm-objective",),
    "general volume and its homogeneous version": ("general-volume-identities",),
    "isoperimetric inequality": ("isoperimetric",),
    "Jensen chain behind interiority for general volumes": ("jensen-chain",),
    "problems constrained by general volumes of the polar": ("general-volume-solver",),
    "Petty bodies for Orlicz mixed volumes": ("petty",),
    "quadrature convergence of the closed-form anchors": ("quadrature-convergence",),
}


def register(name: str, criterion: str, **defaults):
    def wrap(func):
        REGISTRY[name] = Experiment(func, defaults, criterion)
        return func

    return wrap


def registry_names() -> list[str]:
    return sorted(REGISTRY)


def _csv(rows: list[dict]) -> str | None:
    if not rows:
        return None
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    return buf.getvalue()


def _strictly_increasing(values) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) > 0))


def _strictly_decreasing(values) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) < 0))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def run_experiment(name: str, config_overrides: dict | None = None) -> ExperimentReport:
    """Run a registered experiment with its defaults updated by ``config_overrides``."""
    if name not in REGISTRY:
        raise InvalidInputError(f"unknown experiment {name!r}; registered: {', '.join(registry_names())}")
    exp = REGISTRY[name]
    config = dict(exp.defaults)
    for key, value in (config_overrides or {}).items():
        if key not in config:
            raise InvalidInputError(f"experiment {name!r} has no setting {key!r}; settings: {sorted(config)}")
        config[key] = value
    start = time.perf_counter()
    passed, metrics, rows = exp.func(config)
    elapsed = int(round(1000 * (time.perf_counter() - start)))
    metrics = {k: float(v) for k, v in metrics.items()}
    return ExperimentReport(name, bool(passed), metrics, _csv(rows), elapsed, exp.criterion)


def write_report(report: ExperimentReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{report.name}.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    if report.table:
        (out / f"{report.name}.csv").write_text(report.table, encoding="utf-8")


# Instance catalog shared by several experiments.


def asymmetric_quad() -> DiscreteMeasure:
    ang = np.array([0.1, 1.9, 3.3, 4.6])
    return DiscreteMeasure(np.column_stack([np.cos(ang), np.sin(ang)]), [1.0, 2.0, 1.5, 0.7])


def asymmetric_pentagon() -> DiscreteMeasure:
    ang = np.array([0.0, 1.1, 2.5, 3.9, 5.0])
    return DiscreteMeasure(np.column_stack([np.cos(ang), np.sin(ang)]), [1.0, 0.5, 2.0, 1.0, 1.5])


def asymmetric_triangle() -> DiscreteMeasure:
    ang = np.array([0.3, 2.2, 4.0])
    return DiscreteMeasure(np.column_stack([np.cos(ang), np.sin(ang)]), [1.0, 2.0, 3.0])


def equal_polygon(m: int) -> DiscreteMeasure:
    ang = 2.0 * np.pi * np.arange(m) / m
    return DiscreteMeasure(np.column_stack([np.cos(ang), np.sin(ang)]), np.ones(m))


def octahedral() -> DiscreteMeasure:
    return DiscreteMeasure(np.vstack([np.eye(3), -np.eye(3)]), np.ones(6))


def random_spatial(m: int = 7, seed: int = 7) -> DiscreteMeasure:
    rng = np.random.default_rng(seed)
    while True:
        u = random_directions(rng, m, 3)
        if hemisphere_margin(u) > 0.2:
            return DiscreteMeasure(u, rng.uniform(0.5, 2.0, m))


def random_polytope(rng: np.random.Generator, n: int, m: int) -> HPolytope:
    while True:
        u = random_directions(rng, m, n)
        if hemisphere_margin(u) > 0.1:
            return HPolytope(u, rng.uniform(0.5, 2.0, m))


def catalog_polytopes() -> list[HPolytope]:
    rng = np.random.default_rng(11)
    simplex = HPolytope([[-1, 0], [0, -1], [1 / math.sqrt(2), 1 / math.sqrt(2)]], [1, 1, 1 / math.sqrt(2)])
    return [
        cube(2),
        cube(3),
        simplex,
        regular_polygon(7, 1.3, 0.2),
        random_polytope(rng, 2, 9),
        random_polytope(rng, 3, 10),
        PolarOfPolytope(cube(3)).as_hpolytope(),
    ]


def _g_choices(n: int):
    return [power_g(n, dimension=n), polynomial_g([0.5, 0.25], [n - 1.0, n + 1.0]), exponential_g(0.2, 1.0)]


@register("rotation-invariance", "max relative change of the dual volume under 5 random rotations <= tol", tol=1e-9, resolution=48, seed=1)
def _rotation_invariance(cfg):
    rng = np.random.default_rng(cfg["seed"])
    rule = product_rule(3, cfg["resolution"])
    body = Ellipsoid([1.0, 0.7, 0.4])
    g = power_g(3, dimension=3)
    aniso = weighted_power_g(3, 1 / 3, [0, 0, 1], 0.8)
    base = dual_volume(g, body, rule)
    base_aniso = dual_volume(aniso, body, rule)
    rows, worst, aniso_change = [], 0.0, 0.0
    for k in range(5):
        t = rotation_sending(random_directions(rng, 1, 3)[0], random_directions(rng, 1, 3)[0])
        rotated = Ellipsoid(body.semiaxes, t)
        v = dual_volume(g, rotated, rule)
        va = dual_volume(aniso, rotated, rule)
        worst = max(worst, _rel(v, base))
        aniso_change = max(aniso_change, _rel(va, base_aniso))
        rows.append({"rotation": k, "dual_volume": v, "relative_change": _rel(v, base), "anisotropic_change": _rel(va, base_aniso)})
    # The direction-dependent G is a control: it must notice the rotation.
    passed = worst <= cfg["tol"] and aniso_change > 1e-3
    return passed, {"max_rel_change": worst, "anisotropic_max_change": aniso_change}, rows


@register("hat-homogeneity", "max relative error of Vhat_G(sK) = s Vhat_G(K) <= tol", tol=1e-8, scales=[0.5, 2.0, 7.0])
def _hat_homogeneity(cfg):
    rule = product_rule(3)
    bodies = {
        "ellipsoid": Ellipsoid([1.0, 0.6, 1.4]),
        "polytope": catalog_polytopes()[5],
        "polar_polytope": PolarOfPolytope(cube(3, 0.8)),
    }
    rows, worst = [], 0.0
    for g in _g_choices(3):
        for bname, body in bodies.items():
            base = homogeneous_dual_volume(g, body, rule)
            for s in cfg["scales"]:
                v = homogeneous_dual_volume(g, body.scaled(s), rule)
                err = _rel(v, s * base)
                worst = max(worst, err)
                rows.append({"g": g.name, "body": bname, "s": s, "value": v, "rel_err": err})
    return worst <= cfg["tol"], {"max_rel_err": worst}, rows


@register("hat-continuity", "|Vhat_G(P_m) - Vhat_G(B)| strictly decreasing in m for circumscribed m-gons", sizes=[8, 16, 32, 64, 128], resolution=4096)
def _hat_continuity(cfg):
    rule = product_rule(2, cfg["resolution"])
    g = power_g(2, dimension=2)
    ball = homogeneous_dual_volume(g, Ball(1.0, 2), rule)
    rows = []
    for m in cfg["sizes"]:
        v = homogeneous_dual_volume(g, regular_polygon(m), rule)
        rows.append({"m": m, "value": v, "error": abs(v - ball)})
    errs = [r["error"] for r in rows]
    return _strictly_decreasing(errs), {"final_error": errs[-1], "first_error": errs[0]}, rows


def nested_pairs():
    base = catalog_polytopes()[5]
    grown = base.with_offsets(base.offsets * np.where(np.arange(base.m) % 2 == 0, 1.3, 1.0))
    return [
        ("ball", Ball(1.0, 3), Ball(1.1, 3)),
        ("cube", cube(3), cube(3, 1.1)),
        ("ellipsoid-in-ball", Ellipsoid([1.0, 0.5, 0.8]), Ball(1.0, 3)),
        ("polytope-offsets", base, grown),
        ("polar-polytopes", PolarOfPolytope(cube(3, 1.2)), PolarOfPolytope(cube(3))),
    ]


@register("hat-monotonicity", "Vhat_G(K) < Vhat_G(L) on 5 nested pairs and 3 choices of G")
def _hat_monotonicity(cfg):
    rule = product_rule(3)
    rows, ok, min_gap = [], True, math.inf
    for g in _g_choices(3):
        for name, inner, outer in nested_pairs():
            a = homogeneous_dual_volume(g, inner, rule)
            b = homogeneous_dual_volume(g, outer, rule)
            ok &= a < b
            min_gap = min(min_gap, (b - a) / b)
            rows.append({"g": g.name, "pair": name, "inner": a, "outer": b})
    return ok, {"min_relative_gap": min_gap, "pairs": len(rows)}, rows


@register("cone-dual-volume", "relative error of the cone's dual volume vs V(B^(n-1)) / (n R^(n-1) r) <= tol", tol=1e-3, R=1.0, r=0.5, resolution=48)
def _cone(cfg):
    n = 3
    rule = product_rule(n, cfg["resolution"])
    cone = Cone(cfg["R"], cfg["r"], [0, 0, 1])
    v = dual_volume(power_g(n, dimension=n), cone, rule)
    exact = ball_volume(n - 1) / (n * cfg["R"] ** (n - 1) * cfg["r"])
    err = _rel(v, exact)
    return err <= cfg["tol"], {"value": v, "exact": exact, "rel_err": err}, [{"value": v, "exact": exact, "rel_err": err}]


@register("growth-condition", "certificates hold for t^n/n (q = n-1) and t/n (q in (1-n, 0)); fail for decreasing G")
def _growth(cfg):
    rows = []
    checks = [
        ("t^3/3, q=2", power_g(3, dimension=3), 2.0, True, 1 / 3),
        ("t^2/3, q=2", power_g(2, dimension=3), 2.0, True, 1 / 3),
        ("1/t, q=2", power_g(-1, 1.0), 2.0, False, None),
        ("t/3, q=-1", power_g(1, dimension=3), -1.0, True, 1 / 3),
        ("exp, q=2", exponential_g(0.2), 2.0, True, None),
    ]
    ok = True
    for label, g, q, expect, inf_exact in checks:
        cert = check_growth_condition(g, q, 3)
        good = cert.holds == expect and (inf_exact is None or abs(cert.inf_estimate - inf_exact) <= 1e-12)
        ok &= good
        rows.append({"case": label, "q": q, "holds": cert.holds, "inf_estimate": cert.inf_estimate, "expected": expect})
    return ok, {"cases": len(rows), "all_as_expected": ok}, rows


@register("flattening-divergence", "polar dual volume strictly increasing as the minimal width shrinks", widths=[0.5, 0.1, 0.02])
def _flattening(cfg):
    rule = product_rule(3)
    g = power_g(3, dimension=3)
    rows = []
    for r in cfg["widths"]:
        z = np.ones(6)
        z[2] = r
        q = cube(3).with_offsets(z)
        rows.append({"width": r, "polar_dual_volume": dual_volume(g, q.polar(), rule), "polar_volume_exact": _box_polar_volume(z)})
    vals = [row["polar_dual_volume"] for row in rows]
    return _strictly_increasing(vals), {"first": vals[0], "last": vals[-1]}, rows


def _box_polar_volume(z) -> float:
    # The polar of a box is the cross-polytope conv{e_i / z_i, -e_{i+3} / z_{i+3}}.
    a = 1.0 / np.asarray(z)
    return (a[0] + a[3]) * (a[1] + a[4]) * (a[2] + a[5]) / 6.0


def solver_instances():
    """Named instances used by the solver experiments and acceptance tests.

    Each entry: (name, spec, oracle keyword arguments).
    """
    p2 = power_phi(2.0)
    g2, g3 = power_g(2, dimension=2), power_g(3, dimension=3)
    return [
        ("triangle-120", make_problem(equal_polygon(3), p2, g2), {"grid_per_axis": 20, "refinements": 3}),
        ("triangle-asym", make_problem(asymmetric_triangle(), p2, g2), {"grid_per_axis": 20, "refinements": 3}),
        ("square", make_problem(equal_polygon(4), p2, g2), {"grid_per_axis": 12, "refinements": 2}),
        ("quad-asym", make_problem(asymmetric_quad(), p2, g2), {"grid_per_axis": 12, "refinements": 3}),
        ("quad-asym-hat", make_problem(asymmetric_quad(), texp_phi(), g2, family="Bhat"), {"grid_per_axis": 12, "refinements": 3}),
        ("octagon", make_problem(equal_polygon(8), p2, g2), {"grid_per_axis": 64, "symmetric": True}),
        ("octahedral", make_problem(octahedral(), p2, g3), {"grid_per_axis": 64, "symmetric": True}),
    ]


@register("polytope-solution", "every instance: facial defect <= 1e-5, residual <= 1e-6, value <= sum(lambda), z* in (0, z_max], oracle within 1e-3")
def _polytope_solution(cfg):
    rows, ok = [], True
    for name, spec, oracle_kw in solver_instances():
        sol = solve_discrete(spec)
        _, oracle = brute_force_oracle(spec, **oracle_kw)
        z_max = search_bound(spec)
        defect = float(np.max(np.abs(sol.facial_defects)))
        rel = (sol.objective_value - oracle) / oracle
        good = (
            sol.converged
            and defect <= 1e-5
            and abs(sol.constraint_residual) <= 1e-6
            and sol.objective_value <= spec.measure.total_mass * (1 + 1e-12)
            and np.all(sol.z_star <= z_max)
            and abs(rel) <= 1e-3
            and sol.objective_value <= oracle + 1e-6
        )
        ok &= bool(good)
        rows.append(
            {"instance": name, "objective": sol.objective_value, "oracle": oracle, "rel_gap": rel, "facial_defect": defect, "residual": sol.constraint_residual, "z_max": z_max, "min_z": float(sol.z_star.min())}
        )
    return ok, {"instances": len(rows), "max_abs_rel_gap": max(abs(r["rel_gap"]) for r in rows)}, rows


def diagonal_atoms(n: int = 2) -> DiscreteMeasure:
    signs = np.array(np.meshgrid(*[[1.0, -1.0]] * n)).reshape(n, -1).T
    return DiscreteMeasure(signs / math.sqrt(n), np.ones(len(signs)))


_SWEEP_DEFAULTS = {"epsilons": [0.5, 0.25, 0.1, 0.05, 0.02], "dimension": 2, "resolution": 4096}


def _sweep(cfg, mode, phi):
    n = cfg["dimension"]
    rule = product_rule(n, cfg["resolution"])
    rows = counterexample_sweep(power_g(n, dimension=n), phi, diagonal_atoms(n), mode, cfg["epsilons"], rule)
    return rows, [r["objective"] for r in rows], [r["f"] for r in rows]


@register("counterexample-inf-decreasing", "objective strictly decreasing, final < 0.1 x initial, f strictly decreasing", p=-2.0, **_SWEEP_DEFAULTS)
def _ce_inf(cfg):
    rows, obj, f = _sweep(cfg, "inf_decreasing", power_phi(cfg["p"]))
    ratio = obj[-1] / obj[0]
    return _strictly_decreasing(obj) and ratio < 0.1 and _strictly_decreasing(f), {"final_over_initial": ratio}, rows


@register("counterexample-sup-increasing", "objective strictly increasing, final > 10 x initial, f strictly decreasing", p=2.0, **_SWEEP_DEFAULTS)
def _ce_sup_inc(cfg):
    rows, obj, f = _sweep(cfg, "sup_increasing", power_phi(cfg["p"]))
    ratio = obj[-1] / obj[0]
    return _strictly_increasing(obj) and ratio > 10 and _strictly_decreasing(f), {"final_over_initial": ratio}, rows


@register("counterexample-sup-decreasing", "f strictly increasing and objective at the smallest eps above its initial value", p=-2.0, **_SWEEP_DEFAULTS)
def _ce_sup_dec(cfg):
    rows, obj, f = _sweep(cfg, "sup_decreasing", power_phi(cfg["p"]))
    ratio = obj[-1] / obj[0]
    return _strictly_increasing(f) and ratio > 1.0, {"final_over_initial": ratio, "objective_monotone": float(_strictly_increasing(obj))}, rows


@register("continuity", "successive differences of optimal values and of Hausdorff distances strictly decrease; values match the symmetric oracle", sizes=[8, 16, 32, 64], resolution=1024)
def _continuity(cfg):
    rule = product_rule(2, cfg["resolution"])
    density = DensityMeasure(lambda u: np.ones(len(u)), rule)
    out = continuity_experiment(density, cfg["sizes"], power_phi(2.0), power_g(2, dimension=2), rule=rule)
    rows = out["rows"]
    values = [r["optimal_value"] for r in rows]
    dists = [r["hausdorff_to_reference"] for r in rows]
    value_deltas = np.abs(np.diff(values))
    dist_deltas = np.abs(np.diff(dists))
    oracle_gap = max(abs(r["optimal_value"] - r["symmetric_value"]) / r["symmetric_value"] for r in rows)
    passed = _strictly_decreasing(value_deltas) and _strictly_decreasing(dist_deltas) and oracle_gap <= 1e-6 and not out["unconverged"]
    return passed, {"oracle_gap": oracle_gap, "last_value_delta": value_deltas[-1] if len(value_deltas) else 0.0, "last_hausdorff": dists[-1]}, rows


@register("weak-convergence-integrals", "|int phi(h_m) dmu_m - int phi(h) dmu| strictly decreasing along lumped measures and circumscribed m-gons", sizes=[8, 16, 32, 64, 128])
def _weak(cfg):
    rule = product_rule(2, 2048)
    phi = power_phi(2.0)
    density = DensityMeasure(lambda u: 1.0 + 0.5 * u[:, 0], rule)
    exact = objective_integral(phi, Ball(1.0, 2), density)
    rows = []
    for m in cfg["sizes"]:
        v = objective_integral(phi, regular_polygon(m, 1.0, 0.1), density.lump(m))
        rows.append({"m": m, "value": v, "error": abs(v - exact)})
    errs = [r["error"] for r in rows]
    return _strictly_decreasing(errs), {"exact": exact, "final_error": errs[-1]}, rows


def uniqueness_instances():
    p2 = power_phi(2.0)
    return [
        ("quad-asym", make_problem(asymmetric_quad(), p2, power_g(2, dimension=2))),
        ("pentagon-asym", make_problem(asymmetric_pentagon(), p2, power_g(2, dimension=2))),
        ("random-spatial", make_problem(random_spatial(), p2, power_g(3, dimension=3))),
    ]


@register("uniqueness", "pairwise Hausdorff dispersion of independent solves <= tol on every instance", starts=8, tol=1e-4)
def _uniqueness(cfg):
    rows, worst = [], 0.0
    for name, spec in uniqueness_instances():
        probe = uniqueness_probe(spec, cfg["starts"])
        worst = max(worst, probe["dispersion"])
        rows.append({"instance": name, "dispersion": probe["dispersion"], "values_spread": float(np.ptp([s.objective_value for s in probe["solutions"]]))})
    return worst <= cfg["tol"], {"max_dispersion": worst}, rows


@register("orlicz-norm-identities", "||1|| = 1, ||c h|| = c ||h||, monotone, power closed form; all within tol", tol=1e-8)
def _norm_identities(cfg):
    rng = np.random.default_rng(5)
    n, m = 3, 12
    mu = DiscreteMeasure(random_directions(rng, m, n), rng.uniform(0.2, 2.0, m))
    h = rng.uniform(0.5, 3.0, m)
    rows, worst = [], 0.0
    for phi in (power_phi(2.0), power_phi(0.5), power_phi(-1.5), texp_phi()):
        one = orlicz_norm(np.ones(m), mu, phi)
        base = orlicz_norm(h, mu, phi)
        errs = {"unit": abs(one - 1.0)}
        for c in (0.5, 3.0):
            errs[f"scale_{c}"] = _rel(orlicz_norm(c * h, mu, phi), c * base)
        bigger = orlicz_norm(h * rng.uniform(1.0, 1.5, m), mu, phi)
        monotone = bigger >= base * (1 - 1e-12)
        if phi.name == "power":
            p = phi.params["p"]
            closed = float((mu.weights @ h**p) / mu.total_mass) ** (1.0 / p)
            errs["closed_form"] = _rel(base, closed)
        w = max(errs.values())
        worst = max(worst, w)
        rows.append({"phi": f"{phi.name}{phi.params.get('p', '')}", "norm": base, "max_err": w, "monotone": monotone})
    ok = worst <= cfg["tol"] and all(r["monotone"] for r in rows)
    return ok, {"max_err": worst}, rows


@register("norm-objective", "norm-objective solves are facial, feasible, match the oracle within 1e-3, share the integral argmin for power phi, and have dispersion <= 1e-4")
def _norm_objective(cfg):
    rows, ok = [], True
    p2 = power_phi(2.0)
    for name, measure, g in [
        ("quad-asym", asymmetric_quad(), power_g(2, dimension=2)),
        ("triangle-asym", asymmetric_triangle(), power_g(2, dimension=2)),
    ]:
        spec = make_problem(measure, p2, g, objective="orlicz_norm")
        sol = solve_discrete(spec)
        _, oracle = brute_force_oracle(spec, grid_per_axis=12, refinements=3)
        integral = solve_discrete(make_problem(measure, p2, g))
        same_body = hausdorff_distance(sol.polytope, integral.polytope, spec.rule)
        disp = uniqueness_probe(spec, 4)["dispersion"]
        defect = float(np.max(np.abs(sol.facial_defects)))
        rel = (sol.objective_value - oracle) / oracle
        good = defect <= 1e-5 and abs(sol.constraint_residual) <= 1e-6 and abs(rel) <= 1e-3 and same_body <= 1e-5 and disp <= 1e-4
        ok &= good
        rows.append({"instance": name, "norm_value": sol.objective_value, "oracle": oracle, "rel_gap": rel, "distance_to_integral_solution": same_body, "dispersion": disp})
    return ok, {"max_rel_gap": max(abs(r["rel_gap"]) for r in rows)}, rows


@register("general-volume-identities", "V_G = Vbar_G = V for G = t/n; Vbar_G(sK) = s^n Vbar_G(K); V_G(tK) strictly increasing; all within tol", tol=1e-9)
def _general_identities(cfg):
    rows, worst, mono = [], 0.0, True
    for k, P in enumerate(catalog_polytopes()):
        n = P.dimension
        g = power_g(1, dimension=n)
        v = P.volume()
        err = max(_rel(general_volume(g, P), v), _rel(homogeneous_general_volume(g, P), v))
        for gg in _g_choices(n):
            base = homogeneous_general_volume(gg, P)
            for s in (0.5, 2.0, 7.0):
                err = max(err, _rel(homogeneous_general_volume(gg, P.scaled(s)), s**n * base))
        for gg in (power_g(1, dimension=n), power_g(0, 1.0), power_g(-0.5, 1.0)):
            vals = [general_volume(gg, P.scaled(t)) for t in (0.5, 1.0, 2.0, 4.0)]
            mono &= _strictly_increasing(vals)
        worst = max(worst, err)
        rows.append({"polytope": k, "dimension": n, "volume": v, "max_rel_err": err})
    return worst <= cfg["tol"] and mono, {"max_rel_err": worst, "scaling_monotone": mono}, rows


@register("isoperimetric", "S >= n V(B)^(1/n) V^((n-1)/n) on random polytopes; regular 64-gon ratio within 0.2% of 1", count=20, seed=3)
def _isoperimetric(cfg):
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    for k in range(cfg["count"]):
        n = 2 if k % 2 == 0 else 3
        P = random_polytope(rng, n, int(rng.integers(n + 2, 12)))
        rows.append({"index": k, "dimension": n, "ratio": isoperimetric_ratio(P)})
    polygon = isoperimetric_ratio(regular_polygon(64))
    ok = all(r["ratio"] >= 1.0 for r in rows) and polygon - 1.0 <= 2e-3
    return ok, {"min_ratio": min(r["ratio"] for r in rows), "polygon64_ratio": polygon}, rows


@register("jensen-chain", "Jensen step and the resulting lower bound on V_G for G = t^q, q in (1-n, 0), on random polytopes", count=12, seed=9)
def _jensen(cfg):
    rng = np.random.default_rng(cfg["seed"])
    rows, ok = [], True
    for k in range(cfg["count"]):
        n = 2 + k % 2
        P = random_polytope(rng, n, int(rng.integers(n + 2, 10)))
        q = (1 - n) * rng.uniform(0.1, 0.9)
        fm = P.facet_measure
        s = fm.total
        lhs = float(fm.areas @ fm.offsets**q) / s
        rhs = (n * P.volume() / s) ** q
        bound = n * ball_volume(n) ** ((1 - q) / n) * P.volume() ** ((n - 1 + q) / n)
        vg = general_volume(power_g(q, 1.0), P)
        good = lhs >= rhs * (1 - 1e-12) and vg >= bound * (1 - 1e-12)
        ok &= good
        rows.append({"index": k, "dimension": n, "q": q, "jensen_lhs": lhs, "jensen_rhs": rhs, "general_volume": vg, "lower_bound": bound})
    return ok, {"count": len(rows)}, rows


@register("general-volume-solver", "Bgen / Bbar instances are facial, feasible and oracle-matched; all four families agree in the volume case")
def _general_solver(cfg):
    rows, ok = [], True
    measure = asymmetric_quad()
    p2 = power_phi(2.0)
    for family, g in [("Bgen", power_g(1, dimension=2)), ("Bgen", power_g(-0.5, 1.0)), ("Bbar", power_g(2, dimension=2))]:
        spec = make_problem(measure, p2, g, family=family)
        sol = solve_discrete(spec)
        _, oracle = brute_force_oracle(spec, grid_per_axis=12, refinements=3)
        rel = (sol.objective_value - oracle) / oracle
        defect = float(np.max(np.abs(sol.facial_defects)))
        good = defect <= 1e-5 and abs(sol.constraint_residual) <= 1e-6 and abs(rel) <= 1e-3
        ok &= good
        rows.append({"family": family, "g": f"{g.name}{g.params.get('q')}", "objective": sol.objective_value, "oracle": oracle, "rel_gap": rel, "facial_defect": defect})
    # With the volume functional every family prescribes V(Q°) = V(B^2).
    rule = product_rule(2, 4096)
    sols = {
        "Btilde": solve_discrete(make_problem(measure, p2, power_g(2, dimension=2), "Btilde", rule=rule)),
        "Bhat": solve_discrete(make_problem(measure, p2, power_g(2, dimension=2), "Bhat", rule=rule)),
        "Bgen": solve_discrete(make_problem(measure, p2, power_g(1, dimension=2), "Bgen", rule=rule)),
        "Bbar": solve_discrete(make_problem(measure, p2, power_g(1, dimension=2), "Bbar", rule=rule)),
    }
    ref = sols["Bgen"].polytope
    spread = max(hausdorff_distance(s.polytope, ref, rule) for s in sols.values())
    ok &= spread <= 1e-4
    return ok, {"volume_case_spread": spread, "max_rel_gap": max(abs(r["rel_gap"]) for r in rows)}, rows


@register("petty", "mixed volume identities hold; Petty solutions are facial, feasible and oracle-matched")
def _petty(cfg):
    rows, ok = [], True
    p2 = power_phi(2.0)
    triangle = HPolytope([[-1, 0], [0, -1], [1 / math.sqrt(2), 1 / math.sqrt(2)]], [1, 1, 1 / math.sqrt(2)])
    identity_err = 0.0
    for K in (cube(2), triangle, cube(3)):
        identity_err = max(
            identity_err,
            _rel(orlicz_mixed_volume(K, K, p2, "integral"), K.volume()),
            abs(orlicz_mixed_volume(K, K, p2, "hat") - 1.0),
            _rel(orlicz_mixed_volume(K, K.scaled(2.0), power_phi(1.0), "integral"), 2.0 * K.volume()),
        )
    ok &= identity_err <= 1e-9
    for name, K, objective in [("square", cube(2), "integral"), ("triangle", triangle, "integral"), ("triangle-hat", triangle, "orlicz_norm")]:
        spec = petty_problem(K, p2, power_g(2, dimension=2), objective=objective)
        sol = solve_discrete(spec)
        _, oracle = brute_force_oracle(spec, grid_per_axis=20, refinements=3)
        rel = (sol.objective_value - oracle) / oracle
        defect = float(np.max(np.abs(sol.facial_defects)))
        good = defect <= 1e-5 and abs(sol.constraint_residual) <= 1e-6 and abs(rel) <= 1e-3
        ok &= good
        rows.append({"reference": name, "objective": sol.objective_value, "oracle": oracle, "rel_gap": rel, "facial_defect": defect})
    return ok, {"identity_err": identity_err, "max_rel_gap": max(abs(r["rel_gap"]) for r in rows)}, rows


def anchor_values(resolution: int) -> dict:
    """Closed-form anchors evaluated on the n = 3 product rule of the given resolution."""
    rule = product_rule(3, resolution)
    g = power_g(3, dimension=3)
    return {
        "ball_dual_volume": dual_volume(g, Ball(1.0, 3), rule),
        "cone_dual_volume": dual_volume(g, Cone(1.0, 0.5, [0, 0, 1]), rule),
        "ball_hat_dual_volume": homogeneous_dual_volume(g, Ball(1.0, 3), rule),
        "ball_dual_volume_q2": dual_volume(power_g(2, dimension=3), Ball(1.0, 3), rule),
        "ellipsoid_dual_volume": dual_volume(g, Ellipsoid([1.0, 0.7, 0.4]), rule),
    }


@register("quadrature-convergence", "doubling the resolution changes every anchor by < tol (relative)", tol=1e-4, resolution=48)
def _quadrature(cfg):
    a = anchor_values(cfg["resolution"])
    b = anchor_values(2 * cfg["resolution"])
    rows = [{"anchor": k, "value": a[k], "doubled": b[k], "rel_change": _rel(a[k], b[k])} for k in a]
    worst = max(r["rel_change"] for r in rows)
    return worst < cfg["tol"], {"max_rel_change": worst}, rows
