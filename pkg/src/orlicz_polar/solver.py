"""Discrete polar Orlicz-Minkowski problems over support-parameterized polytopes.

For atoms (u_i, lambda_i) the search runs over offsets z of
P(z) = {x : <x, u_i> <= z_i}. Every candidate is rescaled onto the constraint
set (the polar of the scaled polytope has the prescribed functional value of
the unit ball) before its objective sum_i lambda_i phi(z_i) is evaluated.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .bodies import Ball, Ellipsoid, HPolytope, PolarOfPolytope, StarBody, hausdorff_distance
from .errors import InvalidInputError, NumericalError
from .functionals import (
    INCREASING,
    DensityMeasure,
    DiscreteMeasure,
    GFunction,
    PhiFunction,
    SurfaceAtoms,
    check_growth_condition,
    dual_volume,
    dual_volume_from_radial,
    general_volume,
    general_volume_from_atoms,
    hat_dual_from_radial,
    hat_general_from_atoms,
    homogeneous_dual_volume,
    homogeneous_general_volume,
    objective_integral,
    orlicz_norm_values,
    surface_atoms,
)
from .roots import solve_scale
from .sphere import QuadratureRule, product_rule, rotation_sending

FAMILIES = ("Btilde", "Bhat", "Bgen", "Bbar")
OBJECTIVES = ("integral", "orlicz_norm")
LOWER_CLIP = 1e-6
THREADS_ENV = "ORLICZ_POLAR_THREADS"


@dataclass(frozen=True)
class ConstraintFamily:
    """Constraint set: the polar body's functional equals ``target_value``."""

    tag: str
    target_value: float


def _polar(body: StarBody) -> StarBody:
    return body.polar()


def constraint_value(tag: str, g: GFunction, body: StarBody, rule: QuadratureRule | None = None) -> float:
    """The family's functional evaluated on the polar of ``body``."""
    polar = _polar(body)
    if tag == "Btilde":
        return dual_volume(g, polar, rule)
    if tag == "Bhat":
        return homogeneous_dual_volume(g, polar, rule)
    if tag == "Bgen":
        return general_volume(g, polar, rule)
    if tag == "Bbar":
        return homogeneous_general_volume(g, polar, rule)
    raise InvalidInputError(f"unknown constraint family {tag!r}; expected one of {FAMILIES}")


def constraint_family(tag: str, g: GFunction, dimension: int, rule: QuadratureRule | None = None) -> ConstraintFamily:
    """Family with its target computed on the unit ball (self-polar)."""
    if rule is None:
        rule = product_rule(dimension)
    return ConstraintFamily(tag, constraint_value(tag, g, Ball(1.0, dimension), rule))


def _polar_atoms(body: StarBody, rule: QuadratureRule) -> SurfaceAtoms:
    return surface_atoms(_polar(body), rule)


def _scale_for(tag: str, g: GFunction, body: StarBody, target: float, rule: QuadratureRule) -> float:
    """Scale s such that (s body)° = body° / s meets the constraint."""
    n = body.dimension
    deg = g.homogeneity_degree
    if tag in ("Btilde", "Bhat"):
        rho = 1.0 / np.asarray(body.support(rule.nodes))
        if tag == "Bhat":
            return hat_dual_from_radial(g, rho, rule) / target
        if deg:
            # Scaling the polar by 1/s multiplies the integral by s^-deg.
            return (dual_volume_from_radial(g, rho, rule) / target) ** (1.0 / deg)
        return solve_scale(lambda s: dual_volume_from_radial(g, rho / s, rule) / target - 1.0, 1.0)
    atoms = _polar_atoms(body, rule)
    if tag == "Bbar":
        return (hat_general_from_atoms(g, atoms, n) / target) ** (1.0 / n)
    if tag == "Bgen":
        if deg is not None and n - 1 + deg != 0:
            return (general_volume_from_atoms(g, atoms) / target) ** (1.0 / (n - 1 + deg))

        def defect(s):
            scaled = SurfaceAtoms(atoms.directions, atoms.areas * s ** (1 - n), atoms.support / s)
            return general_volume_from_atoms(g, scaled) / target - 1.0

        return solve_scale(defect, 1.0)
    raise InvalidInputError(f"unknown constraint family {tag!r}")


def normalize_to_constraint(body: StarBody, family: ConstraintFamily, g: GFunction, rule: QuadratureRule | None = None):
    """Return ``(s, s * body)`` with the scaled body's polar in the constraint set."""
    if rule is None:
        rule = product_rule(body.dimension)
    s = _scale_for(family.tag, g, body, family.target_value, rule)
    if not (np.isfinite(s) and s > 0):
        raise NumericalError(f"normalization produced an invalid scale {s!r}")
    return s, body.scaled(s)


@dataclass
class ProblemSpec:
    """A discrete instance: atoms, phi, G, constraint family and objective kind.

    In Petty mode (``petty_reference`` set) the objective is
    sum_i lambda_i phi(h_Q(u_i) / h_K(u_i)) h_K(u_i) (or the Orlicz norm of
    h_Q / h_K); the measure defaults to the surface area measure of K.
    """

    measure: DiscreteMeasure
    phi: PhiFunction
    g: GFunction
    family: ConstraintFamily
    objective: str = "integral"
    sense: str = "infimum"
    petty_reference: HPolytope | None = None
    rule: QuadratureRule | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.rule is None:
            self.rule = product_rule(self.dimension)

    @property
    def dimension(self) -> int:
        return self.measure.dimension

    @property
    def m(self) -> int:
        return len(self.measure)

    def reference_support(self) -> np.ndarray | None:
        if self.petty_reference is None:
            return None
        return np.asarray(self.petty_reference.support(self.measure.directions))

    def validate(self) -> None:
        n = self.dimension
        if self.sense != "infimum":
            raise InvalidInputError("only infimum problems are solved; supremum problems are swept")
        if self.objective not in OBJECTIVES:
            raise InvalidInputError(f"unknown objective {self.objective!r}; expected one of {OBJECTIVES}")
        if self.family.tag not in FAMILIES:
            raise InvalidInputError(f"unknown constraint family {self.family.tag!r}")
        if self.m < n + 1:
            raise InvalidInputError(f"need at least n+1 = {n + 1} atoms, got {self.m}")
        self.measure.check_hemisphere()
        if self.phi.phi_class != "I":
            raise InvalidInputError("infimum problems need phi in the increasing class I")
        if self.petty_reference is not None and self.petty_reference.dimension != n:
            raise InvalidInputError("Petty reference dimension does not match the measure")
        growth_certificate(self.g, self.family.tag, n)

    def to_dict(self) -> dict:
        doc = {
            "dimension": self.dimension,
            "atoms": self.measure.to_atoms(),
            "phi": self.phi.to_config(),
            "g": self.g.to_config(),
            "family": self.family.tag,
            "objective": self.objective,
            "resolution": self.rule.resolution,
        }
        if self.petty_reference is not None:
            doc["petty_reference"] = self.petty_reference.to_dict()
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc

    def instance_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little")


def growth_certificate(g: GFunction, tag: str, dimension: int):
    """Find a sampled growth certificate appropriate to the family, or raise."""
    n = dimension
    if tag in ("Btilde", "Bhat", "Bbar") and g.monotone_class != INCREASING:
        raise InvalidInputError(f"family {tag} needs G in the increasing class")
    if tag in ("Btilde", "Bhat"):
        candidates = [q for q in (g.growth_exponent_q, n - 1.0) if q is not None and q >= n - 1]
    elif tag == "Bbar":
        candidates = [q for q in (g.growth_exponent_q, 1.0) if q is not None and q >= 1]
    else:
        candidates = [(1.0 - n) / 2.0, (1.0 - n) * 0.9, (1.0 - n) * 0.1]
    for q in candidates:
        cert = check_growth_condition(g, q, n)
        if cert.holds:
            return cert
    raise InvalidInputError(f"G {g.name} fails the growth condition required by family {tag}")


def make_problem(
    measure: DiscreteMeasure,
    phi: PhiFunction,
    g: GFunction,
    family: str = "Btilde",
    objective: str = "integral",
    rule: QuadratureRule | None = None,
    petty_reference: HPolytope | None = None,
    seed: int | None = None,
) -> ProblemSpec:
    n = measure.dimension
    if rule is None:
        rule = product_rule(n)
    fam = constraint_family(family, g, n, rule)
    return ProblemSpec(measure, phi, g, fam, objective, "infimum", petty_reference, rule, seed)


def petty_problem(reference: HPolytope, phi: PhiFunction, g: GFunction, family: str = "Btilde", objective: str = "integral", rule=None, seed=None) -> ProblemSpec:
    """Petty-body instance with mu_K = surface area measure of ``reference``."""
    fm = reference.facet_measure
    measure = DiscreteMeasure(fm.normals, fm.areas)
    return make_problem(measure, phi, g, family, objective, rule, reference, seed)


class _Evaluator:
    """Normalized objective of a candidate offset vector (search form)."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.normals = spec.measure.directions
        self.weights = spec.measure.weights
        self.reference = spec.reference_support()
        self.evaluations = 0

    def value(self, y: np.ndarray) -> float:
        """Objective of a body whose support values at the atoms are ``y``."""
        phi = self.spec.phi
        k = self.reference
        r = y if k is None else y / k
        if self.spec.objective == "integral":
            vals = phi(r) if k is None else phi(r) * k
            return float(vals @ self.weights)
        return orlicz_norm_values(r, self.weights, phi)

    def scale(self, z: np.ndarray) -> tuple[float, HPolytope]:
        P = HPolytope.trusted(self.normals, z)
        spec = self.spec
        return _scale_for(spec.family.tag, spec.g, P, spec.family.target_value, spec.rule), P

    def __call__(self, z: np.ndarray) -> float:
        self.evaluations += 1
        try:
            s, _ = self.scale(z)
            out = self.value(s * z)
        except (NumericalError, FloatingPointError):
            return math.inf
        return out if np.isfinite(out) else math.inf


def search_bound(spec: ProblemSpec) -> float:
    """Upper bound z_max for the normalized optimal offsets."""
    lam = spec.measure.weights
    phi = spec.phi
    if spec.petty_reference is None and spec.objective == "integral" and spec.family.tag in ("Btilde", "Bhat"):
        return float(phi.inverse(np.array([lam.sum() / lam.min()]))[0])
    # Generic bound from the normalized z = 1 candidate.
    ev = _Evaluator(spec)
    ones = np.ones(spec.m)
    s, _ = ev.scale(ones)
    f0 = ev.value(s * ones)
    k = spec.reference_support()
    k = np.ones(spec.m) if k is None else k
    if spec.objective == "integral":
        bound = k * phi.inverse(f0 / (lam * k))
    else:
        bound = k * f0 * phi.inverse(lam.sum() / lam)
    return float(np.max(bound))


@dataclass
class Solution:
    z_star: np.ndarray
    polytope: HPolytope
    objective_value: float
    constraint_residual: float
    facial_defects: np.ndarray
    starts_used: int
    converged: bool
    evaluations: int = 0
    start_objectives: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "z_star": self.z_star.tolist(),
            "polytope": self.polytope.to_dict(),
            "objective_value": self.objective_value,
            "constraint_residual": self.constraint_residual,
            "facial_defects": self.facial_defects.tolist(),
            "max_facial_defect": float(np.max(np.abs(self.facial_defects))),
            "starts_used": self.starts_used,
            "converged": self.converged,
            "evaluations": self.evaluations,
            "start_objectives": list(self.start_objectives),
        }


def _local_search(fun, x0: np.ndarray, budget: int, tol: float = 1e-9):
    """Nelder-Mead followed by golden-section coordinate polishing.

    Returns (x, f(x), evaluations, converged).
    """
    m = len(x0)
    count = [0]

    def f(x):
        count[0] += 1
        return fun(x)

    f0 = f(x0)
    simplex = np.vstack([x0, x0 + 0.15 * np.eye(m)])
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": max(budget // 2, 10 * m),
            "xatol": 1e-9,
            "fatol": 1e-13 * abs(f0) if np.isfinite(f0) else 1e-13,
            "initial_simplex": simplex,
            "adaptive": m > 4,
        },
    )
    x, fx = np.array(res.x), float(res.fun)
    if not fx <= f0:
        x, fx = x0.copy(), f0
    delta = np.full(m, 0.05)
    converged = False
    while count[0] < budget:
        f_sweep = fx
        hit_edge = False
        for i in range(m):
            if count[0] >= budget:
                break
            xi = x[i]

            def line(t, i=i):
                y = x.copy()
                y[i] = t
                return f(y)

            r = minimize_scalar(line, bounds=(xi - delta[i], xi + delta[i]), method="bounded", options={"xatol": 1e-11})
            move = 0.0
            if r.fun < fx:
                move = float(r.x) - xi
                x[i] = float(r.x)
                fx = float(r.fun)
            if abs(move) > 0.9 * delta[i]:
                delta[i] *= 4.0
                hit_edge = True
            else:
                delta[i] = max(4.0 * abs(move), 1e-6)
        if not hit_edge and f_sweep - fx <= tol * abs(fx):
            converged = True
            break
    return x, fx, count[0], converged


def _thread_count(threads: int | None) -> int:
    if threads is None:
        try:
            threads = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError:
            threads = 1
    return max(1, int(threads))


def solve_discrete(
    spec: ProblemSpec,
    starts: int = 8,
    budget: int = 3000,
    include_reference_start: bool = True,
    threads: int | None = None,
) -> Solution:
    """Minimize the normalized objective over offsets z.

    Parameters
    ----------
    spec : ProblemSpec
        Validated before the search.
    starts : int
        Number of local searches. Start 0 is z = (1, ..., 1) (the normalized
        ball-circumscribing polytope) unless ``include_reference_start`` is
        False; the rest are seeded log-normal perturbations.
    budget : int
        Objective evaluations allowed per start.
    threads : int, optional
        Parallel starts; defaults to the ORLICZ_POLAR_THREADS variable or 1.

    Returns
    -------
    Solution
        Best start; ``converged`` reports whether its polish met the
        relative tolerance 1e-9 within budget.
    """
    if starts < 1:
        raise InvalidInputError("need at least one start")
    spec.validate()
    m = spec.m
    z_max = search_bound(spec)
    x_lo, x_hi = math.log(LOWER_CLIP * z_max), math.log(z_max)
    rng = np.random.default_rng(spec.instance_seed())
    x0s = [rng.normal(0.0, 0.35, m) for _ in range(starts)]
    if include_reference_start:
        x0s[0] = np.zeros(m)
    x0s = [np.clip(x0, x_lo, x_hi) for x0 in x0s]

    def run(x0):
        ev = _Evaluator(spec)
        return _local_search(lambda x: ev(np.exp(np.clip(x, x_lo, x_hi))), x0, budget)

    workers = min(_thread_count(threads), starts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, x0s))
    else:
        results = [run(x0) for x0 in x0s]

    ev = _Evaluator(spec)
    candidates = []
    for x, fx, _, conv in results:
        z = np.exp(np.clip(x, x_lo, x_hi))
        s, _ = ev.scale(z)
        candidates.append((fx, tuple(s * z), conv))
    best_f = min(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] <= best_f + 1e-12 * abs(best_f)]
    fx, z_tuple, conv = min(ties, key=lambda c: c[1])
    return _build_solution(
        spec, np.asarray(z_tuple), conv, starts, sum(r[2] for r in results), [float(r[1]) for r in results]
    )


def _build_solution(spec, z, converged, starts_used, evaluations, start_objectives) -> Solution:
    P = HPolytope.trusted(spec.measure.directions, z)
    s, Q = normalize_to_constraint(P, spec.family, spec.g, spec.rule)
    ev = _Evaluator(spec)
    h = np.asarray(Q.support(spec.measure.directions))
    value = ev.value(h)
    fresh = constraint_value(spec.family.tag, spec.g, Q, spec.rule)
    residual = (fresh - spec.family.target_value) / spec.family.target_value
    return Solution(
        z_star=np.asarray(Q.offsets).copy(),
        polytope=Q,
        objective_value=value,
        constraint_residual=float(residual),
        facial_defects=Q.facial_defects(),
        starts_used=starts_used,
        converged=bool(converged),
        evaluations=int(evaluations),
        start_objectives=start_objectives,
    )


def feasible_objective(spec: ProblemSpec, z) -> float:
    """Objective of the normalized P(z), using its support at the atoms.

    Goes through the public normalization path only; this is what the
    brute-force oracle evaluates.
    """
    return _feasible(spec, z)[0]


def _feasible(spec: ProblemSpec, z):
    P = HPolytope.trusted(spec.measure.directions, np.asarray(z, dtype=float))
    s, Q = normalize_to_constraint(P, spec.family, spec.g, spec.rule)
    return _objective_of(spec, Q), s * np.asarray(z, dtype=float)


def _objective_of(spec: ProblemSpec, Q: StarBody) -> float:
    h = np.asarray(Q.support(spec.measure.directions))
    k = spec.reference_support()
    w = spec.measure.weights
    if spec.objective == "integral":
        if k is None:
            return objective_integral(spec.phi, h, spec.measure)
        return float(spec.phi(h / k) * k @ w)
    return orlicz_norm_values(h if k is None else h / k, w, spec.phi)


def brute_force_oracle(spec: ProblemSpec, grid_per_axis: int = 24, symmetric: bool = False, refinements: int = 0):
    """Grid search for the optimal offsets.

    The grid is log-spaced over (z_max 1e-3, z_max] in every coordinate.
    Because the normalized objective is invariant under z -> c z and the
    grid is log-uniform, only grid points with some coordinate at the top
    value are evaluated; this visits every distinct value of the full grid.
    ``refinements`` repeats the search on a finer local grid (two coarse
    steps either side of the incumbent, one coordinate held fixed).
    With ``symmetric=True`` only equal offsets are searched (any m).

    Returns
    -------
    (z_best, objective_best)
        ``z_best`` holds the normalized (feasible) offsets.
    """
    if grid_per_axis < 1:
        raise InvalidInputError("grid_per_axis must be positive")
    spec.validate()
    m = spec.m
    z_max = search_bound(spec)
    levels = z_max * 10.0 ** (-3.0 + 3.0 * np.arange(1, grid_per_axis + 1) / grid_per_axis)
    if symmetric:
        best = None
        for c in levels:
            val, zn = _feasible(spec, np.full(m, c))
            if best is None or val < best[1]:
                best = (zn, val)
        return best
    if m > 5:
        raise InvalidInputError(f"full-grid oracle is limited to m <= 5 atoms, got {m}")
    top = len(levels) - 1
    best_z, best_val = None, math.inf
    for idx in np.ndindex(*(len(levels),) * m):
        if top not in idx:
            continue
        z = levels[list(idx)]
        val, zn = _feasible(spec, z)
        if val < best_val:
            best_z, best_val = zn, val
    step = 3.0 * math.log(10.0) / grid_per_axis
    for _ in range(refinements):
        anchor = int(np.argmax(best_z))
        free = [i for i in range(m) if i != anchor]
        offsets = np.linspace(-2.0 * step, 2.0 * step, grid_per_axis)
        center = np.log(best_z)
        incumbent = best_z
        for idx in np.ndindex(*(grid_per_axis,) * len(free)):
            x = center.copy()
            x[free] += offsets[list(idx)]
            val, zn = _feasible(spec, np.exp(x))
            if val < best_val:
                incumbent, best_val = zn, val
        best_z = incumbent
        step = 4.0 * step / grid_per_axis
    return best_z, best_val


def _ellipsoid_body(dimension: int, eps: float, mode: str, u1: np.ndarray) -> Ellipsoid:
    if mode == "inf_decreasing":
        return Ellipsoid.flattened(dimension, eps)
    e1 = np.zeros(dimension)
    e1[0] = 1.0
    t = rotation_sending(u1, e1)
    # The rotated body T diag(1, ..., 1, eps) B, or its polar for sup_decreasing.
    body = Ellipsoid.flattened(dimension, eps, rotation=t)
    return body if mode == "sup_increasing" else body.polar()


def counterexample_sweep(
    g: GFunction,
    phi: PhiFunction,
    mu: DiscreteMeasure,
    mode: str,
    epsilons,
    rule: QuadratureRule | None = None,
) -> list[dict]:
    """Objective along the feasible ellipsoid families L / f(eps).

    ``f(eps) = Vhat_G(B) / Vhat_G(L°)`` rescales each ellipsoid L onto the
    homogeneous constraint set. Rows are ordered by decreasing eps.
    """
    n = mu.dimension
    if mode not in ("inf_decreasing", "sup_increasing", "sup_decreasing"):
        raise InvalidInputError(f"unknown sweep mode {mode!r}")
    eps = sorted((float(e) for e in epsilons), reverse=True)
    if not eps or any(not (0.0 < e <= 1.0) for e in eps):
        raise InvalidInputError("epsilons must lie in (0, 1]")
    growth_certificate(g, "Bhat", n)
    u, lam = mu.atoms()
    if mode == "inf_decreasing":
        if phi.phi_class != "D":
            raise InvalidInputError("inf_decreasing needs phi in the decreasing class D")
        if np.any(np.abs(u[:, 0]) <= 1e-12):
            raise InvalidInputError("inf_decreasing needs every atom to have a nonzero first coordinate")
    elif mode == "sup_increasing" and phi.phi_class != "I":
        raise InvalidInputError("sup_increasing needs phi in the increasing class I")
    elif mode == "sup_decreasing" and phi.phi_class != "D":
        raise InvalidInputError("sup_decreasing needs phi in the decreasing class D")
    if rule is None:
        rule = product_rule(n)
    ball_hat = homogeneous_dual_volume(g, Ball(1.0, n), rule)
    rows = []
    for e in eps:
        body = _ellipsoid_body(n, e, mode, u[0])
        f = ball_hat / homogeneous_dual_volume(g, body.polar(), rule)
        h = np.asarray(body.support(u)) / f
        rows.append({"epsilon": e, "f": f, "objective": float(phi(h) @ lam)})
    return rows


def uniqueness_probe(spec: ProblemSpec, starts: int = 8, budget: int = 3000, threads: int | None = None) -> dict:
    """Independent single-start solves from distinct seeds and their spread.

    The dispersion is the largest pairwise Hausdorff distance (over the
    spec's quadrature nodes) between the returned polytopes.
    """
    base = spec.instance_seed()
    solutions = []
    for k in range(starts):
        seeded = ProblemSpec(
            spec.measure, spec.phi, spec.g, spec.family, spec.objective, spec.sense, spec.petty_reference, spec.rule, base + k
        )
        solutions.append(solve_discrete(seeded, starts=1, budget=budget, include_reference_start=False, threads=threads))
    dispersion = 0.0
    for i in range(len(solutions)):
        for j in range(i + 1, len(solutions)):
            d = hausdorff_distance(solutions[i].polytope, solutions[j].polytope, spec.rule)
            dispersion = max(dispersion, d)
    return {"dispersion": dispersion, "solutions": solutions}


def continuity_experiment(
    density: DensityMeasure,
    sizes,
    phi: PhiFunction,
    g: GFunction,
    family: str = "Btilde",
    objective: str = "integral",
    rule: QuadratureRule | None = None,
    reference_size: int | None = None,
    starts: int = 2,
    budget: int = 4000,
) -> dict:
    """Solve lumped discretizations of a density and compare with the finest.

    Returns rows (size, optimal value, Hausdorff distance to the reference
    solution, symmetric-oracle value) plus the reference solution. With a
    single size the reference is that size itself.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or sizes != sorted(set(sizes)):
        raise InvalidInputError("discretization sizes must be strictly increasing")
    n = density.dimension
    if rule is None:
        rule = product_rule(n)
    if not (phi.convex and g.convex_in_t):
        raise InvalidInputError("continuity experiment expects convex phi and G (uniqueness regime)")
    if reference_size is None:
        reference_size = 2 * sizes[-1] if len(sizes) > 1 else sizes[-1]

    def solve_at(size):
        spec = make_problem(density.lump(size), phi, g, family, objective, rule)
        return spec, solve_discrete(spec, starts=starts, budget=budget)

    _, reference = solve_at(reference_size)
    rows = []
    failures = []
    for size in sizes:
        spec, sol = solve_at(size) if size != reference_size else (None, reference)
        if not sol.converged:
            failures.append(size)
        if spec is None:
            spec = make_problem(density.lump(size), phi, g, family, objective, rule)
        sym = feasible_objective(spec, np.ones(spec.m))
        rows.append(
            {
                "size": size,
                "optimal_value": sol.objective_value,
                "hausdorff_to_reference": hausdorff_distance(sol.polytope, reference.polytope, rule),
                "symmetric_value": sym,
                "max_facial_defect": float(np.max(np.abs(sol.facial_defects))),
            }
        )
    return {"rows": rows, "reference": reference, "reference_size": reference_size, "unconverged": failures}
