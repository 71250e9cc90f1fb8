"""Volume-like functionals of star bodies, Orlicz norms and the G / phi classes.

Conventions: ``G(t, u)`` is vectorized over a 1-D array ``t`` and an (N, n)
array ``u``; ``phi(t)`` is vectorized over ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import lambertw

from .bodies import Ball, Cone, HPolytope, StarBody, as_hpolytope, check_hemisphere
from .errors import InvalidInputError, NumericalError
from .roots import solve_scale
from .sphere import QuadratureRule, integrate, product_rule, rotation_sending, unit_rows

INCREASING = "increasing"
DECREASING = "decreasing"
NONE = "none"


@dataclass(frozen=True, eq=False)
class GFunction:
    """G(t, u) with declared monotonicity class and convexity in t.

    ``value_at_zero`` is the continuous extension G(0, u) when it exists
    (needed for radial functions that vanish, like cones).
    ``homogeneity_degree`` is d when G(s t, u) = s^d G(t, u), which lets
    scale normalizations be solved in closed form.
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    monotone_class: str
    convex_in_t: bool
    growth_exponent_q: float | None = None
    value_at_zero: float | None = None
    homogeneity_degree: float | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, t, u):
        return self.func(np.asarray(t, dtype=float), np.atleast_2d(u))

    def to_config(self) -> dict:
        return {"kind": self.name, **self.params}


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """phi(t) with phi(1) = 1, class "I" (increasing) or "D" (decreasing)."""

    func: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    phi_class: str
    convex: bool
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))

    def to_config(self) -> dict:
        return {"kind": self.name, **self.params}


def power_g(q: float, scale: float | None = None, dimension: int | None = None) -> GFunction:
    """G(t, u) = scale * t^q; the default scale is 1/n."""
    if scale is None:
        if dimension is None:
            raise InvalidInputError("power G needs a scale or the dimension for the default 1/n")
        scale = 1.0 / dimension
    q, scale = float(q), float(scale)
    if not scale > 0:
        raise InvalidInputError("G scale must be positive")
    cls = INCREASING if q > 0 else DECREASING if q < 0 else NONE
    return GFunction(
        func=lambda t, u: scale * t**q,
        monotone_class=cls,
        convex_in_t=q >= 1 or q <= 0,
        growth_exponent_q=q if q > 0 else None,
        value_at_zero=0.0 if q > 0 else None,
        homogeneity_degree=q,
        name="power",
        params={"q": q, "scale": scale},
    )


def polynomial_g(coefficients, exponents) -> GFunction:
    """G(t, u) = sum_k c_k t^{q_k} with positive c_k and q_k."""
    c = np.asarray(coefficients, dtype=float)
    q = np.asarray(exponents, dtype=float)
    if c.shape != q.shape or c.size == 0 or np.any(c <= 0) or np.any(q <= 0):
        raise InvalidInputError("polynomial G needs matching positive coefficients and exponents")
    return GFunction(
        func=lambda t, u: np.power.outer(t, q) @ c,
        monotone_class=INCREASING,
        convex_in_t=bool(np.all((q >= 1) | (q <= 0))),
        growth_exponent_q=float(q.max()),
        value_at_zero=0.0,
        name="polynomial",
        params={"coefficients": c.tolist(), "exponents": q.tolist()},
    )


def exponential_g(scale: float = 1.0, rate: float = 1.0) -> GFunction:
    """G(t, u) = scale * (exp(rate t) - 1): increasing, convex, super-polynomial."""
    scale, rate = float(scale), float(rate)
    if not (scale > 0 and rate > 0):
        raise InvalidInputError("exponential G needs positive scale and rate")

    def func(t, u):
        with np.errstate(over="ignore"):
            return scale * np.expm1(rate * t)

    return GFunction(func, INCREASING, True, None, 0.0, None, "exponential", {"scale": scale, "rate": rate})


def weighted_power_g(q: float, scale: float, axis, beta: float) -> GFunction:
    """G(t, u) = scale * t^q * (1 + beta <u, axis>^2); depends on direction."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    q, scale, beta = float(q), float(scale), float(beta)
    if not (scale > 0 and beta > -1):
        raise InvalidInputError("weighted power G needs scale > 0 and beta > -1")
    return GFunction(
        func=lambda t, u: scale * t**q * (1.0 + beta * (u @ a) ** 2),
        monotone_class=INCREASING if q > 0 else DECREASING if q < 0 else NONE,
        convex_in_t=q >= 1 or q <= 0,
        growth_exponent_q=q if q > 0 else None,
        value_at_zero=0.0 if q > 0 else None,
        homogeneity_degree=q,
        name="weighted_power",
        params={"q": q, "scale": scale, "axis": a.tolist(), "beta": beta},
    )


def power_phi(p: float) -> PhiFunction:
    """phi(t) = t^p: class I for p > 0, class D for p < 0."""
    p = float(p)
    if p == 0:
        raise InvalidInputError("phi = t^0 is not strictly monotone")
    return PhiFunction(
        func=lambda t: t**p,
        inverse=lambda y: np.asarray(y, dtype=float) ** (1.0 / p),
        phi_class="I" if p > 0 else "D",
        convex=p >= 1 or p < 0,
        name="power",
        params={"p": p},
    )


def _texp(t):
    with np.errstate(over="ignore"):
        return t * np.exp(t - 1.0)


def texp_phi() -> PhiFunction:
    """phi(t) = t exp(t - 1); class I and convex, inverse via Lambert W."""
    return PhiFunction(
        func=_texp,
        inverse=lambda y: np.real(lambertw(np.e * np.asarray(y, dtype=float))),
        phi_class="I",
        convex=True,
        name="texp",
        params={},
    )


def g_from_config(doc: dict, dimension: int) -> GFunction:
    kind = doc.get("kind")
    if kind == "power":
        return power_g(doc["q"], doc.get("scale"), dimension)
    if kind == "polynomial":
        return polynomial_g(doc["coefficients"], doc["exponents"])
    if kind == "exponential":
        return exponential_g(doc.get("scale", 1.0), doc.get("rate", 1.0))
    if kind == "weighted_power":
        return weighted_power_g(doc["q"], doc.get("scale", 1.0 / dimension), doc["axis"], doc["beta"])
    raise InvalidInputError(f"unknown G kind {kind!r}")


def phi_from_config(doc: dict) -> PhiFunction:
    kind = doc.get("kind")
    if kind == "power":
        return power_phi(doc["p"])
    if kind == "texp":
        return texp_phi()
    raise InvalidInputError(f"unknown phi kind {kind!r}")


def validate_g(g: GFunction, dimension: int, rule: QuadratureRule | None = None) -> None:
    """Sampled certificate that ``g`` is positive and matches its declared class.

    Limits are certified at the proxy points t = 1e-6 and t = 1e6 relative
    to G(1, u): at least two decades below and above respectively.
    """
    if rule is None:
        rule = product_rule(dimension, 8)
    u = rule.nodes
    ts = np.logspace(-6, 6, 49)
    with np.errstate(over="ignore"):
        vals = np.array([np.broadcast_to(g(np.full(len(u), t), u), (len(u),)) for t in ts])
    if np.any(np.isnan(vals)) or np.any(vals <= 0):
        raise InvalidInputError(f"G {g.name} must be positive for t > 0")
    # Overflow to +inf at large t is accepted as growth; compare finite rows only.
    finite_rows = np.all(np.isfinite(vals), axis=1)
    diffs = np.diff(vals[finite_rows], axis=0)
    mid = vals[ts.searchsorted(1.0)]
    if g.monotone_class == INCREASING:
        if np.any(diffs <= 0):
            raise InvalidInputError(f"G {g.name} declared increasing but is not strictly increasing")
        if np.any(vals[0] > 1e-2 * mid) or np.any(vals[-1] < 1e2 * mid):
            raise InvalidInputError(f"G {g.name} fails the sampled limits of the increasing class")
    elif g.monotone_class == DECREASING:
        if np.any(diffs >= 0):
            raise InvalidInputError(f"G {g.name} declared decreasing but is not strictly decreasing")
        if np.any(vals[0] < 1e2 * mid) or np.any(vals[-1] > 1e-2 * mid):
            raise InvalidInputError(f"G {g.name} fails the sampled limits of the decreasing class")


def validate_phi(phi: PhiFunction) -> None:
    """Sampled certificate for the classes I / D and the inverse."""
    ts = np.logspace(-8, 8, 65)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phi(ts)
    # Fast-growing phi may overflow at the upper proxy; +inf is monotone there.
    finite = np.isfinite(vals)
    vals = np.where(np.isposinf(vals), np.finfo(float).max, vals)
    if abs(float(phi(np.array([1.0]))[0]) - 1.0) > 1e-12:
        raise InvalidInputError(f"phi {phi.name} must satisfy phi(1) = 1")
    if np.any(~(vals > 0)):
        raise InvalidInputError(f"phi {phi.name} must be positive")
    d = np.diff(vals[finite])
    if phi.phi_class == "I":
        if np.any(d <= 0) or not (vals[0] < 1e-3 and vals[-1] > 1e3):
            raise InvalidInputError(f"phi {phi.name} fails the increasing-class certificate")
    elif phi.phi_class == "D":
        if np.any(d >= 0) or not (vals[0] > 1e3 and vals[-1] < 1e-3):
            raise InvalidInputError(f"phi {phi.name} fails the decreasing-class certificate")
    else:
        raise InvalidInputError(f"unknown phi class {phi.phi_class!r}")
    grid = np.logspace(-3, 3, 25)
    with np.errstate(over="ignore"):
        fwd = phi(grid)
    grid = grid[np.isfinite(fwd) & (fwd < 1e300)]
    back = phi.inverse(phi(grid))
    if np.max(np.abs(back / grid - 1.0)) > 1e-10:
        raise InvalidInputError(f"phi {phi.name} inverse is inconsistent")


@dataclass(frozen=True)
class GrowthCertificate:
    holds: bool
    inf_estimate: float
    q: float


def check_growth_condition(
    g: GFunction, q: float, dimension: int, t_lo: float = 1.0, samples: int = 200, rule: QuadratureRule | None = None
) -> GrowthCertificate:
    """Sampled estimate of inf G(t, u) / t^q over t in [t_lo, 1e6] and nodes u."""
    if not t_lo > 0:
        raise InvalidInputError("t_lo must be positive")
    if samples < 100:
        raise InvalidInputError("need at least 100 samples")
    if rule is None:
        rule = product_rule(dimension, 8)
    ts = np.logspace(np.log10(t_lo), 6, samples)
    u = rule.nodes
    with np.errstate(over="ignore"):
        ratios = [np.broadcast_to(g(np.full(len(u), t), u), (len(u),)) / t**q for t in ts]
    est = float(np.min(ratios))
    return GrowthCertificate(bool(est > 1e-12), est, float(q))


class DiscreteMeasure:
    """Finite sum of point masses lambda_i at directions u_i."""

    def __init__(self, directions, weights, normalize: bool = False):
        u = unit_rows(directions, normalize=normalize)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != (len(u),):
            raise InvalidInputError("need one weight per atom")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InvalidInputError("atom weights must be positive and finite")
        u.setflags(write=False)
        w.setflags(write=False)
        self.directions = u
        self.weights = w
        self.dimension = u.shape[1]

    def atoms(self):
        return self.directions, self.weights

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return len(self.weights)

    def check_hemisphere(self) -> None:
        check_hemisphere(self.directions, self.weights, what="measure atoms")

    def scaled(self, c: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.directions, self.weights * c)

    def rotated(self, rotation) -> "DiscreteMeasure":
        t = np.asarray(rotation, dtype=float)
        return DiscreteMeasure(self.directions @ t.T, self.weights, normalize=True)

    def to_atoms(self) -> list:
        return [{"u": u.tolist(), "lambda": float(w)} for u, w in zip(self.directions, self.weights)]


class DensityMeasure:
    """Measure f(u) du represented on a quadrature rule."""

    def __init__(self, density: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule):
        self.density = density
        self.rule = rule
        self.dimension = rule.dimension
        vals = np.broadcast_to(np.asarray(density(rule.nodes), dtype=float), rule.weights.shape)
        if np.any(~np.isfinite(vals)) or np.any(vals < 0) or not np.any(vals > 0):
            raise InvalidInputError("density must be finite, nonnegative and not identically zero")
        keep = vals > 0
        self.directions = rule.nodes[keep]
        self.weights = rule.weights[keep] * vals[keep]

    def atoms(self):
        return self.directions, self.weights

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def check_hemisphere(self) -> None:
        check_hemisphere(self.directions, self.weights, what="density support")

    def lump(self, size: int) -> DiscreteMeasure:
        """Discretize by lumping the density onto the nodes of a coarser product rule."""
        coarse = product_rule(self.dimension, size)
        vals = np.broadcast_to(np.asarray(self.density(coarse.nodes), dtype=float), coarse.weights.shape)
        keep = vals > 0
        return DiscreteMeasure(coarse.nodes[keep], coarse.weights[keep] * vals[keep], normalize=True)


BorelMeasure = DiscreteMeasure | DensityMeasure


def _rule_for(body_or_dim, rule):
    if rule is not None:
        return rule
    n = body_or_dim if isinstance(body_or_dim, int) else body_or_dim.dimension
    rule = product_rule(n)
    if isinstance(body_or_dim, Cone):
        # Put the rule's equator split on the cone's base, where rho jumps to 0.
        pole = np.zeros(n)
        pole[-1] = 1.0
        rule = rule.rotated(rotation_sending(body_or_dim.axis, pole))
    return rule


def _g_at(g: GFunction, t: np.ndarray, u: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    zero = t <= 0
    if np.any(zero):
        if g.value_at_zero is None:
            k = int(np.argmax(zero))
            raise NumericalError(f"radial function vanishes at node {u[k].tolist()} and G is undefined at 0")
        out = np.full(t.shape, float(g.value_at_zero))
        out[~zero] = np.broadcast_to(g(t[~zero], u[~zero]), (int(np.sum(~zero)),))
        return out
    with np.errstate(over="ignore"):
        return np.broadcast_to(g(t, u), t.shape)


def dual_volume_from_radial(g: GFunction, rho: np.ndarray, rule: QuadratureRule) -> float:
    vals = _g_at(g, rho, rule.nodes)
    return integrate(rule, lambda _: vals)


def hat_dual_from_radial(g: GFunction, rho: np.ndarray, rule: QuadratureRule) -> float:
    if g.monotone_class not in (INCREASING, DECREASING):
        raise InvalidInputError("homogeneous dual volume needs a strictly monotone G")
    if np.any(rho <= 0):
        raise InvalidInputError("homogeneous dual volume needs a strictly positive radial function")
    u, w = rule.nodes, rule.weights

    def defect(eta):
        return float(_g_at(g, rho / eta, u) @ w) - 1.0

    return solve_scale(defect, float(rho.min()), float(rho.max()))


def dual_volume(g: GFunction, body: StarBody, rule: QuadratureRule | None = None) -> float:
    """General dual volume: integral of G(rho_K(u), u) du."""
    rule = _rule_for(body, rule)
    return dual_volume_from_radial(g, np.asarray(body.radial(rule.nodes)), rule)


def homogeneous_dual_volume(g: GFunction, body: StarBody, rule: QuadratureRule | None = None) -> float:
    """The unique eta with integral of G(rho_K(u) / eta, u) du = 1."""
    rule = _rule_for(body, rule)
    return hat_dual_from_radial(g, np.asarray(body.radial(rule.nodes)), rule)


@dataclass(frozen=True)
class SurfaceAtoms:
    """Directions, surface-measure weights and support values h_K(u) there."""

    directions: np.ndarray
    areas: np.ndarray
    support: np.ndarray


def surface_atoms(body: StarBody, rule: QuadratureRule | None = None) -> SurfaceAtoms:
    """Discrete surface area measure of a polytope, or of a ball via the rule."""
    if isinstance(body, Ball):
        rule = _rule_for(body, rule)
        r = body.radius
        n = body.dimension
        return SurfaceAtoms(rule.nodes, rule.weights * r ** (n - 1), np.full(len(rule.weights), r))
    hp = as_hpolytope(body)
    if hp is None:
        raise InvalidInputError(f"surface area measure is not available for {body.kind} bodies")
    fm = hp.facet_measure
    return SurfaceAtoms(fm.normals, fm.areas, fm.offsets)


def general_volume_from_atoms(g: GFunction, atoms: SurfaceAtoms) -> float:
    return float(_g_at(g, atoms.support, atoms.directions) @ atoms.areas)


def hat_general_from_atoms(g: GFunction, atoms: SurfaceAtoms, dimension: int) -> float:
    if g.monotone_class not in (INCREASING, DECREASING):
        raise InvalidInputError("homogeneous general volume needs a strictly monotone G")
    s = float(atoms.areas.sum())
    h, u, a = atoms.support, atoms.directions, atoms.areas

    def defect(vbar):
        return float(_g_at(g, s * h / vbar, u) @ a) / s - 1.0

    guess = float(a @ h) / dimension
    return solve_scale(defect, guess)


def general_volume(g: GFunction, body: StarBody, rule: QuadratureRule | None = None) -> float:
    """General volume: integral of G(h_K(u), u) dS_K(u)."""
    return general_volume_from_atoms(g, surface_atoms(body, rule))


def homogeneous_general_volume(g: GFunction, body: StarBody, rule: QuadratureRule | None = None) -> float:
    """The V solving (1/S) integral of G(S h_K / V, u) dS_K = 1, with S = S(K)."""
    return hat_general_from_atoms(g, surface_atoms(body, rule), body.dimension)


def _values_on(h, directions: np.ndarray) -> np.ndarray:
    if callable(h):
        vals = h(directions)
    elif isinstance(h, StarBody):
        vals = h.support(directions)
    else:
        vals = h
    return np.broadcast_to(np.asarray(vals, dtype=float), (len(directions),))


def orlicz_norm_values(values: np.ndarray, weights: np.ndarray, phi: PhiFunction) -> float:
    values = np.asarray(values, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise InvalidInputError("Orlicz norm needs a positive, finite function on the support")
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo * (1.0 + 1e-15):
        return lo
    mass = float(weights.sum())

    def defect(eta):
        return float(phi(values / eta) @ weights) / mass - 1.0

    return solve_scale(defect, lo, hi)


def orlicz_norm(h, mu: BorelMeasure, phi: PhiFunction) -> float:
    """||h||_{mu, phi}: the eta with (1/mu(S)) integral of phi(h/eta) dmu = 1.

    ``h`` may be a callable on directions, a body (its support function is
    used) or an array of values at the atoms of ``mu``.
    """
    u, w = mu.atoms()
    return orlicz_norm_values(_values_on(h, u), w, phi)


def objective_integral(phi: PhiFunction, h, mu: BorelMeasure) -> float:
    """sum_i lambda_i phi(h(u_i)) (or the density integral on its rule)."""
    u, w = mu.atoms()
    vals = _values_on(h, u)
    if np.any(vals <= 0):
        raise InvalidInputError("objective needs a positive function on the support")
    return float(phi(vals) @ w)


def orlicz_mixed_volume(K: StarBody, h_L, phi: PhiFunction, variant: str = "integral") -> float:
    """Orlicz mixed volume of a polytope K and a body L given by its support.

    ``integral``: (1/n) sum_i area_i phi(h_L(u_i) / z_i) z_i.
    ``hat``: the Orlicz norm of h_L / h_K against the surface area measure of K.
    """
    atoms = surface_atoms(K)
    ratio = _values_on(h_L, atoms.directions) / atoms.support
    if np.any(ratio <= 0):
        raise InvalidInputError("h_L must be positive at the facet normals of K")
    if variant == "integral":
        return float(phi(ratio) * atoms.support @ atoms.areas) / K.dimension
    if variant == "hat":
        return orlicz_norm_values(ratio, atoms.areas, phi)
    raise InvalidInputError(f"unknown mixed volume variant {variant!r}")


def isoperimetric_ratio(P: HPolytope) -> float:
    """S(P) / (n V(B^n)^(1/n) V(P)^((n-1)/n)); at least 1, equal only for balls."""
    from .sphere import ball_volume

    n = P.dimension
    return P.surface_area() / (n * ball_volume(n) ** (1.0 / n) * P.volume() ** ((n - 1.0) / n))
