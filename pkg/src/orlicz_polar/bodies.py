"""Catalog of convex (and star-shaped) bodies with radial and support functions.

Every body evaluates ``radial(u)`` and, unless it is radial-only, ``support(u)``
for a single direction of shape (n,) (returning a float) or a stack of
directions of shape (N, n) (returning an array of N values).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import HemisphereError, InvalidInputError, NumericalError
from .sphere import product_rule, unit_rows, unit_vector

FEASIBILITY_SLACK = 1e-9
DEDUP_TOL = 1e-8
HEMISPHERE_MARGIN = 1e-12
# Above this many n-subsets the vertex set is obtained from the convex hull
# of the polar points u_i / z_i instead of exhaustive enumeration.
ENUMERATION_LIMIT = 4000


def _as_directions(u, n: int):
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != n:
        raise InvalidInputError(f"direction dimension {arr.shape[1]} does not match body dimension {n}")
    return arr, single


def _finish(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def hemisphere_margin(directions, weights=None) -> float:
    """min over unit v of max_i <v, u_i>, taken over atoms of positive weight.

    This equals the distance from the origin to the boundary of conv{u_i}
    (negative when the origin lies outside), so it is positive exactly when
    the directions are not concentrated on a closed hemisphere.
    """
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    if weights is not None:
        u = u[np.asarray(weights, dtype=float).reshape(-1) > 0]
    n = u.shape[1]
    if len(u) < n + 1 or np.linalg.matrix_rank(u) < n:
        return 0.0
    try:
        hull = ConvexHull(u)
    except QhullError:
        # Flat point sets lie in a hyperplane through the hull.
        return 0.0
    return float(np.min(-hull.equations[:, -1]))


def check_hemisphere(directions, weights=None, what: str = "directions") -> None:
    margin = hemisphere_margin(directions, weights)
    if not margin > HEMISPHERE_MARGIN:
        raise HemisphereError(
            f"{what} are concentrated on a closed hemisphere (probed margin {margin:.3g})"
        )


def _dedupe(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    kept: list[np.ndarray] = []
    for p in points[order]:
        if not kept or np.min(np.max(np.abs(np.asarray(kept) - p), axis=1)) > tol:
            kept.append(p)
    out = np.asarray(kept)
    return out[np.lexsort(out.T[::-1])]


@lru_cache(maxsize=128)
def _subsets(m: int, n: int) -> np.ndarray:
    idx = np.fromiter((i for c in combinations(range(m), n) for i in c), dtype=np.intp, count=comb(m, n) * n)
    idx = idx.reshape(-1, n)
    idx.setflags(write=False)
    return idx


def enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Vertices of P(z) by solving every n-subset of facet equations."""
    m, n = normals.shape
    subsets = _subsets(m, n)
    a = normals[subsets]
    b = offsets[subsets]
    det = np.linalg.det(a)
    regular = np.abs(det) > 1e-12
    if not np.any(regular):
        return np.empty((0, n))
    x = np.linalg.solve(a[regular], b[regular][..., None])[..., 0]
    feasible = np.all(x @ normals.T <= offsets + FEASIBILITY_SLACK, axis=1)
    return _dedupe(x[feasible])


def hull_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Vertices of P(z) as polar duals of the facets of conv{u_i / z_i}."""
    n = normals.shape[1]
    try:
        hull = ConvexHull(normals / offsets[:, None])
    except QhullError as exc:
        raise NumericalError(f"convex hull of polar points failed: {exc}") from exc
    eq = hull.equations
    x = eq[:, :n] / (-eq[:, n])[:, None]
    feasible = np.all(x @ normals.T <= offsets + FEASIBILITY_SLACK, axis=1)
    return _dedupe(x[feasible])


def polytope_vertices(normals: np.ndarray, offsets: np.ndarray, method: str = "auto") -> np.ndarray:
    m, n = normals.shape
    if method == "auto":
        method = "enumerate" if comb(m, n) <= ENUMERATION_LIMIT else "hull"
    if method == "enumerate":
        v = enumerate_vertices(normals, offsets)
    elif method == "hull":
        v = hull_vertices(normals, offsets)
    else:
        raise InvalidInputError(f"unknown vertex method {method!r}")
    if len(v) == 0:
        raise NumericalError("vertex enumeration returned no vertices")
    return v


class StarBody:
    """Common interface. Subclasses set ``kind`` and implement ``radial``."""

    kind = "body"
    radial_only = False
    dimension: int

    def radial(self, u):
        raise NotImplementedError

    def support(self, u):
        raise InvalidInputError(f"{self.kind} bodies have no support function here (radial-only)")

    def polar(self) -> "StarBody":
        raise InvalidInputError(f"polar of a {self.kind} body is not available")

    def scaled(self, factor: float) -> "StarBody":
        return Scaled(self, factor)

    def parameters(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dimension": self.dimension, "parameters": self.parameters()}

    def __repr__(self):
        return f"{type(self).__name__}({self.parameters()})"


class Ball(StarBody):
    kind = "ball"

    def __init__(self, radius: float = 1.0, dimension: int = 3):
        if not radius > 0:
            raise InvalidInputError("ball radius must be positive")
        if int(dimension) != dimension or dimension < 2:
            raise InvalidInputError("ball dimension must be an integer >= 2")
        self.radius = float(radius)
        self.dimension = int(dimension)

    def radial(self, u):
        u, single = _as_directions(u, self.dimension)
        return _finish(np.full(len(u), self.radius), single)

    support = radial

    def polar(self):
        return Ball(1.0 / self.radius, self.dimension)

    def scaled(self, factor):
        return Ball(self.radius * factor, self.dimension)

    def parameters(self):
        return {"radius": self.radius}


class Ellipsoid(StarBody):
    """The body R diag(a) B^n for semiaxes a and an orthogonal matrix R."""

    kind = "ellipsoid"

    def __init__(self, semiaxes, rotation=None):
        a = np.asarray(semiaxes, dtype=float).reshape(-1)
        if a.size < 2 or np.any(~(a > 0)):
            raise InvalidInputError("ellipsoid semiaxes must be positive, dimension >= 2")
        self.semiaxes = a
        self.dimension = a.size
        if rotation is None:
            self.rotation = np.eye(a.size)
        else:
            r = np.asarray(rotation, dtype=float)
            if r.shape != (a.size, a.size) or np.max(np.abs(r @ r.T - np.eye(a.size))) > 1e-10:
                raise InvalidInputError("ellipsoid rotation must be an orthogonal n x n matrix")
            self.rotation = r

    @classmethod
    def flattened(cls, dimension: int, eps: float, rotation=None) -> "Ellipsoid":
        """diag(1, ..., 1, eps) applied to the unit ball, optionally rotated."""
        a = np.ones(dimension)
        a[-1] = eps
        return cls(a, rotation)

    def _local(self, u):
        u, single = _as_directions(u, self.dimension)
        return u @ self.rotation, single

    def radial(self, u):
        w, single = self._local(u)
        return _finish(1.0 / np.sqrt(np.sum((w / self.semiaxes) ** 2, axis=1)), single)

    def support(self, u):
        w, single = self._local(u)
        return _finish(np.sqrt(np.sum((w * self.semiaxes) ** 2, axis=1)), single)

    def polar(self):
        return Ellipsoid(1.0 / self.semiaxes, self.rotation)

    def scaled(self, factor):
        return Ellipsoid(self.semiaxes * factor, self.rotation)

    def parameters(self):
        p = {"semiaxes": self.semiaxes.tolist()}
        if not np.array_equal(self.rotation, np.eye(self.dimension)):
            p["rotation"] = self.rotation.tolist()
        return p


class Cone(StarBody):
    """Cone over the disc of radius 1/R in the plane orthogonal to ``axis``.

    The radial function is 1/(R sin(theta) + r cos(theta)) where theta is the
    angle to ``axis`` (apex at distance 1/r), and 0 on the open lower
    hemisphere. On the equator the closed-form branch is used, giving 1/R.
    """

    kind = "cone"
    radial_only = True

    def __init__(self, R: float, r: float, axis):
        if not (R > 0 and r > 0):
            raise InvalidInputError("cone parameters R and r must be positive")
        self.R = float(R)
        self.r = float(r)
        self.axis = unit_vector(axis, normalize=True)
        self.dimension = self.axis.size

    def radial(self, u):
        u, single = _as_directions(u, self.dimension)
        c = u @ self.axis
        s = np.sqrt(np.maximum(1.0 - c * c, 0.0))
        upper = c >= 0.0
        out = np.zeros(len(u))
        out[upper] = 1.0 / (self.R * s[upper] + self.r * c[upper])
        return _finish(out, single)

    def scaled(self, factor):
        return Cone(self.R / factor, self.r / factor, self.axis)

    def parameters(self):
        return {"R": self.R, "r": self.r, "axis": self.axis.tolist()}


@dataclass(frozen=True)
class FacetMeasure:
    """Surface area measure of a polytope: atoms at active facet normals."""

    indices: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    offsets: np.ndarray

    @property
    def total(self) -> float:
        return float(self.areas.sum())


class HPolytope(StarBody):
    """P(z) = intersection of the half-spaces <x, u_i> <= z_i."""

    kind = "polytope"

    def __init__(self, normals, offsets, normalize: bool = False, check: bool = True, vertex_method: str = "auto"):
        u = unit_rows(normals, normalize=normalize)
        z = np.asarray(offsets, dtype=float).reshape(-1)
        m, n = u.shape
        if z.shape != (m,):
            raise InvalidInputError(f"need {m} offsets, got {z.size}")
        if np.any(~np.isfinite(z)) or np.any(z <= 0):
            raise InvalidInputError("polytope offsets must be positive and finite")
        if m < n + 1:
            raise InvalidInputError(f"need at least n+1 = {n + 1} facets, got {m}")
        if check:
            check_hemisphere(u, what="facet normals")
        self._init(u, z, vertex_method)

    def _init(self, u, z, vertex_method="auto"):
        u = np.array(u, dtype=float)
        z = np.array(z, dtype=float)
        u.setflags(write=False)
        z.setflags(write=False)
        self._normals = u
        self._offsets = z
        self.dimension = u.shape[1]
        v = polytope_vertices(u, z, vertex_method)
        v.setflags(write=False)
        self._vertices = v

    @classmethod
    def trusted(cls, normals: np.ndarray, offsets: np.ndarray) -> "HPolytope":
        """Construct without validation; for callers that already validated the normals."""
        self = cls.__new__(cls)
        self._init(normals, offsets)
        return self

    @property
    def normals(self) -> np.ndarray:
        return self._normals

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def m(self) -> int:
        return len(self._offsets)

    def with_offsets(self, offsets) -> "HPolytope":
        return HPolytope.trusted(self._normals, np.asarray(offsets, dtype=float))

    def scaled(self, factor):
        if not factor > 0:
            raise InvalidInputError("scale factor must be positive")
        return HPolytope.trusted(self._normals, self._offsets * factor)

    def support(self, u):
        u, single = _as_directions(u, self.dimension)
        return _finish(np.max(u @ self._vertices.T, axis=1), single)

    def polar_support(self, u):
        """max_i <u, u_i>_+ / z_i, the support function of conv{u_i / z_i}."""
        u, single = _as_directions(u, self.dimension)
        return _finish(np.max(np.maximum(u @ self._normals.T, 0.0) / self._offsets, axis=1), single)

    def radial(self, u):
        u, single = _as_directions(u, self.dimension)
        return _finish(1.0 / self.polar_support(u), single)

    def polar(self):
        return PolarOfPolytope(self)

    def facial_defects(self) -> np.ndarray:
        """h_P(u_i) - z_i for every facet; zero exactly on supporting facets."""
        return self.support(self._normals) - self._offsets

    @cached_property
    def facet_measure(self) -> FacetMeasure:
        n = self.dimension
        if n not in (2, 3):
            raise InvalidInputError(f"surface area measure is implemented for n in {{2, 3}}, got {n}")
        tol = FEASIBILITY_SLACK * max(1.0, float(np.max(self._offsets)))
        dots = self._vertices @ self._normals.T
        idx, areas = [], []
        for i in range(self.m):
            on = self._vertices[dots[:, i] >= self._offsets[i] - tol]
            if len(on) < n:
                continue
            area = _facet_area(on, self._normals[i])
            if area > 0.0:
                idx.append(i)
                areas.append(area)
        idx = np.asarray(idx, dtype=int)
        return FacetMeasure(idx, self._normals[idx], np.asarray(areas), self._offsets[idx])

    def surface_area(self) -> float:
        return self.facet_measure.total

    def volume(self) -> float:
        fm = self.facet_measure
        return float(fm.areas @ fm.offsets) / self.dimension

    def parameters(self):
        return {"normals": self._normals.tolist(), "offsets": self._offsets.tolist()}


def _facet_area(points: np.ndarray, normal: np.ndarray) -> float:
    n = normal.size
    if n == 2:
        t = np.array([-normal[1], normal[0]])
        s = points @ t
        return float(s.max() - s.min())
    # Orthonormal basis of the facet plane.
    k = int(np.argmin(np.abs(normal)))
    e = np.zeros(3)
    e[k] = 1.0
    b1 = np.cross(normal, e)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(normal, b1)
    xy = np.column_stack([points @ b1, points @ b2])
    xy = xy - xy.mean(axis=0)
    order = np.argsort(np.arctan2(xy[:, 1], xy[:, 0]))
    x, y = xy[order, 0], xy[order, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def surface_area_measure(P: HPolytope) -> FacetMeasure:
    return P.facet_measure


def volume(P: HPolytope) -> float:
    return P.volume()


def vertices(P: HPolytope) -> np.ndarray:
    return P.vertices


def support(body: StarBody, u):
    return body.support(u)


def radial(body: StarBody, u):
    return body.radial(u)


def polar_support(P: HPolytope, u):
    return P.polar_support(u)


class PolarOfPolytope(StarBody):
    """P° = conv{u_i / z_i}; its radial function is 1 / h_P."""

    kind = "polar_polytope"

    def __init__(self, polytope: HPolytope):
        if not isinstance(polytope, HPolytope):
            raise InvalidInputError("PolarOfPolytope wraps an HPolytope")
        self.polytope = polytope
        self.dimension = polytope.dimension

    def radial(self, u):
        return 1.0 / self.polytope.support(u)

    def support(self, u):
        return self.polytope.polar_support(u)

    def polar(self):
        return self.polytope

    def as_hpolytope(self) -> HPolytope:
        """H-representation: one facet <x, v/|v|> <= 1/|v| per vertex v of P."""
        v = self.polytope.vertices
        r = np.linalg.norm(v, axis=1)
        return HPolytope.trusted(v / r[:, None], 1.0 / r)

    def parameters(self):
        return self.polytope.parameters()


class Scaled(StarBody):
    kind = "scaled"

    def __init__(self, body: StarBody, factor: float):
        if not factor > 0:
            raise InvalidInputError("scale factor must be positive")
        self.body = body
        self.factor = float(factor)
        self.dimension = body.dimension
        self.radial_only = body.radial_only

    def radial(self, u):
        return self.factor * self.body.radial(u)

    def support(self, u):
        return self.factor * self.body.support(u)

    def polar(self):
        return Scaled(self.body.polar(), 1.0 / self.factor)

    def parameters(self):
        return {"body": self.body.to_dict(), "factor": self.factor}


class SupportAverage(StarBody):
    """The Minkowski average (P + Q)/2 of two polytopes (H-form or polar form)."""

    kind = "support_average"

    def __init__(self, first: StarBody, second: StarBody):
        if first.dimension != second.dimension:
            raise InvalidInputError("support average needs bodies of equal dimension")
        self.first = first
        self.second = second
        self.dimension = first.dimension
        pa, pb = _vertex_form(first), _vertex_form(second)
        mids = 0.5 * (pa[:, None, :] + pb[None, :, :]).reshape(-1, self.dimension)
        hull = ConvexHull(mids)
        eq = hull.equations
        normals, offsets = eq[:, : self.dimension], -eq[:, self.dimension]
        # Triangulated hull facets repeat the same supporting hyperplane.
        planes = _dedupe(np.column_stack([normals, offsets]), 1e-10)
        n = self.dimension
        unit = planes[:, :n] / np.linalg.norm(planes[:, :n], axis=1)[:, None]
        self.hpolytope = HPolytope.trusted(unit, planes[:, n])

    def support(self, u):
        return 0.5 * (self.first.support(u) + self.second.support(u))

    def radial(self, u):
        return self.hpolytope.radial(u)

    def polar(self):
        return PolarOfPolytope(self.hpolytope)

    def parameters(self):
        return {"first": self.first.to_dict(), "second": self.second.to_dict()}


def _vertex_form(body: StarBody) -> np.ndarray:
    hp = as_hpolytope(body)
    if hp is None:
        raise InvalidInputError(f"{body.kind} bodies have no finite vertex set")
    return hp.vertices


def as_hpolytope(body: StarBody) -> HPolytope | None:
    """H-representation of a polyhedral body, or None for curved bodies."""
    if isinstance(body, HPolytope):
        return body
    if isinstance(body, PolarOfPolytope):
        return body.as_hpolytope()
    if isinstance(body, SupportAverage):
        return body.hpolytope
    if isinstance(body, Scaled):
        inner = as_hpolytope(body.body)
        return None if inner is None else inner.scaled(body.factor)
    return None


def hausdorff_distance(first: StarBody, second: StarBody, rule=None) -> float:
    """max over quadrature nodes of |h_first - h_second|."""
    if first.dimension != second.dimension:
        raise InvalidInputError("Hausdorff distance needs bodies of equal dimension")
    if rule is None:
        rule = product_rule(first.dimension)
    return float(np.max(np.abs(np.asarray(first.support(rule.nodes)) - np.asarray(second.support(rule.nodes)))))


def body_from_dict(doc: dict) -> StarBody:
    """Inverse of ``StarBody.to_dict``."""
    try:
        kind = doc["kind"]
        n = int(doc["dimension"])
        p = doc.get("parameters", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed body document: {exc}") from exc
    if kind == "ball":
        body = Ball(p.get("radius", 1.0), n)
    elif kind == "ellipsoid":
        body = Ellipsoid(p["semiaxes"], p.get("rotation"))
    elif kind == "cone":
        body = Cone(p["R"], p["r"], p["axis"])
    elif kind == "polytope":
        body = HPolytope(p["normals"], p["offsets"], normalize=True)
    elif kind == "polar_polytope":
        body = PolarOfPolytope(HPolytope(p["normals"], p["offsets"], normalize=True))
    elif kind == "scaled":
        body = Scaled(body_from_dict(p["body"]), p["factor"])
    elif kind == "support_average":
        body = SupportAverage(body_from_dict(p["first"]), body_from_dict(p["second"]))
    else:
        raise InvalidInputError(f"unknown body kind {kind!r}")
    if body.dimension != n:
        raise InvalidInputError(f"body dimension {body.dimension} does not match declared {n}")
    return body


def cube(n: int, half_width: float = 1.0) -> HPolytope:
    """Axis-parallel cube [-a, a]^n as an H-polytope."""
    eye = np.eye(n)
    return HPolytope(np.vstack([eye, -eye]), np.full(2 * n, float(half_width)))


def regular_polygon(m: int, inradius: float = 1.0, phase: float = 0.0) -> HPolytope:
    """Regular m-gon with facet normals at angles phase + 2 pi k / m."""
    t = phase + 2.0 * np.pi * np.arange(m) / m
    return HPolytope(np.column_stack([np.cos(t), np.sin(t)]), np.full(m, float(inradius)))
