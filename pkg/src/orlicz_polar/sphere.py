"""Unit vectors, rotations and product quadrature rules on S^{n-1}.

Nodes use general spherical coordinates u = (v sin(theta), cos(theta)) with
v on S^{n-2} and area element sin(theta)^(n-2) dtheta dv. The polar angle is
integrated with Gauss-Legendre nodes on each of the two half ranges
[0, pi/2] and [pi/2, pi], so integrands with a jump at the equator (cones)
keep spectral accuracy. The base circle S^1 carries a uniform rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InvalidInputError, QuadratureError

UNIT_TOL = 1e-12


def ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball B^n."""
    return pi ** (n / 2) / gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface area of S^{n-1}, equal to n V(B^n)."""
    return n * ball_volume(n)


def unit_vector(coords, normalize: bool = False) -> np.ndarray:
    """Return ``coords`` as a float unit vector, validating the invariants.

    With ``normalize=True`` any nonzero vector is rescaled; otherwise the
    norm must already equal 1 within 1e-12.
    """
    u = np.asarray(coords, dtype=float).reshape(-1)
    if u.size < 2:
        raise InvalidInputError(f"unit vectors need dimension >= 2, got {u.size}")
    norm = np.linalg.norm(u)
    if normalize:
        if not np.isfinite(norm) or norm == 0.0:
            raise InvalidInputError("cannot normalize a zero or non-finite vector")
        return u / norm
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidInputError(f"vector norm {norm!r} differs from 1")
    return u


def unit_rows(directions, normalize: bool = False) -> np.ndarray:
    """Validate (or normalize) each row of a 2-D array as a unit vector."""
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    if u.shape[1] < 2:
        raise InvalidInputError(f"unit vectors need dimension >= 2, got {u.shape[1]}")
    norms = np.linalg.norm(u, axis=1)
    if normalize:
        if np.any(~np.isfinite(norms)) or np.any(norms == 0.0):
            raise InvalidInputError("cannot normalize a zero or non-finite vector")
        return u / norms[:, None]
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise InvalidInputError("direction rows must have unit norm")
    return u


def is_orthogonal(matrix, tol: float = 1e-10) -> bool:
    t = np.asarray(matrix, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        return False
    return bool(np.max(np.abs(t @ t.T - np.eye(t.shape[0]))) <= tol)


def rotation_sending(a, b) -> np.ndarray:
    """Proper rotation T with T^t a = b.

    The rotation acts in the plane spanned by ``a`` and ``b`` and fixes its
    orthogonal complement.
    """
    a = unit_vector(a, normalize=True)
    b = unit_vector(b, normalize=True)
    if a.size != b.size:
        raise InvalidInputError(f"dimension mismatch: {a.size} vs {b.size}")
    n = a.size
    # T^t a = b  <=>  T b = a, so rotate b onto a.
    c = float(np.clip(a @ b, -1.0, 1.0))
    w = a - c * b
    s = np.linalg.norm(w)
    if s < 1e-14:
        if c > 0:
            return np.eye(n)
        # Antipodal: half turn in a plane containing b.
        k = int(np.argmin(np.abs(b)))
        e = np.zeros(n)
        e[k] = 1.0
        w = e - (e @ b) * b
        w /= np.linalg.norm(w)
        return np.eye(n) - 2.0 * (np.outer(b, b) + np.outer(w, w))
    w /= s
    return (
        np.eye(n)
        + (c - 1.0) * (np.outer(b, b) + np.outer(w, w))
        + s * (np.outer(w, b) - np.outer(b, w))
    )


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Weighted node set approximating the spherical Lebesgue measure du."""

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int = 0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.dimension:
            raise InvalidInputError("nodes must be an (N, n) array")
        if weights.shape != (nodes.shape[0],):
            raise InvalidInputError("need exactly one weight per node")
        if np.any(weights <= 0):
            raise InvalidInputError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.weights.size

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def rotated(self, rotation) -> "QuadratureRule":
        """The same rule with every node mapped by ``rotation``."""
        t = np.asarray(rotation, dtype=float)
        return QuadratureRule(self.dimension, self.nodes @ t.T, self.weights, self.resolution)


def default_resolution(n: int) -> int:
    if n <= 3:
        return 48
    if n == 4:
        return 24
    return 12


def _circle(k: int):
    angles = 2.0 * pi * np.arange(k) / k
    nodes = np.column_stack([np.cos(angles), np.sin(angles)])
    return nodes, np.full(k, 2.0 * pi / k)


def _product(n: int, resolution: int):
    if n == 2:
        return _circle(2 * resolution)
    sub_nodes, sub_weights = _product(n - 1, resolution)
    x, w = leggauss((resolution + 1) // 2)
    theta = np.concatenate([(x + 1.0) * pi / 4.0, (x + 3.0) * pi / 4.0])
    wt = np.concatenate([w, w]) * (pi / 4.0) * np.sin(theta) ** (n - 2)
    nodes = np.concatenate(
        [
            np.column_stack([sub_nodes * np.sin(th), np.full(len(sub_weights), np.cos(th))])
            for th in theta
        ]
    )
    weights = np.concatenate([wk * sub_weights for wk in wt])
    return nodes, weights


@lru_cache(maxsize=64)
def product_rule(n: int, resolution: int | None = None) -> QuadratureRule:
    """Product quadrature rule on S^{n-1}.

    Parameters
    ----------
    n : int
        Ambient dimension (n >= 2).
    resolution : int, optional
        Points per angular factor. For n = 2 this is the number of equally
        spaced nodes on the circle; for n >= 3 each polar angle factor gets
        ``resolution`` Gauss nodes (half per hemisphere) and the base circle
        ``2 * resolution``.

    Returns
    -------
    QuadratureRule
        Positive weights summing to the area of S^{n-1}.
    """
    if resolution is None:
        resolution = default_resolution(n)
    if int(n) != n or n < 2:
        raise InvalidInputError(f"dimension must be an integer >= 2, got {n}")
    if int(resolution) != resolution or resolution < 4:
        raise InvalidInputError(f"resolution must be an integer >= 4, got {resolution}")
    n, resolution = int(n), int(resolution)
    if n == 2:
        nodes, weights = _circle(resolution)
    else:
        nodes, weights = _product(n, resolution)
    nodes = nodes / np.linalg.norm(nodes, axis=1)[:, None]
    return QuadratureRule(n, nodes, weights, resolution)


def integrate(rule: QuadratureRule, f) -> float:
    """Compute sum_k w_k f(u_k).

    ``f`` is vectorized: it receives the (N, n) node array and returns N
    values. A non-finite value raises :class:`QuadratureError` naming the
    first offending node.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape != rule.weights.shape:
        values = np.broadcast_to(values, rule.weights.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise QuadratureError(
            f"integrand is {float(values[k])} at node {k}: {rule.nodes[k].tolist()}",
            node=rule.nodes[k].copy(),
        )
    return float(values @ rule.weights)


def random_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Uniformly distributed unit vectors (Gaussian normalization)."""
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1)[:, None]
