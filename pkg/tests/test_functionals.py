import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_polar.bodies import Ball, Cone, Ellipsoid, HPolytope, PolarOfPolytope, cube, regular_polygon
from orlicz_polar.errors import HemisphereError, InvalidInputError
from orlicz_polar.functionals import (
    DensityMeasure,
    DiscreteMeasure,
    GFunction,
    PhiFunction,
    check_growth_condition,
    dual_volume,
    exponential_g,
    g_from_config,
    general_volume,
    homogeneous_dual_volume,
    homogeneous_general_volume,
    isoperimetric_ratio,
    objective_integral,
    orlicz_mixed_volume,
    orlicz_norm,
    phi_from_config,
    polynomial_g,
    power_g,
    power_phi,
    surface_atoms,
    texp_phi,
    validate_g,
    validate_phi,
    weighted_power_g,
)
from orlicz_polar.sphere import ball_volume, product_rule, random_directions, rotation_sending

AXES2 = DiscreteMeasure(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))


def test_dual_volume_anchors():
    rule = product_rule(3)
    g3 = power_g(3, dimension=3)
    assert dual_volume(g3, Ball(1.0, 3), rule) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    assert dual_volume(g3, Cone(1.0, 0.5, [0, 0, 1]), rule) == pytest.approx(2 * math.pi / 3, rel=1e-3)
    for q in (-2.0, 1.0, 2.5):
        assert dual_volume(power_g(q, dimension=3), Ball(1.7, 3), rule) == pytest.approx(1.7**q * ball_volume(3), rel=1e-12)


def test_cone_volume_for_other_parameters():
    # V(B^2) / (3 R^2 r) with R = 2, r = 0.25. The radial function jumps to 0
    # across the cone's equator, so the rule is rotated to put its split there.
    axis = np.array([1.0, 0.0, 0.0])
    rule = product_rule(3).rotated(rotation_sending(axis, [0, 0, 1]))
    value = dual_volume(power_g(3, dimension=3), Cone(2.0, 0.25, axis), rule)
    assert value == pytest.approx(math.pi / (3 * 4 * 0.25), rel=1e-3)


def test_dual_volume_of_box_matches_volume():
    rule = product_rule(3, 96)
    P = cube(3, 0.7)
    assert dual_volume(power_g(3, dimension=3), P, rule) == pytest.approx(P.volume(), rel=1e-3)


def test_homogeneous_dual_volume_anchors():
    rule = product_rule(3)
    assert homogeneous_dual_volume(power_g(3, dimension=3), Ball(1.0, 3), rule) == pytest.approx((4 * math.pi / 3) ** (1 / 3), rel=1e-12)
    # G = t^2/3, q = 2: sqrt(4 pi / 3).
    assert homogeneous_dual_volume(power_g(2, dimension=3), Ball(1.0, 3), rule) == pytest.approx(2.04665, abs=1e-5)


@settings(max_examples=25, deadline=None)
@given(
    axes=st.lists(st.floats(0.2, 3.0), min_size=3, max_size=3),
    s=st.floats(0.05, 20.0),
    which=st.integers(0, 2),
)
def test_hat_dual_homogeneity_property(axes, s, which):
    g = [power_g(3, dimension=3), polynomial_g([0.5, 0.25], [2.0, 4.0]), exponential_g(0.2)][which]
    rule = product_rule(3, 16)
    E = Ellipsoid(axes)
    assert homogeneous_dual_volume(g, E.scaled(s), rule) == pytest.approx(s * homogeneous_dual_volume(g, E, rule), rel=1e-9)


def test_hat_dual_monotone_examples():
    rule = product_rule(3)
    g = power_g(3, dimension=3)
    assert homogeneous_dual_volume(g, Ball(1.0, 3), rule) < homogeneous_dual_volume(g, Ball(1.1, 3), rule)
    assert homogeneous_dual_volume(g, cube(3), rule) < homogeneous_dual_volume(g, cube(3, 1.1), rule)


def test_rotation_invariance_and_control():
    rng = np.random.default_rng(4)
    rule = product_rule(3)
    E = Ellipsoid([1.0, 0.7, 0.4])
    t = rotation_sending(*random_directions(rng, 2, 3))
    g = power_g(2.5, dimension=3)
    assert dual_volume(g, Ellipsoid(E.semiaxes, t), rule) == pytest.approx(dual_volume(g, E, rule), rel=1e-9)
    aniso = weighted_power_g(3, 1 / 3, [0, 0, 1], 0.8)
    assert abs(dual_volume(aniso, Ellipsoid(E.semiaxes, t), rule) / dual_volume(aniso, E, rule) - 1) > 1e-3


def test_general_volume_examples():
    assert general_volume(power_g(1, dimension=3), cube(3)) == pytest.approx(8.0)
    assert general_volume(power_g(0, 1 / 3), cube(3)) == pytest.approx(8.0)
    assert general_volume(power_g(1, dimension=2), cube(2)) == pytest.approx(4.0)
    assert homogeneous_general_volume(power_g(1, dimension=3), cube(3)) == pytest.approx(8.0)
    assert homogeneous_general_volume(power_g(1, dimension=2), cube(2)) == pytest.approx(4.0)
    P = HPolytope(np.vstack([np.eye(3), -np.eye(3)]), [1, 2, 0.5, 1.5, 1, 1])
    g = exponential_g(0.3)
    assert homogeneous_general_volume(g, P.scaled(2.0)) == pytest.approx(8 * homogeneous_general_volume(g, P), rel=1e-8)


def test_ball_surface_atoms():
    rule = product_rule(3, 16)
    atoms = surface_atoms(Ball(2.0, 3), rule)
    assert float(np.sum(atoms.areas)) == pytest.approx(4 * math.pi * 4.0, rel=1e-12)
    assert general_volume(power_g(1, dimension=3), Ball(2.0, 3), rule) == pytest.approx(ball_volume(3) * 8, rel=1e-12)


def test_growth_certificates():
    c = check_growth_condition(power_g(3, dimension=3), 2.0, 3)
    assert c.holds and c.inf_estimate == pytest.approx(1 / 3)
    c = check_growth_condition(power_g(2, dimension=3), 2.0, 3)
    assert c.holds and c.inf_estimate == pytest.approx(1 / 3)
    assert not check_growth_condition(power_g(-1, 1.0), 2.0, 3).holds
    with pytest.raises(InvalidInputError):
        check_growth_condition(power_g(3, dimension=3), 2.0, 3, t_lo=0.0)


def test_validate_g_rejects_misdeclared_functions():
    validate_g(power_g(3, dimension=3), 3)
    validate_g(power_g(-1, 1.0), 3)
    validate_g(exponential_g(0.2), 3)
    fake = GFunction(lambda t, u: 1.0 + 0.0 * t, "increasing", True, None, 1.0, None, "constant", {})
    with pytest.raises(InvalidInputError):
        validate_g(fake, 3)
    bounded = GFunction(lambda t, u: t / (1 + t), "increasing", False, None, 0.0, None, "bounded", {})
    with pytest.raises(InvalidInputError):
        validate_g(bounded, 3)


def test_validate_phi():
    for phi in (power_phi(2.0), power_phi(0.5), power_phi(-1.0), texp_phi()):
        validate_phi(phi)
    shifted = PhiFunction(lambda t: 2 * t, lambda y: y / 2, "I", True, "twice", {})
    with pytest.raises(InvalidInputError):
        validate_phi(shifted)
    with pytest.raises(InvalidInputError):
        power_phi(0.0)


def test_texp_inverse():
    phi = texp_phi()
    t = np.logspace(-3, 2, 40)
    assert np.allclose(phi.inverse(phi(t)), t, rtol=1e-12)
    assert float(phi(np.array([1.0]))[0]) == 1.0


def test_config_parsers():
    g = g_from_config({"kind": "power", "q": 3.0}, 3)
    assert g.params["scale"] == pytest.approx(1 / 3)
    assert phi_from_config({"kind": "texp"}).name == "texp"
    with pytest.raises(InvalidInputError):
        g_from_config({"kind": "mystery"}, 3)


def test_orlicz_norm_examples():
    phi2 = power_phi(2.0)
    assert orlicz_norm(np.ones(4), AXES2, phi2) == pytest.approx(1.0, abs=1e-12)
    for phi in (phi2, power_phi(-2.0), texp_phi()):
        assert orlicz_norm(np.full(4, 3.7), AXES2, phi) == pytest.approx(3.7, rel=1e-12)
    assert orlicz_norm(np.array([1.0, 1.0, 2.0, 2.0]), AXES2, phi2) == pytest.approx(math.sqrt(2.5), rel=1e-12)
    assert orlicz_norm(cube(2), AXES2, phi2) == pytest.approx(1.0)
    single = DiscreteMeasure([[1.0, 0.0]], [2.0])
    assert objective_integral(power_phi(1.0), np.array([3.0]), single) == pytest.approx(6.0)
    assert objective_integral(phi2, np.ones(4), AXES2) == pytest.approx(4.0)
    assert objective_integral(phi2, cube(2), AXES2) == pytest.approx(4.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), c=st.floats(0.01, 100.0), p=st.sampled_from([-3.0, -0.5, 0.5, 1.0, 2.0, 4.0]))
def test_orlicz_norm_homogeneous_and_monotone(seed, c, p):
    rng = np.random.default_rng(seed)
    mu = DiscreteMeasure(random_directions(rng, 6, 3), rng.uniform(0.1, 3.0, 6))
    h = rng.uniform(0.2, 5.0, 6)
    phi = power_phi(p)
    base = orlicz_norm(h, mu, phi)
    assert orlicz_norm(c * h, mu, phi) == pytest.approx(c * base, rel=1e-9)
    assert orlicz_norm(h + rng.uniform(0, 1, 6), mu, phi) >= base * (1 - 1e-12)
    assert base == pytest.approx(float(mu.weights @ h**p / mu.total_mass) ** (1 / p), rel=1e-9)


def test_mixed_volume_examples():
    K = cube(2)
    assert orlicz_mixed_volume(K, K, power_phi(3.0), "integral") == pytest.approx(K.volume())
    assert orlicz_mixed_volume(K, K, texp_phi(), "hat") == pytest.approx(1.0)
    assert orlicz_mixed_volume(K, K.scaled(2.0), power_phi(1.0), "integral") == pytest.approx(8.0)


def test_isoperimetric_ratio():
    assert isoperimetric_ratio(cube(2)) == pytest.approx(8 / (4 * math.sqrt(math.pi)))
    assert 1.0 < isoperimetric_ratio(regular_polygon(64)) < 1.002


def test_density_measure_lumping_preserves_mass():
    rule = product_rule(2, 1024)
    density = DensityMeasure(lambda u: 1.0 + 0.5 * u[:, 0], rule)
    assert density.total_mass == pytest.approx(2 * math.pi, rel=1e-12)
    lumped = density.lump(16)
    assert len(lumped) == 16
    assert lumped.total_mass == pytest.approx(2 * math.pi, rel=1e-12)


def test_measure_validation():
    with pytest.raises(InvalidInputError):
        DiscreteMeasure([[1.0, 0.0], [0.0, 1.0]], [1.0])
    with pytest.raises(InvalidInputError):
        DiscreteMeasure([[1.0, 0.0], [0.0, 1.0]], [1.0, -1.0])
    with pytest.raises(HemisphereError):
        DiscreteMeasure([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]], np.ones(3)).check_hemisphere()


def test_radial_zero_needs_g_at_zero():
    rule = product_rule(3, 16)
    with pytest.raises(Exception):
        dual_volume(power_g(-1, 1.0), Cone(1.0, 0.5, [0, 0, 1]), rule)


def test_polar_polytope_dual_volume_equals_polar_volume():
    P = cube(3, 2.0)
    polar = PolarOfPolytope(P)
    exact = polar.as_hpolytope().volume()
    assert dual_volume(power_g(3, dimension=3), polar, product_rule(3, 96)) == pytest.approx(exact, rel=1e-3)
