import math

import numpy as np
import pytest

from orlicz_polar.bodies import Ball, cube, hausdorff_distance, regular_polygon
from orlicz_polar.errors import HemisphereError, InvalidInputError
from orlicz_polar.experiments import asymmetric_quad, diagonal_atoms, equal_polygon
from orlicz_polar.functionals import (
    DensityMeasure,
    DiscreteMeasure,
    dual_volume,
    homogeneous_dual_volume,
    power_g,
    power_phi,
    texp_phi,
)
from orlicz_polar.solver import (
    brute_force_oracle,
    constraint_family,
    constraint_value,
    continuity_experiment,
    counterexample_sweep,
    feasible_objective,
    make_problem,
    normalize_to_constraint,
    petty_problem,
    search_bound,
    solve_discrete,
    uniqueness_probe,
)
from orlicz_polar.sphere import product_rule

G2 = power_g(2, dimension=2)
G3 = power_g(3, dimension=3)
PHI2 = power_phi(2.0)


def square_spec(family="Btilde", **kw):
    return make_problem(equal_polygon(4), PHI2, G2, family=family, **kw)


@pytest.mark.parametrize("tag", ["Btilde", "Bhat", "Bbar"])
def test_constraint_target_matches_ball(tag):
    g = power_g(3, dimension=3) if tag != "Bbar" else power_g(1, dimension=3)
    rule = product_rule(3)
    fam = constraint_family(tag, g, 3, rule)
    assert fam.target_value == pytest.approx(constraint_value(tag, g, Ball(1.0, 3), rule), rel=1e-10)


def test_normalize_examples():
    rule = product_rule(3)
    fam = constraint_family("Btilde", G3, 3, rule)
    s, body = normalize_to_constraint(Ball(2.0, 3), fam, G3, rule)
    assert s == pytest.approx(0.5, rel=1e-10)
    assert dual_volume(G3, body.polar(), rule) == pytest.approx(fam.target_value, rel=1e-10)
    fam_hat = constraint_family("Bhat", G3, 3, rule)
    s, _ = normalize_to_constraint(Ball(4.0, 3), fam_hat, G3, rule)
    assert s == pytest.approx(0.25, rel=1e-10)
    s, _ = normalize_to_constraint(Ball(1.0, 3), fam_hat, G3, rule)
    assert s == pytest.approx(1.0, abs=1e-8)


def test_normalize_without_closed_form_uses_root_solver():
    from orlicz_polar.functionals import exponential_g

    rule = product_rule(2)
    g = exponential_g(0.3)
    fam = constraint_family("Btilde", g, 2, rule)
    s, body = normalize_to_constraint(cube(2, 1.7), fam, g, rule)
    assert dual_volume(g, body.polar(), rule) == pytest.approx(fam.target_value, rel=1e-10)
    # The homogeneous family has a closed form even for non-homogeneous G.
    fam_hat = constraint_family("Bhat", g, 2, rule)
    s2, body2 = normalize_to_constraint(cube(2, 1.7), fam_hat, g, rule)
    assert homogeneous_dual_volume(g, body2.polar(), rule) == pytest.approx(fam_hat.target_value, rel=1e-10)


def test_square_instance_against_one_dimensional_oracle():
    spec = square_spec()
    sol = solve_discrete(spec)
    z = sol.z_star
    assert np.ptp(z) <= 1e-6 * z.max()
    assert sol.objective_value == pytest.approx(4 * float(np.mean(z)) ** 2, rel=1e-9)
    _, oracle = brute_force_oracle(spec, grid_per_axis=4096, symmetric=True)
    assert abs(sol.objective_value - oracle) <= 1e-5
    # z* is pinned by the constraint on the polar of z* times the unit square.
    rule = spec.rule
    assert dual_volume(G2, cube(2, z[0]).polar(), rule) == pytest.approx(spec.family.target_value, rel=1e-8)
    assert np.max(np.abs(sol.facial_defects)) <= 1e-5
    assert abs(sol.constraint_residual) <= 1e-6


def test_square_same_shape_for_hat_family():
    a = solve_discrete(square_spec("Btilde"))
    b = solve_discrete(square_spec("Bhat"))
    za, zb = a.z_star / a.z_star.max(), b.z_star / b.z_star.max()
    assert np.allclose(za, zb, atol=1e-6)


def test_octagon_is_regular():
    sol = solve_discrete(make_problem(equal_polygon(8), PHI2, G2))
    assert np.ptp(sol.z_star) <= 1e-6 * sol.z_star.max()
    assert np.max(np.abs(sol.facial_defects)) <= 1e-5


def test_triangle_matches_oracle():
    spec = make_problem(equal_polygon(3), PHI2, G2)
    sol = solve_discrete(spec)
    _, oracle = brute_force_oracle(spec, grid_per_axis=20, refinements=3)
    assert sol.objective_value == pytest.approx(oracle, rel=1e-3)
    assert sol.objective_value <= oracle + 1e-9


def test_single_point_grid():
    spec = square_spec()
    z, value = brute_force_oracle(spec, grid_per_axis=1)
    assert value == pytest.approx(feasible_objective(spec, np.full(4, search_bound(spec))))


def test_oracle_rejects_large_full_grids():
    with pytest.raises(InvalidInputError):
        brute_force_oracle(make_problem(equal_polygon(8), PHI2, G2))


def test_solution_respects_bound():
    spec = make_problem(asymmetric_quad(), PHI2, G2)
    sol = solve_discrete(spec)
    # For Btilde / Bhat with integral objective the ball start bounds the value.
    assert sol.objective_value <= spec.measure.total_mass
    assert np.all(sol.z_star <= search_bound(spec))
    assert np.all(sol.facial_defects <= 1e-12)


def test_determinism_and_threads():
    spec = make_problem(asymmetric_quad(), texp_phi(), G2, family="Bhat")
    a = solve_discrete(spec, starts=4, threads=1).to_dict()
    b = solve_discrete(spec, starts=4, threads=4).to_dict()
    assert a == b
    c = solve_discrete(make_problem(asymmetric_quad(), texp_phi(), G2, family="Bhat", seed=123), starts=4).to_dict()
    assert c["z_star"] == pytest.approx(a["z_star"], rel=1e-5)


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("ORLICZ_POLAR_THREADS", "3")
    spec = square_spec()
    assert solve_discrete(spec, starts=3).to_dict() == solve_discrete(spec, starts=3, threads=1).to_dict()


def test_validation_errors():
    with pytest.raises(HemisphereError):
        solve_discrete(make_problem(DiscreteMeasure([[1, 0], [0, 1], [0.6, 0.8]], np.ones(3)), PHI2, G2))
    with pytest.raises(InvalidInputError):
        solve_discrete(make_problem(equal_polygon(4), power_phi(-1.0), G2))
    with pytest.raises(InvalidInputError):
        solve_discrete(make_problem(equal_polygon(4), PHI2, power_g(-1, 1.0)))
    with pytest.raises(InvalidInputError):
        solve_discrete(square_spec(), starts=0)


def test_petty_square():
    spec = petty_problem(cube(2), PHI2, G2)
    sol = solve_discrete(spec)
    assert np.max(np.abs(sol.facial_defects)) <= 1e-5
    assert abs(sol.constraint_residual) <= 1e-6
    assert np.ptp(sol.z_star) <= 1e-6 * sol.z_star.max()


def test_norm_objective_has_same_minimizer_for_power_phi():
    a = solve_discrete(make_problem(asymmetric_quad(), PHI2, G2))
    b = solve_discrete(make_problem(asymmetric_quad(), PHI2, G2, objective="orlicz_norm"))
    assert hausdorff_distance(a.polytope, b.polytope, product_rule(2)) <= 1e-5


def test_uniqueness_probe_single_start():
    assert uniqueness_probe(square_spec(), starts=1)["dispersion"] == 0.0


def test_uniqueness_probe_symmetric_instance():
    out = uniqueness_probe(square_spec(), starts=4)
    assert out["dispersion"] <= 1e-4
    for sol in out["solutions"]:
        assert np.ptp(sol.z_star) <= 1e-5 * sol.z_star.max()


def test_counterexample_identity_row():
    rows = counterexample_sweep(G2, PHI2, diagonal_atoms(2), "sup_increasing", [1.0], product_rule(2, 4096))
    assert rows[0]["f"] == pytest.approx(1.0, rel=1e-12)
    assert rows[0]["objective"] == pytest.approx(4.0, rel=1e-12)


def test_counterexample_three_dimensional_trends():
    rule = product_rule(3)
    mu = diagonal_atoms(3)
    eps = [0.5, 0.1, 0.02]
    inf = counterexample_sweep(G3, power_phi(-1.0), mu, "inf_decreasing", eps, rule)
    sup = counterexample_sweep(G3, PHI2, mu, "sup_increasing", eps, rule)
    assert np.all(np.diff([r["objective"] for r in inf]) < 0)
    assert np.all(np.diff([r["objective"] for r in sup]) > 0)
    assert np.all(np.diff([r["f"] for r in sup]) < 0)


def test_counterexample_validation():
    mu = diagonal_atoms(2)
    with pytest.raises(InvalidInputError):
        counterexample_sweep(G2, PHI2, mu, "inf_decreasing", [0.5])
    with pytest.raises(InvalidInputError):
        counterexample_sweep(G2, PHI2, mu, "sup_increasing", [1.5])
    with pytest.raises(InvalidInputError):
        counterexample_sweep(G2, PHI2, mu, "sideways", [0.5])
    with pytest.raises(InvalidInputError):
        counterexample_sweep(G2, power_phi(-1.0), DiscreteMeasure(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4)), "inf_decreasing", [0.5])


def test_continuity_single_size():
    rule = product_rule(2, 256)
    density = DensityMeasure(lambda u: np.ones(len(u)), rule)
    out = continuity_experiment(density, [8], PHI2, G2, rule=rule)
    assert len(out["rows"]) == 1
    assert out["rows"][0]["hausdorff_to_reference"] == 0.0
    assert out["rows"][0]["optimal_value"] == pytest.approx(out["rows"][0]["symmetric_value"], rel=1e-8)


def test_continuity_rejects_unsorted_sizes():
    density = DensityMeasure(lambda u: np.ones(len(u)), product_rule(2, 64))
    with pytest.raises(InvalidInputError):
        continuity_experiment(density, [16, 8], PHI2, G2)


@pytest.mark.parametrize("family, g", [("Bgen", power_g(1, dimension=2)), ("Bbar", power_g(2, dimension=2))])
def test_general_volume_families_match_oracle(family, g):
    spec = make_problem(asymmetric_quad(), PHI2, g, family=family)
    sol = solve_discrete(spec)
    _, oracle = brute_force_oracle(spec, grid_per_axis=12, refinements=3)
    assert sol.objective_value == pytest.approx(oracle, rel=1e-3)
    assert abs(sol.constraint_residual) <= 1e-6


def test_solution_serialization_has_no_timing():
    doc = solve_discrete(square_spec(), starts=2).to_dict()
    assert not any("time" in key or "ms" in key.split("_") for key in doc)
    assert doc["max_facial_defect"] <= 1e-5
    assert math.isfinite(doc["objective_value"])


def test_measure_scaling_leaves_argmin_unchanged():
    a = solve_discrete(make_problem(asymmetric_quad(), PHI2, G2))
    b = solve_discrete(make_problem(asymmetric_quad().scaled(3.7), PHI2, G2))
    assert np.allclose(a.z_star, b.z_star, atol=1e-6)
    assert b.objective_value == pytest.approx(3.7 * a.objective_value, rel=1e-9)


def rotation2(angle):
    return np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])


def test_rotation_equivariance():
    # A symmetry of the default circle rule: exact up to solver tolerance.
    a = solve_discrete(make_problem(asymmetric_quad(), PHI2, G2))
    b = solve_discrete(make_problem(asymmetric_quad().rotated(rotation2(2 * math.pi * 5 / 48)), PHI2, G2))
    assert np.allclose(a.z_star, b.z_star, atol=1e-6)
    # A generic angle agrees up to quadrature error, which a fine rule removes.
    rule = product_rule(2, 4096)
    a = solve_discrete(make_problem(asymmetric_quad(), PHI2, G2, rule=rule))
    b = solve_discrete(make_problem(asymmetric_quad().rotated(rotation2(0.37)), PHI2, G2, rule=rule))
    assert np.allclose(a.z_star, b.z_star, atol=1e-5)
