"""Numerical toolkit for dual-polar Orlicz-Minkowski problems with general dual volumes."""
from .bodies import Ball, Cone, Ellipsoid, HPolytope, PolarOfPolytope, hausdorff_distance
from .errors import InvalidInputError, NumericalError, OrliczPolarError
from .functionals import (
    DiscreteMeasure,
    dual_volume,
    general_volume,
    homogeneous_dual_volume,
    homogeneous_general_volume,
    orlicz_norm,
    power_g,
    power_phi,
)
from .solver import make_problem, normalize_to_constraint, petty_problem, solve_discrete
from .sphere import product_rule

__version__ = "0.1.0"
