"""Bracketed root finding for monotone functions of a positive scale."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, NumericalError

MAX_DOUBLINGS = 200
LOG_XTOL = 1e-14


def _finite(value: float) -> float:
    if math.isnan(value):
        raise NumericalError("defect evaluated to NaN")
    if math.isinf(value):
        return math.copysign(1e300, value)
    return value


def solve_scale(defect, lo: float, hi: float | None = None, max_doublings: int = MAX_DOUBLINGS) -> float:
    """Positive root of a defect function that is monotone in its argument.

    The search runs in log(eta). ``[lo, hi]`` is an initial guess for the
    bracket; each end is pushed outward by a factor of 2 until the defect
    changes sign, at most ``max_doublings`` times. Brent's method then
    refines the root to ``LOG_XTOL`` in log(eta).
    """
    if hi is None:
        hi = lo
    if not (lo > 0 and hi > 0):
        raise BracketError(f"initial bracket must be positive, got [{lo}, {hi}]")
    if hi < lo:
        lo, hi = hi, lo
    f = lambda y: _finite(float(defect(math.exp(y))))
    y_lo, y_hi = math.log(lo), math.log(hi)
    f_lo, f_hi = f(y_lo), f(y_hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    step = math.log(2.0)
    doublings = 0
    while np.sign(f_lo) == np.sign(f_hi):
        if doublings >= max_doublings:
            raise BracketError(
                f"no sign change after {max_doublings} doublings "
                f"(bracket [{math.exp(y_lo):.3g}, {math.exp(y_hi):.3g}], defects {f_lo:.3g}, {f_hi:.3g})"
            )
        # Move only the end that points toward the root for monotone f.
        if abs(f_lo) < abs(f_hi):
            y_hi, f_hi = y_lo, f_lo
            y_lo -= step
            f_lo = f(y_lo)
        else:
            y_lo, f_lo = y_hi, f_hi
            y_hi += step
            f_hi = f(y_hi)
        doublings += 1
    root = brentq(f, y_lo, y_hi, xtol=LOG_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(root)
