"""Bracketed root finding for strictly increasing scalar functions."""

from __future__ import annotations

import logging
import math
from typing import Callable

from scipy.optimize import brentq

from .errors import ConvergenceError

log = logging.getLogger(__name__)

# |x - root| <= _XTOL + _RTOL*|x| keeps the final bracket below 1e-12*max(1, root)
_XTOL = 5e-13
_RTOL = 5e-13


def increasing_root(fn: Callable[[float], float], lo: float, hi: float, ftol: float) -> float:
    """Root of a strictly increasing ``fn`` with ``fn(lo) < 0 < fn(hi)``.

    Brent's method does the bulk of the work.  If its answer misses the
    residual target ``|fn| <= ftol`` the bracket around it is bisected down to
    adjacent floats.  When ``fn`` is so steep that no double meets the target,
    the endpoint of that final bracket with the smaller residual is returned:
    the root is then resolved to one ulp.

    Raises:
        ConvergenceError: if the bracket is invalid.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (flo < 0.0 < fhi):
        raise ConvergenceError(f"invalid bracket: f({lo!r})={flo!r}, f({hi!r})={fhi!r}")
    r = brentq(fn, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=500)
    if abs(fn(r)) <= ftol:
        return r

    step = _XTOL + _RTOL * abs(r)
    left, right = max(lo, r - step), min(hi, r + step)
    while fn(left) > 0.0:
        left = max(lo, left - 4.0 * step)
    while fn(right) < 0.0:
        right = min(hi, right + 4.0 * step)
    best, best_val = r, abs(fn(r))
    while right - left > 2.0 * math.ulp(max(abs(left), abs(right))):
        mid = 0.5 * (left + right)
        fm = fn(mid)
        if abs(fm) < best_val:
            best, best_val = mid, abs(fm)
        if abs(fm) <= ftol:
            return mid
        if fm < 0.0:
            left = mid
        else:
            right = mid
    for x in (left, right):
        v = abs(fn(x))
        if v < best_val:
            best, best_val = x, v
    log.debug("residual floor %.3e above tolerance %.3e at %r", best_val, ftol, best)
    return best
