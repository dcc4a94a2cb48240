"""Least-squares slope fitting for exponent and decay-rate scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def _linfit(x, y):
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    pred = a @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(float(coef[0]), float(coef[1]), r2, x.size)


def fit_loglog(x, y, floor=1e-15):
    """Fit log(y) against log(x); points with y <= floor or x <= 0 are dropped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0.0) & (y > floor)
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise DegenerateFitError(f"need at least 2 usable points, have {x.size}")
    lx = np.log(x)
    if np.ptp(lx) == 0.0:
        raise DegenerateFitError("all abscissae coincide")
    return _linfit(lx, np.log(y))


def fit_semilog(n, y, floor=1e-300):
    """Fit log(y) against n; the decay rate is exp(slope)."""
    n = np.asarray(n, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > floor
    n, y = n[keep], y[keep]
    if n.size < 2:
        raise DegenerateFitError(f"need at least 2 usable points, have {n.size}")
    if np.ptp(n) == 0.0:
        raise DegenerateFitError("all abscissae coincide")
    return _linfit(n, np.log(y))
