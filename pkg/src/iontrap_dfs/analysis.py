"""Closed-form leakage model for pulse alternation, and power-law fits.

With g = 1 the proportionality constants of the population model are exactly
one: a single xx pulse of length t leaves sin^2(t) outside the code, and an
xx/yy pair of total length 2t integrates to P(t) = t - sin(2t)/2.

Large-n behaviour: T - (n/2) sin(2T/n) = 2T^3/(3n^2) - 2T^5/(15n^4) + ...
The leading coefficient is 2/3, twice the T^3/(3n^2) that is sometimes
quoted; only the n^-2 power matters for the error scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPoints, NonPositiveValue

MIN_FIT_POINTS = 4


def analytic_leakage(t: float) -> float:
    return math.sin(t) ** 2


def analytic_integrated_population(t: float) -> float:
    """Integral of leakage over one xx/yy pair, each pulse of length t."""
    if t < 1e-3:
        # series form avoids cancellation in t - sin(2t)/2
        return 2 * t**3 / 3 - 2 * t**5 / 15 + 4 * t**7 / 315
    return t - 0.5 * math.sin(2 * t)


def analytic_total_population(T: float, n: int) -> float:
    """n P(T/n) = T - (n/2) sin(2T/n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * analytic_integrated_population(T / n)


def asymptotic_total_population(T: float, n: int) -> float:
    """Leading large-n term of :func:`analytic_total_population`."""
    return 2 * T**3 / (3 * n**2)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    log_prefactor: float
    residual: float
    n_min: int
    n_max: int
    n_points: int = 0

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)

    def predict(self, n) -> np.ndarray:
        return self.prefactor * np.asarray(n, dtype=float) ** self.exponent

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "log_prefactor": self.log_prefactor,
            "residual": self.residual,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "n_points": self.n_points,
        }


def fit_power_law(points, n_min: int = 17, floor: float = 0.0) -> PowerLawFit:
    """Least-squares line through (log n, log value) for points with n >= n_min.

    Values at or below ``floor`` raise NonPositiveValue; ``floor`` lets a
    caller declare a numerical noise level below which a fit is meaningless.
    """
    pts = sorted((int(n), float(v)) for n, v in points if int(n) >= n_min)
    if len(pts) < MIN_FIT_POINTS:
        raise InsufficientPoints(f"need {MIN_FIT_POINTS} points with n >= {n_min}, got {len(pts)}")
    bad = [(n, v) for n, v in pts if not v > floor]
    if bad:
        raise NonPositiveValue(f"{len(bad)} value(s) <= {floor:g}, first at n={bad[0][0]}")
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    a = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return PowerLawFit(float(slope), float(intercept), resid, pts[0][0], pts[-1][0], len(pts))
