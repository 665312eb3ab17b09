"""Circular-circular regression of ``phi`` on ``theta`` and QQ diagnostics.

The regression curve is the location of ``phi | theta`` under the fitted
dependent model, ``3*pi/2 + mu2 - lambda (theta - mu1)``, so it uses only
``mu1``, ``mu2`` and ``lambda``.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .circular import TWO_PI, circular_mean, wrap_angle
from .exceptions import DomainError

UNITS = ("radians", "degrees")


def _unit(unit: str) -> str:
    aliases = {"rad": "radians", "radians": "radians", "deg": "degrees", "degrees": "degrees"}
    try:
        return aliases[unit]
    except KeyError:
        raise DomainError(f"unknown angle unit {unit!r}") from None


@dataclass(frozen=True)
class RegressionModel:
    mu1: float
    mu2: float
    lam: float
    source: Optional[object] = None

    @classmethod
    def from_fit(cls, fit) -> "RegressionModel":
        """Take ``(mu1, mu2, lambda)`` from a converged ``FitResult``."""
        if not fit.converged:
            raise DomainError("cannot build a regression model from an unconverged fit")
        p = fit.params
        return cls(p.mu1, p.mu2, p.lam, fit)


def predict(m: RegressionModel, theta):
    return wrap_angle(1.5 * np.pi + m.mu2 - m.lam * (np.asarray(theta, float) - m.mu1))


def regression_curve_gap(a: RegressionModel, b: RegressionModel, size: int = 4096) -> float:
    """Sup over a uniform ``theta`` grid of the circular distance between two curves."""
    theta = TWO_PI * np.arange(size) / size
    d = np.asarray(predict(a, theta)) - np.asarray(predict(b, theta))
    return float(np.max(np.abs(np.mod(d + np.pi, TWO_PI) - np.pi)))


class QQReport(NamedTuple):
    pairs: np.ndarray
    mean_perp_distance: float
    unit: str


def qq_report(observed, predicted, unit: str = "radians") -> QQReport:
    """Rank-paired quantiles of two angle samples and their distance to ``y = x``.

    Both inputs are radians. They are wrapped to ``[0, 2*pi)``, sorted and
    paired by rank; the distance of each pair to the identity line is
    ``|x - y| / sqrt(2)``. ``pairs`` and the mean distance are returned in
    ``unit``.
    """
    unit = _unit(unit)
    x = np.sort(np.mod(np.asarray(observed, float).ravel(), TWO_PI))
    y = np.sort(np.mod(np.asarray(predicted, float).ravel(), TWO_PI))
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} observed vs {y.size} predicted")
    if x.size < 2:
        raise DomainError("QQ report needs at least two points")
    if unit == "degrees":
        x, y = np.degrees(x), np.degrees(y)
    dist = float(np.mean(np.abs(x - y)) / np.sqrt(2.0))
    return QQReport(np.column_stack([x, y]), dist, unit)


def residual_summary(observed, predicted):
    """Mean direction and resultant length of the wrapped residuals.

    Returns
    -------
    direction : float or None
        ``None`` when the resultant length is numerically zero.
    concentration : float
        Mean resultant length in ``[0, 1]``.
    """
    observed = np.asarray(observed, float).ravel()
    predicted = np.asarray(predicted, float).ravel()
    if observed.size != predicted.size:
        raise DomainError("observed and predicted must have equal length")
    if observed.size < 1:
        raise DomainError("need at least one residual")
    direction, r = circular_mean(wrap_angle(observed - predicted))
    return direction, r
