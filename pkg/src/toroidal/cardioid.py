"""The Cardioid distribution on the circle.

Density ``(1 + rho * cos(y - mu)) / (2*pi)`` with mean direction ``mu`` and
signed concentration ``|rho| <= 1``. A negative ``rho`` is the same law as
``(mu + pi, -rho)``.

Samplers take any object with a numpy-``Generator``-style ``random(size)``
method, and draw uniforms only through it.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .circular import TWO_PI, wrap_angle
from .exceptions import DomainError, NumericError

QUANTILE_TOL = 1e-12
QUANTILE_MAX_ITER = 200
# Newton steps are only trusted where the density is at least this large.
_NEWTON_MIN_SLOPE = 1e-3


@dataclass(frozen=True)
class CardioidParams:
    mu: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.rho)):
            raise DomainError("Cardioid parameters must be finite")
        if abs(self.rho) > 1.0:
            raise DomainError(f"|rho| must be <= 1, got {self.rho}")
        object.__setattr__(self, "mu", wrap_angle(self.mu))
        object.__setattr__(self, "rho", float(self.rho))


def pdf(p: CardioidParams, y):
    return (1.0 + p.rho * np.cos(np.asarray(y, float) - p.mu)) / TWO_PI


def _require_zero_mean(p):
    if p.mu != 0.0:
        raise DomainError("cdf/quantile are defined for the zero-mean form; rotate first")


def cdf(p: CardioidParams, y):
    """``(y + rho*sin(y)) / (2*pi)`` on ``[0, 2*pi]`` for a zero-mean Cardioid."""
    _require_zero_mean(p)
    y = np.clip(np.asarray(y, float), 0.0, TWO_PI)
    out = (y + p.rho * np.sin(y)) / TWO_PI
    return float(out) if out.ndim == 0 else out


def quantile(p: CardioidParams, u):
    """Inverse of :func:`cdf`, by safeguarded Newton-bisection.

    Each root is bracketed in ``[0, 2*pi]``; a Newton step is taken when the
    density exceeds ``1e-3`` and lands inside the bracket, otherwise the
    bracket is bisected. Iteration stops once ``|cdf(y) - u| <= 1e-12``.
    """
    _require_zero_mean(p)
    u = np.asarray(u, float)
    if np.any((u <= 0.0) | (u >= 1.0)) or not np.all(np.isfinite(u)):
        raise DomainError("quantile requires 0 < u < 1")
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    lo = np.zeros_like(u)
    hi = np.full_like(u, TWO_PI)
    y = TWO_PI * u
    rho = p.rho
    for _ in range(QUANTILE_MAX_ITER):
        g = (y + rho * np.sin(y)) / TWO_PI - u
        if np.all(np.abs(g) <= QUANTILE_TOL):
            break
        lo = np.where(g < 0, y, lo)
        hi = np.where(g > 0, y, hi)
        slope = (1.0 + rho * np.cos(y)) / TWO_PI
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = y - g / slope
        ok = (slope > _NEWTON_MIN_SLOPE) & (newton > lo) & (newton < hi)
        y = np.where(np.abs(g) <= QUANTILE_TOL, y, np.where(ok, newton, 0.5 * (lo + hi)))
    else:
        g = (y + rho * np.sin(y)) / TWO_PI - u
        if np.any(np.abs(g) > QUANTILE_TOL):
            raise NumericError("Cardioid quantile did not converge")
    return float(y[0]) if scalar else y


def sample_exact(p: CardioidParams, n: int, rng) -> np.ndarray:
    """Draw ``n`` Cardioid variates with no rejections.

    Each draw uses one angle ``t ~ U[0, 2*pi)`` and one ``u ~ U[0, 1)``.
    ``t`` is kept when ``u < (1 + rho*cos t)/2``; otherwise it is reflected
    within its half circle, to ``pi - t`` on ``[0, pi)`` and to ``3*pi - t``
    on ``[pi, 2*pi)``. The kept and reflected branches together produce the
    zero-mean Cardioid density, which is then rotated by ``mu``.
    """
    if n < 0:
        raise DomainError("sample size must be non-negative")
    t = TWO_PI * rng.random(n)
    u = rng.random(n)
    keep = u < 0.5 * (1.0 + p.rho * np.cos(t))
    reflected = np.where(t < np.pi, np.pi - t, 3.0 * np.pi - t)
    y = np.where(keep, t, reflected)
    return np.asarray(wrap_angle(y + p.mu), dtype=float).reshape(n)


class RejectionSample(NamedTuple):
    values: np.ndarray
    acceptance_rate: float
    proposals: int


def sample_rejection_aur(p: CardioidParams, n: int, rng, batch: int = 4096) -> RejectionSample:
    """Acceptance-rejection baseline for the zero-mean Cardioid.

    Proposals ``t ~ U[0, 2*pi)`` are accepted when ``u < (1 + rho*cos t)/2``,
    an envelope of ``1/pi``, so about half of all proposals are rejected for
    every ``rho``. ``proposals`` counts exactly the pairs needed to obtain
    ``n`` acceptances.
    """
    _require_zero_mean(p)
    if not 0.0 < p.rho <= 1.0:
        raise DomainError("rejection baseline requires 0 < rho <= 1")
    if n < 0:
        raise DomainError("sample size must be non-negative")
    out = np.empty(n)
    filled = 0
    proposals = 0
    while filled < n:
        size = max(batch, 2 * (n - filled) + 64)
        t = TWO_PI * rng.random(size)
        u = rng.random(size)
        hit = np.flatnonzero(u < 0.5 * (1.0 + p.rho * np.cos(t)))
        need = n - filled
        if hit.size >= need:
            out[filled:] = t[hit[:need]]
            proposals += int(hit[need - 1]) + 1
            filled = n
        else:
            out[filled:filled + hit.size] = t[hit]
            proposals += size
            filled += hit.size
    rate = n / proposals if proposals else float("nan")
    return RejectionSample(out, rate, proposals)
