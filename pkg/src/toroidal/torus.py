"""Curved-torus geometry and the area-uniform distribution on it."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from . import cardioid
from .circular import TWO_PI
from .exceptions import DomainError

QUADRANT_EDGES = np.array([0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi, TWO_PI])
MIN_QUADRANT_SAMPLE = 160


@dataclass(frozen=True)
class TorusGeometry:
    """Torus with horizontal radius ``R`` and tube radius ``r``, ``0 < r/R <= 1``."""

    R: float
    r: float

    def __post_init__(self):
        if not (self.R > 0 and self.r > 0 and np.isfinite(self.R) and np.isfinite(self.r)):
            raise DomainError("radii must be positive and finite")
        if self.r > self.R:
            raise DomainError(f"aspect ratio r/R must be <= 1, got {self.r / self.R}")

    @classmethod
    def from_nu(cls, nu: float, R: float = 1.0) -> "TorusGeometry":
        return cls(R, nu * R)

    @property
    def nu(self) -> float:
        return self.r / self.R

    @property
    def total_area(self) -> float:
        return 4.0 * np.pi**2 * self.R * self.r


def embed(g: TorusGeometry, phi, theta) -> np.ndarray:
    """Points ``((R + r cos t) cos p, (R + r cos t) sin p, r sin t)``, shape ``(..., 3)``."""
    phi = np.asarray(phi, float)
    theta = np.asarray(theta, float)
    ring = g.R + g.r * np.cos(theta)
    return np.stack([ring * np.cos(phi), ring * np.sin(phi), g.r * np.sin(theta) + 0.0 * phi], axis=-1)


def implicit_residual(g: TorusGeometry, xyz) -> np.ndarray:
    """``(sqrt(x^2 + y^2) - R)^2 + z^2 - r^2``; zero on the surface."""
    xyz = np.asarray(xyz, float)
    rho = np.hypot(xyz[..., 0], xyz[..., 1])
    return (rho - g.R) ** 2 + xyz[..., 2] ** 2 - g.r**2


def area_element(g: TorusGeometry, theta):
    """Surface area per unit ``dphi dtheta``: ``r (R + r cos theta)``."""
    return g.r * (g.R + g.r * np.cos(np.asarray(theta, float)))


def area_uniform_pdf(g: TorusGeometry, phi, theta):
    """Parameter-space density of the area-uniform law, ``(1 + nu cos theta) / (4 pi^2)``."""
    theta = np.asarray(theta, float)
    return (1.0 + g.nu * np.cos(theta)) / (4.0 * np.pi**2) + 0.0 * np.asarray(phi, float)


def sample_area_uniform(g: TorusGeometry, n: int, rng):
    """Draw ``n`` angle pairs uniformly with respect to surface area.

    ``phi`` is uniform on the circle and ``theta`` is an independent zero-mean
    Cardioid with concentration ``nu``, drawn by the exact sampler.

    Returns
    -------
    (phi, theta) : tuple of ndarray
    """
    if n < 0:
        raise DomainError("sample size must be non-negative")
    phi = TWO_PI * rng.random(n)
    theta = cardioid.sample_exact(cardioid.CardioidParams(0.0, g.nu), n, rng)
    return phi, theta


def quadrant_area_proportions(g: TorusGeometry) -> np.ndarray:
    """Share of surface area in each (phi-quadrant, theta-quadrant) cell.

    Returns a ``(4, 4)`` array indexed ``[q_phi, q_theta]``. Rows are
    identical because the area element does not depend on ``phi``.
    """
    a, b = QUADRANT_EDGES[:-1], QUADRANT_EDGES[1:]
    theta_share = (b - a + g.nu * (np.sin(b) - np.sin(a))) / TWO_PI
    return np.tile(theta_share / 4.0, (4, 1))


def quadrant_index(angles) -> np.ndarray:
    """Quadrant 0..3 of each angle, using left-closed quarter circles."""
    q = np.floor(np.mod(np.asarray(angles, float), TWO_PI) / (0.5 * np.pi)).astype(int)
    return np.clip(q, 0, 3)


class QuadrantTest(NamedTuple):
    chi_square: float
    p_value: float
    observed: np.ndarray
    expected: np.ndarray


def quadrant_frequency_test(phi, theta, g: TorusGeometry) -> QuadrantTest:
    """Pearson chi-square of the 16 quadrant counts against surface-area shares.

    The statistic has 15 degrees of freedom. At least 160 points are required
    so that every expected count is of order 10.
    """
    phi = np.asarray(phi, float)
    theta = np.asarray(theta, float)
    if phi.shape != theta.shape:
        raise DomainError("phi and theta must have equal length")
    n = phi.size
    if n < MIN_QUADRANT_SAMPLE:
        raise DomainError(f"need at least {MIN_QUADRANT_SAMPLE} points, got {n}")
    observed = np.zeros((4, 4))
    np.add.at(observed, (quadrant_index(phi), quadrant_index(theta)), 1)
    expected = n * quadrant_area_proportions(g)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return QuadrantTest(chi2, float(stats.chi2.sf(chi2, df=15)), observed, expected)
