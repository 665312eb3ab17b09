"""Five-parameter dependent toroidal density and its marginals/conditionals.

The joint density on ``[0, 2*pi)^2`` is::

    h(phi, theta) = [1 + nu cos(theta - mu1)] [1 - kappa sin(phi - mu2 + lam (theta - mu1))] / (4 pi^2)

``theta`` is marginally Cardioid(mu1, nu) and ``phi | theta`` is Cardioid with
concentration ``kappa`` and location ``3*pi/2 + mu2 - lam (theta - mu1)``.

Sign convention: the location of ``phi | theta`` carries ``- lam (theta - mu1)``.
Expanding ``-sin(x) = cos(x - 3*pi/2)`` with ``x = phi - mu2 + lam(theta - mu1)``
gives this sign; the regression module uses the same one.

``theta - mu1`` is *not* reduced modulo 2*pi, so for non-integer ``lam`` the
density has a seam at ``theta = 0`` and shifting ``mu1`` by 2*pi is only a
symmetry when ``mu2`` is shifted by ``2*pi*lam`` at the same time (see
:meth:`ToroidalParams.canonical`).
"""

from dataclasses import astuple, dataclass

import numpy as np

from . import cardioid
from .circular import TWO_PI, wrap_angle
from .exceptions import DomainError
from .quadrature import integrate

PARAM_NAMES = ("nu", "kappa", "lambda", "mu1", "mu2")
MARGINAL_ATOL = 1e-10


@dataclass(frozen=True)
class ToroidalParams:
    nu: float
    kappa: float
    lam: float
    mu1: float = 0.0
    mu2: float = 0.0

    def __post_init__(self):
        vals = astuple(self)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError("parameters must be finite")
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu}")
        if abs(self.kappa) > 1.0:
            raise DomainError(f"kappa must lie in [-1, 1], got {self.kappa}")
        for name in ("mu1", "mu2"):
            if not 0.0 <= getattr(self, name) < TWO_PI:
                raise DomainError(f"{name} must lie in [0, 2*pi), got {getattr(self, name)}")
        for f, v in zip(("nu", "kappa", "lam", "mu1", "mu2"), vals):
            object.__setattr__(self, f, float(v))

    @classmethod
    def canonical(cls, nu, kappa, lam, mu1, mu2) -> "ToroidalParams":
        """Build the canonical representative of an equivalence class.

        Two exact symmetries leave the density unchanged:

        * ``(kappa, mu2) -> (-kappa, mu2 + pi)``
        * ``(mu1, mu2) -> (mu1 - 2*pi*k, mu2 + 2*pi*k*lam)`` for integer ``k``

        The canonical form has ``kappa >= 0`` and both locations in
        ``[0, 2*pi)``.
        """
        k = np.floor(mu1 / TWO_PI)
        mu1 = mu1 - TWO_PI * k
        mu2 = mu2 + TWO_PI * k * lam
        if mu1 >= TWO_PI:
            mu1, mu2 = mu1 - TWO_PI, mu2 + TWO_PI * lam
        if kappa < 0:
            kappa, mu2 = -kappa, mu2 + np.pi
        return cls(nu, kappa, lam, wrap_angle(mu1), wrap_angle(mu2))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self))

    def to_dict(self) -> dict:
        return dict(zip(PARAM_NAMES, astuple(self)))


def _dependence_arg(p, phi, theta):
    return (np.asarray(phi, float) - p.mu2) + p.lam * (np.asarray(theta, float) - p.mu1)


def joint_pdf(p: ToroidalParams, phi, theta):
    theta = np.asarray(theta, float)
    marg = 1.0 + p.nu * np.cos(theta - p.mu1)
    dep = 1.0 - p.kappa * np.sin(_dependence_arg(p, phi, theta))
    return marg * dep / (4.0 * np.pi**2)


def marginal_theta_pdf(p: ToroidalParams, theta):
    return cardioid.pdf(cardioid.CardioidParams(p.mu1, p.nu), theta)


def conditional_phi_location(p: ToroidalParams, theta):
    """Location ``3*pi/2 + mu2 - lam (theta - mu1)`` of ``phi | theta``, wrapped."""
    return wrap_angle(1.5 * np.pi + p.mu2 - p.lam * (np.asarray(theta, float) - p.mu1))


def conditional_phi_pdf(p: ToroidalParams, phi, theta):
    return (1.0 - p.kappa * np.sin(_dependence_arg(p, phi, theta))) / TWO_PI


def conditional_phi_mean_direction(p: ToroidalParams, theta):
    """Regression function of ``phi`` on ``theta``.

    Equal to the mean direction of ``phi | theta`` when ``kappa > 0``; for
    ``kappa < 0`` the actual mean direction is this value plus pi.
    """
    return conditional_phi_location(p, theta)


def coefficient_A(nu, kappa, lam):
    """Concentration of the ``phi`` marginal.

    Written as ``kappa [sinc(lam) - nu/2 (sinc(lam - 1) + sinc(lam + 1))]``
    with the normalised ``sinc(x) = sin(pi x)/(pi x)``. This is the rational
    form ``kappa (lam^2 (1 + nu) - 1) sin(pi lam) / (pi (lam^3 - lam))``
    split into partial fractions, and it is continuous through the removable
    singularities: ``A(0) = kappa`` and ``A(+-1) = -kappa nu / 2``.
    """
    lam = np.asarray(lam, float)
    out = kappa * (np.sinc(lam) - 0.5 * nu * (np.sinc(lam - 1.0) + np.sinc(lam + 1.0)))
    return float(out) if out.ndim == 0 else out


def marginal_phi_location(lam) -> float:
    return wrap_angle(1.5 * np.pi - np.pi * lam)


def marginal_phi_pdf_closed(p: ToroidalParams, phi):
    """Closed-form ``phi`` marginal, valid only for ``mu1 = mu2 = 0``.

    Cardioid with concentration :func:`coefficient_A` and location
    ``3*pi/2 - pi*lam``. For non-zero locations the integrand over ``theta``
    is not periodic, so use :func:`marginal_phi_pdf_numeric`.
    """
    if p.mu1 != 0.0 or p.mu2 != 0.0:
        raise DomainError("closed-form phi marginal requires mu1 = mu2 = 0")
    A = coefficient_A(p.nu, p.kappa, p.lam)
    return (1.0 + A * np.cos(np.asarray(phi, float) - marginal_phi_location(p.lam))) / TWO_PI


def marginal_phi_pdf_numeric(p: ToroidalParams, phi, atol=MARGINAL_ATOL):
    """``phi`` marginal by adaptive quadrature of the joint over ``theta``."""
    phi = np.asarray(phi, float)
    flat = phi.ravel()
    res = integrate(lambda t: joint_pdf(p, flat[:, None], t[None, :]), 0.0, TWO_PI, atol=atol)
    out = res.value.reshape(phi.shape)
    return float(out) if out.ndim == 0 else out


def conditional_theta_pdf(p: ToroidalParams, theta, phi):
    """Density of ``theta`` given ``phi``: joint divided by the ``phi`` marginal."""
    marg = marginal_phi_pdf_numeric(p, phi)
    if np.any(np.asarray(marg) <= 0.0):
        raise DomainError("phi marginal density is zero at the conditioning value")
    return joint_pdf(p, phi, theta) / marg


def sample_joint(p: ToroidalParams, n: int, rng):
    """Draw ``n`` pairs by conditioning, with two exact Cardioid draws per pair.

    ``theta`` comes from Cardioid(mu1, nu); ``phi`` from a zero-mean
    Cardioid(kappa) rotated to the conditional location at that ``theta``.

    Returns
    -------
    (phi, theta) : tuple of ndarray
    """
    theta = cardioid.sample_exact(cardioid.CardioidParams(p.mu1, p.nu), n, rng)
    base = cardioid.sample_exact(cardioid.CardioidParams(0.0, p.kappa), n, rng)
    phi = wrap_angle(base + conditional_phi_location(p, theta))
    return np.asarray(phi, float).reshape(n), theta


def density_grid(p: ToroidalParams, size: int = 181):
    """Joint density on a ``size x size`` grid of the half-open square ``[0, 2*pi)^2``.

    Returns ``(phi, theta, density)`` as flattened arrays with ``phi`` varying
    slowest.
    """
    axis = TWO_PI * np.arange(size) / size
    ph, th = np.meshgrid(axis, axis, indexing="ij")
    return ph.ravel(), th.ravel(), joint_pdf(p, ph, th).ravel()
