"""Angle arithmetic and circular summary statistics.

Angles are radians in ``[0, 2*pi)``. Missing observations are carried by
``numpy.ma.MaskedArray`` masks rather than sentinel values, since 0 is a
perfectly valid angle.
"""

from typing import NamedTuple, Optional

import numpy as np

from .exceptions import DomainError, UndefinedDirectionError

TWO_PI = 2.0 * np.pi

# Resultant lengths below this are treated as exactly zero.
ZERO_RESULTANT = 1e-12
# Mean squared sine deviation below this counts as zero dispersion.
ZERO_DISPERSION = 1e-24


class CircularMean(NamedTuple):
    direction: Optional[float]
    resultant_length: float


def wrap_angle(x):
    """Reduce angles modulo 2*pi into ``[0, 2*pi)``.

    Works on scalars and arrays; scalars come back as ``float``.

    Raises
    ------
    DomainError
        If any input is NaN or infinite.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("cannot wrap a non-finite angle")
    out = np.mod(arr, TWO_PI)
    # np.mod can round tiny negatives up to exactly 2*pi
    out = np.where(out >= TWO_PI, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def angular_distance(a, b):
    """Shortest arc length between two angles, in ``[0, pi]``."""
    d = np.abs(np.mod(np.asarray(a, float) - np.asarray(b, float), TWO_PI))
    out = np.minimum(d, TWO_PI - d)
    return float(out) if out.ndim == 0 else out


def _observed(series):
    """Return the non-missing values of ``series`` as a flat float array."""
    if isinstance(series, np.ma.MaskedArray):
        values = series.compressed().astype(float)
    else:
        values = np.asarray(series, dtype=float).ravel()
    if not np.all(np.isfinite(values)):
        raise DomainError("angles must be finite")
    return values


def circular_mean(series) -> CircularMean:
    """Mean direction and mean resultant length of a set of angles.

    Parameters
    ----------
    series : array_like or numpy.ma.MaskedArray
        Angles in radians. Masked entries are ignored.

    Returns
    -------
    CircularMean
        ``direction`` is ``None`` when the resultant length is zero, since the
        mean direction is then undefined.
    """
    values = _observed(series)
    if values.size == 0:
        raise DomainError("circular mean of an empty series")
    c = np.mean(np.cos(values))
    s = np.mean(np.sin(values))
    r = float(np.hypot(c, s))
    if r < ZERO_RESULTANT:
        return CircularMean(None, 0.0)
    return CircularMean(wrap_angle(np.arctan2(s, c)), min(r, 1.0))


def mean_direction(series) -> float:
    """Like :func:`circular_mean` but raise when the direction is undefined."""
    direction, _ = circular_mean(series)
    if direction is None:
        raise UndefinedDirectionError("resultant length is zero")
    return direction


def circular_correlation(a, b) -> float:
    """Jammalamadaka-Sarma circular correlation coefficient.

    ``sum sin(a - abar) sin(b - bbar) / sqrt(sum sin^2(a - abar) sum sin^2(b - bbar))``
    where ``abar`` and ``bbar`` are the sample mean directions.
    """
    if np.ma.is_masked(a) or np.ma.is_masked(b):
        raise DomainError("circular correlation requires complete data")
    a = _observed(a)
    b = _observed(b)
    if a.size != b.size:
        raise DomainError(f"length mismatch: {a.size} != {b.size}")
    if a.size < 2:
        raise DomainError("need at least two pairs")
    sa = np.sin(a - mean_direction(a))
    sb = np.sin(b - mean_direction(b))
    va, vb = np.sum(sa**2), np.sum(sb**2)
    # Rounding leaves sin(a - abar) ~ 1e-16 for constant series; treat as zero.
    if min(va, vb) <= a.size * ZERO_DISPERSION:
        raise DomainError("zero dispersion about the mean direction")
    return float(np.clip(np.sum(sa * sb) / np.sqrt(va * vb), -1.0, 1.0))


def axial_to_circular(degrees, multiplier: int = 4):
    """Map axial data in degrees to circular data in radians.

    Each angle is multiplied by ``multiplier`` and reduced modulo 360 degrees,
    so axes that are equivalent under rotation by ``360 / multiplier`` degrees
    coincide. Masks are preserved.
    """
    if int(multiplier) != multiplier or multiplier < 1:
        raise DomainError("multiplier must be a positive integer")
    masked = isinstance(degrees, np.ma.MaskedArray)
    data = np.ma.getdata(degrees).astype(float) if masked else np.asarray(degrees, float)
    mask = np.ma.getmaskarray(degrees) if masked else np.zeros(data.shape, bool)
    if not np.all(np.isfinite(data[~mask])):
        raise DomainError("angles must be finite")
    filled = np.where(mask, 0.0, data)
    radians = wrap_angle(np.deg2rad(np.mod(multiplier * filled, 360.0)))
    if masked:
        return np.ma.masked_array(radians, mask=mask)
    return radians


def impute_circular_mean(series):
    """Replace missing entries with the circular mean of the observed ones.

    Parameters
    ----------
    series : numpy.ma.MaskedArray
        Angles in radians; masked entries are missing.

    Returns
    -------
    numpy.ndarray
        A complete series. Observed entries are returned unchanged.
    """
    data = np.ma.getdata(series).astype(float)
    mask = np.ma.getmaskarray(series)
    if mask.all():
        raise DomainError("every entry is missing")
    fill = mean_direction(np.ma.masked_array(data, mask=mask))
    return np.where(mask, fill, data)
