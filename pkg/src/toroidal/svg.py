"""Minimal static SVG for rose diagrams and QQ plots."""

from typing import NamedTuple

import numpy as np

from .circular import TWO_PI
from .exceptions import DomainError

SIZE = 400
MARGIN = 20


class RoseBins(NamedTuple):
    edges: np.ndarray
    counts: np.ndarray


def rose_bins(angles, bins: int) -> RoseBins:
    """Counts of angles in ``bins`` equal sectors starting at 0."""
    if int(bins) != bins or bins < 4:
        raise DomainError("rose diagram needs an integer number of bins >= 4")
    a = np.mod(np.asarray(angles, float).ravel(), TWO_PI)
    idx = np.minimum((a / TWO_PI * bins).astype(int), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return RoseBins(TWO_PI * np.arange(bins + 1) / bins, counts)


def _xy(cx, cy, radius, angle):
    # Angles run counter-clockwise from east; SVG y points down.
    return cx + radius * np.cos(angle), cy - radius * np.sin(angle)


def _header(width, height):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>']


def rose_svg(rb: RoseBins) -> str:
    """Sector petals with radius proportional to ``sqrt(count)``, so area tracks count."""
    c = SIZE / 2
    rmax = c - MARGIN
    peak = rb.counts.max()
    parts = _header(SIZE, SIZE)
    parts.append(f'<circle cx="{c}" cy="{c}" r="{rmax:.3f}" fill="none" stroke="#bbbbbb"/>')
    for lo, hi, n in zip(rb.edges[:-1], rb.edges[1:], rb.counts):
        if n == 0:
            continue
        r = rmax * np.sqrt(n / peak)
        x0, y0 = _xy(c, c, r, lo)
        x1, y1 = _xy(c, c, r, hi)
        large = int(hi - lo > np.pi)
        parts.append(f'<path d="M {c} {c} L {x0:.3f} {y0:.3f} A {r:.3f} {r:.3f} 0 {large} 0 '
                     f'{x1:.3f} {y1:.3f} Z" fill="#4c72b0" stroke="black" stroke-width="0.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def qq_svg(pairs, unit: str = "radians") -> str:
    """Rank-paired quantiles as points with the identity line."""
    pairs = np.asarray(pairs, float)
    top = 360.0 if unit == "degrees" else TWO_PI
    span = SIZE - 2 * MARGIN

    def px(v):
        return MARGIN + span * v / top

    def py(v):
        return SIZE - MARGIN - span * v / top

    parts = _header(SIZE, SIZE)
    parts.append(f'<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" '
                 f'fill="none" stroke="black"/>')
    parts.append(f'<line x1="{px(0):.3f}" y1="{py(0):.3f}" x2="{px(top):.3f}" y2="{py(top):.3f}" '
                 f'stroke="#c44e52"/>')
    for x, y in pairs:
        parts.append(f'<circle cx="{px(x):.3f}" cy="{py(y):.3f}" r="2.5" fill="#4c72b0"/>')
    parts.append(f'<text x="{SIZE / 2}" y="{SIZE - 4}" font-size="11" text-anchor="middle">'
                 f'observed ({unit})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
