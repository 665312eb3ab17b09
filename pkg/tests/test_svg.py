import xml.etree.ElementTree as ET

import numpy as np
import pytest

from toroidal.circular import TWO_PI
from toroidal.exceptions import DomainError
from toroidal.svg import qq_svg, rose_bins, rose_svg

NS = "{http://www.w3.org/2000/svg}"


def test_rose_bins_counts():
    g = np.random.default_rng(0)
    rb = rose_bins(g.uniform(0, TWO_PI, 10_000), 36)
    assert rb.counts.sum() == 10_000
    assert rb.counts.max() / rb.counts.min() < 1.5
    assert rose_bins([TWO_PI - 1e-15, 0.0], 4).counts.tolist() == [1, 0, 0, 1]


def test_rose_single_petal_and_validation():
    rb = rose_bins(np.zeros(50), 8)
    root = ET.fromstring(rose_svg(rb))
    assert len(root.findall(f"{NS}path")) == 1
    with pytest.raises(DomainError):
        rose_bins([0.0], 3)


def test_rose_petal_radius_scales_with_sqrt_count():
    rb = rose_bins([0.1] * 4 + [2.0], 4)
    paths = ET.fromstring(rose_svg(rb)).findall(f"{NS}path")
    radii = [float(p.get("d").split(" A ")[1].split()[0]) for p in paths]
    assert radii[0] / radii[1] == pytest.approx(2.0)


def test_qq_svg_has_identity_line_and_points():
    root = ET.fromstring(qq_svg(np.array([[0.1, 0.2], [1.0, 1.1], [3.0, 2.9]])))
    assert len(root.findall(f"{NS}line")) == 1
    assert len(root.findall(f"{NS}circle")) == 3
