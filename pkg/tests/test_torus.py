import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate as sp_integrate
from scipy import stats

from toroidal.cardioid import CardioidParams, cdf
from toroidal.circular import TWO_PI, circular_correlation
from toroidal.exceptions import DomainError
from toroidal.torus import (TorusGeometry, area_element, area_uniform_pdf, embed,
                            implicit_residual, quadrant_area_proportions,
                            quadrant_frequency_test, quadrant_index, sample_area_uniform)

G = TorusGeometry(3.0, 1.5)


def test_geometry_validation():
    assert G.nu == 0.5
    assert TorusGeometry.from_nu(0.25, 4.0).r == 1.0
    for R, r in [(1.0, 1.5), (0.0, 1.0), (1.0, -1.0), (np.inf, 1.0)]:
        with pytest.raises(DomainError):
            TorusGeometry(R, r)


@pytest.mark.parametrize("phi, theta, xyz", [
    (0.0, 0.0, (4.5, 0, 0)), (np.pi / 2, np.pi, (0, 1.5, 0)), (np.pi, np.pi / 2, (-3, 0, 1.5))])
def test_embed_examples(phi, theta, xyz):
    assert_allclose(embed(G, phi, theta), xyz, atol=1e-15)


def test_embed_on_surface(rng):
    phi, theta = rng.uniform(0, TWO_PI, (2, 1000))
    assert np.max(np.abs(implicit_residual(G, embed(G, phi, theta)))) < 1e-12
    assert embed(G, phi, theta).shape == (1000, 3)


def test_area_element_examples():
    assert_allclose(area_element(G, 0.0), 6.75)
    assert_allclose(area_element(TorusGeometry(1.0, 1.0), np.pi), 0.0, atol=1e-15)
    total, _ = sp_integrate.quad(lambda t: area_element(G, t) * TWO_PI, 0, TWO_PI)
    assert abs(total - G.total_area) < 1e-8
    assert_allclose(G.total_area, 4 * np.pi**2 * 4.5)


def test_area_uniform_pdf():
    assert_allclose(area_uniform_pdf(G, 1.0, 0.0), 1.5 / (4 * np.pi**2))
    assert_allclose(area_uniform_pdf(G, 2.0, np.pi), 0.5 / (4 * np.pi**2))
    phi, theta = np.meshgrid(np.linspace(0, 6, 7), np.linspace(0, 6, 7))
    assert_allclose(area_uniform_pdf(G, phi, theta), area_element(G, theta) / G.total_area)
    total, _ = sp_integrate.dblquad(lambda t, p: area_uniform_pdf(G, p, t), 0, TWO_PI, 0, TWO_PI,
                                    epsabs=1e-13)
    assert abs(total - 1.0) < 1e-10


def test_sample_area_uniform_marginals():
    phi, theta = sample_area_uniform(G, 100_000, np.random.default_rng(4))
    p = CardioidParams(0, 0.5)
    assert stats.kstest(theta, lambda t: cdf(p, t)).statistic < 1.95 / np.sqrt(1e5)
    assert stats.kstest(phi / TWO_PI, "uniform").pvalue > 0.01
    assert abs(circular_correlation(phi, theta)) < 0.02
    assert sample_area_uniform(G, 0, np.random.default_rng(0))[0].shape == (0,)


def test_quadrant_proportions():
    assert_allclose(quadrant_area_proportions(TorusGeometry(1.0, 1e-300)), 1 / 16, atol=1e-15)
    q = quadrant_area_proportions(G)
    # Closed form (pi/2 + 0.5) / (2 pi) / 4 = 0.0823944.
    assert_allclose(q[:, 0], (np.pi / 2 + 0.5) / TWO_PI / 4, rtol=1e-14)
    assert_allclose(q[0, 0], 0.0823944, atol=1e-7)
    for nu in (0.1, 0.7, 1.0):
        qq = quadrant_area_proportions(TorusGeometry.from_nu(nu))
        assert_allclose(qq.sum(), 1.0, atol=1e-15)
        assert np.all(qq == qq[0])
    assert q[0, 0] > q[0, 1]


def test_quadrant_proportions_by_quadrature():
    q = quadrant_area_proportions(G)
    for j in range(4):
        val, _ = sp_integrate.quad(lambda t: (1 + 0.5 * np.cos(t)) / TWO_PI, j * np.pi / 2,
                                   (j + 1) * np.pi / 2)
        assert_allclose(q[0, j], val / 4, atol=1e-14)


def test_quadrant_index_left_closed():
    assert quadrant_index([0.0, np.pi / 2, np.pi, 1.5 * np.pi, TWO_PI - 1e-12]).tolist() == [0, 1, 2, 3, 3]


def test_quadrant_test_accepts_area_uniform():
    phi, theta = sample_area_uniform(G, 10_000, np.random.default_rng(0))
    assert quadrant_frequency_test(phi, theta, G).p_value > 0.01


def test_quadrant_test_rejects_flat_uniform():
    g = np.random.default_rng(0)
    phi, theta = g.uniform(0, TWO_PI, (2, 10_000))
    assert quadrant_frequency_test(phi, theta, TorusGeometry.from_nu(0.9)).p_value < 0.001


def test_quadrant_test_degenerate_and_small():
    res = quadrant_frequency_test(np.zeros(200), np.zeros(200), G)
    assert res.chi_square > 1000 and res.p_value < 1e-100
    assert res.observed.sum() == 200
    with pytest.raises(DomainError):
        quadrant_frequency_test(np.zeros(100), np.zeros(100), G)
    with pytest.raises(DomainError):
        quadrant_frequency_test(np.zeros(200), np.zeros(199), G)
