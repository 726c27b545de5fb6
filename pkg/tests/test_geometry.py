import numpy as np
import pytest

from gasstar.geometry import (
    build_grid,
    cumulative_radial_integral,
    ellipsoidal_radius,
    shell_average,
    shell_point,
)


def test_build_grid_midpoints():
    g = build_grid(1.0, 1.0, 10, 8)
    np.testing.assert_allclose(g.r, np.arange(10) * 0.1 + 0.05, rtol=1e-14)
    assert g.w.sum() == pytest.approx(2.0, rel=1e-14)


def test_build_grid_volumes():
    assert build_grid(1.0, 1.0, 10, 8).cell_volumes.sum() == pytest.approx(4 * np.pi / 3, rel=1e-14)
    g = build_grid(2.0, 1.0, 10, 8)
    assert g.cell_volumes.sum() == pytest.approx(8 * np.pi / 3, rel=1e-14)
    e = g.edges
    np.testing.assert_allclose(g.cell_volumes, 4 / 3 * np.pi * 2.0 * (e[1:] ** 3 - e[:-1] ** 3), rtol=1e-14)


@pytest.mark.parametrize("args", [(0.0, 1.0, 10, 8), (1.0, -1.0, 10, 8), (1.0, 1.0, 7, 8), (1.0, 1.0, 10, 3)])
def test_build_grid_rejects(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_build_grid_deterministic():
    a, b = build_grid(0.7, 2.0, 50, 12), build_grid(0.7, 2.0, 50, 12)
    assert a.same_as(b)
    np.testing.assert_array_equal(a.u, b.u)


def test_shell_point():
    assert shell_point(1.0, 0.0, 2.0) == pytest.approx((1.0, 0.0))
    assert shell_point(1.0, 1.0, 2.0) == pytest.approx((0.0, 2.0))
    with pytest.raises(ValueError):
        shell_point(1.0, 1.5, 1.0)


def test_shell_point_inverse(rng):
    r = rng.uniform(0, 5, 1000)
    u = rng.uniform(-1, 1, 1000)
    b = rng.uniform(0.1, 10, 1000)
    eta, z = shell_point(r, u, b)
    np.testing.assert_allclose(ellipsoidal_radius(eta, z, b), r, rtol=1e-14, atol=1e-15)


def test_shell_average():
    g = build_grid(1.5, 2.0, 12, 8)
    np.testing.assert_allclose(shell_average(g, lambda eta, z: np.full_like(eta, 3.0)), 3.0, rtol=1e-14)
    np.testing.assert_allclose(shell_average(g, lambda eta, z: z), 0.0, atol=1e-14)
    np.testing.assert_allclose(shell_average(g, lambda eta, z: eta**2), 2 / 3 * g.r**2, rtol=1e-12)


def test_shell_average_polynomial_exactness():
    # degree 2 n_beta - 1 in u is integrated exactly
    g = build_grid(1.0, 1.0, 8, 6)
    deg = 2 * g.n_beta - 2  # even degree, so the exact mean is non-zero
    vals = shell_average(g, lambda eta, z: (z / g.r[:, None]) ** deg)
    np.testing.assert_allclose(vals, 1.0 / (deg + 1), rtol=1e-12)


def test_shell_average_names_bad_node():
    g = build_grid(1.0, 1.0, 8, 4)

    def bad(eta, z):
        out = np.ones_like(eta)
        out[3, 1] = np.nan
        return out

    with pytest.raises(FloatingPointError, match="3"):
        shell_average(g, bad)


def test_cumulative_radial_integral():
    g = build_grid(1.3, 2.0, 20, 4)
    full = cumulative_radial_integral(g, np.full(20, 0.7))
    assert full[0] == 0.0
    assert full[-1] == pytest.approx(4 / 3 * np.pi * 1.3 * 8 * 0.7, rel=1e-14)
    assert np.all(cumulative_radial_integral(g, np.zeros(20)) == 0.0)
    half = cumulative_radial_integral(g, np.r_[np.full(10, 0.7), np.zeros(10)])
    assert half[10] == pytest.approx(4 / 3 * np.pi * 1.3 * 1.0 * 0.7, rel=1e-14)
    with pytest.raises(ValueError):
        cumulative_radial_integral(g, np.ones(19))
