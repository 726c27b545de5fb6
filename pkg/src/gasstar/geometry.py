"""Ellipsoidal-radius mesh and the shell quadrature shared by all field code.

A density with ellipsoidal symmetry only depends on

    r_b(x) = sqrt(eta^2 + z^2 / b^2),

so every 3-D integral reduces to a radial sum over cells and, inside each
shell ``r_b = r``, an integral over ``u = sin(beta)`` where the shell measure
``b r^2 cos(beta) dbeta dtheta`` becomes ``b r^2 du dtheta``.
"""
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RadialGrid",
    "build_grid",
    "ellipsoidal_radius",
    "shell_point",
    "shell_average",
    "cumulative_radial_integral",
]


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform cell-centred mesh in the ellipsoidal radius.

    Attributes
    ----------
    b : float
        Ellipticity; level sets are ellipsoids with semi-axes ``r, r, b r``.
    R_max : float
        Truncation radius (in ``r_b``); densities vanish beyond it.
    N : int
        Number of radial cells.
    n_beta : int
        Number of Gauss-Legendre nodes in ``u`` on each shell.
    """

    b: float
    R_max: float
    N: int
    n_beta: int
    edges: np.ndarray = field(init=False, repr=False)
    r: np.ndarray = field(init=False, repr=False)
    u: np.ndarray = field(init=False, repr=False)
    w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.linspace(0.0, self.R_max, self.N + 1)
        r = (np.arange(self.N) + 0.5) * (self.R_max / self.N)
        u, w = np.polynomial.legendre.leggauss(self.n_beta)
        for name, arr in (("edges", edges), ("r", r), ("u", u), ("w", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dr(self):
        return self.R_max / self.N

    @property
    def u_edges(self):
        """Cell boundaries in ``u`` whose widths equal the Gauss weights."""
        return np.concatenate([[-1.0], -1.0 + np.cumsum(self.w)])

    @property
    def cell_volumes(self):
        e = self.edges
        return 4.0 / 3.0 * np.pi * self.b * (e[1:] ** 3 - e[:-1] ** 3)

    @property
    def inner_half_volumes(self):
        """Volume between each cell's inner edge and its midpoint."""
        return 4.0 / 3.0 * np.pi * self.b * (self.r**3 - self.edges[:-1] ** 3)

    @property
    def total_volume(self):
        return 4.0 / 3.0 * np.pi * self.b * self.R_max**3

    def nodes(self):
        """Cylindrical coordinates ``(eta, z)`` of all shell nodes, shape (N, n_beta)."""
        return shell_point(self.r[:, None], self.u[None, :], self.b)

    def same_as(self, other):
        return (
            isinstance(other, RadialGrid)
            and self.b == other.b
            and self.R_max == other.R_max
            and self.N == other.N
            and self.n_beta == other.n_beta
        )

    def with_b(self, b):
        return build_grid(b, self.R_max, self.N, self.n_beta)


def build_grid(b, R_max, N, n_beta=32):
    """Build a :class:`RadialGrid`, rejecting degenerate parameters."""
    if not (np.isfinite(b) and b > 0):
        raise ValueError(f"ellipticity b must be positive, got {b!r}")
    if not (np.isfinite(R_max) and R_max > 0):
        raise ValueError(f"R_max must be positive, got {R_max!r}")
    if int(N) != N or N < 8:
        raise ValueError(f"need at least 8 radial cells, got {N!r}")
    if int(n_beta) != n_beta or n_beta < 4:
        raise ValueError(f"need at least 4 shell nodes, got {n_beta!r}")
    return RadialGrid(float(b), float(R_max), int(N), int(n_beta))


def ellipsoidal_radius(eta, z, b):
    return np.sqrt(np.asarray(eta) ** 2 + (np.asarray(z) / b) ** 2)


def shell_point(r, u, b):
    """Map shell coordinates ``(r, u)`` to cylindrical ``(eta, z)``.

    ``eta = r sqrt(1 - u^2)`` and ``z = b r u``, so that
    ``ellipsoidal_radius(eta, z, b) == r``.
    """
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise ValueError("shell coordinate u must lie in [-1, 1]")
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    eta = r * np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    return eta, b * r * u


def shell_average(grid, g):
    """Average ``g(eta, z)`` over each shell of ``grid``.

    Returns ``0.5 * sum_j w_j g(shell_point(r_i, u_j, b))`` for every cell.
    """
    eta, z = grid.nodes()
    vals = np.asarray(g(eta, z), dtype=float)
    vals = np.broadcast_to(vals, eta.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise FloatingPointError(
            f"non-finite integrand at shell node (i={i}, j={j}): "
            f"r={grid.r[i]:.6g}, u={grid.u[j]:.6g}"
        )
    return 0.5 * vals @ grid.w


def cumulative_radial_integral(grid, values):
    """Running totals of ``values * cell volume`` at each cell edge.

    The result has ``N + 1`` entries and starts at 0; it is exact for
    cellwise-constant data.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.N,):
        raise ValueError(f"expected {grid.N} cell values, got shape {values.shape}")
    out = np.zeros(grid.N + 1)
    np.cumsum(values * grid.cell_volumes, out=out[1:])
    return out
