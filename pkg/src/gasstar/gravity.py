"""Newtonian potential ``B rho = int rho(y) / |x - y| dy`` of ellipsoidal densities.

Three independent evaluators live here:

* ring-kernel superposition (:func:`potential_field`, :func:`potential_at`),
  which treats every source cell as a set of coaxial rings;
* the homoeoid decomposition (:func:`homoeoid_potential_at`,
  :class:`GravityOperator`): a cell of constant density between two similar
  ellipsoids is the difference of two uniform solid spheroids, whose
  potential is known in closed form through Carlson's symmetric integrals;
* the spherical shell theorem (:func:`spherical_potential`) for ``b = 1``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import elliprd, elliprf

from .geometry import build_grid

__all__ = [
    "ellipk_agm",
    "ring_potential",
    "PotentialField",
    "potential_field",
    "potential_at",
    "spherical_potential",
    "spherical_potential_at",
    "solid_spheroid_potential",
    "homoeoid_potential_at",
    "GravityOperator",
    "gravity_operator",
    "uniform_ellipsoid_center",
    "grav_energy",
    "hls_ratio",
]

_SUB = 8  # near-cell subdivision factor per direction
_NEAR = 1.5  # near-cell threshold in local radial cell widths


def ellipk_agm(m, tol=1e-14):
    """Complete elliptic integral of the first kind, ``K(m)`` with ``m = k^2``.

    Uses ``K = pi / (2 AGM(1, sqrt(1 - m)))``.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m >= 1) or np.any(m < 0):
        raise ValueError("elliptic parameter must lie in [0, 1)")
    a = np.ones_like(m)
    g = np.sqrt(1.0 - m)
    for _ in range(60):
        if np.all(np.abs(a - g) <= tol * a):
            break
        a, g = 0.5 * (a + g), np.sqrt(a * g)
    return np.pi / (2.0 * a)


def ring_potential(eta, z, eta_src, z_src, mass):
    """Potential at ``(eta, z)`` of a ring of ``mass`` at ``(eta_src, z_src)``.

    ``mass * (2/pi) K(k) / sqrt((eta + eta')^2 + (z - z')^2)`` with
    ``k^2 = 4 eta eta' / ((eta + eta')^2 + (z - z')^2)``.
    """
    eta, z, eta_src, z_src, mass = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (eta, z, eta_src, z_src, mass))
    )
    d2 = (eta + eta_src) ** 2 + (z - z_src) ** 2
    on_ring = (eta == eta_src) & (z == z_src) & (mass != 0)
    if np.any(on_ring) or np.any(d2 == 0):
        raise ValueError("field point lies on the source ring")
    k2 = 4.0 * eta * eta_src / d2
    return mass * (2.0 / np.pi) * ellipk_agm(k2) / np.sqrt(d2)


# ---------------------------------------------------------------------------
# ring-kernel superposition
# ---------------------------------------------------------------------------


@dataclass
class PotentialField:
    """``B rho`` at every shell node plus its shell averages.

    ``error_estimate`` is the largest relative change produced by subdividing
    the near cells, a proxy for the quadrature error.
    """

    grid: object
    values: np.ndarray
    K_grav: np.ndarray
    error_estimate: float = 0.0


def _sources(profile):
    g = profile.grid
    rho = profile.values
    eta, z = g.nodes()
    shell_mass = 2.0 * np.pi / 3.0 * g.b * (g.edges[1:] ** 3 - g.edges[:-1] ** 3)
    mass = (rho * shell_mass)[:, None] * g.w[None, :]
    # local physical width of a radial cell at each node
    stretch = np.sqrt(1.0 - g.u**2 + (g.b * g.u) ** 2)
    width = np.broadcast_to(g.dr * stretch[None, :], eta.shape)
    keep = np.broadcast_to((rho > 0)[:, None], eta.shape)
    idx = np.argwhere(keep)
    return (
        eta[keep],
        z[keep],
        mass[keep],
        width[keep],
        idx[:, 0],
        idx[:, 1],
    )


def _subcells(profile, ci, cj):
    """Sub-ring positions and masses for the near cells ``(ci, cj)``."""
    g = profile.grid
    t = (np.arange(_SUB) + 0.5) / _SUB
    ue = g.u_edges
    r_lo = g.edges[ci][:, None]
    r_sub = r_lo + g.dr * t[None, :]
    u_lo = ue[cj][:, None]
    du = (ue[cj + 1] - ue[cj])[:, None]
    u_sub = u_lo + du * t[None, :]
    R = r_sub[:, :, None]
    U = u_sub[:, None, :]
    e_sub = R * np.sqrt(1.0 - U**2)
    z_sub = g.b * R * U
    # ring mass = rho * 2 pi b r^2 dr du on each subcell (exact radial integral)
    rr = r_lo + g.dr * (np.arange(_SUB + 1) / _SUB)[None, :]
    shell = 2.0 * np.pi / 3.0 * g.b * np.diff(rr**3, axis=1)
    m_sub = (
        profile.values[ci][:, None, None]
        * shell[:, :, None]
        * (du / _SUB)[:, None, :]
        * np.ones_like(U)
    )
    return e_sub.reshape(len(ci), -1), z_sub.reshape(len(ci), -1), m_sub.reshape(len(ci), -1)


def _superpose(profile, eta_f, z_f, threads=1, chunk=256):
    se, sz, sm, sw, si, sj = _sources(profile)
    eta_f = np.asarray(eta_f, dtype=float).ravel()
    z_f = np.asarray(z_f, dtype=float).ravel()
    out = np.zeros(eta_f.size)
    err = np.zeros(eta_f.size)
    if se.size == 0:
        return out, err

    def work(lo):
        hi = min(lo + chunk, eta_f.size)
        ef = eta_f[lo:hi, None]
        zf = z_f[lo:hi, None]
        d = np.hypot(ef - se[None, :], zf - sz[None, :])
        near = d < _NEAR * sw[None, :]
        d2 = (ef + se[None, :]) ** 2 + (zf - sz[None, :]) ** 2
        k2 = np.where(near, 0.0, 4.0 * ef * se[None, :] / np.where(d2 > 0, d2, 1.0))
        far = np.where(near, 0.0, sm[None, :] * (2.0 / np.pi) * ellipk_agm(k2) / np.sqrt(np.where(near, 1.0, d2)))
        vals = far.sum(axis=1)
        errs = np.zeros(hi - lo)
        rows, cols = np.nonzero(near)
        if rows.size:
            e_sub, z_sub, m_sub = _subcells(profile, si[cols], sj[cols])
            fe = ef[rows, 0][:, None]
            fz = zf[rows, 0][:, None]
            d2s = (fe + e_sub) ** 2 + (fz - z_sub) ** 2
            k2s = 4.0 * fe * e_sub / d2s
            contrib = (m_sub * (2.0 / np.pi) * ellipk_agm(np.minimum(k2s, 1 - 1e-16)) / np.sqrt(d2s)).sum(axis=1)
            vals += np.bincount(rows, weights=contrib, minlength=hi - lo)
            coarse_d2 = (fe[:, 0] + se[cols]) ** 2 + (fz[:, 0] - sz[cols]) ** 2
            coarse_k2 = 4.0 * fe[:, 0] * se[cols] / coarse_d2
            ok = (coarse_k2 < 1.0) & (coarse_d2 > 0)
            coarse = np.where(
                ok,
                sm[cols] * (2.0 / np.pi) * ellipk_agm(np.where(ok, coarse_k2, 0.0)) / np.sqrt(np.where(ok, coarse_d2, 1.0)),
                0.0,
            )
            errs = np.bincount(rows, weights=np.where(ok, np.abs(contrib - coarse), 0.0), minlength=hi - lo)
        out[lo:hi] = vals
        err[lo:hi] = errs

    starts = range(0, eta_f.size, chunk)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)
    return out, err


def potential_field(profile, threads=1):
    """Ring-kernel ``B rho`` at all shell nodes, with shell averages.

    Every source cell ``(r'_j, u'_l)`` is a ring carrying the cell's share of
    mass; cells closer to the field point than 1.5 local radial cell widths
    are split 8 x 8 into sub-rings.  The field is mirror symmetric in ``z``,
    so only the upper half of the nodes is evaluated.
    """
    g = profile.grid
    eta, z = g.nodes()
    half = g.u >= 0
    vals = np.zeros(eta.shape)
    errs = np.zeros(eta.shape)
    v, e = _superpose(profile, eta[:, half], z[:, half], threads=threads)
    vals[:, half] = v.reshape(g.N, -1)
    errs[:, half] = e.reshape(g.N, -1)
    mirror = np.nonzero(~half)[0]
    # u_j = -u_{n-1-j}
    vals[:, mirror] = vals[:, g.n_beta - 1 - mirror]
    errs[:, mirror] = errs[:, g.n_beta - 1 - mirror]
    K = 0.5 * vals @ g.w
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(vals > 0, errs / vals, 0.0)
    return PotentialField(g, vals, K, float(rel.max()) if rel.size else 0.0)


def potential_at(profile, eta, z, threads=1):
    """Ring-kernel ``B rho`` at arbitrary cylindrical points."""
    eta = np.asarray(eta, dtype=float)
    v, _ = _superpose(profile, eta, np.asarray(z, dtype=float), threads=threads)
    return v.reshape(eta.shape)


# ---------------------------------------------------------------------------
# spherical shell theorem
# ---------------------------------------------------------------------------


def spherical_potential_at(profile, r):
    """Exact ``B rho(r)`` of a cellwise-constant spherical density."""
    g = profile.grid
    if g.b != 1.0:
        raise ValueError("spherical potential requires b = 1")
    r = np.asarray(r, dtype=float)
    rho = profile.values
    a = g.edges[:-1]
    c = g.edges[1:]
    rr = r.reshape(-1, 1)
    lo = np.clip(rr, a, c)
    # mass inside r over r, plus the outer part int_r^R rho t dt
    inner = rho * (lo**3 - a**3) / 3.0
    outer = rho * (c**2 - lo**2) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 4.0 * np.pi * (inner.sum(axis=1) / rr[:, 0] + outer.sum(axis=1))
    at0 = rr[:, 0] == 0
    if np.any(at0):
        val[at0] = 4.0 * np.pi * np.sum(rho * (c**2 - a**2) / 2.0)
    return val.reshape(r.shape)


def spherical_potential(profile):
    """Shell-theorem ``B rho`` at the cell midpoints (``b = 1`` only)."""
    return spherical_potential_at(profile, profile.grid.r)


# ---------------------------------------------------------------------------
# homoeoid decomposition
# ---------------------------------------------------------------------------


def solid_spheroid_potential(a, b, eta, z):
    """Potential of the unit-density spheroid with semi-axes ``a, a, b a``.

    Standard ellipsoid result written with Carlson integrals:
    ``pi a^2 c [2 R_F - (2/3) eta^2 R_D(x, y, x) - (2/3) z^2 R_D(x, x, y)]``
    with ``x = a^2 + lam``, ``y = c^2 + lam`` and ``lam`` the confocal
    parameter of the field point (0 inside).
    """
    a = np.asarray(a, dtype=float)
    eta = np.asarray(eta, dtype=float)
    z = np.asarray(z, dtype=float)
    a, eta, z = np.broadcast_arrays(a, eta, z)
    c = b * a
    e2 = eta * eta
    z2 = z * z
    out = np.zeros(a.shape)
    pos = a > 0
    inside = pos & (e2 * (b * b) + z2 <= (b * a) ** 2)
    outside = pos & ~inside
    if inside.any():
        # homogeneity: R_F(t x) = t^-1/2 R_F(x), R_D(t x) = t^-3/2 R_D(x)
        bb = b * b
        rf = elliprf(1.0, 1.0, bb)
        rd_eta = elliprd(1.0, bb, 1.0)
        rd_z = elliprd(1.0, 1.0, bb)
        ai = a[inside]
        out[inside] = np.pi * b * (
            2.0 * ai * ai * rf - (2.0 / 3.0) * (e2[inside] * rd_eta + z2[inside] * rd_z)
        )
    if outside.any():
        ao = a[outside]
        co = c[outside]
        eo = e2[outside]
        zo = z2[outside]
        A2 = ao * ao
        C2 = co * co
        # lam^2 + p lam + q = 0, positive root
        p = A2 + C2 - eo - zo
        q = A2 * C2 - eo * C2 - zo * A2
        disc = np.sqrt(np.maximum(p * p - 4.0 * q, 0.0))
        lam = np.where(p < 0, (-p + disc) / 2.0, -2.0 * q / np.where(p + disc > 0, p + disc, 1.0))
        lam = np.maximum(lam, 0.0)
        x = A2 + lam
        y = C2 + lam
        out[outside] = np.pi * A2 * co * (
            2.0 * elliprf(x, x, y) - (2.0 / 3.0) * (eo * elliprd(x, y, x) + zo * elliprd(x, x, y))
        )
    return out


def homoeoid_potential_at(profile, eta, z):
    """Exact ``B rho`` of a cellwise-constant ellipsoidal density at any points."""
    g = profile.grid
    rho = profile.values
    jumps = np.concatenate([[0.0], rho]) - np.concatenate([rho, [0.0]])
    keep = (jumps != 0) & (g.edges > 0)
    e = g.edges[keep]
    jumps = jumps[keep]
    eta = np.asarray(eta, dtype=float)
    z = np.asarray(z, dtype=float)
    eta, z = np.broadcast_arrays(eta, z)
    flat_e = eta.ravel()
    flat_z = z.ravel()
    out = np.empty(flat_e.size)
    for lo in range(0, flat_e.size, 1024):
        phi = solid_spheroid_potential(e[None, :], g.b, flat_e[lo : lo + 1024, None], flat_z[lo : lo + 1024, None])
        out[lo : lo + 1024] = phi @ jumps
    return out.reshape(eta.shape)


class GravityOperator:
    """Linear map from cell densities to cell-averaged potentials.

    ``K_grav = K @ rho`` where ``K[i, k]`` is the average over cell ``i`` of
    the potential of cell ``k`` at unit density.  The weighted matrix
    ``W = diag(V) K`` is the exact Coulomb form of cellwise-constant
    densities and is symmetric, so ``K_grav`` is the exact derivative of
    ``(1/2) rho^T W rho`` divided by the cell volume.
    """

    def __init__(self, grid, n_r=3, n_u=None):
        self.grid = grid
        V = grid.cell_volumes
        if grid.b == 1.0:
            W = _spherical_coulomb(grid.edges)
        else:
            W = _homoeoid_coulomb(grid, n_r, n_u or min(grid.n_beta, 16))
        W = 0.5 * (W + W.T)
        self.W = W
        self.K = W / V[:, None]
        self.W.setflags(write=False)
        self.K.setflags(write=False)

    def __call__(self, rho):
        return self.K @ np.asarray(rho, dtype=float)

    def energy(self, rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * float(rho @ self.W @ rho)


def _spherical_coulomb(edges):
    a = edges[:-1]
    c = edges[1:]
    V = 4.0 / 3.0 * np.pi * (c**3 - a**3)
    shell = 2.0 * np.pi * (c**2 - a**2)  # interior potential of a unit shell
    N = a.size
    i = np.arange(N)
    lower = i[:, None] > i[None, :]  # field cell outside source cell
    W = np.where(lower, V[None, :] * shell[:, None], V[:, None] * shell[None, :])
    self_term = 16.0 * np.pi**2 * (
        (c**5 - a**5) / 15.0
        - a**3 * (c**2 - a**2) / 6.0
        + c**2 * (c**3 - a**3) / 6.0
        - (c**5 - a**5) / 10.0
    )
    W[i, i] = self_term
    return W


def _homoeoid_coulomb(grid, n_r, n_u):
    b = grid.b
    xr, wr = np.polynomial.legendre.leggauss(n_r)
    xu, wu = np.polynomial.legendre.leggauss(n_u)
    a = grid.edges[:-1]
    # field nodes: n_r radial Gauss points per cell times n_u shell points
    r_nodes = a[:, None] + 0.5 * grid.dr * (xr[None, :] + 1.0)
    vol_w = (2.0 * np.pi * b * r_nodes**2 * 0.5 * grid.dr * wr[None, :])  # per unit u
    R = r_nodes[:, :, None]
    U = xu[None, None, :]
    eta = R * np.sqrt(1.0 - U**2)
    z = b * R * U
    weights = vol_w[:, :, None] * wu[None, None, :]
    N = grid.N
    W = np.empty((N, N))
    edges = grid.edges
    ef = eta.reshape(N, -1)
    zf = z.reshape(N, -1)
    wf = weights.reshape(N, -1)
    for i in range(N):
        phi = solid_spheroid_potential(edges[None, :], b, ef[i][:, None], zf[i][:, None])
        shell = np.diff(phi, axis=1)
        W[i] = wf[i] @ shell
    return W


@lru_cache(maxsize=8)
def _cached_operator(b, R_max, N, n_beta):
    return GravityOperator(build_grid(b, R_max, N, n_beta))


def gravity_operator(grid):
    """Shared :class:`GravityOperator` for ``grid`` (cached by grid parameters)."""
    return _cached_operator(grid.b, grid.R_max, grid.N, grid.n_beta)


# ---------------------------------------------------------------------------
# closed forms and energies
# ---------------------------------------------------------------------------


def uniform_ellipsoid_center(b, M, rho_star):
    """Central potential of the uniform spheroid of mass ``M`` and density ``rho_star``.

    ``(9 pi M^2 rho*/2)^(1/3) b^(1/3) g(b)`` with
    ``g = ln(sqrt(b^2-1) + b) / sqrt(b^2-1)`` for ``b > 1``,
    ``g = arcsin(sqrt(1-b^2)) / sqrt(1-b^2)`` for ``b < 1`` and ``g(1) = 1``.
    """
    if not (b > 0 and M > 0 and rho_star > 0):
        raise ValueError("b, M and rho_star must be positive")
    pref = (4.5 * np.pi * M * M * rho_star) ** (1.0 / 3.0)
    d = b * b - 1.0
    if abs(b - 1.0) < 1e-6:
        # series of both branches about b = 1
        g = 1.0 - d / 3.0 + d * d / 5.0
    elif b > 1.0:
        s = np.sqrt(d)
        g = np.log(s + b) / s
    else:
        s = np.sqrt(-d)
        g = np.arcsin(s) / s
    return float(pref * b ** (1.0 / 3.0) * g)


def grav_energy(profile, field):
    """``(1/2) int rho B rho`` from a field computed on the same grid."""
    g = profile.grid
    fg = field.grid if hasattr(field, "grid") else None
    if fg is not None and not fg.same_as(g):
        raise ValueError("potential field was computed on a different grid")
    K = field.K_grav if hasattr(field, "K_grav") else np.asarray(field)
    if K.shape != (g.N,):
        raise ValueError("potential field does not match the profile grid")
    return float(0.5 * np.sum(profile.values * g.cell_volumes * K))


def hls_ratio(profile, operator=None):
    """Scale-free ratio ``int rho B rho / (int rho^(4/3) (int rho)^(2/3))``."""
    g = profile.grid
    rho = profile.values
    V = g.cell_volumes
    mass = float(np.sum(rho * V))
    if mass <= 0:
        raise ValueError("ratio undefined for the zero profile")
    op = operator or gravity_operator(g)
    num = 2.0 * op.energy(rho)
    den = float(np.sum(rho ** (4.0 / 3.0) * V)) * mass ** (2.0 / 3.0)
    return num / den
