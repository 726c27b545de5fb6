"""Mass functions and rotation terms for ellipsoidally symmetric densities.

Two different "enclosed masses" enter the model: ``n(r)``, the mass inside
the ellipsoid ``r_b <= r`` (argument of the entropy law), and ``m(s)``, the
mass inside the infinite cylinder ``eta < s`` (argument of the rotation law).
For a cellwise-constant radial density both are available in closed form.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import RadialGrid, build_grid, cumulative_radial_integral

__all__ = [
    "DensityProfile",
    "FieldSet",
    "ellipsoidal_mass",
    "cylindrical_mass",
    "rotation_potential",
    "rotation_energy",
    "rotation_gradient",
    "cylinder_quadrature",
    "rescale_profile",
]

_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class DensityProfile:
    """Cellwise-constant density ``rho(r_b)`` on a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} cell values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("density must be finite")
        if np.any(v < 0):
            raise ValueError("density must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, np.asarray(func(grid.r), dtype=float))

    @classmethod
    def uniform_ball(cls, grid, radius, rho=1.0):
        """Constant ``rho`` on cells whose midpoint lies inside ``radius``."""
        return cls(grid, np.where(grid.r < radius, rho, 0.0))

    @property
    def total_mass(self):
        return float(np.sum(self.values * self.grid.cell_volumes))

    @property
    def support_edge(self):
        """Outer edge of the last non-empty cell (0 for the zero profile)."""
        nz = np.nonzero(self.values > 0)[0]
        return 0.0 if nz.size == 0 else float(self.grid.edges[nz[-1] + 1])

    def scaled(self, factor):
        return DensityProfile(self.grid, factor * self.values)

    def with_values(self, values):
        return DensityProfile(self.grid, values)


@dataclass
class FieldSet:
    """Derived fields of a profile on its grid.

    Attributes
    ----------
    n_edges : ndarray, (N+1,)
        Ellipsoidal mass at cell edges.
    n_mid : ndarray, (N,)
        Ellipsoidal mass at cell midpoints.
    m_mid : ndarray, (N,)
        Cylindrical mass ``m(eta)`` at ``eta = r_i``.
    K_grav : ndarray, (N,)
        Shell-averaged Newtonian potential ``B rho``.
    K_rot : ndarray, (N,)
        Shell-averaged rotation potential.
    Q : ndarray, (N,)
        Entropy tail ``int A(rho) T'(n) dy`` over the cells outside cell ``i``.
    T_eff : ndarray, (N,)
        Entropy factor of the own-cell term, ``A'(rho_i) T_eff_i``.
    """

    profile: DensityProfile
    n_edges: np.ndarray
    n_mid: np.ndarray
    m_mid: np.ndarray
    K_grav: np.ndarray
    K_rot: np.ndarray
    Q: np.ndarray
    rot_energy: float = 0.0
    T_eff: np.ndarray = None
    extras: dict = field(default_factory=dict)

    def m(self, s):
        """Cylindrical mass ``m(s)`` of the underlying profile."""
        return cylindrical_mass(self.profile, s)

    def check_finite(self):
        for name in ("n_edges", "K_grav", "K_rot", "Q"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                i = int(np.argmin(np.isfinite(arr)))
                raise FloatingPointError(f"non-finite value in field {name} at cell {i}")


def ellipsoidal_mass(profile):
    """``n(s) = int_{r_b <= s} rho`` at every cell edge."""
    return cumulative_radial_integral(profile.grid, profile.values)


def ellipsoidal_mass_mid(profile):
    """Ellipsoidal mass at cell midpoints (exact for cellwise-constant rho)."""
    n = ellipsoidal_mass(profile)
    return n[:-1] + profile.values * profile.grid.inner_half_volumes


def _cyl_kernel(r, s):
    """``r^3 - max(r^2 - s^2, 0)^(3/2)``, evaluated without cancellation.

    ``(4 pi b / 3) * kernel`` is the volume of the ellipsoid ``r_b <= r``
    that lies inside the cylinder ``eta < s``.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    r, s = np.broadcast_arrays(r, s)
    out = r**3
    outside = r > s
    x = np.zeros_like(r)
    np.divide(s * s, r * r, out=x, where=outside)
    out = np.where(outside, -(r**3) * np.expm1(1.5 * np.log1p(-np.minimum(x, 1.0))), out)
    return out


def cylindrical_mass(profile, s):
    """Mass inside the cylinder ``eta < s``.

    For ellipsoidal symmetry the fraction of the shell ``r_b = r`` inside the
    cylinder is ``1 - sqrt(1 - (s/r)^2)``, which integrates in closed form
    over each cell.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("cylinder radius must be non-negative")
    g = profile.grid
    rho = profile.values
    jumps = np.concatenate([[0.0], rho]) - np.concatenate([rho, [0.0]])
    keep = jumps != 0
    e = g.edges[keep]
    jumps = jumps[keep]
    flat = s.ravel()
    out = np.empty(flat.shape)
    for lo in range(0, flat.size, _CHUNK):
        ss = flat[lo : lo + _CHUNK]
        out[lo : lo + _CHUNK] = _cyl_kernel(e[None, :], ss[:, None]) @ jumps
    return (4.0 / 3.0 * np.pi * g.b * out).reshape(s.shape)


@lru_cache(maxsize=4)
def _cylinder_operator(b, R_max, N, n_beta):
    """Matrix ``C`` with ``m(eta_ij) = C @ rho`` at every shell node."""
    g = build_grid(b, R_max, N, n_beta)
    eta, _ = g.nodes()
    eta = eta.ravel()
    F = _cyl_kernel(g.edges[None, :], eta[:, None])
    C = 4.0 / 3.0 * np.pi * b * np.diff(F, axis=1)
    C.setflags(write=False)
    return C


def cylinder_operator(grid):
    return _cylinder_operator(grid.b, grid.R_max, grid.N, grid.n_beta)


@dataclass(frozen=True)
class CylinderQuadrature:
    """Quadrature in the cylinder radius ``s`` on ``[0, R_max]``.

    ``V[q, k]`` is the volume of cell ``k`` inside the cylinder ``eta < s_q``
    and ``dV`` its ``s``-derivative, so ``m(s_q) = V @ rho`` and
    ``m'(s_q) = dV @ rho``.  Each cell interval uses the substitution
    ``s = e_hi - (e_hi - e_lo) v^2``, which removes the square-root edge
    behaviour of ``dV``; the first interval is split and graded towards 0.
    """

    s: np.ndarray
    w: np.ndarray
    V: np.ndarray
    dV: np.ndarray


@lru_cache(maxsize=4)
def _cylinder_quadrature(b, R_max, N, order):
    e = np.linspace(0.0, R_max, N + 1)
    x, wx = np.polynomial.legendre.leggauss(order)
    v, wv = 0.5 * (x + 1.0), 0.5 * wx
    lo, hi = e[:-1].copy(), e[1:]
    lo[0] = 0.5 * e[1]
    width = (hi - lo)[:, None]
    s = hi[:, None] - width * v**2
    w = 2.0 * width * v * wv
    # graded piece [0, e_1 / 2] with s = (e_1 / 2) t^3
    h = 0.5 * e[1]
    s0 = h * v**3
    w0 = 3.0 * h * v**2 * wv
    s = np.concatenate([s0, s.ravel()])
    w = np.concatenate([w0, w.ravel()])
    c = 4.0 / 3.0 * np.pi * b
    V = c * np.diff(_cyl_kernel(e[None, :], s[:, None]), axis=1)
    root = np.sqrt(np.maximum(e[None, :] ** 2 - s[:, None] ** 2, 0.0))
    dV = c * np.diff(3.0 * s[:, None] * root, axis=1)
    for arr in (s, w, V, dV):
        arr.setflags(write=False)
    return CylinderQuadrature(s, w, V, dV)


def cylinder_quadrature(grid, order=8):
    return _cylinder_quadrature(grid.b, grid.R_max, grid.N, order)


def _rotation_parts(profile, angmom):
    g = profile.grid
    eta, _ = g.nodes()
    C = cylinder_operator(g)
    m = (C @ profile.values).reshape(eta.shape)
    on_axis = eta < 1e-12 * g.R_max
    safe = np.where(on_axis, 1.0, eta)
    integrand = np.where(on_axis, 0.0, angmom.L(m) / safe**2)
    return eta, m, safe, on_axis, integrand, C


def _first_bad(arr, grid):
    i, j = np.argwhere(~np.isfinite(arr))[0]
    return f"shell node (i={i}, j={j}), r={grid.r[i]:.6g}, u={grid.u[j]:.6g}"


def rotation_energy(profile, angmom, method="shell"):
    """``(1/2) int rho L(m(eta)) eta^-2``.

    ``method="shell"`` averages the integrand over the Gauss-Legendre shell
    nodes of the grid; ``method="cylinder"`` integrates
    ``(1/2) int L(m(s)) s^-2 m'(s) ds``, which is exact up to a smooth 1-D
    quadrature for cellwise-constant densities.
    """
    if angmom.vanishes:
        return 0.0
    if method == "cylinder":
        return _rotation_cylinder(profile, angmom, gradient=False)[1]
    if method != "shell":
        raise ValueError("method must be 'shell' or 'cylinder'")
    g = profile.grid
    _, _, _, _, integrand, _ = _rotation_parts(profile, angmom)
    if not np.all(np.isfinite(integrand)):
        raise FloatingPointError("rotation integrand not finite at " + _first_bad(integrand, g))
    avg = 0.5 * integrand @ g.w
    return float(0.5 * np.sum(profile.values * g.cell_volumes * avg))


def _rotation_cylinder(profile, angmom, gradient=True, order=8):
    g = profile.grid
    cq = cylinder_quadrature(g, order)
    rho = profile.values
    m = cq.V @ rho
    Lm = angmom.L(m)
    if not np.all(np.isfinite(Lm)):
        q = int(np.argmin(np.isfinite(Lm)))
        raise FloatingPointError(f"rotation law not finite at cylinder radius s={cq.s[q]:.6g}")
    energy = float(0.5 * np.sum(cq.w * Lm * (cq.dV @ rho) / cq.s**2))
    if not gradient:
        return None, energy
    # d E / d rho_k = int_{cell k} Phi(eta) dx with Phi(s) = int_s^inf L(m) t^-3 dt;
    # integrating by parts against V_k(s) gives the form below
    V = g.cell_volumes
    tail = angmom.L(profile.total_mass) / (2.0 * g.R_max**2)
    K = ((cq.w * Lm / cq.s**3) @ cq.V) / V + tail
    return K, energy


def rotation_gradient(profile, angmom, method="cylinder"):
    """Per-cell derivative of :func:`rotation_energy` divided by cell volume.

    With ``method="cylinder"`` this is the cell average of
    ``Phi(eta) = int_eta^inf L(m(s)) s^-3 ds``; with ``method="shell"`` it is
    the exact derivative of the shell-node quadrature.  Either way the
    first-order condition stays consistent with the energy of the same method.

    Returns
    -------
    K_rot : ndarray, (N,)
    energy : float
    """
    g = profile.grid
    if angmom.vanishes:
        return np.zeros(g.N), 0.0
    if method == "cylinder":
        return _rotation_cylinder(profile, angmom)
    if method != "shell":
        raise ValueError("method must be 'shell' or 'cylinder'")
    eta, m, safe, on_axis, integrand, C = _rotation_parts(profile, angmom)
    if not np.all(np.isfinite(integrand)):
        raise FloatingPointError("rotation integrand not finite at " + _first_bad(integrand, g))
    V = g.cell_volumes
    avg = 0.5 * integrand @ g.w
    energy = float(0.5 * np.sum(profile.values * V * avg))
    weight = (profile.values * V)[:, None] * (0.5 * g.w)[None, :]
    active = (weight > 0) & ~on_axis
    with np.errstate(divide="ignore", invalid="ignore"):
        dL = angmom.dL(m)
        coef = np.where(active, weight * dL / safe**2, 0.0)
    if not np.all(np.isfinite(coef)):
        raise FloatingPointError("rotation-law derivative not finite at " + _first_bad(coef, g))
    K_rot = 0.5 * avg + 0.5 * (coef.ravel() @ C) / V
    return K_rot, energy


def rotation_potential(profile, angmom, eta, order=16):
    """``int_eta^inf L(m(s)) s^-3 ds`` at cylinder radii ``eta > 0``.

    Gauss-Legendre in ``log s`` between consecutive cell edges up to the
    support extent ``R_s``, plus the exact tail ``L(M) / (2 max(eta, R_s)^2)``.
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise ValueError("rotation potential needs eta > 0")
    shape = eta.shape
    eta = eta.ravel()
    M = profile.total_mass
    Rs = profile.support_edge
    tail = angmom.L(M) / (2.0 * np.maximum(eta, Rs) ** 2)
    if angmom.vanishes or Rs == 0.0:
        return (tail * 0.0 if angmom.vanishes else tail).reshape(shape)
    x, wq = np.polynomial.legendre.leggauss(order)

    def seg(lo, hi):
        # integral over [lo, hi] with s = exp(t): integrand L(m(s)) s^-2 dt
        tlo, thi = np.log(lo), np.log(hi)
        half = 0.5 * (thi - tlo)
        t = 0.5 * (thi + tlo)[:, None] + half[:, None] * x[None, :]
        s = np.exp(t)
        vals = angmom.L(cylindrical_mass(profile, s)) / s**2
        return half * (vals @ wq)

    knots = profile.grid.edges[(profile.grid.edges > 0) & (profile.grid.edges <= Rs)]
    pieces = seg(knots[:-1], knots[1:]) if knots.size > 1 else np.zeros(0)
    # J[k] = integral from knots[k] to Rs
    J = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    out = tail.copy()
    inside = eta < Rs
    if inside.any():
        e = eta[inside]
        k = np.searchsorted(knots, e, side="right")
        first = np.zeros_like(e)
        head = k < knots.size
        first[head] = seg(e[head], knots[k[head]])
        out[inside] += first + np.where(head, J[np.minimum(k, knots.size - 1)], 0.0)
    return out.reshape(shape)


def rescale_profile(profile, a):
    """Return ``rho_bar(r) = rho(a r)`` on the grid dilated by ``1/a``.

    With ``0 < a <= 1`` this realises the mass-rescaling device
    ``m_rho(eta) = a^3 m_rho_bar(eta / a)``.
    """
    if not (0 < a <= 1):
        raise ValueError("rescaling factor must lie in (0, 1]")
    g = profile.grid
    if a == 1:
        return profile
    new = build_grid(g.b, g.R_max / a, g.N, g.n_beta)
    return DensityProfile(new, profile.values)
