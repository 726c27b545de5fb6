"""Energy functional, its potential function and the verification operators.

For a radial profile on a grid the discrete energy is

    E_b = sum_i A(rho_i) T(n_i) V_i + E_rot - (1/2) rho^T W rho

and the potential function returned by :func:`potential_function` is its
exact gradient divided by the cell volumes:

    G_i = A'(rho_i) T(n_i) + Q_i + K_rot_i - K_grav_i .
"""
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .fields import (
    DensityProfile,
    FieldSet,
    cylindrical_mass,
    ellipsoidal_mass,
    ellipsoidal_mass_mid,
    rotation_energy,
    rotation_gradient,
)
from .geometry import ellipsoidal_radius
from .gravity import gravity_operator, homoeoid_potential_at

__all__ = [
    "EnergyBreakdown",
    "PotentialFunction",
    "compute_fields",
    "internal_energy",
    "isentropic_energy",
    "total_energy",
    "potential_function",
    "DirectionalDerivativeReport",
    "directional_derivative_check",
    "el_residual",
    "density_floor",
    "SteadyResidual",
    "steady_residual",
]


def density_floor(values, rel=1e-12):
    """Threshold below which a cell counts as vacuum."""
    vmax = float(np.max(values)) if np.size(values) else 0.0
    return rel * vmax


@dataclass(frozen=True)
class EnergyBreakdown:
    internal: float
    rotational: float
    gravitational: float

    @property
    def total(self):
        return self.internal + self.rotational + self.gravitational

    def to_dict(self):
        return {
            "internal": self.internal,
            "rotational": self.rotational,
            "gravitational": self.gravitational,
            "total": self.total,
        }


@dataclass
class PotentialFunction:
    """Reduced potential ``G(r)`` with its four terms kept apart."""

    G: np.ndarray
    marginal: np.ndarray  # A'(rho) T(n)
    Q: np.ndarray
    K_rot: np.ndarray
    K_grav: np.ndarray


def _cell_entropy(profile, spec):
    """Per-cell entropy factors of the exact cell integrals.

    For cellwise-constant density ``dV = dn / rho`` inside a cell, so
    ``int_cell A T(n) dV = A V <T>`` with ``<T>`` the mean of ``T`` over the
    cell's mass interval.  Differentiating the sum gives the own-cell factor
    ``T_eff = (f <T> + A T(n_out)) / (A + f)`` multiplying ``A'(rho)``, and the
    tail ``Q_k = sum_{i>k} A_i V_i (T(n_{i+1}) - T(n_i)) / (n_{i+1} - n_i)``.

    Returns ``(A, T_mean, T_eff, Q)``.
    """
    g = profile.grid
    rho = profile.values
    A = spec.eos.A(rho)
    if spec.entropy.isentropic:
        one = np.ones(g.N)
        return A, one, one, np.zeros(g.N)
    ent = spec.entropy
    n = ellipsoidal_mass(profile)
    n0, n1 = n[:-1], n[1:]
    dn = n1 - n0
    T0, T1 = ent.T(n0), ent.T(n1)
    T_mean = np.where(dn > 0, ent.mean_T(n0, n1), T0)
    f = spec.eos.f(rho)
    denom = A + f
    with np.errstate(invalid="ignore", divide="ignore"):
        T_eff = np.where(denom > 0, (f * T_mean + A * T1) / np.where(denom > 0, denom, 1.0), T0)
        slope = np.where(dn > 0, (T1 - T0) / np.where(dn > 0, dn, 1.0), 0.0)
    contrib = A * g.cell_volumes * slope
    Q = np.concatenate([np.cumsum(contrib[::-1])[::-1][1:], [0.0]])
    return A, T_mean, T_eff, Q


def compute_fields(profile, spec, operator=None, rotation="cylinder"):
    """Assemble :class:`FieldSet` for ``profile`` under ``spec``.

    ``rotation`` selects the quadrature of the rotation term (see
    :func:`gasstar.fields.rotation_energy`).
    """
    g = profile.grid
    n_edges = ellipsoidal_mass(profile)
    n_mid = ellipsoidal_mass_mid(profile)
    op = operator if operator is not None else gravity_operator(g)
    K_grav = op(profile.values)
    K_rot, e_rot = rotation_gradient(profile, spec.angmom, method=rotation)
    m_mid = cylindrical_mass(profile, g.r)
    A, T_mean, T_eff, Q = _cell_entropy(profile, spec)
    fs = FieldSet(profile, n_edges, n_mid, m_mid, K_grav, K_rot, Q, rot_energy=e_rot, T_eff=T_eff)
    fs.extras["operator"] = op
    fs.extras["rotation"] = rotation
    fs.extras["internal"] = float(np.sum(A * T_mean * g.cell_volumes))
    fs.check_finite()
    return fs


def internal_energy(profile, spec):
    """``int A(rho) T(n)``, integrated exactly over each cell."""
    A, T_mean, _, _ = _cell_entropy(profile, spec)
    return float(np.sum(A * T_mean * profile.grid.cell_volumes))


def isentropic_energy(profile, spec, operator=None, rotation="cylinder"):
    """The same three integrals with ``T = 1``, for comparison at ``S = 0``."""
    g = profile.grid
    A = spec.eos.A(profile.values)
    op = operator if operator is not None else gravity_operator(g)
    return EnergyBreakdown(
        float(np.sum(A * g.cell_volumes)),
        rotation_energy(profile, spec.angmom, method=rotation),
        -op.energy(profile.values),
    )


def total_energy(profile, spec, fields=None, operator=None, rotation="cylinder"):
    """:class:`EnergyBreakdown` of the discrete functional."""
    g = profile.grid
    if fields is not None:
        e_rot = fields.rot_energy
        e_grav = -0.5 * float(np.sum(profile.values * g.cell_volumes * fields.K_grav))
        e_int = fields.extras.get("internal")
        if e_int is None:
            e_int = internal_energy(profile, spec)
    else:
        op = operator if operator is not None else gravity_operator(g)
        e_rot = rotation_energy(profile, spec.angmom, method=rotation)
        e_grav = -op.energy(profile.values)
        e_int = internal_energy(profile, spec)
    return EnergyBreakdown(e_int, e_rot, e_grav)


def potential_function(profile, spec, fields=None):
    """Reduced potential function ``G = A'(rho) T + Q + K_rot - K_grav``.

    ``T`` is the own-cell factor ``T_eff`` of the exact cell integral; it
    tends to ``T(n(r))`` as the cell shrinks.
    """
    if fields is None:
        fields = compute_fields(profile, spec)
    T = fields.T_eff if fields.T_eff is not None else 1.0
    marginal = spec.eos.A_prime(profile.values) * T
    G = marginal + fields.Q + fields.K_rot - fields.K_grav
    return PotentialFunction(G, np.broadcast_to(marginal, G.shape).copy(), fields.Q, fields.K_rot, fields.K_grav)


# ---------------------------------------------------------------------------
# first-order checks
# ---------------------------------------------------------------------------


@dataclass
class DirectionalDerivativeReport:
    t: np.ndarray
    slopes: np.ndarray
    predicted: float
    gaps: np.ndarray

    @property
    def max_gap(self):
        return float(np.max(self.gaps))


def _check_direction(profile, sigma, eps):
    g = profile.grid
    rho = profile.values
    if sigma.shape != rho.shape:
        raise ValueError("direction must have one value per cell")
    if not np.all(np.isfinite(sigma)):
        raise ValueError("direction must be finite")
    if not eps > 0:
        raise ValueError("eps must be positive")
    eta, _ = g.nodes()
    near_axis = eta.min(axis=1) < eps
    far = g.r * max(1.0, g.b) > 1.0 / eps
    vacuum = rho == 0
    allowed = vacuum | ((rho > eps) & (rho < 1.0 / eps))
    active = sigma != 0
    if np.any(active & (near_axis | far)):
        i = int(np.nonzero(active & (near_axis | far))[0][0])
        raise ValueError(f"direction must vanish near the axis and far away (cell {i})")
    if np.any(active & ~allowed):
        i = int(np.nonzero(active & ~allowed)[0][0])
        raise ValueError(f"direction must vanish where 0 < rho <= eps or rho >= 1/eps (cell {i})")
    if np.any(vacuum & (sigma < 0)):
        i = int(np.nonzero(vacuum & (sigma < 0))[0][0])
        raise ValueError(f"direction must be non-negative in vacuum (cell {i})")


def directional_derivative_check(profile, spec, sigma, t_list=(1e-4,), eps=1e-3, operator=None):
    """Compare one-sided difference quotients of ``E_b`` with ``int G sigma``.

    Parameters
    ----------
    sigma : array_like
        Radial variation, one value per cell, satisfying the admissibility
        constraints for ``eps``.
    t_list : sequence of float
        Step sizes for ``(E_b(rho + t sigma) - E_b(rho)) / t``.
    """
    sigma = np.asarray(sigma, dtype=float)
    _check_direction(profile, sigma, eps)
    g = profile.grid
    op = operator if operator is not None else gravity_operator(g)
    fields = compute_fields(profile, spec, op)
    G = potential_function(profile, spec, fields).G
    predicted = float(np.sum(G * sigma * g.cell_volumes))
    e0 = total_energy(profile, spec, operator=op).total
    t = np.asarray(t_list, dtype=float)
    slopes = np.empty_like(t)
    for k, tk in enumerate(t):
        moved = DensityProfile(g, profile.values + tk * sigma)
        slopes[k] = (total_energy(moved, spec, operator=op).total - e0) / tk
    scale = abs(predicted) if predicted != 0 else 1.0
    gaps = np.abs(slopes - predicted) / scale
    return DirectionalDerivativeReport(t, slopes, predicted, gaps)


def el_residual(profile, spec, lam, G=None, floor_rel=1e-12):
    """Interior and exterior violations of the first-order conditions.

    Returns ``(max |G - lam| where rho > floor, max(0, lam - G) where rho <= floor)``.
    """
    if G is None:
        G = potential_function(profile, spec).G
    rho = profile.values
    floor = density_floor(rho, floor_rel)
    inside = rho > floor
    interior = float(np.max(np.abs(G[inside] - lam))) if inside.any() else 0.0
    exterior = float(np.max(np.maximum(0.0, lam - G[~inside]))) if (~inside).any() else 0.0
    return interior, exterior


# ---------------------------------------------------------------------------
# steady-state equation
# ---------------------------------------------------------------------------


@dataclass
class SteadyResidual:
    """Residual of ``grad p = rho (grad B rho + L(m(eta)) eta^-3 e_eta)``.

    ``levels`` holds ``(h, max_norm)`` for each finite-difference step.
    ``tangential`` is the largest component along the level ellipsoid.
    ``shell_projected`` is the largest shell average (over ``u``) of the
    component along the ray ``d x / d r``; this is the part that the
    ellipsoidally symmetric first-order condition controls.
    """

    levels: list
    tangential: float
    shell_projected: float
    scale: float
    radii: np.ndarray

    @property
    def norm(self):
        return self.levels[0][1]


def _interpolants(profile):
    g = profile.grid
    rho = PchipInterpolator(g.r, profile.values, extrapolate=True)
    n_edges = ellipsoidal_mass(profile)
    V_in = 4.0 / 3.0 * np.pi * g.b

    def n_of(r):
        r = np.clip(r, 0.0, g.R_max)
        i = np.clip((r / g.dr).astype(int), 0, g.N - 1)
        return n_edges[i] + profile.values[i] * V_in * (r**3 - g.edges[i] ** 3)

    return rho, n_of


def steady_residual(profile, spec, fields=None, fractions=(0.1, 0.9), n_shells=9, n_u=48, h_factors=(1.0, 0.5), margin=3):
    """Evaluate the steady rotating equation on a lattice inside the support.

    Pressure ``p = f(rho) exp(S(n))`` is composed with ``r_b``; ``grad p`` and
    ``grad B rho`` are taken by centred differences with step
    ``h = factor * dr`` (``B rho`` from the exact homoeoid sum).  The lattice
    has ``n_shells`` radii spread over ``fractions`` of the support radius, so
    it is the same set of points on every grid, and ``n_u`` Gauss-Legendre
    directions per shell.

    Raises
    ------
    ValueError
        If fewer than 4 shells of the positive band lie ``margin`` cells
        away from its ends.
    """
    g = profile.grid
    rho_v = profile.values
    floor = density_floor(rho_v)
    pos = np.nonzero(rho_v > floor)[0]
    if pos.size == 0:
        raise ValueError("profile has no positive band")
    if pos.size - 2 * margin < 4 or not np.all(np.diff(pos) == 1):
        raise ValueError("positive band too thin for the steady residual (need >= 4 shells)")
    R_s = g.r[pos[-1]]
    r_lo = max(fractions[0] * R_s, g.r[pos[0] + margin])
    r_hi = min(fractions[1] * R_s, g.r[pos[-1] - margin])
    if r_hi <= r_lo:
        raise ValueError("positive band too thin for the steady residual (need >= 4 shells)")
    r = np.linspace(r_lo, r_hi, n_shells)
    u, wu = np.polynomial.legendre.leggauss(n_u)
    wu = 0.5 * wu
    R, U = np.meshgrid(r, u, indexing="ij")
    sin_t = np.sqrt(1.0 - U**2)
    eta = R * sin_t
    z = g.b * R * U
    rho_i, n_of = _interpolants(profile)
    eos, ent, rot = spec.eos, spec.entropy, spec.angmom

    def pressure(e, zz):
        rb = ellipsoidal_radius(e, zz, g.b)
        rho = np.maximum(rho_i(rb), 0.0)
        return eos.f(rho) * ent.T(n_of(rb))

    def B(e, zz):
        return homoeoid_potential_at(profile, e, zz)

    rho_here = np.maximum(rho_i(R), 0.0)
    L_term = rot.L(cylindrical_mass(profile, eta)) / eta**3
    levels = []
    tangential = shell_proj = scale = 0.0
    for k, fac in enumerate(h_factors):
        h = fac * g.dr
        dp_e = (pressure(eta + h, z) - pressure(eta - h, z)) / (2 * h)
        dp_z = (pressure(eta, z + h) - pressure(eta, z - h)) / (2 * h)
        dB_e = (B(eta + h, z) - B(eta - h, z)) / (2 * h)
        dB_z = (B(eta, z + h) - B(eta, z - h)) / (2 * h)
        res_e = dp_e - rho_here * (dB_e + L_term)
        res_z = dp_z - rho_here * dB_z
        levels.append((h, float(np.max(np.hypot(res_e, res_z)))))
        if k == 0:
            scale = float(np.max(np.hypot(dp_e, dp_z)))
            # grad r_b is parallel to (eta, z / b^2)
            ne, nz = eta, z / g.b**2
            tangential = float(np.max(np.abs(res_e * nz - res_z * ne) / np.hypot(ne, nz)))
            ray = res_e * sin_t + res_z * g.b * U
            shell_proj = float(np.max(np.abs(ray @ wu)))
    return SteadyResidual(levels, tangential, shell_proj, scale, r)
