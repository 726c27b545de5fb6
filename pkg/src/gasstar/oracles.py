"""Independent reference values: Lane-Emden stars and Monte Carlo integrals.

Nothing here calls the evaluators in :mod:`gasstar.fields` or
:mod:`gasstar.gravity`; the point of an oracle is to disagree when they
are wrong.
"""
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .fields import DensityProfile

__all__ = [
    "LaneEmdenSolution",
    "lane_emden",
    "lane_emden_ode",
    "lane_emden_profile",
    "MonteCarloEstimate",
    "sample_ellipsoid",
    "monte_carlo_potential",
    "monte_carlo_cyl_mass",
    "monte_carlo_integral",
    "quad_internal_energy",
]


# ---------------------------------------------------------------------------
# Lane-Emden
# ---------------------------------------------------------------------------


def _rhs(n):
    def f(xi, y):
        theta, dtheta = y
        src = max(theta, 0.0) ** n
        return np.array([dtheta, -src - 2.0 * dtheta / xi])

    return f


def _rk4(f, x, y, h):
    k1 = f(x, y)
    k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(x + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def lane_emden_ode(n, tol=1e-10, xi0=1e-4, h0=1e-3, max_steps=200000):
    """Integrate ``theta'' + (2/xi) theta' = -theta^n`` to its first zero.

    Classical RK4 with step-doubling error control.  The start uses the
    regular series ``theta = 1 - xi^2/6 + n xi^4/120``.

    Returns
    -------
    xi, theta, dtheta : ndarray
        Accepted mesh, ending at the surface ``xi_1`` where ``theta = 0``.
    """
    if not 0 <= n < 5:
        raise ValueError("polytropic index must lie in [0, 5) for a finite radius")
    f = _rhs(n)
    x = xi0
    y = np.array([1 - x**2 / 6 + n * x**4 / 120, -x / 3 + n * x**3 / 30])
    xs, ys = [0.0, x], [np.array([1.0, 0.0]), y]
    h = h0
    for _ in range(max_steps):
        full = _rk4(f, x, y, h)
        half = _rk4(f, x + 0.5 * h, _rk4(f, x, y, 0.5 * h), 0.5 * h)
        err = np.max(np.abs(half - full)) / 15.0
        if err > tol and h > 1e-12:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            continue
        if half[0] <= 0.0:
            break
        x, y = x + h, half + (half - full) / 15.0
        xs.append(x)
        ys.append(y)
        h *= min(2.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
    else:
        raise RuntimeError("Lane-Emden integration did not reach the surface")
    # Newton on the step length to land on theta = 0
    for _ in range(50):
        step = -y[0] / y[1]
        if abs(step) < 1e-15 * x:
            break
        y_new = _rk4(f, x, y, step)
        if y_new[0] < 0 and step > 0:
            step *= 0.5
            y_new = _rk4(f, x, y, step)
        x, y = x + step, y_new
        xs.append(x)
        ys.append(y)
    ys = np.array(ys)
    return np.array(xs), ys[:, 0], ys[:, 1]


@dataclass(frozen=True)
class LaneEmdenSolution:
    """Spherical polytrope ``f = K rho^gamma`` of mass ``M`` under ``Delta Phi = 4 pi rho``."""

    K: float
    gamma: float
    M: float
    rho_c: float
    alpha: float
    xi1: float
    _theta: object = None

    @property
    def n(self):
        return 1.0 / (self.gamma - 1.0)

    @property
    def radius(self):
        return self.alpha * self.xi1

    @property
    def multiplier(self):
        """Value of the reduced potential on the star, ``-M / R``."""
        return -self.M / self.radius

    def theta(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self._theta is None:
            with np.errstate(invalid="ignore", divide="ignore"):
                out = np.where(xi > 0, np.sin(xi) / np.where(xi > 0, xi, 1.0), 1.0)
        else:
            out = self._theta(np.clip(xi, 0.0, self.xi1))
        return np.where(xi < self.xi1, np.maximum(out, 0.0), 0.0)

    def density(self, r):
        return self.rho_c * self.theta(np.asarray(r, dtype=float) / self.alpha) ** self.n

    def enclosed_mass(self, r):
        """``4 pi int_0^r rho s^2 ds``."""
        r = np.asarray(r, dtype=float)
        if self._theta is None:
            x = np.clip(r / self.alpha, 0.0, self.xi1)
            val = np.sin(x) - x * np.cos(x)
        else:
            x = np.clip(r / self.alpha, 0.0, self.xi1)
            val = -(x**2) * self._theta.derivative()(x)
        return 4.0 * np.pi * self.rho_c * self.alpha**3 * val


def lane_emden(K, gamma, M, numeric=False, tol=1e-10):
    """Lane-Emden star with total mass ``M``.

    ``gamma = 2`` uses ``sin(xi)/xi`` unless ``numeric`` is set; any other
    exponent in ``(6/5, 2]`` goes through :func:`lane_emden_ode`.
    """
    if not (6.0 / 5.0 < gamma <= 2.0):
        raise ValueError("gamma must lie in (6/5, 2] for a finite-mass Lane-Emden star")
    if abs(gamma - 4.0 / 3.0) < 1e-12:
        raise ValueError("gamma = 4/3 fixes the mass independently of the central density")
    if not (K > 0 and M > 0):
        raise ValueError("K and M must be positive")
    n = 1.0 / (gamma - 1.0)
    if gamma == 2.0 and not numeric:
        xi1, omega, spline = np.pi, np.pi, None
    else:
        xs, th, dth = lane_emden_ode(n, tol=tol)
        xi1 = xs[-1]
        omega = -(xi1**2) * dth[-1]
        rhs = _rhs(n)
        d2 = np.array([rhs(x, np.array([t, d]))[1] if x > 0 else -1.0 / 3.0 for x, t, d in zip(xs, th, dth)])
        keep = np.r_[True, np.diff(xs) > 0]
        spline = _ThetaSpline(xs[keep], th[keep], dth[keep], d2[keep])
    # alpha^2 = (n+1) K rho_c^(1/n - 1) / (4 pi);  M = 4 pi alpha^3 rho_c omega
    c = (n + 1.0) * K / (4.0 * np.pi)
    e = (3.0 - n) / (2.0 * n)
    rho_c = (M / (4.0 * np.pi * omega * c**1.5)) ** (1.0 / e)
    alpha = np.sqrt(c * rho_c ** (1.0 / n - 1.0))
    return LaneEmdenSolution(K, gamma, M, float(rho_c), float(alpha), float(xi1), spline)


class _ThetaSpline:
    def __init__(self, x, y, dy, d2y):
        self._f = CubicHermiteSpline(x, y, dy)
        self._d = CubicHermiteSpline(x, dy, d2y)

    def __call__(self, x):
        return self._f(x)

    def derivative(self):
        return self._d


def lane_emden_profile(K, gamma, M, grid, kind="average", numeric=False):
    """Lane-Emden density on ``grid`` (``b`` must be 1).

    ``kind="average"`` gives exact cell averages, so the discrete mass is
    ``M`` to rounding; ``kind="midpoint"`` samples the midpoints.
    """
    if grid.b != 1.0:
        raise ValueError("Lane-Emden profiles are spherical")
    sol = lane_emden(K, gamma, M, numeric=numeric)
    if kind == "midpoint":
        return DensityProfile(grid, sol.density(grid.r))
    if kind != "average":
        raise ValueError("kind must be 'average' or 'midpoint'")
    m = sol.enclosed_mass(grid.edges)
    vol = 4.0 / 3.0 * np.pi * np.diff(grid.edges**3)
    return DensityProfile(grid, np.maximum(np.diff(m), 0.0) / vol)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    n_samples: int

    def within(self, exact, k=3.0):
        return abs(self.value - exact) <= k * self.stderr


def _outer_radius(profile):
    idx = np.nonzero(profile.values > 0)[0]
    if idx.size == 0:
        return 0.0
    return float(np.linspace(0.0, profile.grid.R_max, profile.grid.N + 1)[idx[-1] + 1])


def sample_ellipsoid(rng, n, radius, b):
    """Uniform points in ``{eta^2 + z^2/b^2 <= radius^2}`` as an ``(n, 3)`` array."""
    d = rng.standard_normal((n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    d *= radius * rng.random(n)[:, None] ** (1.0 / 3.0)
    d[:, 2] *= b
    return d


def _density_lookup(profile, pts):
    g = profile.grid
    rb = np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2 + (pts[:, 2] / g.b) ** 2)
    k = np.floor(rb * (g.N / g.R_max)).astype(int)
    inside = k < g.N
    out = np.zeros(rb.shape)
    out[inside] = profile.values[k[inside]]
    return out


def _run(profile, func, n_samples, seed, chunk=200_000, min_samples=10_000):
    if n_samples < min_samples:
        raise ValueError(f"need at least {min_samples} samples")
    R = _outer_radius(profile)
    if R == 0.0:
        return MonteCarloEstimate(0.0, 0.0, n_samples)
    vol = 4.0 / 3.0 * np.pi * profile.grid.b * R**3
    rng = np.random.default_rng(seed)
    s1 = s2 = 0.0
    left = n_samples
    while left > 0:
        k = min(chunk, left)
        pts = sample_ellipsoid(rng, k, R, profile.grid.b)
        vals = func(pts, rng, R)
        s1 += float(np.sum(vals))
        s2 += float(np.sum(vals * vals))
        left -= k
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    return MonteCarloEstimate(vol * mean, vol * np.sqrt(var / (n_samples - 1)), n_samples)


def monte_carlo_potential(profile, point, n_samples=1_000_000, seed=0):
    """Estimate ``int rho(y) / |x - y| dy`` at ``point = (eta, z)``.

    Samples closer than ``1e-12`` to the field point are redrawn.
    """
    x = np.array([point[0], 0.0, point[1]], dtype=float)

    def f(pts, rng, R):
        d = np.linalg.norm(pts - x, axis=1)
        bad = d < 1e-12
        while bad.any():
            pts[bad] = sample_ellipsoid(rng, int(bad.sum()), R, profile.grid.b)
            d[bad] = np.linalg.norm(pts[bad] - x, axis=1)
            bad = d < 1e-12
        return _density_lookup(profile, pts) / d

    return _run(profile, f, n_samples, seed)


def monte_carlo_cyl_mass(profile, s, n_samples=1_000_000, seed=0):
    """Estimate the mass inside the cylinder ``eta < s``."""
    if s < 0:
        raise ValueError("cylinder radius must be non-negative")

    def f(pts, rng, R):
        eta = np.hypot(pts[:, 0], pts[:, 1])
        return np.where(eta < s, _density_lookup(profile, pts), 0.0)

    return _run(profile, f, n_samples, seed)


def monte_carlo_integral(profile, func, n_samples=1_000_000, seed=0):
    """Estimate ``int rho(y) func(eta, z) dy`` for a vectorized ``func``."""

    def f(pts, rng, R):
        eta = np.hypot(pts[:, 0], pts[:, 1])
        return _density_lookup(profile, pts) * func(eta, pts[:, 2])

    return _run(profile, f, n_samples, seed)


# ---------------------------------------------------------------------------
# adaptive quadrature
# ---------------------------------------------------------------------------


def quad_internal_energy(eos, entropy, rho, R, b=1.0, epsabs=1e-14, epsrel=1e-12):
    """``int A(rho(r)) T(n(r)) 4 pi b r^2 dr`` on ``[0, R]`` by nested adaptive quadrature.

    ``rho`` is a scalar callable of the ellipsoidal radius.
    """
    def n_of(r):
        return integrate.quad(lambda s: rho(s) * 4 * np.pi * b * s * s, 0.0, r, epsabs=epsabs, epsrel=epsrel)[0]

    def integrand(r):
        d = rho(r)
        return float(eos.A(d)) * float(entropy.T(n_of(r))) * 4 * np.pi * b * r * r

    return integrate.quad(integrand, 0.0, R, epsabs=epsabs, epsrel=epsrel, limit=200)[0]
