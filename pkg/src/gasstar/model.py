"""Constitutive functions of the star and the structural condition checks.

Pressure is ``p = f(rho) exp(S(n))`` where ``n`` is the mass enclosed by the
ellipsoid through the point, and the rotation law is ``L(m)``, the squared
angular momentum per unit mass as a function of the cylindrical mass ``m``.
The internal-energy density is

    A(s) = s * integral_0^s f(t) t^-2 dt,

whose derivative ``A'`` is strictly increasing, so the equilibrium relation can
be inverted for the density shell by shell.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

__all__ = [
    "EquationOfState",
    "Polytrope",
    "TabulatedEOS",
    "EntropyProfile",
    "LinearEntropy",
    "TabulatedEntropy",
    "AngularMomentumProfile",
    "PowerLawRotation",
    "TabulatedRotation",
    "ModelSpec",
    "Counterexample",
    "ConditionResult",
    "ConditionReport",
    "eval_A",
    "eval_A_prime",
    "invert_A_prime",
    "check_conditions",
]

# relative slack for inequalities that hold with equality in exact arithmetic
_RTOL = 1e-12


class RangeError(ValueError):
    """Argument outside the range covered by a tabulated function."""


def _nonneg(s, what="density"):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(np.isnan(s)):
        raise ValueError(f"{what} must be non-negative")
    return s


# ---------------------------------------------------------------------------
# equations of state
# ---------------------------------------------------------------------------


class EquationOfState:
    """Base class for barotropic pressure laws ``f(s)``.

    Subclasses provide ``f``, ``df``, ``A``, ``A_prime`` and
    ``invert_A_prime``; ``A_quad`` is a generic adaptive-quadrature path kept
    independent of the closed forms.
    """

    gamma_bar: Optional[float] = None

    def f(self, s):
        raise NotImplementedError

    def df(self, s):
        raise NotImplementedError

    def A(self, s):
        raise NotImplementedError

    def A_prime(self, s):
        raise NotImplementedError

    def invert_A_prime(self, y):
        raise NotImplementedError

    def sample_range(self):
        """Interval of densities on which the conditions are sampled."""
        raise NotImplementedError

    def A_quad(self, s):
        """``A(s)`` by adaptive quadrature of ``f(t) / t^2``.

        The substitution ``t = s v^4`` removes the integrable endpoint
        singularity for pressure laws that vanish faster than ``t^(4/3)``.
        """
        s = float(_nonneg(s))
        if s == 0.0:
            return 0.0

        def integrand(v):
            if v == 0.0:
                return 0.0
            t = s * v**4
            return float(self.f(t)) / t**2 * 4.0 * s * v**3

        val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=400)
        return s * val


@dataclass(frozen=True)
class Polytrope(EquationOfState):
    """``f(s) = K s^gamma``.

    ``gamma_bar`` is the exponent declared for the large-density growth
    bound; it defaults to ``gamma + 1``.
    """

    K: float = 1.0
    gamma: float = 2.0
    gamma_bar: Optional[float] = None

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("polytropic constant K must be positive")
        if not self.gamma > 1:
            raise ValueError("polytropic exponent gamma must exceed 1")
        if self.gamma_bar is None:
            object.__setattr__(self, "gamma_bar", self.gamma + 1.0)

    @property
    def index(self):
        return 1.0 / (self.gamma - 1.0)

    def f(self, s):
        return self.K * _nonneg(s) ** self.gamma

    def df(self, s):
        return self.K * self.gamma * _nonneg(s) ** (self.gamma - 1.0)

    def A(self, s):
        return self.K * _nonneg(s) ** self.gamma / (self.gamma - 1.0)

    def A_prime(self, s):
        g = self.gamma
        return self.K * g / (g - 1.0) * _nonneg(s) ** (g - 1.0)

    def invert_A_prime(self, y):
        g = self.gamma
        y = _nonneg(y, "marginal energy")
        return ((g - 1.0) * y / (self.K * g)) ** (1.0 / (g - 1.0))

    def sample_range(self):
        return 1e-6, 1e6


class TabulatedEOS(EquationOfState):
    """Pressure law interpolated linearly in ``(log s, log f)``.

    Below the smallest positive sample the first segment's power law is
    continued to zero, which keeps ``A`` finite whenever that exponent
    exceeds one.  Densities above the last sample raise :class:`RangeError`.
    """

    def __init__(self, s, f, gamma_bar=None):
        s = np.asarray(s, dtype=float)
        f = np.asarray(f, dtype=float)
        if s.ndim != 1 or s.shape != f.shape:
            raise ValueError("pressure table needs matching 1-D abscissae and values")
        if s[0] == 0.0:
            if f[0] != 0.0:
                raise ValueError("tabulated pressure must vanish at zero density")
            s, f = s[1:], f[1:]
        if s.size < 2:
            raise ValueError("pressure table needs at least two positive samples")
        if np.any(s <= 0) or np.any(f <= 0):
            raise ValueError("pressure table must be positive away from zero density")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(f) <= 0):
            raise ValueError("pressure table must be strictly increasing")
        self.s = s
        self.fk = f
        self.gamma_bar = gamma_bar
        p = np.diff(np.log(f)) / np.diff(np.log(s))
        self.p = np.concatenate([[p[0]], p])  # exponent on the segment left of knot k
        if self.p[0] <= 1.0:
            raise ValueError(
                "tabulated pressure grows too slowly at low density; "
                "the internal energy integral diverges"
            )
        # cumulative integral of f/t^2 up to each knot
        cum = np.empty_like(s)
        cum[0] = f[0] / (s[0] * (self.p[0] - 1.0))
        for k in range(1, s.size):
            cum[k] = cum[k - 1] + self._seg_integral(k, s[k - 1], s[k])
        self.cum = cum
        self.Ak_prime = cum + f / s

    def _seg_integral(self, k, lo, hi):
        # integral of f/t^2 over [lo, hi] inside the segment ending at knot k
        p = self.p[k]
        c = self.fk[k] * self.s[k] ** (-p)
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if abs(p - 1.0) < 1e-12:
            return c * np.log(hi / lo)
        return c * (hi ** (p - 1.0) - lo ** (p - 1.0)) / (p - 1.0)

    def _segment(self, s):
        s = _nonneg(s)
        if np.any(s > self.s[-1] * (1 + 1e-14)):
            raise RangeError(f"density beyond tabulated range (max {self.s[-1]:.6g})")
        k = np.clip(np.searchsorted(self.s, s, side="left"), 0, self.s.size - 1)
        return s, k

    def f(self, s):
        s, k = self._segment(s)
        with np.errstate(divide="ignore"):
            out = self.fk[k] * (s / self.s[k]) ** self.p[k]
        return np.where(s > 0, out, 0.0)

    def df(self, s):
        s, k = self._segment(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.p[k] * self.fk[k] * (s / self.s[k]) ** self.p[k] / s
        return np.where(s > 0, out, 0.0)

    def _I(self, s, k):
        # integral of f/t^2 from 0 to s (s in segment k)
        with np.errstate(divide="ignore", invalid="ignore"):
            first = self.fk[0] * (s / self.s[0]) ** self.p[0] / (s * (self.p[0] - 1.0))
            prev = np.where(k > 0, self.cum[np.maximum(k - 1, 0)], 0.0)
            lo = np.where(k > 0, self.s[np.maximum(k - 1, 0)], 1.0)
            inner = np.empty_like(s)
            for kk in np.unique(k):
                sel = k == kk
                if kk > 0:
                    inner[sel] = self._seg_integral(kk, lo[sel], s[sel])
            out = np.where(k > 0, prev + inner, first)
        return np.where(s > 0, out, 0.0)

    def A(self, s):
        s, k = self._segment(s)
        return s * self._I(s, k)

    def A_prime(self, s):
        s, k = self._segment(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            fs = np.where(s > 0, self.fk[k] * (s / self.s[k]) ** self.p[k] / np.where(s > 0, s, 1.0), 0.0)
        return self._I(s, k) + fs

    def invert_A_prime(self, y):
        y = _nonneg(np.asarray(y, dtype=float), "marginal energy")
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        if np.any(y > self.Ak_prime[-1] * (1 + 1e-14)):
            raise RangeError("marginal energy beyond tabulated range")
        out = np.zeros_like(y)
        p0 = self.p[0]
        low = (y > 0) & (y <= self.Ak_prime[0])
        # power-law segment: A'(s) = f0 s0^-p0 s^(p0-1) p0/(p0-1)
        c = self.fk[0] * self.s[0] ** (-p0) * p0 / (p0 - 1.0)
        out[low] = (y[low] / c) ** (1.0 / (p0 - 1.0))
        high = y > self.Ak_prime[0]
        if high.any():
            yh = y[high]
            k = np.clip(np.searchsorted(self.Ak_prime, yh, side="left"), 1, self.s.size - 1)
            lo = np.log(self.s[k - 1])
            hi = np.log(self.s[k])
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                below = self.A_prime(np.exp(mid)) < yh
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            out[high] = np.exp(0.5 * (lo + hi))
        return out[0] if scalar else out

    def sample_range(self):
        return self.s[0], self.s[-1]


def eval_A(eos, s):
    """Internal-energy density ``A(s) = s * int_0^s f(t) t^-2 dt``."""
    return eos.A(s)


def eval_A_prime(eos, s):
    """``A'(s) = A(s)/s + f(s)/s``, continuous at zero with ``A'(0) = 0``."""
    return eos.A_prime(s)


def invert_A_prime(eos, y):
    """The unique density ``s >= 0`` with ``A'(s) = y``."""
    return eos.invert_A_prime(y)


# ---------------------------------------------------------------------------
# entropy and rotation laws
# ---------------------------------------------------------------------------


class EntropyProfile:
    """Entropy ``S(n)`` as a function of the enclosed ellipsoidal mass.

    ``delta0`` is the width of the mass interval below ``M`` on which the
    entropy must be non-increasing.
    """

    delta0: Optional[float] = None

    def S(self, n):
        raise NotImplementedError

    def dS(self, n):
        raise NotImplementedError

    def T(self, n):
        return np.exp(self.S(n))

    def dT(self, n):
        return self.dS(n) * np.exp(self.S(n))

    def mean_T(self, n0, n1, order=8):
        """Average of ``T`` over ``[n0, n1]`` (``T(n0)`` where the interval is empty)."""
        n0 = np.asarray(n0, dtype=float)
        n1 = np.asarray(n1, dtype=float)
        x, w = np.polynomial.legendre.leggauss(order)
        mid = 0.5 * (n0 + n1)[..., None]
        half = 0.5 * (n1 - n0)[..., None]
        return 0.5 * (self.T(mid + half * x) @ w)

    @property
    def isentropic(self):
        return False

    def bounds(self, M, n_samples=1000):
        """Sampled ``(T1, T0)`` with ``T1 <= T <= T0`` and ``|T'| <= T0`` on ``[0, M]``."""
        n = np.linspace(0.0, M, n_samples)
        T = self.T(n)
        return float(T.min()), float(max(T.max(), np.abs(self.dT(n)).max()))


@dataclass(frozen=True)
class LinearEntropy(EntropyProfile):
    """``S(n) = -slope * n`` with ``slope >= 0``."""

    slope: float = 0.0
    delta0: Optional[float] = None

    def __post_init__(self):
        if self.slope < 0:
            raise ValueError("entropy slope must be non-negative")

    def S(self, n):
        return -self.slope * np.asarray(n, dtype=float)

    def dS(self, n):
        return np.full(np.shape(n), -self.slope)

    def mean_T(self, n0, n1, order=None):
        n0 = np.asarray(n0, dtype=float)
        x = self.slope * (np.asarray(n1, dtype=float) - n0)
        # (1 - exp(-x)) / x, stable near x = 0
        safe = np.where(x == 0, 1.0, x)
        ratio = np.where(x == 0, 1.0, -np.expm1(-safe) / safe)
        return np.exp(-self.slope * n0) * ratio

    @property
    def isentropic(self):
        return self.slope == 0.0


class TabulatedEntropy(EntropyProfile):
    """Entropy samples joined by a shape-preserving C^1 cubic (PCHIP)."""

    def __init__(self, n, S, delta0=None):
        n = np.asarray(n, dtype=float)
        S = np.asarray(S, dtype=float)
        if n.ndim != 1 or n.shape != S.shape or n.size < 2:
            raise ValueError("entropy table needs matching 1-D abscissae and values")
        if np.any(np.diff(n) <= 0):
            raise ValueError("entropy table abscissae must be strictly increasing")
        self.n = n
        self.values = S
        self.delta0 = delta0
        self._S = PchipInterpolator(n, S, extrapolate=True)
        self._dS = self._S.derivative()

    def S(self, n):
        return self._S(np.asarray(n, dtype=float))

    def dS(self, n):
        return self._dS(np.asarray(n, dtype=float))

    @property
    def isentropic(self):
        return bool(np.all(self.values == 0.0))


class AngularMomentumProfile:
    """Squared specific angular momentum ``L(m)`` of the cylinder mass ``m``."""

    def L(self, m):
        raise NotImplementedError

    def dL(self, m):
        raise NotImplementedError

    @property
    def vanishes(self):
        return False


@dataclass(frozen=True)
class PowerLawRotation(AngularMomentumProfile):
    """``L(m) = beta * m^q``; ``beta = 0`` means no rotation."""

    beta: float = 0.0
    q: float = 4.0 / 3.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("rotation amplitude beta must be non-negative")
        if not self.q > 0:
            raise ValueError("rotation exponent q must be positive")

    def L(self, m):
        m = np.maximum(np.asarray(m, dtype=float), 0.0)
        return self.beta * m**self.q

    def dL(self, m):
        m = np.maximum(np.asarray(m, dtype=float), 0.0)
        if self.beta == 0.0:
            return np.zeros_like(m)
        with np.errstate(divide="ignore"):
            return self.beta * self.q * m ** (self.q - 1.0)

    @property
    def vanishes(self):
        return self.beta == 0.0


class TabulatedRotation(AngularMomentumProfile):
    """Piecewise-linear ``L(m)``; samples must be non-decreasing."""

    def __init__(self, m, L):
        m = np.asarray(m, dtype=float)
        L = np.asarray(L, dtype=float)
        if m.ndim != 1 or m.shape != L.shape or m.size < 2:
            raise ValueError("rotation table needs matching 1-D abscissae and values")
        if np.any(np.diff(m) <= 0):
            raise ValueError("rotation table abscissae must be strictly increasing")
        if np.any(np.diff(L) < 0):
            raise ValueError("rotation table values must be non-decreasing")
        self.m = m
        self.values = L
        self.slopes = np.diff(L) / np.diff(m)

    def L(self, m):
        m = np.asarray(m, dtype=float)
        out = np.interp(m, self.m, self.values)
        above = m > self.m[-1]
        if np.any(above):
            out = np.where(above, self.values[-1] + self.slopes[-1] * (m - self.m[-1]), out)
        return out

    def dL(self, m):
        m = np.asarray(m, dtype=float)
        k = np.clip(np.searchsorted(self.m, m, side="right") - 1, 0, self.slopes.size - 1)
        return self.slopes[k]

    @property
    def vanishes(self):
        return bool(np.all(self.values == 0.0))


@dataclass(frozen=True)
class ModelSpec:
    """Everything that defines a star apart from the numerical grid."""

    eos: EquationOfState
    entropy: EntropyProfile = field(default_factory=LinearEntropy)
    angmom: AngularMomentumProfile = field(default_factory=PowerLawRotation)
    M: float = 1.0
    b: float = 1.0
    xi: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.M) and self.M >= 0):
            raise ValueError("total mass must be non-negative")
        if not self.b > 0:
            raise ValueError("ellipticity b must be positive")
        if self.xi is not None:
            if not self.xi > 1:
                raise ValueError("range parameter xi must exceed 1")
            if not (1.0 / self.xi - 1e-12 <= self.b <= self.xi + 1e-12):
                raise ValueError(f"b={self.b} outside [1/xi, xi] for xi={self.xi}")

    @property
    def delta0(self):
        d = self.entropy.delta0
        if d is not None:
            return d
        # the window is empty when there is no mass
        return 0.1 * self.M if self.M > 0 else 1.0

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


# ---------------------------------------------------------------------------
# condition checks
# ---------------------------------------------------------------------------


class Counterexample(NamedTuple):
    """A sampled violation ``lhs < rhs`` of ``clause`` at ``(a, x)``."""

    a: Optional[float]
    x: float
    lhs: float
    rhs: float
    clause: str


@dataclass
class ConditionResult:
    name: str
    passed: bool
    n_checked: int
    counterexample: Optional[Counterexample] = None
    detail: str = ""


@dataclass
class ConditionReport:
    results: dict
    slope_bound: bool
    sup_abs_dS: float
    T_bounds: tuple
    n_samples: int

    @property
    def passed(self):
        return all(r.passed for r in self.results.values())

    def failed(self):
        return [name for name, r in self.results.items() if not r.passed]

    def to_dict(self):
        out = {
            "passed": self.passed,
            "n_samples": self.n_samples,
            "slope_bound": self.slope_bound,
            "sup_abs_dS": self.sup_abs_dS,
            "T1": self.T_bounds[0],
            "T0": self.T_bounds[1],
            "conditions": {},
        }
        for name, r in self.results.items():
            ce = None
            if r.counterexample is not None:
                ce = dict(r.counterexample._asdict())
            out["conditions"][name] = {
                "passed": r.passed,
                "n_checked": r.n_checked,
                "counterexample": ce,
                "detail": r.detail,
            }
        return out


class _Checker:
    """Collects sampled inequalities ``lhs >= rhs`` for one condition."""

    def __init__(self, name):
        self.name = name
        self.count = 0
        self.ce = None
        self.detail = ""

    def require(self, lhs, rhs, clause, a=None, x=None, strict=False, rtol=_RTOL):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        lhs, rhs = np.broadcast_arrays(lhs, rhs)
        self.count += lhs.size
        if strict:
            ok = lhs > rhs
        else:
            ok = lhs >= rhs - rtol * np.abs(rhs)
        ok &= np.isfinite(lhs) & np.isfinite(rhs)
        if self.ce is None and not ok.all():
            idx = np.unravel_index(np.argmin(ok), ok.shape)
            av = None if a is None else float(np.broadcast_to(a, ok.shape)[idx])
            xv = float("nan") if x is None else float(np.broadcast_to(x, ok.shape)[idx])
            self.ce = Counterexample(av, xv, float(lhs[idx]), float(rhs[idx]), clause)

    def fail(self, detail):
        self.count += 1
        if self.ce is None:
            self.ce = Counterexample(None, float("nan"), float("nan"), float("nan"), detail)
        self.detail = detail

    def result(self):
        return ConditionResult(self.name, self.ce is None, self.count, self.ce, self.detail)


def check_conditions(spec, n_samples=100):
    """Sample the structural conditions (A1)-(A7) for ``spec``.

    Parameters
    ----------
    spec : ModelSpec
    n_samples : int
        Lattice size per axis (at least 2).

    Returns
    -------
    ConditionReport
        Per-condition verdicts with the first sampled counterexample, and the
        separate verdict on the sufficient entropy bound
        ``sup |S'| <= 2 / (3 M)``.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples per axis")
    eos, ent, rot, M = spec.eos, spec.entropy, spec.angmom, spec.M
    out = {}

    # (A1) f >= 0, f(0) = 0, strictly increasing, f s^(-4/3) -> 0 at 0 and -> inf at inf
    c = _Checker("A1")
    lo, hi = eos.sample_range()
    s = np.geomspace(lo, hi, max(n_samples, 10))
    fs = eos.f(s)
    c.require(-abs(float(eos.f(0.0))), 0.0, "f(0) = 0", x=0.0)
    c.require(fs, 0.0, "f(s) >= 0", x=s)
    c.require(fs[1:], fs[:-1], "f strictly increasing", x=s[1:], strict=True)
    g = fs * s ** (-4.0 / 3.0)
    # trends over the extreme decades stand in for the two limits
    dec = min(max(2, int(np.ceil(s.size / np.log10(hi / lo)))), s.size // 2)
    c.require(g[1:dec], g[: dec - 1], "f(s) s^(-4/3) -> 0 as s -> 0", x=s[: dec - 1], strict=True)
    c.require(g[-dec + 1 :], g[-dec:-1], "f(s) s^(-4/3) -> inf as s -> inf", x=s[-dec + 1 :], strict=True)
    out["A1"] = c.result()

    # (A2) f(s) s^(-gamma_bar) -> 0 for a declared gamma_bar > 1
    c = _Checker("A2")
    gb = eos.gamma_bar
    if gb is None:
        c.fail("no gamma_bar declared")
    elif not gb > 1:
        c.fail(f"gamma_bar={gb} is not > 1")
    else:
        h = fs * s ** (-gb)
        c.require(h[-dec:-1], h[-dec + 1 :], "f(s) s^(-gamma_bar) -> 0", x=s[-dec + 1 :], strict=True)
    out["A2"] = c.result()

    a = np.linspace(0.0, 1.0, n_samples)
    m = np.linspace(0.0, M, n_samples)
    A, Mm = np.meshgrid(a, m, indexing="ij")

    # (A3) L >= 0, L(0) = 0, absolutely continuous (finite samples)
    c = _Checker("A3")
    Lm = rot.L(m)
    c.require(-abs(float(rot.L(0.0))), 0.0, "L(0) = 0", x=0.0)
    c.require(Lm, 0.0, "L(m) >= 0", x=m)
    out["A3"] = c.result()

    # (A4) L(a m) >= a^(4/3) L(m) and L' >= 0
    c = _Checker("A4")
    c.require(rot.L(A * Mm), A ** (4.0 / 3.0) * rot.L(Mm), "L(am) >= a^(4/3) L(m)", a=A, x=Mm)
    fine = np.linspace(0.0, M, 10 * n_samples)
    Lf = rot.L(fine)
    c.require(Lf[1:], Lf[:-1], "L non-decreasing", x=fine[1:])
    out["A4"] = c.result()

    # (A5) S continuously differentiable with S(0) = 0
    c = _Checker("A5")
    S0 = float(ent.S(0.0))
    c.require(-abs(S0), -1e-14, "S(0) = 0", x=0.0, rtol=0.0)
    n = np.linspace(0.0, M, 10 * n_samples)
    dS = ent.dS(n)
    if not np.all(np.isfinite(ent.S(n))) or not np.all(np.isfinite(dS)):
        c.fail("S or S' not finite on [0, M]")
    out["A5"] = c.result()

    # (A6) both entropy inequalities on the (a, n) lattice
    c = _Checker("A6")
    a23 = A ** (2.0 / 3.0)
    TN = ent.T(Mm)
    c.require(ent.T(A * Mm), a23 * TN, "exp S(an) >= a^(2/3) exp S(n)", a=A, x=Mm)
    c.require(ent.T(M - A * M + A * Mm), a23 * TN, "exp S(M - aM + an) >= a^(2/3) exp S(n)", a=A, x=Mm)
    out["A6"] = c.result()

    # (A7) S' <= 0 near the vacuum
    c = _Checker("A7")
    d0 = spec.delta0
    if not d0 > 0:
        c.fail("delta0 must be positive")
    else:
        tail = np.linspace(max(M - d0, 0.0), M, n_samples)
        c.require(0.0, ent.dS(tail), "S'(n) <= 0 on [M - delta0, M]", x=tail, rtol=0.0)
    out["A7"] = c.result()

    sup_dS = float(np.abs(dS).max())
    bound = np.inf if M == 0 else 2.0 / (3.0 * M)
    return ConditionReport(
        results=out,
        slope_bound=bool(sup_dS <= bound * (1 + _RTOL)),
        sup_abs_dS=sup_dS,
        T_bounds=ent.bounds(M) if M > 0 else (1.0, 1.0),
        n_samples=n_samples,
    )
