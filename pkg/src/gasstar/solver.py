"""Self-consistent field solver for mass-constrained minimizers of ``E_b``.

Each step evaluates the fields of the current density, finds the multiplier
``lam`` that gives the inverted density

    rho(r; lam) = (A')^{-1}( max(0, lam - Q - K_rot + K_grav) / T(n) )

total mass ``M``, and relaxes towards it with damping ``omega``.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .energy import (
    EnergyBreakdown,
    compute_fields,
    density_floor,
    el_residual,
    potential_function,
    total_energy,
)
from .fields import DensityProfile
from .geometry import build_grid
from .gravity import gravity_operator
from .model import Polytrope, RangeError, check_conditions

__all__ = [
    "ConstraintError",
    "ConditionViolation",
    "TruncationWarning",
    "SolverOptions",
    "SolverState",
    "SolveReport",
    "ScanResult",
    "candidate_density",
    "solve_lambda",
    "scf_step",
    "solve",
    "support_radius",
    "default_R_max",
    "b_grid",
    "scan_b",
]

log = logging.getLogger(__name__)


class ConstraintError(RuntimeError):
    """The mass constraint cannot be met by any multiplier."""


class ConditionViolation(ValueError):
    """The model violates one of the structural conditions."""

    def __init__(self, report):
        self.report = report
        names = ", ".join(report.failed())
        super().__init__(f"model fails conditions: {names}")


class TruncationWarning(UserWarning):
    """The support reaches too close to the truncation radius."""


@dataclass(frozen=True)
class SolverOptions:
    """Iteration controls.

    ``residual_tol`` is relative: a state is converged once both residuals
    are below ``residual_tol * max(1, |lam|)`` and the mass error is below
    ``mass_tol``.
    """

    omega: float = 0.5
    residual_tol: float = 1e-8
    mass_tol: float = 1e-10
    max_iter: int = 500
    initial: Optional[DensityProfile] = None
    floor_rel: float = 1e-12
    check: bool = True

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("damping must lie in [0, 1]")
        if not (self.residual_tol > 0 and self.mass_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


@dataclass
class SolverState:
    profile: DensityProfile
    fields: object
    lam: float
    interior: float
    exterior: float
    mass_error: float
    candidate: np.ndarray

    @property
    def grid(self):
        return self.profile.grid


@dataclass
class SolveReport:
    converged: bool
    lam: float
    energy: EnergyBreakdown
    interior: float
    exterior: float
    support_radius: float
    iterations: int
    mass_error: float
    profile: DensityProfile
    fields: object
    trace: list = field(default_factory=list)
    truncation_warning: bool = False

    def to_dict(self):
        return {
            "lambda": self.lam,
            "energy": self.energy.to_dict(),
            "residual": {"interior": self.interior, "exterior": self.exterior},
            "support_radius": self.support_radius,
            "iterations": self.iterations,
            "converged": self.converged,
            "truncation_warning": self.truncation_warning,
        }


def _threshold(fields):
    return fields.Q + fields.K_rot - fields.K_grav


def candidate_density(fields, spec, lam):
    """Density obtained by inverting the first-order relation at ``lam``."""
    T = 1.0 if fields.T_eff is None else fields.T_eff
    y = np.maximum(0.0, lam - _threshold(fields)) / T
    return spec.eos.invert_A_prime(y)


def _mass(fields, spec, lam):
    try:
        rho = candidate_density(fields, spec, lam)
    except RangeError:
        # beyond a tabulated pressure law: more mass than any target
        return np.inf
    return float(np.sum(rho * fields.profile.grid.cell_volumes))


def solve_lambda(fields, spec, M=None, mass_tol=1e-10, max_doublings=60):
    """Multiplier giving total mass ``M`` by bracketed bisection.

    The mass is non-decreasing in ``lam``; the bracket starts at the smallest
    threshold (mass zero) and doubles its width until it covers ``M``.
    """
    M = spec.M if M is None else M
    thr = _threshold(fields)
    if not np.all(np.isfinite(thr)):
        raise FloatingPointError("non-finite potential while solving for the multiplier")
    lo = float(thr.min())
    if M == 0:
        return lo
    width = max(1.0, abs(lo))
    hi = lo + width
    for _ in range(max_doublings):
        if _mass(fields, spec, hi) >= M:
            break
        lo, width = hi, 2.0 * width
        hi = lo + width
    else:
        raise ConstraintError(f"no multiplier reaches mass {M} after {max_doublings} doublings")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        m = _mass(fields, spec, mid)
        if abs(m - M) <= 0.25 * mass_tol * M:
            return mid
        if m < M:
            lo = mid
        else:
            hi = mid
    # pick the end closer in mass
    return lo if abs(_mass(fields, spec, lo) - M) <= abs(_mass(fields, spec, hi) - M) else hi


def _evaluate(profile, spec, options, operator):
    fields = compute_fields(profile, spec, operator)
    lam = solve_lambda(fields, spec, mass_tol=options.mass_tol)
    G = potential_function(profile, spec, fields).G
    interior, exterior = el_residual(profile, spec, lam, G=G, floor_rel=options.floor_rel)
    M = spec.M
    mass = profile.total_mass
    mass_error = abs(mass - M) / M if M > 0 else abs(mass)
    cand = candidate_density(fields, spec, lam)
    return SolverState(profile, fields, lam, interior, exterior, mass_error, cand)


def scf_step(state, spec, options, operator=None):
    """One damped update; returns the evaluated state of the new density."""
    w = options.omega
    if w == 0.0:
        return state
    rho = (1.0 - w) * state.profile.values + w * state.candidate
    profile = state.profile.with_values(rho)
    op = operator if operator is not None else gravity_operator(profile.grid)
    return _evaluate(profile, spec, options, op)


def support_radius(profile, floor=None):
    """Largest cell midpoint where the density exceeds ``floor``."""
    if floor is None:
        floor = density_floor(profile.values)
    if floor < 0:
        raise ValueError("floor must be non-negative")
    idx = np.nonzero(profile.values > floor)[0]
    return float(profile.grid.r[idx[-1]]) if idx.size else 0.0


def default_R_max(spec):
    """Four times the radius of the isentropic non-rotating star."""
    from .oracles import lane_emden

    eos = spec.eos
    if isinstance(eos, Polytrope):
        K, gamma = eos.K, eos.gamma
    else:
        lo, hi = eos.sample_range()
        s = np.geomspace(max(lo, 1e-3), min(hi, 1e3), 64)
        gamma, logK = np.polyfit(np.log(s), np.log(eos.f(s)), 1)
        K = float(np.exp(logK))
    gamma = float(np.clip(gamma, 1.2 + 1e-6, 2.0))
    M = spec.M if spec.M > 0 else 1.0
    return 4.0 * lane_emden(K, gamma, M).radius * max(1.0, spec.b)


def _converged(state, options, M):
    tol = options.residual_tol * max(1.0, abs(state.lam))
    mass_ok = state.mass_error <= options.mass_tol if M > 0 else True
    return state.interior <= tol and state.exterior <= tol and mass_ok


def solve(spec, grid=None, options=None, operator=None):
    """Iterate :func:`scf_step` until the first-order conditions hold.

    Non-convergence is reported through ``converged=False``.
    """
    options = options or SolverOptions()
    if options.check:
        report = check_conditions(spec)
        if not report.passed:
            raise ConditionViolation(report)
    if grid is None:
        grid = build_grid(spec.b, default_R_max(spec), 200, 16)
    if abs(grid.b - spec.b) > 1e-14 * spec.b:
        raise ValueError(f"grid ellipticity {grid.b} differs from model ellipticity {spec.b}")
    op = operator if operator is not None else gravity_operator(grid)

    if spec.M == 0:
        profile = DensityProfile(grid, np.zeros(grid.N))
        state = _evaluate(profile, spec, options, op)
        return _report(state, spec, options, True, 0, [])

    if options.initial is not None:
        init = options.initial
        if not init.grid.same_as(grid):
            raise ValueError("initial profile lives on a different grid")
        values = init.values * (spec.M / init.total_mass)
    else:
        values = DensityProfile.uniform_ball(grid, 0.5 * grid.R_max).values
        values = values * (spec.M / np.sum(values * grid.cell_volumes))
    state = _evaluate(DensityProfile(grid, values), spec, options, op)
    trace = [total_energy(state.profile, spec, fields=state.fields).total]
    converged = _converged(state, options, spec.M)
    it = 0
    while not converged and it < options.max_iter:
        state = scf_step(state, spec, options, op)
        it += 1
        trace.append(total_energy(state.profile, spec, fields=state.fields).total)
        converged = _converged(state, options, spec.M)
        if it % 50 == 0:
            log.debug("iter %d lam=%.12g interior=%.3e", it, state.lam, state.interior)
    return _report(state, spec, options, converged, it, trace)


def _report(state, spec, options, converged, iterations, trace):
    floor = density_floor(state.profile.values, options.floor_rel)
    R_s = support_radius(state.profile, floor)
    tight = R_s > 0.9 * state.grid.R_max
    if tight:
        warnings.warn(
            f"support radius {R_s:.4g} exceeds 0.9 R_max; the state solves the truncated problem",
            TruncationWarning,
            stacklevel=3,
        )
    return SolveReport(
        converged=bool(converged),
        lam=float(state.lam),
        energy=total_energy(state.profile, spec, fields=state.fields),
        interior=float(state.interior),
        exterior=float(state.exterior),
        support_radius=R_s,
        iterations=int(iterations),
        mass_error=float(state.mass_error),
        profile=state.profile,
        fields=state.fields,
        trace=list(trace),
        truncation_warning=bool(tight),
    )


# ---------------------------------------------------------------------------
# scan over the ellipticity
# ---------------------------------------------------------------------------


def b_grid(xi, n_points):
    """Log-uniform ellipticities on ``[1/xi, xi]``."""
    if not xi > 1:
        raise ValueError("xi must exceed 1")
    if n_points < 3:
        raise ValueError("need at least 3 scan points")
    return xi ** np.linspace(-1.0, 1.0, n_points)


@dataclass
class ScanResult:
    b: np.ndarray
    F: np.ndarray
    converged: np.ndarray
    reports: list

    @property
    def argmin(self):
        ok = np.nonzero(self.converged)[0]
        if ok.size == 0:
            return None
        return int(ok[np.argmin(self.F[ok])])

    @property
    def b_min(self):
        i = self.argmin
        return None if i is None else float(self.b[i])

    def max_gap(self):
        return float(np.max(np.abs(np.diff(self.F))))


def scan_b(spec, xi, n_points, R_max, N, n_beta=16, options=None):
    """Minimum energy ``F_b`` on a log grid of ellipticities.

    Each solve after the first starts from the previous minimizer mapped to
    the new ellipticity by ``rho -> a rho`` with ``a = b_prev / b_new`` on the
    same radial mesh, which preserves the mass.
    """
    options = options or SolverOptions()
    bs = b_grid(xi, n_points)
    F = np.full(bs.size, np.nan)
    ok = np.zeros(bs.size, dtype=bool)
    reports = []
    prev = None
    for k, b in enumerate(bs):
        sk = spec.replace(b=float(b), xi=float(xi))
        grid = build_grid(float(b), R_max, N, n_beta)
        opts = options
        if prev is not None and prev.converged:
            a = prev.profile.grid.b / b
            opts = options.replace(initial=DensityProfile(grid, a * prev.profile.values))
        rep = solve(sk, grid, opts)
        reports.append(rep)
        F[k] = rep.energy.total
        ok[k] = rep.converged
        prev = rep
    return ScanResult(bs, F, ok, reports)
