"""Acceptance criteria, one test each.

Every test prints a ``CRITERION k PASS|FAIL`` line (collected again in the
terminal summary) before asserting, so a failing criterion still reports the
measured numbers.
"""

import time

import numpy as np
import pytest

from gasstar import DensityProfile, ModelSpec, Polytrope, build_grid, solve
from gasstar.cli import main
from gasstar.energy import directional_derivative_check, steady_residual
from gasstar.fields import cylindrical_mass, ellipsoidal_mass, rescale_profile
from gasstar.gravity import (
    hls_ratio,
    potential_at,
    potential_field,
    spherical_potential_at,
    uniform_ellipsoid_center,
)
from gasstar.model import (
    LinearEntropy,
    PowerLawRotation,
    TabulatedEntropy,
    check_conditions,
)
from gasstar.oracles import lane_emden_profile, monte_carlo_potential
from gasstar.solver import scan_b

SQRT_2PI = np.sqrt(2.0 * np.pi)


@pytest.fixture(scope="module")
def timed_lane_emden(lane_emden_spec):
    grid = build_grid(1.0, 3.0, 400, 16)
    t0 = time.perf_counter()
    rep = solve(lane_emden_spec, grid)
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def scans():
    spec = ModelSpec(Polytrope(1.0, 2.0), M=1.0, b=1.0)
    out = {}
    t0 = time.perf_counter()
    for n in (5, 9):
        out[n] = scan_b(spec, 1.5, n, R_max=3.0, N=200, n_beta=16)
    return out, time.perf_counter() - t0


def test_criterion_1_lane_emden(timed_lane_emden, record_criterion):
    rep, elapsed = timed_lane_emden
    g = rep.profile.grid
    rho_c, alpha = 1.0 / SQRT_2PI, 1.0 / SQRT_2PI
    x = g.r / alpha
    exact = np.where(x < np.pi, rho_c * np.sin(x) / x, 0.0)
    density_err = float(np.max(np.abs(rep.profile.values - exact)) / rho_c)
    lam_err = abs(rep.lam + np.sqrt(2.0 / np.pi))
    support_err = abs(rep.support_radius - np.sqrt(np.pi / 2.0))
    ok = rep.converged and density_err <= 1e-3 and lam_err <= 1e-3 and support_err <= 2 * g.dr and elapsed <= 60
    detail = (
        f"converged={rep.converged} density_err={density_err:.2e} lambda_err={lam_err:.2e} "
        f"support_err={support_err / g.dr:.2f} dr time={elapsed:.2f}s"
    )
    assert record_criterion(1, "Lane-Emden reproduction", ok, detail), detail


def test_criterion_2_first_order_certificate(timed_lane_emden, rotating_solves, scans, record_criterion):
    reports = [("lane_emden", timed_lane_emden[0])]
    reports += [(f"rotating_N{N}", r) for N, r in rotating_solves.items()]
    reports += [(f"scan_b{b:.4f}", r) for b, r in zip(scans[0][5].b, scans[0][5].reports)]
    worst = {"interior": 0.0, "exterior": 0.0, "mass": 0.0}
    bad = []
    for name, r in reports:
        if not r.converged:
            continue
        scale = abs(r.lam)
        worst["interior"] = max(worst["interior"], r.interior / scale)
        worst["exterior"] = max(worst["exterior"], r.exterior / scale)
        worst["mass"] = max(worst["mass"], r.mass_error)
        if r.interior > 1e-6 * scale or r.exterior > 1e-6 * scale or r.mass_error > 1e-10:
            bad.append(name)
    ok = not bad
    detail = (
        f"{len(reports)} solves; max interior/|lambda|={worst['interior']:.2e} "
        f"exterior/|lambda|={worst['exterior']:.2e} mass_err={worst['mass']:.2e} failing={bad}"
    )
    assert record_criterion(2, "Euler-Lagrange certificate", ok, detail), detail


def test_criterion_3_gravity_oracles(record_criterion):
    g = build_grid(1.0, 2.0, 200, 32)
    ball = DensityProfile.uniform_ball(g, 1.0)
    ring = potential_field(ball).values
    exact = spherical_potential_at(ball, np.broadcast_to(g.r[:, None], ring.shape))
    sph_err = float(np.max(np.abs(ring - exact) / exact))

    ellip_err = {}
    for b in (0.5, 2.0):
        gb = build_grid(b, 2.0, 200, 32)
        p = DensityProfile.uniform_ball(gb, 1.0)
        centre = float(potential_at(p, np.array([0.0]), np.array([0.0]))[0])
        ref = uniform_ellipsoid_center(b, p.total_mass, 1.0)
        ellip_err[b] = abs(centre - ref) / ref

    rng = np.random.default_rng(20240607)
    gm = build_grid(1.5, 2.0, 100, 32)
    prof = DensityProfile.from_function(gm, lambda r: np.maximum(1.0 - r * r, 0.0))
    pts = np.column_stack([rng.uniform(0.05, 1.5, 5), rng.uniform(-1.5, 1.5, 5)])
    vals = potential_at(prof, pts[:, 0], pts[:, 1])
    sig = []
    for k, (pt, v) in enumerate(zip(pts, vals)):
        mc = monte_carlo_potential(prof, pt, 1_000_000, seed=100 + k)
        sig.append(abs(mc.value - v) / mc.stderr)
    ok = sph_err <= 1e-3 and max(ellip_err.values()) <= 1e-3 and max(sig) <= 3.0
    detail = (
        f"spherical rel={sph_err:.2e} I*(0.5) rel={ellip_err[0.5]:.2e} "
        f"I*(2) rel={ellip_err[2.0]:.2e} Monte Carlo worst={max(sig):.2f} sigma"
    )
    assert record_criterion(3, "Gravity oracles", ok, detail), detail


def _bump(r, lo, hi, sign=1.0):
    return np.where((r > lo) & (r < hi), sign * np.sin(np.pi * (r - lo) / (hi - lo)) ** 2, 0.0)


def test_criterion_4_directional_derivative(record_criterion):
    spec = ModelSpec(
        Polytrope(1.0, 2.0), LinearEntropy(1.0 / 3.0), PowerLawRotation(0.05, 4.0 / 3.0), M=1.0, b=1.0
    )
    g = build_grid(1.0, 3.0, 200, 16)
    profiles = {
        "ball": DensityProfile.uniform_ball(g, 1.0, 0.25),
        "lane_emden": lane_emden_profile(1.0, 2.0, 1.0, g),
        "smooth": DensityProfile.from_function(g, lambda r: 0.3 * np.maximum(1.0 - (r / 1.4) ** 2, 0.0) ** 1.5),
    }
    r = g.r
    directions = [
        _bump(r, 0.2, 0.6),
        _bump(r, 0.4, 0.9),
        _bump(r, 0.1, 0.5) - 0.5 * _bump(r, 0.5, 0.8),
        _bump(r, 0.3, 0.7) * (1 + r),
        _bump(r, 0.6, 1.0, 0.5) + _bump(r, 0.15, 0.35),
    ]
    worst, worst_ratio, n = 0.0, np.inf, 0
    for prof in profiles.values():
        for sigma in directions:
            rep = directional_derivative_check(prof, spec, sigma, t_list=(1e-4, 1e-5))
            worst = max(worst, rep.gaps[0])
            worst_ratio = min(worst_ratio, rep.gaps[0] / rep.gaps[1])
            n += 1
    ok = worst <= 1e-3 and worst_ratio >= 5.0
    detail = f"{n} cases; max gap at t=1e-4: {worst:.2e}; min gap(1e-4)/gap(1e-5)={worst_ratio:.2f}"
    assert record_criterion(4, "Directional derivative", ok, detail), detail


def test_criterion_5_scaling_and_conditions(record_criterion):
    rng = np.random.default_rng(7)
    rescale_err = 0.0
    for _ in range(5):
        g = build_grid(rng.uniform(0.5, 2.0), 2.0, 60, 8)
        p = DensityProfile(g, rng.uniform(0.0, 1.0, g.N) * (g.r < 1.5))
        a = rng.uniform(0.2, 1.0)
        q = rescale_profile(p, a)
        eta = rng.uniform(0.01, 2.5, 30)
        rescale_err = max(rescale_err, float(np.max(np.abs(cylindrical_mass(p, eta) / (a**3 * cylindrical_mass(q, eta / a)) - 1))))
        n_p, n_q = ellipsoidal_mass(p)[1:], ellipsoidal_mass(q)[1:]
        rescale_err = max(rescale_err, float(np.max(np.abs(n_p / (a**3 * n_q) - 1))))

    hls = 0.0
    for _ in range(3):
        b = rng.uniform(0.5, 2.0)
        vals = rng.uniform(0.0, 1.0, 30)
        ref = hls_ratio(DensityProfile(build_grid(b, 1.0, 30, 8), vals))
        for lam in (0.5, 2.0, 4.0):
            J = hls_ratio(DensityProfile(build_grid(b, lam, 30, 8), vals))
            hls = max(hls, abs(J / ref - 1))

    gamma2 = Polytrope(1.0, 2.0)
    families_ok = all(
        check_conditions(ModelSpec(Polytrope(1.0, gamma), LinearEntropy(0.3), PowerLawRotation(0.2, q), M=1.0)).passed
        for gamma in (1.5, 5.0 / 3.0, 2.0)
        for q in (1.0, 4.0 / 3.0)
    )
    rejects = {
        "A4": "A4" in check_conditions(ModelSpec(gamma2, angmom=PowerLawRotation(1.0, 2.0), M=1.0)).failed(),
        "A6": "A6" in check_conditions(ModelSpec(gamma2, LinearEntropy(5.0), M=1.0)).failed(),
        "A7": "A7"
        in check_conditions(ModelSpec(gamma2, TabulatedEntropy([0.0, 0.5, 1.0], [0.0, -0.2, 0.1], delta0=0.2), M=1.0)).failed(),
    }

    n = np.linspace(0.0, 1.0, 400)
    slope_ok = True
    for _ in range(5):
        amp, k, ph = rng.uniform(-1, 1), rng.uniform(1, 20), rng.uniform(0, 2 * np.pi)
        c = 0.95 * (2.0 / 3.0) / (1 + abs(amp))
        S = -c * (n - amp * (np.cos(k * n + ph) - np.cos(ph)) / k)
        rep = check_conditions(ModelSpec(gamma2, TabulatedEntropy(n, S), M=1.0))
        slope_ok &= rep.slope_bound and rep.results["A6"].passed

    ok = rescale_err <= 1e-10 and hls <= 1e-8 and families_ok and all(rejects.values()) and slope_ok
    detail = (
        f"rescaling rel={rescale_err:.1e} J dilation rel={hls:.1e} families={families_ok} "
        f"rejects={rejects} slope bound={slope_ok}"
    )
    assert record_criterion(5, "Scaling and condition checks", ok, detail), detail


def test_criterion_6_rotating_non_isentropic(rotating_spec, rotating_solves, record_criterion):
    norms, shell, tang = {}, {}, {}
    finite = True
    for N, rep in rotating_solves.items():
        if not rep.converged:
            continue
        res = steady_residual(rep.profile, rotating_spec, rep.fields)
        norms[N] = res.norm / res.scale
        shell[N] = res.shell_projected / res.scale
        tang[N] = res.tangential / res.scale
        finite &= rep.support_radius < 0.9 * rep.profile.grid.R_max
    converged = all(r.converged for r in rotating_solves.values())
    cert = all(
        r.interior <= 1e-6 * abs(r.lam) and r.exterior <= 1e-6 * abs(r.lam) and r.mass_error <= 1e-10
        for r in rotating_solves.values()
    )
    Ns = sorted(norms)
    shrink = [norms[a] / norms[b] for a, b in zip(Ns[:-1], Ns[1:])]
    ok = converged and cert and finite and len(shrink) == 2 and min(shrink) >= 1.5
    detail = (
        f"converged={converged} certificate={cert} support<R_max={finite} "
        f"relative residual {[f'{norms[N]:.3e}' for N in Ns]} shrink {[f'{s:.2f}' for s in shrink]}; "
        f"diagnostics: tangential {[f'{tang[N]:.3e}' for N in Ns]}, "
        f"shell-projected {[f'{shell[N]:.2e}' for N in Ns]}"
    )
    assert record_criterion(6, "Non-isentropic rotating solve", ok, detail), detail


def test_criterion_7_b_scan(scans, record_criterion):
    res, elapsed = scans
    coarse, fine = res[5], res[9]
    all_conv = bool(coarse.converged.all() and fine.converged.all())
    ratio = coarse.max_gap() / fine.max_gap()
    nearest = int(np.argmin(np.abs(np.log(coarse.b))))
    argmin_ok = coarse.argmin == nearest
    ok = all_conv and ratio >= 1.8 and argmin_ok and elapsed <= 600
    detail = (
        f"converged={all_conv} gap ratio={ratio:.3f} (gaps {coarse.max_gap():.4e}, {fine.max_gap():.4e}) "
        f"b_min={coarse.b_min:.4f} time={elapsed:.1f}s"
    )
    assert record_criterion(7, "b-scan", ok, detail), detail


def test_criterion_8_determinism(tmp_path, record_criterion):
    import json

    cfg = {
        "model": {
            "eos": {"type": "polytrope", "K": 1.0, "gamma": 2.0},
            "entropy": {"type": "linear", "slope": 1.0 / 3.0},
            "angmom": {"type": "power", "beta": 0.05, "q": 4.0 / 3.0},
            "M": 1.0,
        },
        "geometry": {"b": 1.0, "xi": 1.5, "n_b": 3, "R_max": 3.0, "N": 100, "n_beta": 16},
        "validate": {"mc_samples": 100000, "N": 100},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    files = {"solve": ("report.json", "profile.csv"), "scan-b": ("scan.csv", "scan.json"), "validate": ("validate.json",)}
    same = {}
    for cmd, names in files.items():
        for run in ("a", "b"):
            main([cmd, "--config", str(path), "--out", str(tmp_path / run / cmd), "--seed", "11"])
        same[cmd] = all(
            (tmp_path / "a" / cmd / n).read_bytes() == (tmp_path / "b" / cmd / n).read_bytes() for n in names
        )
    ok = all(same.values())
    detail = " ".join(f"{k}={'identical' if v else 'differs'}" for k, v in same.items())
    assert record_criterion(8, "Determinism", ok, detail), detail
