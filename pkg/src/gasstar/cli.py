"""Command-line front end.

Commands: ``check``, ``solve``, ``scan-b``, ``validate`` and
``energy <profile.csv>``.  Exit codes: 0 success, 1 quantitative failure,
2 usage or configuration error.
"""
import argparse
import csv
import json
import logging
import os
import sys
import warnings

import jsonschema
import numpy as np

from . import gravity, oracles
from .energy import potential_function, total_energy
from .fields import DensityProfile, cylindrical_mass
from .geometry import build_grid
from .model import (
    LinearEntropy,
    ModelSpec,
    Polytrope,
    PowerLawRotation,
    TabulatedEntropy,
    TabulatedEOS,
    TabulatedRotation,
    check_conditions,
)
from .solver import ConditionViolation, ConstraintError, SolverOptions, default_R_max, scan_b, solve

__all__ = ["main", "CONFIG_SCHEMA", "load_config", "build_spec", "profile_rows", "CSV_COLUMNS"]

log = logging.getLogger("gasstar")

CSV_COLUMNS = ("r", "rho", "n", "m_eta", "Kgrav", "Krot", "Q", "Eprime")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pairs = {
    "type": "array",
    "minItems": 2,
    "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eos"],
            "properties": {
                "eos": {
                    "oneOf": [
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type", "K", "gamma"],
                            "properties": {
                                "type": {"const": "polytrope"},
                                "K": _pos,
                                "gamma": _pos,
                                "gamma_bar": _pos,
                            },
                        },
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type", "table"],
                            "properties": {"type": {"const": "table"}, "table": _pairs, "gamma_bar": _pos},
                        },
                    ]
                },
                "entropy": {
                    "oneOf": [
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type"],
                            "properties": {
                                "type": {"const": "linear"},
                                "slope": {"type": "number", "minimum": 0},
                                "delta0": _pos,
                            },
                        },
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type", "table"],
                            "properties": {"type": {"const": "table"}, "table": _pairs, "delta0": _pos},
                        },
                    ]
                },
                "angmom": {
                    "oneOf": [
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type"],
                            "properties": {
                                "type": {"const": "power"},
                                "beta": {"type": "number", "minimum": 0},
                                "q": _pos,
                            },
                        },
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["type", "table"],
                            "properties": {"type": {"const": "table"}, "table": _pairs},
                        },
                    ]
                },
                "M": {"type": "number", "minimum": 0},
            },
        },
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "b": _pos,
                "xi": {"type": "number", "exclusiveMinimum": 1},
                "n_b": {"type": "integer", "minimum": 3},
                "R_max": _pos,
                "N": {"type": "integer", "minimum": 8},
                "n_beta": {"type": "integer", "minimum": 4},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega": {"type": "number", "minimum": 0, "maximum": 1},
                "residual_tol": _pos,
                "mass_tol": _pos,
                "max_iter": {"type": "integer", "minimum": 1},
                "floor": _pos,
                "skip_check": {"type": "boolean"},
            },
        },
        "validate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tolerance": {"type": "number", "minimum": 0},
                "mc_samples": {"type": "integer", "minimum": 10000},
                "N": {"type": "integer", "minimum": 8},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "prefix": {"type": "string"}},
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    },
}


class ConfigError(ValueError):
    pass


def load_config(path):
    """Read and schema-validate a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc


def _table(pairs):
    arr = np.asarray(pairs, dtype=float)
    return arr[:, 0], arr[:, 1]


def build_spec(cfg, b=None):
    """Construct a :class:`ModelSpec` from a validated config."""
    m = cfg["model"]
    geo = cfg.get("geometry", {})
    try:
        e = m["eos"]
        if e["type"] == "polytrope":
            eos = Polytrope(e["K"], e["gamma"], e.get("gamma_bar"))
        else:
            eos = TabulatedEOS(*_table(e["table"]), gamma_bar=e.get("gamma_bar"))
        s = m.get("entropy", {"type": "linear"})
        if s["type"] == "linear":
            ent = LinearEntropy(s.get("slope", 0.0), s.get("delta0"))
        else:
            ent = TabulatedEntropy(*_table(s["table"]), delta0=s.get("delta0"))
        r = m.get("angmom", {"type": "power"})
        if r["type"] == "power":
            rot = PowerLawRotation(r.get("beta", 0.0), r.get("q", 4.0 / 3.0))
        else:
            rot = TabulatedRotation(*_table(r["table"]))
        if b is None:
            b = geo.get("b", 1.0)
        return ModelSpec(eos, ent, rot, M=m.get("M", 1.0), b=b, xi=geo.get("xi"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def build_options(cfg):
    s = cfg.get("solver", {})
    try:
        return SolverOptions(
            omega=s.get("omega", 0.5),
            residual_tol=s.get("residual_tol", 1e-8),
            mass_tol=s.get("mass_tol", 1e-10),
            max_iter=s.get("max_iter", 500),
            floor_rel=s.get("floor", 1e-12),
            check=not s.get("skip_check", False),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid solver options: {exc}") from exc


def _grid_params(cfg, spec):
    geo = cfg.get("geometry", {})
    R_max = geo.get("R_max")
    if R_max is None:
        R_max = default_R_max(spec)
    return float(R_max), geo.get("N", 200), geo.get("n_beta", 16)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _json_dump(obj, path):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _f(x):
    return repr(float(x))


def profile_rows(profile, spec, fields):
    """Rows of the profile CSV (values as floats)."""
    G = potential_function(profile, spec, fields).G
    g = profile.grid
    m_eta = cylindrical_mass(profile, g.r)
    cols = (g.r, profile.values, fields.n_mid, m_eta, fields.K_grav, fields.K_rot, fields.Q, G)
    return [tuple(float(c[i]) for c in cols) for i in range(g.N)]


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_f(v) if isinstance(v, float) else v for v in row])


def read_profile_csv(path):
    """Return ``(r, rho)`` from a profile CSV."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    if not rows or rows[0][:2] != ["r", "rho"]:
        raise ConfigError("profile CSV must start with columns r,rho")
    try:
        data = np.array([[float(v) for v in row[:2]] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"malformed profile CSV: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 8:
        raise ConfigError("profile CSV needs at least 8 rows")
    return data[:, 0], data[:, 1]


def _out_path(args, cfg, name):
    d = args.out or cfg.get("output", {}).get("dir") or "."
    os.makedirs(d, exist_ok=True)
    return os.path.join(d, cfg.get("output", {}).get("prefix", "") + name)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check(args, cfg):
    spec = build_spec(cfg)
    report = check_conditions(spec)
    _json_dump(report.to_dict(), _out_path(args, cfg, "check.json") if args.out else None)
    for name in report.failed():
        ce = report.results[name].counterexample
        print(f"{name} FAILED: {ce.clause} (a={ce.a}, x={ce.x}, lhs={ce.lhs}, rhs={ce.rhs})", file=sys.stderr)
    return 0 if report.passed else 1


def _solve(cfg, spec):
    R_max, N, n_beta = _grid_params(cfg, spec)
    grid = build_grid(spec.b, R_max, N, n_beta)
    opts = build_options(cfg)
    if not opts.check:
        rep = check_conditions(spec)
        if not rep.passed:
            log.warning("conditions fail (%s); solving anyway", ", ".join(rep.failed()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve(spec, grid, opts)


def cmd_solve(args, cfg):
    spec = build_spec(cfg)
    rep = _solve(cfg, spec)
    _json_dump(rep.to_dict(), _out_path(args, cfg, "report.json"))
    write_csv(_out_path(args, cfg, "profile.csv"), CSV_COLUMNS, profile_rows(rep.profile, spec, rep.fields))
    if rep.truncation_warning:
        log.warning("support radius %.6g exceeds 0.9 R_max", rep.support_radius)
    return 0 if rep.converged else 1


def cmd_scan_b(args, cfg):
    geo = cfg.get("geometry", {})
    if "xi" not in geo:
        raise ConfigError("scan-b needs geometry.xi")
    xi, n_b = geo["xi"], geo.get("n_b", 5)
    spec = build_spec(cfg, b=1.0)
    R_max, N, n_beta = _grid_params(cfg, spec)
    R_max = geo.get("R_max", R_max * xi)
    opts = build_options(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = scan_b(spec, xi, n_b, R_max, N, n_beta, opts)
    rows = [(float(b), float(F), "true" if ok else "false") for b, F, ok in zip(res.b, res.F, res.converged)]
    write_csv(_out_path(args, cfg, "scan.csv"), ("b", "F_b", "converged"), rows)
    i = res.argmin
    summary = {
        "argmin": i,
        "b_min": res.b_min,
        "F_min": None if i is None else float(res.F[i]),
        "max_gap": res.max_gap(),
        "all_converged": bool(res.converged.all()),
    }
    _json_dump(summary, _out_path(args, cfg, "scan.json"))
    return 0 if res.converged.all() else 1


def validation_checks(seed=0, mc_samples=1_000_000, N=200, tolerance=None, threads=1):
    """Run the oracle cross-checks; returns a list of result dicts."""
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, error, tol):
        tol = tol if tolerance is None else tolerance
        checks.append({"name": name, "error": float(error), "tolerance": float(tol), "passed": bool(error <= tol)})

    # ring kernel vs shell theorem, uniform unit ball
    g = build_grid(1.0, 2.0, N, 32)
    ball = DensityProfile.uniform_ball(g, 1.0)
    ring = gravity.potential_field(ball, threads=threads).values
    exact = gravity.spherical_potential_at(ball, np.broadcast_to(g.r[:, None], ring.shape))
    add("ring_vs_spherical", np.max(np.abs(ring - exact) / exact), 1e-3)

    # ring kernel centre vs the closed form for uniform spheroids
    for b in (0.5, 2.0):
        gb = build_grid(b, 2.0, N, 32)
        p = DensityProfile.uniform_ball(gb, 1.0)
        centre = float(gravity.potential_at(p, np.array([0.0]), np.array([0.0]))[0])
        ref = gravity.uniform_ellipsoid_center(b, p.total_mass, 1.0)
        add(f"ring_centre_vs_closed_form_b{b:g}", abs(centre - ref) / ref, 1e-3)

    # ring kernel vs Monte Carlo at random field points (error in standard errors)
    gm = build_grid(1.5, 2.0, N // 2, 32)
    prof = DensityProfile.from_function(gm, lambda r: np.maximum(1.0 - r * r, 0.0))
    pts = np.column_stack([rng.uniform(0.05, 1.5, 5), rng.uniform(-1.5, 1.5, 5)])
    ring_pts = gravity.potential_at(prof, pts[:, 0], pts[:, 1], threads=threads)
    worst = 0.0
    for k, (pt, val) in enumerate(zip(pts, ring_pts)):
        mc = oracles.monte_carlo_potential(prof, pt, mc_samples, seed=seed + 1 + k)
        worst = max(worst, abs(mc.value - val) / mc.stderr)
    add("ring_vs_monte_carlo_sigma", worst, 3.0)

    # cylinder mass: closed form and Monte Carlo
    gu = build_grid(1.0, 1.0, N, 8)
    unit = DensityProfile.uniform_ball(gu, 1.0)
    ref = 4.0 / 3.0 * np.pi * (1.0 - 0.64**1.5)
    m = float(cylindrical_mass(unit, 0.6))
    add("cyl_mass_closed_form", abs(m - ref) / ref, 1e-12)
    mc = oracles.monte_carlo_cyl_mass(unit, 0.6, mc_samples, seed=seed + 101)
    add("cyl_mass_monte_carlo_sigma", abs(mc.value - ref) / mc.stderr, 3.0)

    # Lane-Emden end to end
    le = oracles.lane_emden(1.0, 2.0, 1.0)
    num = oracles.lane_emden(1.0, 2.0, 1.0, numeric=True)
    rr = np.linspace(0.0, le.radius, 200)
    add("lane_emden_rk4_vs_closed_form", np.max(np.abs(num.density(rr) - le.density(rr))) / le.rho_c, 1e-8)
    spec = ModelSpec(Polytrope(1.0, 2.0), M=1.0, b=1.0)
    gl = build_grid(1.0, 3.0, 400, 16)
    rep = solve(spec, gl)
    ref = le.density(gl.r)
    add("lane_emden_density", np.max(np.abs(rep.profile.values - ref)) / ref.max(), 1e-3)
    add("lane_emden_multiplier", abs(rep.lam - le.multiplier), 1e-3)
    add("lane_emden_support_cells", abs(rep.support_radius - le.radius) / gl.dr, 2.0)
    add("lane_emden_el_interior", rep.interior / abs(rep.lam), 1e-6)
    return checks


def cmd_validate(args, cfg):
    v = cfg.get("validate", {})
    checks = validation_checks(
        seed=args.seed if args.seed is not None else cfg.get("seed", 0),
        mc_samples=v.get("mc_samples", 1_000_000),
        N=v.get("N", 200),
        tolerance=v.get("tolerance"),
        threads=args.threads,
    )
    failed = [c["name"] for c in checks if not c["passed"]]
    _json_dump({"checks": checks, "failed": failed, "passed": not failed}, _out_path(args, cfg, "validate.json"))
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['error']:.3e} (tol {c['tolerance']:.1e})")
    return 0 if not failed else 1


def cmd_energy(args, cfg):
    spec = build_spec(cfg)
    r, rho = read_profile_csv(args.profile)
    N = r.size
    R_max = float(r[0] + r[-1])
    n_beta = cfg.get("geometry", {}).get("n_beta", 16)
    grid = build_grid(spec.b, R_max, N, n_beta)
    if not np.allclose(grid.r, r, rtol=1e-12, atol=0.0):
        raise ConfigError("profile radii are not uniform cell midpoints")
    try:
        profile = DensityProfile(grid, rho)
    except ValueError as exc:
        raise ConfigError(f"invalid profile: {exc}") from exc
    e = total_energy(profile, spec)
    out = {"energy": e.to_dict(), "mass": profile.total_mass}
    _json_dump(out, _out_path(args, cfg, "energy.json") if args.out else None)
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="gasstar", description="Equilibria of rotating gaseous stars.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for the ring-kernel gravity")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="check the structural conditions")
    sub.add_parser("solve", parents=[common], help="compute an equilibrium")
    sub.add_parser("scan-b", parents=[common], help="minimum energy over a range of ellipticities")
    sub.add_parser("validate", parents=[common], help="run the oracle cross-checks")
    p = sub.add_parser("energy", parents=[common], help="energy of a stored profile")
    p.add_argument("profile", help="profile CSV with columns r,rho,...")
    return parser


_COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "scan-b": cmd_scan_b,
    "validate": cmd_validate,
    "energy": cmd_energy,
}

_DEFAULT_CONFIG = {"model": {"eos": {"type": "polytrope", "K": 1.0, "gamma": 2.0}}}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        if args.config:
            cfg = load_config(args.config)
        elif args.command == "validate":
            cfg = dict(_DEFAULT_CONFIG)
        else:
            raise ConfigError("--config is required")
        if args.seed is not None:
            cfg["seed"] = args.seed
        return _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConditionViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConstraintError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
