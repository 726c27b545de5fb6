"""Equilibria of rotating, non-isentropic gaseous stars by energy minimization.

Densities are ellipsoidally symmetric, ``rho(x) = rho(r_b(x))`` with
``r_b = sqrt(eta^2 + z^2 / b^2)``, and are represented by cellwise-constant
radial profiles on a :class:`RadialGrid`.
"""
from .energy import (
    EnergyBreakdown,
    PotentialFunction,
    compute_fields,
    directional_derivative_check,
    el_residual,
    internal_energy,
    potential_function,
    steady_residual,
    total_energy,
)
from .fields import (
    DensityProfile,
    FieldSet,
    cylindrical_mass,
    ellipsoidal_mass,
    rescale_profile,
    rotation_energy,
    rotation_potential,
)
from .geometry import RadialGrid, build_grid, cumulative_radial_integral, shell_average, shell_point
from .gravity import (
    GravityOperator,
    PotentialField,
    grav_energy,
    hls_ratio,
    potential_field,
    ring_potential,
    spherical_potential,
    uniform_ellipsoid_center,
)
from .model import (
    ConditionReport,
    LinearEntropy,
    ModelSpec,
    Polytrope,
    PowerLawRotation,
    RangeError,
    TabulatedEntropy,
    TabulatedEOS,
    TabulatedRotation,
    check_conditions,
    eval_A,
    eval_A_prime,
    invert_A_prime,
)
from .oracles import lane_emden, lane_emden_profile, monte_carlo_cyl_mass, monte_carlo_potential
from .solver import SolveReport, SolverOptions, scan_b, scf_step, solve, solve_lambda, support_radius

__all__ = [
    "build_grid",
    "check_conditions",
    "compute_fields",
    "ConditionReport",
    "cumulative_radial_integral",
    "cylindrical_mass",
    "DensityProfile",
    "directional_derivative_check",
    "el_residual",
    "ellipsoidal_mass",
    "EnergyBreakdown",
    "eval_A",
    "eval_A_prime",
    "FieldSet",
    "grav_energy",
    "GravityOperator",
    "hls_ratio",
    "internal_energy",
    "invert_A_prime",
    "lane_emden",
    "lane_emden_profile",
    "LinearEntropy",
    "ModelSpec",
    "monte_carlo_cyl_mass",
    "monte_carlo_potential",
    "Polytrope",
    "potential_field",
    "potential_function",
    "PotentialField",
    "PotentialFunction",
    "PowerLawRotation",
    "RadialGrid",
    "RangeError",
    "rescale_profile",
    "ring_potential",
    "rotation_energy",
    "rotation_potential",
    "scan_b",
    "scf_step",
    "shell_average",
    "shell_point",
    "solve",
    "solve_lambda",
    "SolveReport",
    "SolverOptions",
    "spherical_potential",
    "steady_residual",
    "support_radius",
    "TabulatedEntropy",
    "TabulatedEOS",
    "TabulatedRotation",
    "total_energy",
    "uniform_ellipsoid_center",
]

__version__ = "0.1.0"
