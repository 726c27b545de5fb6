# %% [markdown]
# # Rotating star with decreasing entropy
#
# ``L(m) = 0.05 m^(4/3)`` and ``S(n) = -n / 3``.  The solver works inside the
# class of densities constant on spheres (``b = 1``), so its first-order
# condition balances the rotation force only on average over each shell.
# The pointwise steady residual keeps a tangential part that no refinement
# removes, while the shell-projected part converges.

# %%
from gasstar import ModelSpec, Polytrope, build_grid, solve
from gasstar.energy import steady_residual
from gasstar.model import LinearEntropy, PowerLawRotation

spec = ModelSpec(
    Polytrope(1.0, 2.0), LinearEntropy(1.0 / 3.0), PowerLawRotation(0.05, 4.0 / 3.0), M=1.0, b=1.0
)

# %%
print(f"{'N':>5} {'lambda':>12} {'R_s':>7} {'pointwise':>10} {'tangential':>10} {'shell':>10}")
for N in (200, 400, 800):
    rep = solve(spec, build_grid(1.0, 3.0, N, 16))
    res = steady_residual(rep.profile, spec, rep.fields)
    print(
        f"{N:5d} {rep.lam:12.8f} {rep.support_radius:7.4f} {res.norm / res.scale:10.3e} "
        f"{res.tangential / res.scale:10.3e} {res.shell_projected / res.scale:10.3e}"
    )

# %%
e = rep.energy
print(f"internal {e.internal:.6f}  rotational {e.rotational:.6f}  gravitational {e.gravitational:.6f}")
