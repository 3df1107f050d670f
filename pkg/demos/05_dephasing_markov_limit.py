# %% [markdown]
# Dephasing under Ornstein-Uhlenbeck noise and the Markov limit
#
# A qubit with H = sz phi(t) and OU noise of correlation time eps loses
# coherence as exp(-4 int_0^t int_0^tau D). For small t the exponent grows
# like t^2 / (4 eps) times 4. For eps -> 0 at fixed t it tends to the
# Markovian 2t. The two limits do not commute.

# %%
import numpy as np

from qentgen import DephasingModel, dephasing_exact
from qentgen.baths import delta_family_value, fit_three_term
from qentgen.config import load_config
from qentgen.dynamics import dephasing_mc_series, dephasing_rk4_series, fit_smalltime_coefficient

plus = np.full((2, 2), 0.5, dtype=complex)

# %%
times = np.linspace(0, 5, 11)
for eps in (0.1, 0.5, 2.0):
    m = DephasingModel(epsilon=eps)
    rk4 = dephasing_rk4_series(m, plus, times)[:, 0, 1].real * 2
    exact = np.array([dephasing_exact(m, plus, t)[0, 1].real * 2 for t in times])
    print(f"eps={eps}: max |rk4 - exact| = {np.abs(rk4 - exact).max():.1e}")

# %%
for eps in (1.0, 0.1, 0.01):
    m = DephasingModel(epsilon=eps)
    print(
        f"eps={eps:<5g} fitted t^2 coefficient {fit_smalltime_coefficient(m):10.4f}"
        f"  1/(4 eps) = {1 / (4 * eps):8.4f}  exponent at t=1 minus 2 = {m.markov_gap(1.0):+.4f}"
    )

# %% [markdown]
# Monte Carlo over exact OU paths reproduces the closed form.

# %%
m = DephasingModel(epsilon=0.5)
t, mean, err = dephasing_mc_series(m, 2.0, 4, n_traj=10_000, seed=7)
for ti, mi, ei in zip(t, mean, err):
    print(f"t={ti:.1f} mc={mi.real:.4f} +- {ei:.4f}  exact={np.exp(-m.damping_exponent(ti)):.4f}")

# %% [markdown]
# A delta family eps a(t/eps) + b(t/eps) + c(t/eps)/eps: at t = 0 the three
# terms separate cleanly in eps.

# %%
fam = load_config("delta_exponential").model
eps = [1.0, 0.1, 0.01]
d0 = [float(delta_family_value(fam.with_epsilon(e), 0.0)) for e in eps]
print("d_eps(0):", d0)
print("fit (a0, b0, c0), residual:", fit_three_term(eps, d0))
