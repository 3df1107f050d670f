# %% [markdown]
# Checking the criterion against brute force
#
# The oracle ignores witness vectors. It evolves product states with the
# short-time expansion and looks for a negative eigenvalue of the partial
# transpose.

# %%
import io

import numpy as np

from qentgen import Grid, Hybrid, Regime, agreement_suite, certify
from qentgen.config import load_config

# %%
for name in ("decoupled", "hamiltonian_coupling", "common_bath", "real_couplings"):
    model = load_config(name).model
    r = certify(model, sampling=Hybrid())
    print(f"{name:22s} {r.verdict.value:16s} min eig {r.min_pt_eig:+.3e} dt {r.dt_used:.3g}")

# %% [markdown]
# Halving dt halves the eigenvalue in the Markovian regime and quarters it
# in the non-Markovian one.

# %%
m = load_config("hamiltonian_coupling").model
d = load_config("common_bath").model
for dt in (4e-3, 2e-3, 1e-3):
    a = certify(m, dt=dt, sampling=Grid(8)).min_pt_eig
    b = certify(d, dt=dt, sampling=Grid(8)).min_pt_eig
    print(f"dt={dt:g}: Markovian {a:+.3e}  non-Markovian {b:+.3e}")

# %% [markdown]
# Random models: the criterion and the oracle should agree on the sign.

# %%
summary = agreement_suite(20, seed=1, regime=Regime.NON_MARKOVIAN)
print("agree", summary.agree, "disagree", summary.disagree, "boundary", summary.boundary)
buf = io.StringIO()
summary.write_csv(buf)
print("\n".join(buf.getvalue().splitlines()[:5]))
