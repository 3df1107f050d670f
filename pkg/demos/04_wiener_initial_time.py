# %% [markdown]
# Classical noise and the initial time
#
# Two qubits driven by shared classical fields phi_j(t) = sum_l mu_jl W_l(t) + c_j
# see an equal-time correlation that grows linearly with the initial time t0.
# Whether the noise can entangle them can therefore change with t0.

# %%
import numpy as np

from qentgen import WienerFieldModel, certify, decide, scan_t0
from qentgen.config import load_config

# %%
flip = load_config("wiener_flip").model
print("mu =\n", flip.mu, "\nc =", flip.c)
for t0, rep in scan_t0(flip, np.linspace(0, 2, 5)):
    orc = certify(flip, t0=t0)
    print(f"t0={t0:.1f}  criterion {rep.value:+.4f} {rep.verdict.value:16s} oracle {orc.verdict.value}")

# %% [markdown]
# With real fields the correlation matrix stays real. The smallest criterion
# value is then exactly zero: a boundary case, never generation.

# %%
real = load_config("wiener_real").model
for t0, rep in scan_t0(real, [0.0, 1.0, 3.0]):
    print(f"t0={t0:.1f}  criterion {rep.value:+.2e} {rep.verdict.value}")

# %%
rng = np.random.default_rng(3)
random_real = WienerFieldModel(rng.standard_normal((3, 3)), rng.standard_normal(3))
print(decide(random_real, t0=2.0).verdict.value, certify(random_real, t0=2.0).verdict.value)
