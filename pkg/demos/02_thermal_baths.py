# %% [markdown]
# Thermal baths and the three worked examples
#
# A bosonic bath is given by its modes: a frequency and the coupling vectors
# to each qubit. The equal-time correlation matrix decides the short-time
# non-Markovian verdict.

# %%
import numpy as np

from qentgen import Mode, ThermalBath, decide, equal_time_D

rng = np.random.default_rng(0)


def bath(c2_phase):
    modes = tuple(
        Mode(float(rng.uniform(0.3, 3)), rng.standard_normal(3), c2_phase * rng.standard_normal(3))
        for _ in range(6)
    )
    return ThermalBath(modes, beta=1.0)


# %% [markdown]
# Case 1: the couplings to qubit 2 are purely imaginary, so Re D12 vanishes.
# Case 2: all couplings are real but independent.

# %%
for label, phase in [("Re D12 = 0", 1j), ("real couplings", 1.0)]:
    b = bath(phase)
    d = equal_time_D(b)
    rep = decide(b)
    print(f"{label:15s} |Re D12|={np.abs(d.k12.real).max():.3f} value={rep.value:.3e} {rep.verdict.value}")

# %% [markdown]
# Case 3: both qubits couple to the same modes with complex couplings. The
# imaginary part of the shared correlation matrix lets the bath entangle
# them, starting from a sigma_z eigenstate on the first qubit.

# %%
s = 1 / np.sqrt(2)
common = ThermalBath((Mode(1.0, [s, 1j * s, 0], [s, 1j * s, 0]),), beta=5.0)
rep = decide(common)
print(rep.verdict.value, rep.value)
psi, phi = rep.states
print("first factor populations:", np.round(np.abs(psi) ** 2, 6))
