# %% [markdown]
# Witness vectors and the short-time criterion
#
# A product state |psi> x |phi> is tested through two complex 3-vectors,
# u = <psi|sigma|psi_perp> and v = <phi_perp|sigma|phi>. The criterion value
# A*B - |X|^2 is negative exactly when some product state becomes entangled
# at short times.

# %%
import numpy as np

from qentgen import BasisPair, BlockCoeffMatrix, Regime, Side, decide, eval_markovian, witness_from_basis

# %%
b = BasisPair(np.array([1, 0]), np.array([0, 1]))
u = witness_from_basis(b)
v = witness_from_basis(b, Side.SECOND)
print("u =", u)
print("v =", v)
print("<u|u> =", np.vdot(u, u).real, " sum u_i^2 =", np.sum(u * u))

# %% [markdown]
# Two qubits with independent baths cannot become entangled. Adding a
# Hamiltonian coupling between them can entangle them.

# %%
I3 = np.eye(3)
decoupled = BlockCoeffMatrix(I3, I3)
coupled = BlockCoeffMatrix(I3, I3, h12=2 * I3)
print("decoupled at this basis:", eval_markovian(decoupled, u, v))
print("coupled at this basis:  ", eval_markovian(coupled, u, v))

# %%
for name, k in [("decoupled", decoupled), ("coupled", coupled)]:
    rep = decide(k)
    print(f"{name:10s} value={rep.value:+.6f} verdict={rep.verdict.value}")

# %% [markdown]
# The verdict does not change if the whole generator is rescaled.

# %%
for lam in (1e-3, 1.0, 1e3):
    rep = decide(coupled.scaled(lam))
    print(f"lambda={lam:g}: value={rep.value:+.6g} verdict={rep.verdict.value}")

# %% [markdown]
# The same coefficients read as an equal-time correlation matrix use the
# non-Markovian form. That form has no Hamiltonian term, so only Re D12 can
# couple the qubits.

# %%
common = np.array([[1, 1j, 0], [-1j, 1, 0], [0, 0, 0]])
d = BlockCoeffMatrix(common, common, common)
print(decide(d, Regime.NON_MARKOVIAN).to_json(indent=1))
