"""Short-time propagators, the OU dephasing model and negativity.

The Markovian expansion is first order in the elapsed time,
``rho + t L_K[rho]``; the Gaussian non-Markovian one starts at second order,
``rho + (t - t0)^2 Diss_D[rho]`` with the equal-time correlation matrix ``D``.
Neither output is guaranteed to be positive: the raw expansion is what the
partial-transpose witness inspects.
"""
import math
from dataclasses import dataclass

import numpy as np

from .baths import ou_double_integral, ou_kernel, ou_single_integral, sample_ou_paths
from .coeffs import assemble
from .qlin import (
    SIGMA_Z,
    TWO_QUBIT_PAULIS,
    ValidationError,
    check_hermitian,
    hermitian_eigvals,
    partial_transpose,
)

F = TWO_QUBIT_PAULIS


def generator_parts(k):
    """Return ``(K, G, H)``: the 6x6 coefficients, ``sum K_ab F_b F_a`` and the Hamiltonian."""
    kmat = assemble(k)
    g = np.einsum("ab,bij,ajk->ik", kmat, F, F)
    h = (
        np.einsum("jk,jab,kbc->ac", k.h11, F[:3], F[:3])
        + np.einsum("jk,jab,kbc->ac", k.h22, F[3:], F[3:])
        + np.einsum("jk,jab,kbc->ac", k.h12.real, F[:3], F[3:])
    )
    return kmat, g, h


def _apply(parts, rho):
    kmat, g, h = parts
    fk = np.einsum("ab,aij->bij", kmat, F)  # sum_a K_ab F_a
    jump = (fk @ rho[..., None, :, :] @ F).sum(axis=-3)
    anti = g @ rho + rho @ g
    comm = h @ rho - rho @ h
    return jump - 0.5 * anti - 1j * comm


def lindblad_apply(k, rho):
    """GKSL generator with coefficient blocks ``k`` applied to ``rho``.

    ``sum K_ab (F_a rho F_b - {F_b F_a, rho}/2) - i [H, rho]`` where ``F`` runs
    over (s1_x, s1_y, s1_z, s2_x, s2_y, s2_z). Broadcasts over leading axes.
    """
    rho = np.asarray(rho, dtype=complex)
    return _apply(generator_parts(k), rho)


def dissipator_apply(d, rho):
    """Dissipative part only (Hamiltonian blocks must be zero)."""
    if d.has_hamiltonian:
        raise ValidationError(
            "equal-time correlation blocks carry no Hamiltonian part; got nonzero h"
        )
    return lindblad_apply(d, rho)


def short_time_markov(k, rho, t):
    """First-order semigroup expansion ``rho + t L_K[rho]``."""
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    rho = np.asarray(rho, dtype=complex)
    return rho + t * lindblad_apply(k, rho)


def short_time_nonmarkov(d, rho, t_minus_t0):
    """Second-order expansion ``rho + (t - t0)^2 Diss_D[rho]`` of the Gaussian map.

    The second derivative of the map at ``t0`` equals twice the dissipator
    built from ``D``; there is no first-order term.
    """
    if t_minus_t0 < 0:
        raise ValidationError(f"elapsed time must be >= 0, got {t_minus_t0}")
    rho = np.asarray(rho, dtype=complex)
    return rho + t_minus_t0**2 * dissipator_apply(d, rho)


NEGATIVITY_TOL = 1e-14


def negativity(rho, tol=NEGATIVITY_TOL):
    """Sum of the absolute values of the negative eigenvalues of the partial transpose.

    Eigenvalues above ``-tol * max(1, ||rho||_F)`` count as rounding noise,
    so exact product states give exactly 0.
    """
    rho = check_hermitian(rho, 1e-10, name="state")
    lam = hermitian_eigvals(partial_transpose(rho), tol=1e-10)
    cut = -tol * max(1.0, float(np.linalg.norm(rho)))
    return float(-lam[lam < cut].sum())


# -- single-qubit OU dephasing -------------------------------------------------

@dataclass(frozen=True)
class DephasingModel:
    """One qubit with ``H = omega_z sz + sz phi(t)`` and OU noise ``phi``.

    ``strength`` scales the kernel; 0 switches the noise off.
    """

    omega_z: float = 0.0
    epsilon: float = 0.5
    strength: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")
        if self.strength < 0:
            raise ValidationError(f"strength must be >= 0, got {self.strength}")

    def kernel(self, dt):
        return self.strength * ou_kernel(self.epsilon, dt)

    def rate(self, t):
        """``int_0^t D(t - s) ds``."""
        return self.strength * ou_single_integral(self.epsilon, t)

    def damping_exponent(self, t):
        """``4 int_0^t int_0^tau D``: the coherence decays as ``exp(-exponent)``."""
        return 4 * self.strength * ou_double_integral(self.epsilon, t)

    def markov_gap(self, t):
        """``damping_exponent(t) - 2 t strength`` in closed form, ``2 eps strength expm1(-t/eps)``.

        Its magnitude stays below ``2 eps strength`` for every ``t``; the
        direct subtraction of the two exponents loses that bound to rounding.
        """
        return 2 * self.strength * self.epsilon * np.expm1(-np.asarray(t, dtype=float) / self.epsilon)

    def smalltime_coefficient(self):
        """Coefficient of ``t^2 [sz, [sz, rho]]`` in the small-time expansion, ``D(0)/2``."""
        return 0.5 * self.kernel(0.0)


def markov_damping_exponent(t, strength=1.0):
    """Exponent for a delta-correlated kernel: ``int_0^t delta(t-s) ds = 1/2`` gives ``2t``."""
    return 2.0 * strength * np.asarray(t, dtype=float)


def _qubit(rho0):
    rho0 = check_hermitian(rho0, name="rho0")
    if rho0.shape != (2, 2):
        raise ValidationError(f"single-qubit state must be 2x2, got {rho0.shape}")
    return rho0


def dephasing_exact(model, rho0, t):
    """Interaction-picture state at time ``t``: coherences times ``exp(-damping_exponent)``."""
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    rho = _qubit(rho0).copy()
    f = math.exp(-float(model.damping_exponent(t)))
    rho[0, 1] *= f
    rho[1, 0] *= f
    return rho


def _double_commutator(rho):
    c = SIGMA_Z @ rho - rho @ SIGMA_Z
    return SIGMA_Z @ c - c @ SIGMA_Z


def dephasing_rk4(model, rho0, t, n_steps=2048):
    """Fixed-step RK4 for ``d rho/dt = -rate(t) [sz, [sz, rho]]``."""
    rho = _qubit(rho0).copy()
    if t == 0:
        return rho
    h = t / n_steps

    def f(s, r):
        return -model.rate(s) * _double_commutator(r)

    s = 0.0
    for _ in range(n_steps):
        k1 = f(s, rho)
        k2 = f(s + h / 2, rho + h / 2 * k1)
        k3 = f(s + h / 2, rho + h / 2 * k2)
        k4 = f(s + h, rho + h * k3)
        rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    return rho


def dephasing_mc(model, rho0, t, n_traj, seed, n_steps=None):
    """Monte-Carlo average over OU noise realizations.

    Each trajectory evolves unitarily with ``exp(-i sz Phi)``, ``Phi = int_0^t phi``,
    so the coherence picks up ``exp(-2 i Phi)``. Paths use the exact OU
    update and the integral uses the trapezoid rule on that grid.

    Returns ``(rho, stderr)`` where ``stderr`` holds elementwise standard errors.
    """
    if n_traj < 100:
        raise ValidationError(f"n_traj must be >= 100, got {n_traj}")
    rho0 = _qubit(rho0)
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    if t == 0 or model.strength == 0:
        return rho0.copy(), np.zeros((2, 2))
    if n_steps is None:
        n_steps = max(100, math.ceil(50 * t / model.epsilon))
    grid, x = sample_ou_paths(model.epsilon, t, n_steps, n_traj, seed, model.strength)
    phase = np.exp(-2j * np.trapezoid(x, grid, axis=1))
    samples = np.empty((n_traj, 2, 2), dtype=complex)
    samples[:, 0, 0] = rho0[0, 0]
    samples[:, 1, 1] = rho0[1, 1]
    samples[:, 0, 1] = rho0[0, 1] * phase
    samples[:, 1, 0] = rho0[1, 0] * phase.conj()
    mean = samples.mean(axis=0)
    stderr = samples.std(axis=0, ddof=1) / math.sqrt(n_traj)
    return mean, stderr


def _uniform_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValidationError("times must be a non-empty 1-d array")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValidationError("times must be nonnegative and nondecreasing")
    return times


def dephasing_rk4_series(model, rho0, times, max_step=None):
    """RK4 states at each of ``times``, integrating once from 0.

    Intervals are split into equal substeps no longer than ``max_step``
    (default ``times[-1] / 2048``).
    """
    times = _uniform_times(times)
    rho = _qubit(rho0).copy()
    if max_step is None:
        max_step = times[-1] / 2048 if times[-1] > 0 else 1.0

    def f(s, r):
        return -model.rate(s) * _double_commutator(r)

    out = np.empty((times.size, 2, 2), dtype=complex)
    s = 0.0
    for i, t in enumerate(times):
        n = math.ceil((t - s) / max_step - 1e-9)
        h = (t - s) / n if n else 0.0
        for _ in range(n):
            k1 = f(s, rho)
            k2 = f(s + h / 2, rho + h / 2 * k1)
            k3 = f(s + h / 2, rho + h / 2 * k2)
            k4 = f(s + h, rho + h * k3)
            rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            s += h
        s = t
        out[i] = rho
    return out


def dephasing_mc_series(model, t_max, n_intervals, n_traj, seed, substeps=None):
    """Monte-Carlo coherence factor ``E[exp(-2i Phi(t))]`` on a uniform grid.

    One set of paths covers the whole grid, so rows at different times are
    correlated. Returns ``(times, mean, stderr)``; ``mean`` is complex.
    """
    if n_traj < 100:
        raise ValidationError(f"n_traj must be >= 100, got {n_traj}")
    if n_intervals < 1 or not t_max > 0:
        raise ValidationError("need t_max > 0 and at least one interval")
    if substeps is None:
        substeps = max(1, math.ceil(50 * t_max / (model.epsilon * n_intervals)))
    from scipy.integrate import cumulative_trapezoid

    grid, x = sample_ou_paths(
        model.epsilon, t_max, n_intervals * substeps, n_traj, seed, model.strength
    )
    phi = cumulative_trapezoid(x, grid, axis=1, initial=0.0)[:, ::substeps]
    phase = np.exp(-2j * phi)
    mean = phase.mean(axis=0)
    err = np.sqrt(phase.real.var(axis=0, ddof=1) + phase.imag.var(axis=0, ddof=1) + 0j).real
    return grid[::substeps], mean, err / math.sqrt(n_traj)


def fit_smalltime_coefficient(model, n_points=20, span=0.05):
    """Least-squares estimate of the ``t^2`` coefficient from RK4 data.

    Fits ``-log(coherence) = 4 (c t^2 + d t^3)`` on ``t`` in ``(0, span * eps]``;
    the factor 4 is what the double commutator does to an off-diagonal entry.
    The returned ``c`` should approach :meth:`DephasingModel.smalltime_coefficient`.
    """
    t = np.linspace(0, span * model.epsilon, n_points + 1)[1:]
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    coh = dephasing_rk4_series(model, rho0, t, max_step=t[0] / 64)[:, 0, 1].real / 0.5
    y = -np.log(coh) / 4
    (c, _), *_ = np.linalg.lstsq(np.stack([t**2, t**3], axis=1), y, rcond=None)
    return float(c)
