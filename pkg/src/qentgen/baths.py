"""Gaussian environments and their two-point correlation functions.

Every model exposes ``correlation(t, s, t0=0.0)`` returning the 6x6 matrix
``D[(alpha, j), (gamma, k)]`` and ``equal_time(t0)``. Thermal baths depend on
``t - s`` only; Wiener-driven classical fields do not.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .qlin import ValidationError, check_hermitian

BOSE_OVERFLOW = 700.0


def bose_factors(beta_omega):
    """Return ``(n + 1, n)`` with ``n = 1 / (exp(beta_omega) - 1)``.

    Beyond ``beta_omega > 700`` the exact zero-temperature limits (1, 0) are used.
    """
    x = float(beta_omega)
    if x <= 0:
        raise ValidationError(f"beta * omega must be positive, got {x}")
    if x > BOSE_OVERFLOW:
        return 1.0, 0.0
    n = 1.0 / math.expm1(x)
    return n + 1.0, n


def _vec3(x, name):
    a = np.array(x, dtype=complex)
    if a.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Mode:
    omega: float
    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError(f"mode frequency must be > 0, got {self.omega}")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "c1", _vec3(self.c1, "c1"))
        object.__setattr__(self, "c2", _vec3(self.c2, "c2"))

    @property
    def couplings(self):
        # (alpha, j) stacked 6-vector
        return np.concatenate([self.c1, self.c2])


@dataclass(frozen=True)
class ThermalBath:
    """Independent bosonic modes in a thermal state at inverse temperature ``beta``.

    Mode ``l`` enters the bath fields as ``phi^alpha_j = sum_l c^alpha_jl b_l + h.c.``.
    """

    modes: tuple
    beta: float

    def __post_init__(self):
        modes = tuple(m if isinstance(m, Mode) else Mode(*m) for m in self.modes)
        if not modes:
            raise ValidationError("thermal bath needs at least one mode")
        if not self.beta > 0:
            raise ValidationError(f"beta must be > 0, got {self.beta}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "beta", float(self.beta))

    def correlation(self, t, s, t0=0.0):
        return thermal_correlation(self, t, s)

    def equal_time(self, t0=0.0):
        d = np.zeros((6, 6), dtype=complex)
        for m in self.modes:
            c = m.couplings
            gram = np.outer(c.conj(), c)
            coth = 1.0 if self.beta * m.omega > BOSE_OVERFLOW else 1.0 / math.tanh(
                self.beta * m.omega / 2
            )
            d += gram.real * coth + 1j * gram.imag
        return d

    @property
    def is_common(self):
        return all(np.array_equal(m.c1, m.c2) for m in self.modes)


def thermal_correlation(bath, t, s):
    """Two-point correlation matrix ``D(t - s)`` of a discrete-mode thermal bath.

    ``D_ab = sum_l conj(c_al) c_bl e^{-i w (t-s)} (n+1) + c_al conj(c_bl) e^{i w (t-s)} n``
    """
    tau = float(t) - float(s)
    d = np.zeros((6, 6), dtype=complex)
    for m in bath.modes:
        c = m.couplings
        up, n = bose_factors(bath.beta * m.omega)
        ph = np.exp(-1j * m.omega * tau)
        d += np.outer(c.conj(), c) * ph * up
        if n:
            d += np.outer(c, c.conj()) * np.conj(ph) * n
    return d


def common_bath_delta(bath):
    """The 3x3 matrix Delta of a bath coupled identically to both qubits.

    Returns ``(delta, x)`` where ``x_jk = Im <C_k|C_j>`` collects the imaginary
    part of the coupling Gram matrix (antisymmetric).
    """
    if not bath.is_common:
        raise ValidationError(
            "qubits couple differently (c1 != c2); use equal_time_D on the full bath"
        )
    delta = bath.equal_time()[:3, :3]
    cmat = np.array([m.c1 for m in bath.modes]).T  # rows C_j, columns modes
    x = (cmat @ cmat.conj().T).imag  # x_jk = Im sum_l c_jl conj(c_kl)
    return delta, x


def common_matrix(delta):
    """``[[Delta, Delta], [Delta, Delta]]`` for qubits sharing the same fields."""
    delta = np.asarray(delta, dtype=complex)
    return np.block([[delta, delta], [delta, delta]])


@dataclass(frozen=True)
class WienerFieldModel:
    """Classical fields ``phi_j(t) = sum_l mu_jl W_l(t) + c_j`` shared by both qubits."""

    mu: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=complex)
        if mu.shape != (3, 3):
            raise ValidationError(f"mu must be 3x3, got shape {mu.shape}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "c", _vec3(self.c, "c"))

    def correlation(self, t, s, t0=0.0):
        # stochastic correlations are not shifted by the initial time
        delta = min(float(t), float(s)) * (self.mu @ self.mu.conj().T) + np.outer(
            self.c, self.c.conj()
        )
        return common_matrix(delta)

    def equal_time(self, t0=0.0):
        return common_matrix(wiener_delta(self, t0))

    @property
    def is_real(self):
        return not (np.any(self.mu.imag) or np.any(self.c.imag))


def wiener_delta(model, t0):
    """``Delta_jk(t0) = t0 sum_l mu_jl conj(mu_kl) + c_j conj(c_k)``."""
    if t0 < 0:
        raise ValidationError(f"t0 must be >= 0, got {t0}")
    return float(t0) * (model.mu @ model.mu.conj().T) + np.outer(model.c, model.c.conj())


def ou_kernel(eps, dt):
    """Ornstein-Uhlenbeck correlation ``exp(-|dt| / eps) / (2 eps)``."""
    if not eps > 0:
        raise ValidationError(f"epsilon must be > 0, got {eps}")
    return np.exp(-np.abs(dt) / eps) / (2.0 * eps)


def ou_double_integral(eps, t):
    """Closed form of ``int_0^t dtau int_0^tau ou_kernel(eps, tau - s) ds``."""
    if not eps > 0:
        raise ValidationError(f"epsilon must be > 0, got {eps}")
    t = np.asarray(t, dtype=float)
    return t / 2 + (eps / 2) * np.expm1(-t / eps)


def ou_single_integral(eps, t):
    """``int_0^t ou_kernel(eps, t - s) ds``, the time-dependent dephasing rate."""
    t = np.asarray(t, dtype=float)
    return -0.5 * np.expm1(-t / eps)


def sample_ou_paths(eps, t_max, n_steps, n_paths, seed, strength=1.0):
    """Stationary OU paths on a uniform grid via the exact Gaussian update.

    ``x_{n+1} = x_n e^{-h/eps} + N(0, strength (1 - e^{-2h/eps}) / (2 eps))``.
    Path ``i`` is generated from child ``i`` of ``SeedSequence(seed)``, so the
    result does not depend on how trajectories are batched.

    Returns ``(t, x)`` with ``x`` of shape ``(n_paths, n_steps + 1)``.
    """
    if not eps > 0:
        raise ValidationError(f"epsilon must be > 0, got {eps}")
    h = t_max / n_steps
    t = np.linspace(0.0, t_max, n_steps + 1)
    var = strength / (2 * eps)
    a = math.exp(-h / eps)
    sd_step = math.sqrt(var * -math.expm1(-2 * h / eps))
    z = np.empty((n_paths, n_steps + 1))
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(n_paths)):
        z[i] = np.random.default_rng(child).standard_normal(n_steps + 1)
    z[:, 0] *= math.sqrt(var)
    z[:, 1:] *= sd_step
    # AR(1) recursion x_n = a x_{n-1} + z_n
    x = lfilter([1.0], [1.0, -a], z, axis=1)
    return t, x


def write_path_csv(fh, t, x):
    """Write one sampled path as CSV with columns ``t,value``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "value"])
    for ti, xi in zip(t, x):
        w.writerow([repr(float(ti)), repr(float(xi))])


@dataclass(frozen=True)
class OUNoise:
    """Real OU field coupled to both qubits through sigma_z (pure dephasing)."""

    epsilon: float
    omega_z: float = 0.0
    strength: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")

    def correlation(self, t, s, t0=0.0):
        d = np.zeros((6, 6), dtype=complex)
        val = self.strength * ou_kernel(self.epsilon, float(t) - float(s))
        d[np.ix_([2, 5], [2, 5])] = val
        return d

    def equal_time(self, t0=0.0):
        return self.correlation(t0, t0)


# -- delta-approximant families ---------------------------------------------

def _exp_c(x):
    return 0.5 * np.exp(-np.abs(x))


def _gauss_c(x):
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2 * math.pi)


def _tri_c(x):
    return np.maximum(0.0, 1.0 - np.abs(x))


# (a, b, c) profile shapes; c integrates to one, a(0) and b(0) are nonzero
PROFILES = {
    "exponential": (
        lambda x: 0.8 * np.exp(-np.abs(x)),
        lambda x: 0.3 * np.exp(-2 * np.abs(x)),
        _exp_c,
    ),
    "gaussian": (
        lambda x: 0.6 * np.exp(-0.5 * np.square(x)),
        lambda x: -0.4 * np.exp(-np.square(x)),
        _gauss_c,
    ),
    "triangular": (
        lambda x: 0.5 * np.maximum(0.0, 1.0 - np.abs(x) / 2),
        lambda x: 0.25 * np.maximum(0.0, 1.0 - np.abs(x)),
        _tri_c,
    ),
    "ou": (
        lambda x: 0.0 * np.asarray(x, dtype=float),
        lambda x: 0.0 * np.asarray(x, dtype=float),
        _exp_c,
    ),
}


def _default_weights():
    # a-term: common bath with an imaginary Gram part (entangling at finite eps)
    gen = np.array([[1, 1j, 0], [-1j, 1, 0], [0, 0, 0]], dtype=complex)
    # c-term: real common couplings (cannot entangle, fixes the Markov limit)
    real = np.diag([1.0, 1.0, 0.5]).astype(complex)
    return common_matrix(gen), np.zeros((6, 6), dtype=complex), common_matrix(real)


@dataclass(frozen=True)
class DeltaFamily:
    """Correlations ``eps a(t/eps) A + b(t/eps) B + c(t/eps) C / eps``.

    ``a, b, c`` are scalar profiles and ``A, B, C`` Hermitian 6x6 weight
    matrices; the scalar function of ``delta_family_value`` uses unit weights.
    """

    profile: str = "exponential"
    epsilon: float = 1.0
    a_weight: np.ndarray = field(default=None)
    b_weight: np.ndarray = field(default=None)
    c_weight: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValidationError(
                f"unknown profile {self.profile!r}; choose from {sorted(PROFILES)}"
            )
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")
        defaults = _default_weights()
        for name, default in zip(("a_weight", "b_weight", "c_weight"), defaults):
            w = getattr(self, name)
            w = default if w is None else np.array(w, dtype=complex)
            if w.shape != (6, 6):
                raise ValidationError(f"{name} must be 6x6, got shape {w.shape}")
            object.__setattr__(self, name, check_hermitian(w, name=name))

    @property
    def funcs(self):
        return PROFILES[self.profile]

    def with_epsilon(self, eps):
        return DeltaFamily(self.profile, eps, self.a_weight, self.b_weight, self.c_weight)

    def correlation(self, t, s, t0=0.0):
        a, b, c = self.funcs
        x = (float(t) - float(s)) / self.epsilon
        e = self.epsilon
        return e * a(x) * self.a_weight + b(x) * self.b_weight + c(x) / e * self.c_weight

    def equal_time(self, t0=0.0):
        return self.correlation(t0, t0)

    def markov_limit(self):
        """Kossakowski matrix of the eps -> 0 limit: only the c-term survives."""
        return self.c_weight.copy()


def delta_family_value(f, t):
    """Scalar ``d_eps(t) = eps a(t/eps) + b(t/eps) + c(t/eps) / eps``."""
    a, b, c = f.funcs
    e = f.epsilon
    x = np.asarray(t, dtype=float) / e
    return e * a(x) + b(x) + c(x) / e


@dataclass(frozen=True)
class CallableCorrelation:
    """User-supplied correlation ``func(t, s, t0) -> 6x6``.

    Covers Gaussian bath states that are not stationary, for which no
    microscopic recipe is built in.
    """

    func: object

    def correlation(self, t, s, t0=0.0):
        return np.asarray(self.func(t, s, t0), dtype=complex)

    def equal_time(self, t0=0.0):
        return self.correlation(t0, t0, t0)


@dataclass(frozen=True)
class EqualTimeMatrix:
    """A bare equal-time correlation matrix, constant in ``t0``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (6, 6):
            raise ValidationError(f"matrix must be 6x6, got shape {m.shape}")
        object.__setattr__(self, "matrix", check_hermitian(m))

    def equal_time(self, t0=0.0):
        return self.matrix.copy()


def fit_three_term(eps, values):
    """Least-squares fit of ``values ~ eps * a0 + b0 + c0 / eps``.

    Returns ``((a0, b0, c0), residual)`` with the residual the max absolute
    misfit on the input points.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps.size < 3 or eps.shape != values.shape:
        raise ValidationError("need at least three (eps, value) pairs")
    if np.any(eps <= 0):
        raise ValidationError("epsilon values must be > 0")
    design = np.stack([eps, np.ones_like(eps), 1.0 / eps], axis=1)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = float(np.max(np.abs(design @ coef - values)))
    return tuple(float(c) for c in coef), resid


def profile_at_zero(profile):
    """``(a(0), b(0), c(0))`` of a bundled profile."""
    if profile not in PROFILES:
        raise ValidationError(f"unknown profile {profile!r}")
    return tuple(float(f(0.0)) for f in PROFILES[profile])
