"""Short-time entanglement-generation criteria for two qubits.

For a pure product state |psi>|phi> the witness vectors are
``u_i = <psi|s_i|psi_perp>`` and ``v_i = <phi_perp|s_i|phi>``. A Markovian
generator with blocks ``K, h`` entangles the state at first order iff

    <u|K11|u> <v|K22^T|v> - |<u|Re K12 + i h12|v>|^2 < 0,

and a Gaussian non-Markovian map does so at second order iff the same
expression with the equal-time correlation blocks ``D`` (and no Hamiltonian
part) is negative. :func:`decide` searches the two Bloch spheres for the
most negative value.
"""
import enum
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .coeffs import BlockCoeffMatrix, assemble, equal_time_D
from .optim import nelder_mead_batch
from .qlin import PAULIS, PSD_TOL, ValidationError, is_psd, ket, ket_perp

BASIS_TOL = 1e-12
DECISION_TOL = 1e-9


class Verdict(str, enum.Enum):
    GENERATES = "Generates"
    DOES_NOT_GENERATE = "DoesNotGenerate"
    BOUNDARY = "Boundary"


class Regime(str, enum.Enum):
    MARKOVIAN = "Markovian"
    NON_MARKOVIAN = "NonMarkovian"

    @classmethod
    def parse(cls, x):
        if isinstance(x, cls):
            return x
        key = str(x).replace("-", "").replace("_", "").lower()
        for r in cls:
            if r.value.lower() == key:
                return r
        raise ValidationError(f"unknown regime {x!r}")


class Side(enum.Enum):
    FIRST = 1
    SECOND = 2


@dataclass(frozen=True)
class BasisPair:
    psi: np.ndarray
    psi_perp: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.psi, dtype=complex)
        b = np.asarray(self.psi_perp, dtype=complex)
        if a.shape != (2,) or b.shape != (2,):
            raise ValidationError("basis vectors must be complex 2-vectors")
        na, nb, ov = np.vdot(a, a).real, np.vdot(b, b).real, abs(np.vdot(a, b))
        if abs(na - 1) > BASIS_TOL or abs(nb - 1) > BASIS_TOL or ov > BASIS_TOL:
            raise ValidationError(
                f"not an orthonormal basis: |psi|^2={na:.15g}, |psi_perp|^2={nb:.15g}, "
                f"|<psi|psi_perp>|={ov:.3e}"
            )
        object.__setattr__(self, "psi", a)
        object.__setattr__(self, "psi_perp", b)

    @classmethod
    def from_angles(cls, theta, phi):
        return cls(ket(theta, phi), ket_perp(theta, phi))


def witness_from_basis(b, side=Side.FIRST):
    """``u_i = <psi|s_i|psi_perp>`` (FIRST) or ``v_i = <psi_perp|s_i|psi>`` (SECOND)."""
    if side is Side.FIRST:
        return _witness(b.psi, b.psi_perp)
    return _witness(b.psi_perp, b.psi)


def _witness(bra, ket_):
    return np.einsum("...a,iab,...b->...i", np.conj(bra), PAULIS, ket_)


def _quad(m, x, y):
    return np.einsum("...i,ij,...j->...", np.conj(x), m, y)


def _criterion(a11, a22, c12, u, v):
    first = _quad(a11, u, u).real * _quad(a22.T, v, v).real
    return first - np.abs(_quad(c12, u, v)) ** 2


def eval_markovian(k, u, v):
    """``<u|K11|u><v|K22^T|v> - |<u|Re K12 + i h12|v>|^2`` (broadcasts over u, v)."""
    return _criterion(k.k11, k.k22, k.k12.real + 1j * k.h12.real, u, v)


def _check_correlation(d):
    if d.has_hamiltonian:
        raise ValidationError("equal-time correlation blocks must have zero Hamiltonian part")
    if not is_psd(assemble(d), PSD_TOL):
        raise ValidationError("equal-time correlation matrix is not positive semi-definite")


def eval_nonmarkovian(d, u, v):
    """``<u|D11|u><v|D22^T|v> - |<u|Re D12|v>|^2``; Hamiltonian terms cannot enter."""
    _check_correlation(d)
    return _criterion(d.k11, d.k22, d.k12.real.astype(complex), u, v)


def _angle_witness(theta, phi):
    # <psi|s_i|psi_perp> for the ket/ket_perp parameterization, in closed form
    c2 = np.cos(theta / 2) ** 2
    e = np.exp(-1j * phi)
    s2 = e * e * np.sin(theta / 2) ** 2
    return np.stack([c2 - s2, -1j * (c2 + s2), -e * np.sin(theta)], axis=-1)


def angles_to_witnesses(x):
    """Map ``(theta1, phi1, theta2, phi2)`` rows to witness vectors ``(u, v)``.

    ``v`` for the second qubit is the complex conjugate of the first-side
    vector of the same basis.
    """
    x = np.asarray(x, dtype=float)
    u = _angle_witness(x[..., 0], x[..., 1])
    v = np.conj(_angle_witness(x[..., 2], x[..., 3]))
    return u, v


def common_bath_shortcut(delta, u):
    """``<u|Im Delta|u>`` with ``(Im Delta)_jk := Im(Delta_jk)``.

    Diagnostic for qubits sharing one bath with ``u = v``; the value is purely
    imaginary for an isotropic ``u``. Verdicts never rely on it.
    """
    delta = np.asarray(delta, dtype=complex)
    return complex(_quad(delta.imag.astype(complex), np.asarray(u), np.asarray(u)))


def x_weighted_form(x, u):
    """``sum_jk x_jk Im(conj(u_j) u_k)`` for the antisymmetric Gram data ``x``."""
    u = np.asarray(u, dtype=complex)
    return float(np.sum(np.asarray(x) * np.imag(np.outer(u.conj(), u))))


@dataclass
class OptimizerOptions:
    """Multi-start Nelder-Mead settings; ``grid`` adds an exhaustive angle grid."""

    starts: int = 64
    max_iter: int = 400
    xtol: float = 1e-12
    ftol: float = 1e-12
    seed: int = 0
    grid: bool = False
    grid_n: int = 20
    decision_tol: float = DECISION_TOL

    def __post_init__(self):
        if self.starts < 1:
            raise ValidationError(f"starts must be >= 1, got {self.starts}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")


ANGLE_SPAN = np.array([np.pi, 2 * np.pi, np.pi, 2 * np.pi])


def start_points(n, seed):
    """Deterministic scrambled-Halton points in the 4-angle box."""
    return qmc.Halton(d=4, scramble=True, seed=seed).random(n) * ANGLE_SPAN


def grid_points(n):
    """Midpoint grid with ``n`` nodes per angle (poles excluded)."""
    ax = (np.arange(n) + 0.5) / n
    mesh = np.meshgrid(ax, ax, ax, ax, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1) * ANGLE_SPAN


def classify(value, tol):
    if value < -tol:
        return Verdict.GENERATES
    if abs(value) <= tol:
        return Verdict.BOUNDARY
    return Verdict.DOES_NOT_GENERATE


def _interleave(z):
    z = np.asarray(z, dtype=complex)
    return [float(t) for pair in zip(z.real, z.imag) for t in pair]


@dataclass
class CriterionReport:
    value: float
    u_min: np.ndarray
    v_min: np.ndarray
    verdict: Verdict
    regime: Regime
    decision_tol: float
    starts_used: int
    converged: bool
    angles: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        return {
            "value": float(self.value),
            "verdict": self.verdict.value,
            "regime": self.regime.value,
            "u_min": _interleave(self.u_min),
            "v_min": _interleave(self.v_min),
            "starts_used": int(self.starts_used),
            "converged": bool(self.converged),
            "decision_tol": float(self.decision_tol),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @property
    def states(self):
        t1, p1, t2, p2 = self.angles
        return ket(t1, p1), ket(t2, p2)


def resolve(target, regime=None, t0=0.0):
    """Turn a model or coefficient matrix into ``(blocks, regime)``.

    Correlation models always use the non-Markovian criterion at ``t0``; a
    bare :class:`BlockCoeffMatrix` defaults to the Markovian one.
    """
    if isinstance(target, BlockCoeffMatrix):
        reg = Regime.MARKOVIAN if regime is None else Regime.parse(regime)
        if reg is Regime.NON_MARKOVIAN:
            _check_correlation(target)
        return target, reg
    if regime is not None and Regime.parse(regime) is Regime.MARKOVIAN:
        raise ValidationError("correlation models are analysed in the non-Markovian regime")
    return equal_time_D(target, t0), Regime.NON_MARKOVIAN


def _coupling(blocks, regime):
    if regime is Regime.MARKOVIAN:
        return blocks.k12.real + 1j * blocks.h12.real
    return blocks.k12.real.astype(complex)


def objective(blocks, regime):
    """Vectorized criterion value as a function of the four Bloch angles."""
    c12 = _coupling(blocks, regime)
    k11, k22 = blocks.k11, blocks.k22

    def f(x):
        u, v = angles_to_witnesses(x)
        return _criterion(k11, k22, c12, u, v)

    return f


def _stacked_objective(blocks_list, regime, starts):
    """Objective over many models at once; start ``i`` belongs to model ``i // starts``."""
    k11 = np.array([b.k11 for b in blocks_list])
    k22t = np.array([b.k22.T for b in blocks_list])
    c12 = np.array([_coupling(b, regime) for b in blocks_list])

    def quad(mats, x, y):
        return np.einsum("ni,ni->n", x.conj(), np.einsum("nij,nj->ni", mats, y))

    def f(x, start):
        m = start // starts
        u, v = angles_to_witnesses(x)
        a = quad(k11[m], u, u).real
        b = quad(k22t[m], v, v).real
        return a * b - np.abs(quad(c12[m], u, v)) ** 2

    return f


def decide(target, regime=None, opts=None, t0=0.0):
    """Minimize the criterion over product states and classify the result."""
    return decide_batch([target], regime, opts, t0)[0]


def decide_batch(targets, regime=None, opts=None, t0=0.0):
    """:func:`decide` for several models in one vectorized optimizer run.

    Each model is searched on ``blocks / norm`` so that the optimizer path
    does not depend on the overall scale; reported values are multiplied
    back by ``norm**2``. The verdict compares the normalized value with
    ``decision_tol``, which keeps verdicts invariant under ``K -> lam K``.
    Starts never interact, so every report equals the single-model result.
    """
    opts = opts or OptimizerOptions()
    resolved = [resolve(t, regime, t0) for t in targets]
    if not resolved:
        return []
    regs = {r for _, r in resolved}
    if len(regs) != 1:
        raise ValidationError("decide_batch needs all models in one regime")
    reg = regs.pop()
    norms = [b.norm() for b, _ in resolved]
    unit = [b.scaled(1.0 / n) if n > 0 else b for (b, _), n in zip(resolved, norms)]
    x0 = np.tile(start_points(opts.starts, opts.seed), (len(unit), 1))
    res = nelder_mead_batch(
        _stacked_objective(unit, reg, opts.starts), x0, step=0.5,
        max_iter=opts.max_iter, xtol=opts.xtol, ftol=opts.ftol, indexed=True,
    )
    reports = []
    for m, (blocks, nrm) in enumerate(zip(unit, norms)):
        sl = slice(m * opts.starts, (m + 1) * opts.starts)
        fun, xs, conv = res.fun[sl], res.x[sl], res.converged[sl]
        i = int(np.argmin(fun))  # first minimal index wins ties
        best_x, best_f, ok = xs[i], float(fun[i]), bool(conv[i])
        if opts.grid:
            f = objective(blocks, reg)
            pts = grid_points(opts.grid_n)
            j = int(np.argmin(f(pts)))
            pol = nelder_mead_batch(
                f, pts[j:j + 1], step=np.pi / opts.grid_n,
                max_iter=opts.max_iter, xtol=opts.xtol, ftol=opts.ftol,
            )
            if float(pol.fun[0]) < best_f:
                best_f, best_x, ok = float(pol.fun[0]), pol.x[0], bool(pol.converged[0])
        u, v = angles_to_witnesses(best_x)
        reports.append(
            CriterionReport(
                value=best_f * nrm**2,
                u_min=u,
                v_min=v,
                verdict=classify(best_f, opts.decision_tol),
                regime=reg,
                decision_tol=opts.decision_tol,
                starts_used=opts.starts,
                converged=ok,
                angles=np.array(best_x),
            )
        )
    return reports


def scan_t0(model, t0_grid, opts=None):
    """One non-Markovian report per initial time, using ``Delta(t0)`` of the model."""
    t0_grid = [float(t) for t in t0_grid]
    if not t0_grid:
        raise ValidationError("t0 grid is empty")
    if min(t0_grid) < 0:
        raise ValidationError("t0 values must be >= 0")
    return [(t, decide(model, Regime.NON_MARKOVIAN, opts, t0=t)) for t in t0_grid]
