"""Brute-force certification of short-time entanglement generation.

The oracle never touches witness vectors. It samples product pure states,
propagates them with the short-time expansion of the chosen regime, takes
the partial transpose and looks at its spectrum.

The truncated expansion of a completely positive map is itself slightly
non-positive, at order ``dt^2`` (Markovian) or ``dt^4`` (non-Markovian),
even for non-entangling dynamics. Those defects sit in directions coupled to
the unperturbed state, so the leading-order partial-transpose eigenvalue is
read from the compression of ``PT(rho_dt)`` onto the orthogonal complement
of ``PT(rho_0)``'s support. By interlacing, a negative compressed eigenvalue
implies a negative eigenvalue of the full matrix; the full minimum is kept
in ``raw_min_eig`` for reference.
"""
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .coeffs import BlockCoeffMatrix, assemble
from .criterion import (
    ANGLE_SPAN,
    Regime,
    Verdict,
    decide_batch,
    grid_points,
    resolve,
)
from .dynamics import F, generator_parts
from .optim import nelder_mead_batch
from .qlin import ValidationError, ket, ket_perp, partial_transpose, product_state

REL_TOL = 1e-12
BOUNDARY_BAND = 1e-6


@dataclass(frozen=True)
class Grid:
    n: int = 12


@dataclass(frozen=True)
class Random:
    n: int = 20000
    seed: int = 0


@dataclass(frozen=True)
class Hybrid:
    grid_n: int = 12
    refine: int = 8
    max_iter: int = 400


def _complex_pairs(z):
    z = np.asarray(z, dtype=complex)
    return [float(t) for pair in zip(z.real, z.imag) for t in pair]


@dataclass
class OracleReport:
    min_pt_eig: float
    best_state: tuple
    dt_used: float
    n_samples: int
    verdict: Verdict
    grid_refined: bool
    abs_tol: float = 0.0
    raw_min_eig: float = 0.0
    regime: Regime = Regime.MARKOVIAN
    best_angles: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        psi, phi = self.best_state
        return {
            "min_pt_eig": float(self.min_pt_eig),
            "verdict": self.verdict.value,
            "regime": self.regime.value,
            "best_state": {"psi": _complex_pairs(psi), "phi": _complex_pairs(phi)},
            "dt_used": float(self.dt_used),
            "n_samples": int(self.n_samples),
            "grid_refined": bool(self.grid_refined),
            "abs_tol": float(self.abs_tol),
            "raw_min_eig": float(self.raw_min_eig),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def default_dt(blocks, regime):
    nrm = blocks.norm()
    if nrm == 0:
        return 1e-2
    if regime is Regime.MARKOVIAN:
        return 1e-2 / nrm
    return 1e-1 / np.sqrt(nrm)


def threshold_scale(blocks, regime, dt):
    nrm = blocks.norm()
    return dt * nrm if regime is Regime.MARKOVIAN else dt**2 * nrm


class _Stack:
    """Generator pieces of several models, indexable by model row."""

    def __init__(self, blocks_list, regime, dts):
        basis = np.eye(16, dtype=complex).reshape(16, 4, 4)
        sup = []
        for b in blocks_list:
            k, g, h = generator_parts(b)
            fk = np.einsum("ab,aij->bij", k, F)
            jump = np.einsum("bij,njk,bkl->nil", fk, basis, F)
            gen = jump - 0.5 * (g @ basis + basis @ g) - 1j * (h @ basis - basis @ h)
            sup.append(gen.reshape(16, 16).T)  # column n is vec(L[E_n])
        dts = np.asarray(dts, dtype=float)
        # Markovian: rho + dt L[rho]; non-Markovian: rho + dt^2 Diss_D[rho]
        step = dts if regime is Regime.MARKOVIAN else dts**2
        self.sup = np.array(sup) * step[:, None, None]
        self.regime = regime

    def propagate(self, rho, m):
        """Short-time state for rows ``rho`` evolving under model(s) ``m``.

        ``m`` is either one model index shared by all rows or one per row.
        """
        vec = rho.reshape(-1, 16)
        if np.ndim(m) == 0:
            out = vec @ self.sup[m].T
        else:
            out = np.einsum("mij,mj->mi", self.sup[m], vec)
        return rho + out.reshape(-1, 4, 4)


def _geometry(x):
    """Model-independent pieces for angle rows ``x``: rho_0 and the flip basis.

    PT(rho_0) = |psi, conj(phi)><psi, conj(phi)|; its orthogonal complement
    is spanned by the single flips and the double flip, in that order.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    psi, psi_p = ket(x[:, 0], x[:, 1]), ket_perp(x[:, 0], x[:, 1])
    phi, phi_p = ket(x[:, 2], x[:, 3]), ket_perp(x[:, 2], x[:, 3])
    b, bp = np.conj(phi), np.conj(phi_p)

    def kron(p, q):
        return (p[:, :, None] * q[:, None, :]).reshape(-1, 4)

    basis = np.stack([kron(psi_p, b), kron(psi, bp), kron(psi_p, bp)], axis=1)  # (m, 3, 4)
    return product_state(psi, phi), basis


def _pt_state(stack, rho0, m):
    sigma = partial_transpose(stack.propagate(rho0, m))
    return 0.5 * (sigma + np.conj(np.swapaxes(sigma, -1, -2)))


def _compress(sigma, basis):
    return np.conj(basis) @ sigma @ np.swapaxes(basis, -1, -2)


def _single_flip_min(sigma, basis):
    # smallest eigenvalue of the 2x2 single-flip block, closed form
    u, v = basis[:, 0], basis[:, 1]
    su = np.einsum("mij,mj->mi", sigma, u)
    sv = np.einsum("mij,mj->mi", sigma, v)
    p = np.einsum("mi,mi->m", np.conj(u), su).real
    q = np.einsum("mi,mi->m", np.conj(v), sv).real
    c = np.einsum("mi,mi->m", np.conj(u), sv)
    return 0.5 * (p + q) - np.sqrt(0.25 * (p - q) ** 2 + np.abs(c) ** 2)


def pt_spectrum(blocks, regime, dt, x):
    """Leading-order and full minimum PT eigenvalues for angle rows ``x``.

    Returns ``(single_flip_min, compressed_min, full_min)``, each of shape
    ``(m,)``. The double-flip direction |psi_perp, conj(phi_perp)> is not
    reached by one application of a single-qubit jump or the anticommutator,
    so its row of the compression vanishes and ``compressed_min`` equals
    ``min(0, single_flip_min)``. The single-flip value is the smooth search
    objective; ``compressed_min`` is what gets reported.
    """
    stack = _Stack([blocks], Regime.parse(regime), [dt])
    rho0, basis = _geometry(x)
    sigma = _pt_state(stack, rho0, 0)
    return (
        _single_flip_min(sigma, basis),
        np.linalg.eigvalsh(_compress(sigma, basis))[:, 0],
        np.linalg.eigvalsh(sigma)[:, 0],
    )


def _random_angles(n, seed):
    rng = np.random.default_rng(seed)
    u = rng.random((n, 4))
    theta = np.arccos(1 - 2 * u[:, [0, 2]])
    phi = 2 * np.pi * u[:, [1, 3]]
    return np.stack([theta[:, 0], phi[:, 0], theta[:, 1], phi[:, 1]], axis=1)


def _sample_points(sampling):
    if isinstance(sampling, Grid):
        if sampling.n < 1:
            raise ValidationError("grid size must be >= 1")
        return grid_points(sampling.n)
    if isinstance(sampling, Random):
        if sampling.n < 1:
            raise ValidationError("sample count must be >= 1")
        return _random_angles(sampling.n, sampling.seed)
    if isinstance(sampling, Hybrid):
        if sampling.grid_n < 1 or sampling.refine < 0:
            raise ValidationError("hybrid sampling needs grid_n >= 1 and refine >= 0")
        return grid_points(sampling.grid_n)
    raise ValidationError(f"unknown sampling {sampling!r}")


def certify(target, regime=None, dt=None, sampling=None, t0=0.0):
    """Search product states for the most negative leading-order PT eigenvalue."""
    return certify_batch([target], regime, dt, sampling, t0)[0]


def certify_batch(targets, regime=None, dt=None, sampling=None, t0=0.0):
    """:func:`certify` for several models; each report equals the single-model one."""
    resolved = [resolve(t, regime, t0) for t in targets]
    if not resolved:
        return []
    regs = {r for _, r in resolved}
    if len(regs) != 1:
        raise ValidationError("certify_batch needs all models in one regime")
    reg = regs.pop()
    blocks = [b for b, _ in resolved]
    sampling = Hybrid() if sampling is None else sampling
    if dt is None:
        dts = [default_dt(b, reg) for b in blocks]
    else:
        dt = float(dt)
        if not dt > 0:
            raise ValidationError(f"dt must be > 0, got {dt}")
        dts = [dt] * len(blocks)
    stack = _Stack(blocks, reg, dts)
    pts = _sample_points(sampling)
    n_models, n_pts = len(blocks), len(pts)

    def f(x, m):
        rho0, basis = _geometry(x)
        return _single_flip_min(_pt_state(stack, rho0, m), basis)

    # exhaustive stage: the point set is shared, so its geometry is built once
    rho0, basis = _geometry(pts)
    vals = np.array([_single_flip_min(_pt_state(stack, rho0, i), basis) for i in range(n_models)])

    best_x = pts[np.argmin(vals, axis=1)]
    best_f = vals.min(axis=1)
    refined = isinstance(sampling, Hybrid) and sampling.refine > 0
    if refined:
        k = min(sampling.refine, n_pts)
        top = np.argsort(vals, axis=1, kind="stable")[:, :k]
        res = nelder_mead_batch(
            lambda x, start: f(x, start // k),
            pts[top].reshape(-1, 4), step=0.5 * np.pi / sampling.grid_n,
            max_iter=sampling.max_iter, xtol=1e-10, ftol=0.0, indexed=True,
        )
        rf = res.fun.reshape(n_models, k)
        j = np.argmin(rf, axis=1)
        better = rf[np.arange(n_models), j] < best_f
        best_x = np.where(better[:, None], res.x.reshape(n_models, k, 4)[np.arange(n_models), j], best_x)

    rho0, basis = _geometry(best_x)
    sigma = _pt_state(stack, rho0, np.arange(n_models))
    lam_c = np.linalg.eigvalsh(_compress(sigma, basis))[:, 0]
    lam_f = np.linalg.eigvalsh(sigma)[:, 0]
    reports = []
    for i, b in enumerate(blocks):
        tol = REL_TOL * threshold_scale(b, reg, dts[i])
        x = best_x[i]
        reports.append(
            OracleReport(
                min_pt_eig=float(lam_c[i]),
                best_state=(ket(x[0], x[1]), ket(x[2], x[3])),
                dt_used=dts[i],
                n_samples=n_pts,
                verdict=Verdict.GENERATES if lam_c[i] < -tol else Verdict.DOES_NOT_GENERATE,
                grid_refined=refined,
                abs_tol=tol,
                raw_min_eig=float(lam_f[i]),
                regime=reg,
                best_angles=np.array(x),
            )
        )
    return reports


# -- random model ensembles ---------------------------------------------------

def random_psd(rng, dim=6, rank=None):
    rank = int(rng.integers(1, dim + 1)) if rank is None else rank
    c = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return c @ c.conj().T / rank


def random_hermitian(rng, dim=3):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


def random_model(rng, regime):
    k = random_psd(rng)
    if Regime.parse(regime) is Regime.NON_MARKOVIAN:
        return BlockCoeffMatrix.from_matrix(k)
    return BlockCoeffMatrix.from_matrix(
        k,
        h11=random_hermitian(rng),
        h22=random_hermitian(rng),
        h12=rng.standard_normal((3, 3)),
    )


@dataclass
class AgreementSummary:
    agree: int
    disagree: int
    boundary: int
    rows: list

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model_id", "criterion_value", "oracle_min_eig", "agree"])
        for r in self.rows:
            w.writerow([r[0], repr(r[1]), repr(r[2]), r[3]])


def agreement_suite(n_models, seed, regime=Regime.NON_MARKOVIAN, sampling=None, opts=None):
    """Compare criterion and oracle verdicts on random PSD models.

    Models with ``|criterion value| <= 1e-6`` count as boundary and are not
    scored. ``agree`` in the CSV is ``boundary`` for those rows.
    """
    if n_models < 1:
        raise ValidationError("n_models must be >= 1")
    reg = Regime.parse(regime)
    rng = np.random.default_rng(seed)
    models = [random_model(rng, reg) for _ in range(n_models)]
    reps = decide_batch(models, reg, opts)
    orcs = certify_batch(models, reg, sampling=sampling)
    agree = disagree = boundary = 0
    rows = []
    for i, (rep, orc) in enumerate(zip(reps, orcs)):
        if abs(rep.value) <= BOUNDARY_BAND:
            boundary += 1
            tag = "boundary"
        elif (rep.value < 0) == (orc.verdict is Verdict.GENERATES):
            agree += 1
            tag = "true"
        else:
            disagree += 1
            tag = "false"
        rows.append((i, float(rep.value), float(orc.min_pt_eig), tag))
    return AgreementSummary(agree, disagree, boundary, rows)
