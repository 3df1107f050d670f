"""Block coefficient matrices of two-qubit dissipators.

A :class:`BlockCoeffMatrix` stores the 3x3 qubit blocks of a 6x6 Hermitian
coefficient matrix, ordered as (qubit 1: x, y, z, qubit 2: x, y, z), and the
Hamiltonian blocks that accompany it. The same container holds Markovian
Kossakowski matrices and equal-time bath correlation matrices.
"""
from dataclasses import dataclass, field

import numpy as np

from .qlin import HERMITIAN_TOL, PSD_TOL, ValidationError, check_hermitian, is_psd

# diag(-1, 1, -1): conjugation applied to qubit-2 blocks under partial transposition
EPSILON_SIGN = np.diag([-1.0, 1.0, -1.0])
PT_CONJUGATOR = np.diag([1.0, 1.0, 1.0, -1.0, 1.0, -1.0])

_ZERO3 = np.zeros((3, 3), dtype=complex)


def _block(x, name):
    if x is None:
        return _ZERO3.copy()
    a = np.array(x, dtype=complex)
    if a.shape != (3, 3):
        raise ValidationError(f"{name} must be 3x3, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BlockCoeffMatrix:
    """Coefficient blocks ``k11, k22, k12`` (``k21 = k12^dag``) and Hamiltonian blocks.

    The bath-induced Hamiltonian is
    ``sum h11_jk s1_j s1_k + h22_jk s2_j s2_k + h12_jk s1_j s2_k``, so ``h11``
    and ``h22`` must be Hermitian and ``h12`` real.
    """

    k11: np.ndarray = field(default=None)
    k22: np.ndarray = field(default=None)
    k12: np.ndarray = field(default=None)
    h11: np.ndarray = field(default=None)
    h22: np.ndarray = field(default=None)
    h12: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("k11", "k22", "k12", "h11", "h22", "h12"):
            object.__setattr__(self, name, _block(getattr(self, name), name))
        for name in ("k11", "k22", "h11", "h22"):
            check_hermitian(getattr(self, name), HERMITIAN_TOL, name=name)
        im = float(np.max(np.abs(self.h12.imag)))
        if im > HERMITIAN_TOL:
            raise ValidationError(
                f"h12 must be real (s1_j s2_k is Hermitian); max |Im h12| = {im:.3e}"
            )

    @classmethod
    def from_matrix(cls, k, h11=None, h22=None, h12=None):
        """Split a 6x6 Hermitian matrix into blocks."""
        k = check_hermitian(k, HERMITIAN_TOL, name="K")
        if k.shape != (6, 6):
            raise ValidationError(f"K must be 6x6, got shape {k.shape}")
        return cls(k[:3, :3], k[3:, 3:], k[:3, 3:], h11, h22, h12)

    @property
    def k21(self):
        return self.k12.conj().T

    @property
    def has_hamiltonian(self):
        return bool(np.any(self.h11) or np.any(self.h22) or np.any(self.h12))

    def scaled(self, factor):
        f = float(factor)
        return BlockCoeffMatrix(
            f * self.k11, f * self.k22, f * self.k12,
            f * self.h11, f * self.h22, f * self.h12,
        )

    def without_hamiltonian(self):
        return BlockCoeffMatrix(self.k11, self.k22, self.k12)

    def norm(self):
        """Frobenius norm of the assembled matrix plus the Hamiltonian blocks."""
        h = np.sqrt(
            np.sum(np.abs(self.h11) ** 2)
            + np.sum(np.abs(self.h22) ** 2)
            + np.sum(np.abs(self.h12) ** 2)
        )
        return float(np.linalg.norm(assemble(self)) + h)

    def equals(self, other, atol=0.0):
        return all(
            np.allclose(getattr(self, n), getattr(other, n), rtol=0, atol=atol)
            for n in ("k11", "k22", "k12", "h11", "h22", "h12")
        )

    @property
    def cp_valid(self):
        return is_psd(assemble(self), PSD_TOL)


def assemble(k):
    """The 6x6 matrix ``[[K11, K12], [K12^dag, K22]]``."""
    return np.block([[k.k11, k.k12], [k.k12.conj().T, k.k22]])


def pt_transform(k):
    """Coefficient matrix of the partially transposed generator.

    ``diag(1, E) [[K11, Re K12 + i h12], [(Re K12 - i h12)^T, K22^T]] diag(1, E)``
    with ``E = diag(-1, 1, -1)``.
    """
    off = k.k12.real + 1j * k.h12.real
    m = np.block([[k.k11, off], [(k.k12.real - 1j * k.h12.real).T, k.k22.T]])
    return PT_CONJUGATOR @ m @ PT_CONJUGATOR


def equal_time_D(model, t0=0.0):
    """Equal-time correlation matrix of ``model`` at initial time ``t0``.

    The Hamiltonian blocks are zero because the bath-induced Hamiltonian
    vanishes at coinciding times. Raises if the matrix is not PSD.
    """
    if t0 < 0:
        raise ValidationError(f"t0 must be >= 0, got {t0}")
    d = np.asarray(model.equal_time(t0), dtype=complex)
    # correlation matrices are Hermitian up to summation rounding
    d = 0.5 * (d + d.conj().T)
    if not is_psd(d, PSD_TOL):
        lam = np.linalg.eigvalsh(d)[0]
        raise ValidationError(f"equal-time correlation matrix not PSD (min eig {lam:.3e})")
    return BlockCoeffMatrix.from_matrix(d)


def hamiltonian_symmetry_residual(d):
    """Max violation of Re D_ab = Re D_ba and Im D_ab = -Im D_ba for a 6x6 matrix."""
    d = np.asarray(d, dtype=complex)
    return float(
        max(np.max(np.abs(d.real - d.real.T)), np.max(np.abs(d.imag + d.imag.T)))
    )
