"""Small dense complex linear algebra for two-qubit problems.

Everything here works on numpy arrays of dimension at most 6. Pauli
matrices use the standard representation, so that under transposition
``sigma_1`` and ``sigma_3`` are symmetric while ``sigma_2`` flips sign.
"""
import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])

# transposition signs: sigma_j^T = TRANSPOSE_SIGNS[j] * sigma_j
TRANSPOSE_SIGNS = np.array([1.0, -1.0, 1.0])

# sigma^alpha_j on C^2 (x) C^2, ordered (alpha=1: j=1..3, alpha=2: j=1..3)
TWO_QUBIT_PAULIS = np.array(
    [np.kron(s, I2) for s in PAULIS] + [np.kron(I2, s) for s in PAULIS]
)


class ValidationError(ValueError):
    """Raised when an input violates a documented numerical contract."""


def max_asymmetry(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, tol=HERMITIAN_TOL, name="matrix"):
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {m.shape}")
    asym = max_asymmetry(m)
    if asym > tol:
        raise ValidationError(
            f"{name} is not Hermitian: max |M - M^dag| = {asym:.3e} > {tol:.1e}"
        )
    return m


def hermitian_eigvals(m, eigenvectors=False, tol=HERMITIAN_TOL):
    """Eigenvalues of a Hermitian matrix in ascending order.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix.
    eigenvectors : bool
        If True also return the unitary matrix of column eigenvectors.
    tol : float
        Absolute elementwise Hermiticity tolerance.
    """
    m = check_hermitian(m, tol)
    if eigenvectors:
        return np.linalg.eigh(m)
    return np.linalg.eigvalsh(m)


def is_psd(m, tol=PSD_TOL):
    """True iff the smallest eigenvalue is >= -tol * max(1, ||m||_F)."""
    m = check_hermitian(m)
    if m.size == 0:
        return True
    lam = np.linalg.eigvalsh(m)[0]
    return bool(lam >= -tol * max(1.0, np.linalg.norm(m)))


def partial_transpose(rho):
    """Transpose the second qubit of a 4x4 operator (id (x) T).

    Positivity is not required; the output is exact index shuffling, so
    applying it twice returns the input bit for bit.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValidationError(f"expected 4x4 operator(s), got shape {rho.shape}")
    lead = rho.shape[:-2]
    r = rho.reshape(lead + (2, 2, 2, 2))
    return np.swapaxes(r, -3, -1).reshape(lead + (4, 4))


def validate_state(rho, tol=HERMITIAN_TOL, psd_tol=PSD_TOL):
    """Check the density-matrix invariants and return ``rho`` as an array."""
    rho = check_hermitian(rho, tol, name="state")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValidationError(f"state trace is {tr.real:.15g}, expected 1")
    lam = np.linalg.eigvalsh(rho)[0]
    if lam < -psd_tol:
        raise ValidationError(f"state has negative eigenvalue {lam:.3e}")
    return rho


def ket(theta, phi):
    """Qubit pure state (cos theta/2, e^{i phi} sin theta/2), broadcasting."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1
    )


def ket_perp(theta, phi):
    """The orthogonal partner (-e^{-i phi} sin theta/2, cos theta/2) of ``ket``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2) + 0j], axis=-1
    )


def product_state(psi, phi):
    """Density matrix |psi><psi| (x) |phi><phi| (broadcasts over leading axes)."""
    x = np.einsum("...i,...j->...ij", psi, phi).reshape(np.shape(psi)[:-1] + (4,))
    return np.einsum("...i,...j->...ij", x, x.conj())
