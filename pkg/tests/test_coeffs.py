import numpy as np
import pytest

from qentgen.baths import Mode, OUNoise, ThermalBath, WienerFieldModel
from qentgen.coeffs import (
    EPSILON_SIGN,
    PT_CONJUGATOR,
    BlockCoeffMatrix,
    assemble,
    equal_time_D,
    hamiltonian_symmetry_residual,
    pt_transform,
)
from qentgen.qlin import ValidationError, is_psd

from conftest import random_gram, random_hermitian


def test_epsilon_sign_squares_to_identity():
    np.testing.assert_array_equal(EPSILON_SIGN @ EPSILON_SIGN, np.eye(3))


def test_assemble_zero():
    np.testing.assert_array_equal(assemble(BlockCoeffMatrix()), np.zeros((6, 6)))


def test_assemble_common_bath():
    delta = np.array([[1, 1j, 0], [-1j, 1, 0], [0, 0, 0]])
    k = BlockCoeffMatrix(delta, delta, delta)
    np.testing.assert_array_equal(assemble(k), np.block([[delta, delta], [delta, delta]]))


def test_assemble_hermitian_and_psd_for_gram(rng):
    for _ in range(100):
        g = random_gram(rng, 6, int(rng.integers(1, 7)))
        m = assemble(BlockCoeffMatrix.from_matrix(g))
        assert np.max(np.abs(m - m.conj().T)) <= 1e-14
        assert is_psd(m)


def test_non_hermitian_block_rejected():
    with pytest.raises(ValidationError, match="k11"):
        BlockCoeffMatrix(k11=np.triu(np.ones((3, 3))))


def test_complex_h12_rejected():
    with pytest.raises(ValidationError, match="h12 must be real"):
        BlockCoeffMatrix(h12=1j * np.eye(3))


def test_pt_transform_imaginary_k12_is_block_diagonal(rng):
    for _ in range(50):
        g = random_gram(rng, 6)
        k = BlockCoeffMatrix(g[:3, :3], g[3:, 3:], 1j * g[:3, 3:].imag)
        kt = pt_transform(k)
        np.testing.assert_array_equal(kt[:3, 3:], 0)
        expected = PT_CONJUGATOR @ np.block(
            [[k.k11, np.zeros((3, 3))], [np.zeros((3, 3)), k.k22.T]]
        ) @ PT_CONJUGATOR
        np.testing.assert_allclose(kt, expected, atol=1e-14)
        assert is_psd(kt)


def test_pt_transform_real_symmetric(rng):
    for _ in range(50):
        a = rng.standard_normal((6, 6))
        g = a @ a.T
        k = BlockCoeffMatrix.from_matrix(g)
        sym = (g + g.T) / 2
        np.testing.assert_allclose(pt_transform(k), PT_CONJUGATOR @ sym @ PT_CONJUGATOR, atol=1e-14)
        assert is_psd(pt_transform(k))


def test_pt_transform_pure_hamiltonian_breaks_psd():
    k = BlockCoeffMatrix(h12=np.diag([1.0, 0, 0]))
    lam = np.linalg.eigvalsh(pt_transform(k))
    assert lam[0] < -0.5


def test_pt_transform_hermitian(rng):
    for _ in range(50):
        k = BlockCoeffMatrix.from_matrix(
            random_gram(rng, 6), h11=random_hermitian(rng, 3), h12=rng.standard_normal((3, 3))
        )
        kt = pt_transform(k)
        assert np.max(np.abs(kt - kt.conj().T)) <= 1e-14


def test_equal_time_ou():
    d = equal_time_D(OUNoise(0.5), t0=3.7)
    assert d.k11[2, 2] == 1.0
    assert d.k12[2, 2] == 1.0
    assert not d.has_hamiltonian


def test_equal_time_wiener_t0_zero():
    c = np.array([1, 1j, 0.5])
    d = equal_time_D(WienerFieldModel(np.eye(3), c), 0.0)
    np.testing.assert_allclose(d.k11, np.outer(c, c.conj()), atol=1e-15)


def test_equal_time_thermal_coth():
    bath = ThermalBath((Mode(1.0, [1, 0, 0], [1, 0, 0]),), beta=2.0)
    d = equal_time_D(bath)
    assert abs(d.k11[0, 0] - 1 / np.tanh(1.0)) <= 1e-12
    assert abs(d.k11[0, 0] - 1.3130352854993312) <= 1e-12


def test_equal_time_negative_t0():
    with pytest.raises(ValidationError):
        equal_time_D(OUNoise(0.5), -1.0)


def test_hamiltonian_symmetry_identity(rng):
    for _ in range(100):
        assert hamiltonian_symmetry_residual(random_hermitian(rng, 6)) <= 1e-14


def test_scaled_and_norm(rng):
    k = BlockCoeffMatrix.from_matrix(random_gram(rng, 6), h12=np.eye(3))
    assert abs(k.scaled(3.0).norm() - 3 * k.norm()) <= 1e-12 * k.norm()
    assert k.cp_valid
    assert not k.without_hamiltonian().has_hamiltonian
