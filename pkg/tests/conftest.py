import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_gram(rng, n, m=None):
    m = n if m is None else m
    c = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return c.conj().T @ c


def random_ket(rng):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def example1_bath(rng, n_modes=6):
    """Thermal bath with c1 real and c2 purely imaginary, so Re D12 = 0."""
    from qentgen.baths import Mode, ThermalBath

    modes = tuple(
        Mode(float(rng.uniform(0.3, 3)), rng.standard_normal(3), 1j * rng.standard_normal(3))
        for _ in range(n_modes)
    )
    return ThermalBath(modes, float(rng.uniform(0.2, 3)))


def example2_bath(rng, n_modes=6):
    """Thermal bath with independent real couplings on both qubits."""
    from qentgen.baths import Mode, ThermalBath

    modes = tuple(
        Mode(float(rng.uniform(0.3, 3)), rng.standard_normal(3), rng.standard_normal(3))
        for _ in range(n_modes)
    )
    return ThermalBath(modes, float(rng.uniform(0.2, 3)))


def real_wiener(rng):
    from qentgen.baths import WienerFieldModel

    return WienerFieldModel(rng.standard_normal((3, 3)), rng.standard_normal(3))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
