import io
import json

import numpy as np
import pytest

from qentgen.coeffs import BlockCoeffMatrix
from qentgen.criterion import Regime, Verdict, decide, resolve
from qentgen.dynamics import short_time_markov, short_time_nonmarkov
from qentgen.oracle import (
    Grid,
    Hybrid,
    OracleReport,
    Random,
    agreement_suite,
    certify,
    certify_batch,
    default_dt,
    pt_spectrum,
    random_model,
    threshold_scale,
)
from qentgen.qlin import ValidationError, partial_transpose, product_state

from conftest import example1_bath, example2_bath, real_wiener

I3 = np.eye(3)
Z3 = np.zeros((3, 3))
COMMON = np.array([[1, 1j, 0], [-1j, 1, 0], [0, 0, 0]])


def test_decoupled_does_not_generate():
    k = BlockCoeffMatrix(I3, I3)
    rep = certify(k, dt=1e-2)
    assert rep.verdict is Verdict.DOES_NOT_GENERATE
    assert rep.min_pt_eig >= -1e-12 * threshold_scale(k, Regime.MARKOVIAN, 1e-2)


def test_pure_hamiltonian_coupling_generates():
    k = BlockCoeffMatrix(Z3, Z3, h12=np.diag([1.0, 0, 0]))
    rep = certify(k, dt=1e-2)
    assert rep.verdict is Verdict.GENERATES
    assert rep.min_pt_eig == pytest.approx(-1e-2, rel=1e-6)
    assert decide(k).verdict is Verdict.GENERATES


def test_common_bath_generates_from_sigma3_eigenstate():
    d = BlockCoeffMatrix(COMMON, COMMON, COMMON)
    rep = certify(d, Regime.NON_MARKOVIAN, dt=1e-2, sampling=Hybrid())
    assert rep.verdict is Verdict.GENERATES
    theta1 = rep.best_angles[0]
    assert min(theta1, np.pi - theta1) < 0.1


def test_reported_value_matches_direct_propagation():
    # recompute the best state's PT spectrum through the dynamics module
    rng = np.random.default_rng(8)
    for regime, step in ((Regime.MARKOVIAN, short_time_markov), (Regime.NON_MARKOVIAN, short_time_nonmarkov)):
        m = random_model(rng, regime)
        rep = certify(m, regime)
        psi, phi = rep.best_state
        blocks, _ = resolve(m, regime)
        sigma = partial_transpose(step(blocks, product_state(psi, phi), rep.dt_used))
        lam = np.linalg.eigvalsh(0.5 * (sigma + sigma.conj().T))[0]
        assert lam == pytest.approx(rep.raw_min_eig, abs=1e-15)


def test_compressed_eigenvalue_bounds_full_one():
    # interlacing: the compression can only sit above the full minimum
    rng = np.random.default_rng(9)
    m = random_model(rng, Regime.NON_MARKOVIAN)
    x = rng.uniform(0, np.pi, (200, 4))
    single, comp, full = pt_spectrum(m, Regime.NON_MARKOVIAN, 0.05, x)
    assert np.all(comp >= full - 1e-15)
    np.testing.assert_allclose(comp, np.minimum(0, single), atol=1e-16)


@pytest.mark.parametrize("regime,lo,hi", [(Regime.NON_MARKOVIAN, 3.9, 4.1), (Regime.MARKOVIAN, 1.95, 2.05)])
def test_dt_scaling(regime, lo, hi):
    rng = np.random.default_rng(21)
    checked = 0
    while checked < 5:
        m = random_model(rng, regime)
        blocks, _ = resolve(m, regime)
        dt = 0.1 * default_dt(blocks, regime)
        a = certify(m, regime, dt=dt).min_pt_eig
        b = certify(m, regime, dt=2 * dt).min_pt_eig
        if a < 0 and b < 0:
            assert lo <= b / a <= hi
            checked += 1


@pytest.mark.parametrize("regime", [Regime.NON_MARKOVIAN, Regime.MARKOVIAN])
def test_grid_refinement_never_worse(regime):
    rng = np.random.default_rng(31)
    models = [random_model(rng, regime) for _ in range(10)]
    fine = certify_batch(models, regime, sampling=Grid(20))
    coarse = certify_batch(models, regime, sampling=Grid(12))
    for f, c in zip(fine, coarse):
        assert f.min_pt_eig <= c.min_pt_eig + 1e-15


def test_hybrid_never_worse_than_its_grid():
    rng = np.random.default_rng(32)
    models = [random_model(rng, Regime.NON_MARKOVIAN) for _ in range(10)]
    hyb = certify_batch(models, Regime.NON_MARKOVIAN, sampling=Hybrid())
    grid = certify_batch(models, Regime.NON_MARKOVIAN, sampling=Grid(12))
    for m, h, g in zip(models, hyb, grid):
        # refinement starts from the grid's best points, so the search
        # objective can only go down
        fh = pt_spectrum(m, Regime.NON_MARKOVIAN, h.dt_used, h.best_angles)[0][0]
        fg = pt_spectrum(m, Regime.NON_MARKOVIAN, g.dt_used, g.best_angles)[0][0]
        assert fh <= fg


def test_batch_matches_single():
    rng = np.random.default_rng(33)
    models = [random_model(rng, Regime.MARKOVIAN) for _ in range(3)]
    batch = certify_batch(models, Regime.MARKOVIAN)
    for m, b in zip(models, batch):
        s = certify(m, Regime.MARKOVIAN)
        assert s.min_pt_eig == b.min_pt_eig
        np.testing.assert_array_equal(s.best_angles, b.best_angles)


@pytest.mark.parametrize("make", [example1_bath, example2_bath, real_wiener])
def test_never_generates_on_non_entangling_families(make):
    rng = np.random.default_rng(41)
    models = [make(rng) for _ in range(50)]
    for rep in certify_batch(models, Regime.NON_MARKOVIAN):
        assert rep.verdict is Verdict.DOES_NOT_GENERATE
        assert rep.min_pt_eig >= -rep.abs_tol


def test_random_sampling_deterministic():
    m = random_model(np.random.default_rng(5), Regime.MARKOVIAN)
    a = certify(m, sampling=Random(500, seed=3))
    b = certify(m, sampling=Random(500, seed=3))
    assert a.min_pt_eig == b.min_pt_eig
    assert a.n_samples == 500 and not a.grid_refined


def test_report_json_fields():
    rep = certify(BlockCoeffMatrix(I3, I3), sampling=Grid(4))
    d = json.loads(rep.to_json())
    assert list(d) == [
        "min_pt_eig", "verdict", "regime", "best_state", "dt_used",
        "n_samples", "grid_refined", "abs_tol", "raw_min_eig",
    ]
    assert d["n_samples"] == 4**4
    psi = np.array(d["best_state"]["psi"][0::2]) + 1j * np.array(d["best_state"]["psi"][1::2])
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert isinstance(rep, OracleReport)


def test_default_dt_and_scale():
    k = BlockCoeffMatrix(4 * I3, 4 * I3)
    n = k.norm()
    assert default_dt(k, Regime.MARKOVIAN) == pytest.approx(1e-2 / n)
    assert default_dt(k, Regime.NON_MARKOVIAN) == pytest.approx(1e-1 / np.sqrt(n))
    assert threshold_scale(k, Regime.NON_MARKOVIAN, 0.1) == pytest.approx(0.01 * n)


@pytest.mark.parametrize(
    "kwargs",
    [dict(dt=0.0), dict(dt=-1e-3), dict(sampling=Grid(0)), dict(sampling=Random(0, 1)), dict(sampling="grid")],
)
def test_bad_arguments(kwargs):
    with pytest.raises(ValidationError):
        certify(BlockCoeffMatrix(I3, I3), **kwargs)


def test_agreement_suites():
    for regime in (Regime.NON_MARKOVIAN, Regime.MARKOVIAN):
        s = agreement_suite(20, seed=2, regime=regime)
        assert s.disagree == 0
        assert s.agree + s.boundary == 20


def test_agreement_csv():
    s = agreement_suite(3, seed=0, sampling=Grid(6))
    buf = io.StringIO()
    s.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "model_id,criterion_value,oracle_min_eig,agree"
    assert len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "1", "2"]
    assert all(ln.split(",")[3] in {"true", "false", "boundary"} for ln in lines[1:])


def test_agreement_suite_validates():
    with pytest.raises(ValidationError):
        agreement_suite(0, seed=0)


def test_criterion_negative_implies_oracle_negative_common_bath_family():
    # common-bath thermal couplings with complex phases generate for both deciders
    rng = np.random.default_rng(12)
    from qentgen.baths import Mode, ThermalBath

    for _ in range(5):
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        bath = ThermalBath((Mode(1.0, c, c),), beta=1.0)
        rep = decide(bath)
        orc = certify(bath)
        assert (rep.verdict is Verdict.GENERATES) == (orc.verdict is Verdict.GENERATES)
