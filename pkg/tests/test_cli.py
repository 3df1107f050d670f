import csv
import io
import json

import numpy as np
import pytest

from qentgen.baths import fit_three_term, profile_at_zero
from qentgen.cli import main
from qentgen.config import dump_config, load_config


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# -- check ---------------------------------------------------------------------

def test_check_exit_codes():
    assert run("check", "common_bath")[0] == 3
    assert run("check", "examples/real_couplings.json")[0] == 0
    assert run("check", "decoupled")[0] == 0
    assert run("check", "hamiltonian_coupling")[0] == 3
    assert run("check", "wiener_real")[0] == 4


def test_check_json_field_order():
    code, out = run("check", "common_bath", "--starts", "8")
    d = json.loads(out)
    assert list(d) == ["value", "verdict", "regime", "u_min", "v_min", "starts_used", "converged", "decision_tol"]
    assert d["verdict"] == "Generates" and d["starts_used"] == 8


def test_check_csv():
    code, out = run("check", "decoupled", "--csv", "--starts", "4")
    header, row = rows(out)
    assert header[0] == "value" and len(header) == len(row)
    assert float(row[0]) == pytest.approx(4.0, abs=1e-9)


def test_check_is_deterministic():
    a = run("check", "real_couplings", "--starts", "8", "--seed", "3")
    b = run("check", "real_couplings", "--starts", "8", "--seed", "3")
    assert a == b


def test_truncated_file(tmp_path, capsys):
    text = dump_config(load_config("common_bath"))
    p = tmp_path / "cut.json"
    p.write_text(text[:40])
    code, out = run("check", str(p))
    assert code == 1 and out == ""
    assert "line" in capsys.readouterr().err


def test_bad_field_reports_path(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema_version": 1, "model": {"markovian": {"k11": [[1, 0], [0, 1]]}}}))
    assert run("check", str(p))[0] == 1
    assert "model.markovian.k11" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["check"],
        ["check", "decoupled", "--starts", "0"],
        ["check", "decoupled", "--regime", "Quantum"],
        ["check", "decoupled", "--json", "--csv"],
        ["check", "missing_config_name"],
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 1


def test_regime_mismatch_is_input_error():
    assert run("check", "common_bath", "--regime", "Markovian")[0] == 1


def test_verbose_flag_after_subcommand():
    assert run("check", "decoupled", "--starts", "4", "-v", "--threads", "2")[0] == 0


# -- oracle --------------------------------------------------------------------

def test_oracle_agrees_with_check():
    code, out = run("oracle", "common_bath")
    assert code == 3 == run("check", "common_bath")[0]
    assert json.loads(out)["verdict"] == "Generates"
    assert run("oracle", "decoupled")[0] == 0


def test_oracle_sampling_options():
    assert run("oracle", "decoupled", "--samples", "0", "--seed", "1")[0] == 1
    assert run("oracle", "decoupled", "--samples", "100")[0] == 1  # seed required
    assert run("oracle", "decoupled", "--grid-n", "0")[0] == 1
    assert run("oracle", "decoupled", "--dt", "-1")[0] == 1
    code, out = run("oracle", "decoupled", "--samples", "200", "--seed", "4")
    d = json.loads(out)
    assert code == 0 and d["n_samples"] == 200 and d["grid_refined"] is False
    assert run("oracle", "decoupled", "--samples", "200", "--seed", "4") == (code, out)


# -- scan-t0 -------------------------------------------------------------------

def test_scan_t0_flip_model_changes_verdict():
    code, out = run("scan-t0", "wiener_flip", "--t0", "0:1:3", "--starts", "16")
    assert code == 0
    table = rows(out)
    assert table[0] == ["t0", "value", "verdict"]
    t0 = [float(r[0]) for r in table[1:]]
    assert t0 == [0.0, 0.5, 1.0]
    assert table[1][2] != "Generates" and table[3][2] == "Generates"


def test_scan_t0_real_fields_never_generate():
    code, out = run("scan-t0", "wiener_real", "--t0", "0:3:7", "--starts", "16")
    assert all(r[2] != "Generates" for r in rows(out)[1:])


def test_scan_t0_single_row_and_errors():
    code, out = run("scan-t0", "wiener_flip", "--t0", "2:2:1", "--starts", "4")
    assert code == 0 and len(rows(out)) == 2
    assert run("scan-t0", "common_bath", "--t0", "0:1:2")[0] == 1
    assert run("scan-t0", "wiener_flip", "--t0", "1:0:2")[0] == 1
    assert run("scan-t0", "wiener_flip", "--t0", "0:1")[0] == 1


# -- dephase -------------------------------------------------------------------

def test_dephase_columns_and_accuracy():
    code, out = run("dephase", "--epsilon", "0.5", "--t", "5", "--steps", "50")
    assert code == 0
    table = rows(out)
    assert table[0] == ["epsilon", "t", "exact", "rk4", "abs_dev"]
    first = table[1]
    assert float(first[1]) == 0.0 and float(first[2]) == 1.0 and float(first[3]) == 1.0
    assert max(float(r[4]) for r in table[1:]) <= 1e-8


def test_dephase_mc_reproducible():
    argv = ("dephase", "--epsilon", "0.5,2", "--t", "1", "--steps", "4", "--mc", "200", "--seed", "9")
    a, b = run(*argv), run(*argv)
    assert a == b and a[0] == 0
    table = rows(a[1])
    assert table[0][-2:] == ["mc", "mc_stderr"]
    assert len(table) == 1 + 2 * 5


@pytest.mark.parametrize(
    "argv",
    [
        ["--epsilon", "0", "--t", "1"],
        ["--epsilon", "", "--t", "1"],
        ["--epsilon", "a", "--t", "1"],
        ["--epsilon", "1", "--t", "0"],
        ["--epsilon", "1", "--t", "1", "--steps", "0"],
        ["--epsilon", "1", "--t", "1", "--mc", "500"],
        ["--epsilon", "1", "--t", "1", "--mc", "10", "--seed", "1"],
    ],
)
def test_dephase_invalid(argv):
    assert run("dephase", *argv)[0] == 1


def test_dephase_logs_go_to_stderr(capsys):
    code, out = run("dephase", "--epsilon", "1,0.1", "--t", "1", "--steps", "2", "-v")
    err = capsys.readouterr().err
    assert "small-time coefficient" in err
    assert "coefficient" not in out


# -- markov-limit --------------------------------------------------------------

def test_markov_limit_fit():
    code, out = run("markov-limit", "delta_exponential", "--eps", "1,0.1,0.01", "--starts", "4")
    assert code == 0
    table = rows(out)
    assert table[0] == ["epsilon", "d_eps_at_0", "criterion_value"]
    eps = [float(r[0]) for r in table[1:]]
    d0 = [float(r[1]) for r in table[1:]]
    (a0, b0, c0), res = fit_three_term(eps, d0)
    assert res <= 1e-9
    fam = load_config("delta_exponential").model
    np.testing.assert_allclose([a0, b0, c0], profile_at_zero(fam.profile), atol=1e-9)
    # at eps = 1 the value is a(0) + b(0) + c(0)
    assert d0[0] == pytest.approx(a0 + b0 + c0, rel=1e-12)


def test_markov_limit_pure_inverse_term():
    # the OU profile has a = b = 0, leaving only the c/eps term
    code, out = run("markov-limit", "delta_ou", "--eps", "1,0.1,0.01", "--starts", "4")
    scaled = [float(r[0]) * float(r[1]) for r in rows(out)[1:]]
    assert code == 0
    assert max(scaled) - min(scaled) <= 1e-12 * abs(scaled[0])


def test_markov_limit_errors():
    assert run("markov-limit", "delta_gaussian", "--eps", "")[0] == 1
    assert run("markov-limit", "delta_gaussian", "--eps", "-1")[0] == 1
    assert run("markov-limit", "common_bath", "--eps", "1")[0] == 1


def test_csv_uses_plain_newlines():
    _, out = run("dephase", "--epsilon", "1", "--t", "1", "--steps", "2")
    assert "\r" not in out and out.endswith("\n")
