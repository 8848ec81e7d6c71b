import json
import subprocess
import sys

import numpy as np
import pytest

from qconnect import rank2_unipotent_p, system_to_dict
from qconnect.cli import decode_complex, main, parse_grid

from conftest import unipotent_system


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def values(out):
    return decode_complex(json.loads(out)["outputs"]["values"])


@pytest.fixture
def system_file(tmp_path):
    p = tmp_path / "uni.json"
    p.write_text(json.dumps(system_to_dict(unipotent_system(4)[0])))
    return str(p)


def test_special_examples(capsys):
    code, out, _ = run(["special", "qchar", "--q", "4", "--c", "4", "--z", "0.7"], capsys)
    assert code == 0 and abs(values(out)[0] - 0.7) < 1e-10
    code, out, _ = run(["special", "phi", "--c", "1", "--d", "2.5", "--z", "1.3"], capsys)
    assert code == 0 and abs(values(out)[0] - 1) < 1e-12
    code, out, _ = run(["special", "theta", "--q", "4", "--z", "-1"], capsys)
    assert code == 0 and abs(values(out)[0]) < 1e-10


def test_document_shape_and_determinism(capsys):
    argv = ["special", "qlog", "--tau", "0.1+0.3j", "--z", "0.5+0.2j", "--z", "2"]
    _, out1, _ = run(argv, capsys)
    _, out2, _ = run(argv, capsys)
    assert out1 == out2
    doc = json.loads(out1)
    assert set(doc) == {"command", "parameters", "outputs", "diagnostics"}
    assert doc["command"] == argv
    assert doc["diagnostics"]["tol_target"] == 1e-15
    assert len(doc["outputs"]["values"]) == 2
    # pairs round-trip to complex values
    z = decode_complex(doc["outputs"]["points"])
    assert np.allclose(z, [0.5 + 0.2j, 2])


def test_csv_grid(capsys):
    code, out, _ = run(["special", "theta", "--q", "4", "--grid", "1,4,5,log", "--csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "z_re,z_im,value_re,value_im" and len(lines) == 6


def test_grid_parser():
    assert np.allclose(parse_grid("1,3,3,linear"), [1, 2, 3])
    assert np.allclose(parse_grid("1,100,3,log"), [1, 10, 100])


def test_exit_codes(capsys):
    assert run(["special", "theta", "--q", "0.5", "--z", "1"], capsys)[0] == 1
    assert run(["special", "qlog", "--q", "4", "--z", "-4"], capsys)[0] == 2
    assert run(["special", "qchar", "--q", "4", "--z", "1"], capsys)[0] == 1
    assert run(["nonsense"], capsys)[0] == 1
    assert run(["special", "theta", "--z", "abc"], capsys)[0] == 1
    assert run(["reduce", "--system", "/does/not/exist.json"], capsys)[0] == 1


def test_max_terms_env(capsys, monkeypatch):
    monkeypatch.setenv("QCONNECT_MAX_TERMS", "50")
    code, out, _ = run(["special", "theta", "--q", "4", "--z", "1"], capsys)
    assert code == 0 and json.loads(out)["diagnostics"]["max_terms"] == 50
    monkeypatch.setenv("QCONNECT_MAX_TERMS", "500")
    assert run(["special", "theta", "--q", "4", "--z", "1"], capsys)[0] == 1


def test_reduce(system_file, capsys):
    code, out, _ = run(["reduce", "--system", system_file, "--z", "0.3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["outputs"]["strictly_fuchsian"]
    assert doc["outputs"]["series_0"]["max_recurrence_residual"] < 1e-10
    assert doc["outputs"]["series_inf"]["K"] == 40


def test_connect(system_file, capsys):
    code, out, _ = run(["connect", "--system", system_file, "--z", "0.7+0.2j", "--what", "M,P,pbreve,gamma"], capsys)
    doc = json.loads(out)
    assert code == 0
    M = decode_complex(doc["outputs"]["M"][0])
    _, a = unipotent_system(4)
    assert abs(M[0, 1] - rank2_unipotent_p(a, 0.7 + 0.2j, 4)) < 1e-6
    assert max(doc["outputs"]["ellipticity_residuals"]) < 1e-8
    assert run(["connect", "--system", system_file, "--z", "4j"], capsys)[0] == 2


def test_flat(capsys):
    code, out, _ = run(["flat", "plethysm", "--n", "3", "--p", "3"], capsys)
    assert code == 0 and json.loads(out)["outputs"]["blocks"] == [5, 3, 1]
    code, out, _ = run(["flat", "dunford", "--matrix", "[[2,1],[0,2]]"], capsys)
    u = decode_complex(json.loads(out)["outputs"]["u"])
    assert np.allclose(u, [[1, 0.5], [0, 1]])
    code, out, _ = run(["flat", "naturality", "--q", "4", "--matrix", "[[1]]", "--target", "[[4]]",
                        "--alpha", "1", "--beta", "2", "--z0", "0.5"], capsys)
    assert code == 0 and max(json.loads(out)["outputs"]["naturality_residuals"]) < 1e-10
    assert run(["flat", "act", "--matrix", "[[1, 2]]"], capsys)[0] == 1


def test_confluence(capsys):
    code, out, _ = run(["confluence", "char", "--z", "0.5+0.8660254037844386j", "--csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "eps,probe,error" and len(lines) == 7
    assert abs(float(lines[-1].split(",")[2]) - 0.001236456556187252) < 1e-9
    code, out, _ = run(["confluence", "localgen", "--family", "diag"], capsys)
    assert code == 0 and len(json.loads(out)["outputs"]["gamma2_errors"]) == 6
    assert run(["confluence", "log", "--z", "-1"], capsys)[0] == 1


def test_selftest(capsys):
    code, out, _ = run(["selftest"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["outputs"]["passed"]
    assert {c["module"] for c in doc["outputs"]["checks"]} >= {"thetafn", "connection", "confluence"}
    code, out, _ = run(["selftest", "--filter", "thetafn"], capsys)
    assert {c["module"] for c in json.loads(out)["outputs"]["checks"]} == {"thetafn"}


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "qconnect.cli", "special", "theta", "--q", "4", "--z", "-1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["outputs"]["values"] == [[0.0, 0.0]]
