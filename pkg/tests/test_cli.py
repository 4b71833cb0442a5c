import json

import numpy as np
import pytest

from conftest import rand_kraus_map
from mapnet import io
from mapnet.cli import main


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def werner_file(tmp_path, run):
    path = tmp_path / "w.json"
    assert run("generate", "werner", "--p", 0.6, "--out", path)[0] == 0
    return path


def test_generate_families(tmp_path, run):
    for args in (["werner", "--p", 0.2], ["isotropic", "--F", 0.5, "--d", 3], ["bell", "--index", 3],
                 ["random", "--dims", 2, 3, "--seed", 4], ["product", "--seed", 1]):
        code, out, _ = run("generate", *args)
        assert code == 0
        rho, meta = io.state_from_json(json.loads(out))
        assert meta["generator"] == args[0]


def test_generate_missing_parameter(run):
    code, _, err = run("generate", "werner")
    assert code == 1 and "--p" in err


def test_detect_ppt_exact(werner_file, run):
    code, out, _ = run("detect", "--criterion", "ppt", "--state", werner_file)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "entangled"
    assert abs(rep["statistic"] + 0.2) < 1e-10
    assert rep["state"]["params"] == {"p": 0.6}


def test_detect_text_and_not_detected(tmp_path, run):
    path = tmp_path / "w.json"
    run("generate", "werner", "--p", 0.2, "--out", path)
    code, out, _ = run("detect", "--criterion", "ppt", "--state", path, "--text")
    assert code == 0 and "verdict: not_detected" in out


def test_detect_realignment(tmp_path, run):
    path = tmp_path / "b.json"
    run("generate", "bell", "--out", path)
    code, out, _ = run("detect", "--criterion", "realignment", "--state", path)
    assert code == 0 and abs(json.loads(out)["statistic"] - 2) < 1e-7


def test_detect_with_map_file(tmp_path, werner_file, run):
    mpath = tmp_path / "m.json"
    mpath.write_text(io.dumps(io.map_to_json(rand_kraus_map(np.random.default_rng(1), 2))))
    code, out, _ = run("detect", "--criterion", "positive_map", "--map", f"file:{mpath}", "--state", werner_file)
    assert code == 0 and json.loads(out)["criterion"]["kind"] == "positive_map"
    code, _, err = run("detect", "--criterion", "positive_map", "--state", werner_file)
    assert code == 1 and "--map" in err


def test_shots_reports_byte_identical(tmp_path, werner_file, run):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("detect", "--criterion", "ppt", "--state", werner_file, "--shots", 2000, "--seed", 7,
                   "--out", out)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_moments_formats(tmp_path, run):
    path = tmp_path / "s.json"
    run("generate", "bell", "--index", 3, "--out", path)
    code, out, _ = run("moments", "--map", "partial_transpose", "--state", path, "--csv")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0].startswith("k,alpha_exact")
    alphas = [float(r.split(",")[2]) for r in rows[1:]]
    assert np.allclose(alphas, [1, 1, 0.25, 0.25], atol=1e-10)
    code, out, _ = run("moments", "--map", "reduction", "--state", path, "--k-max", 2)
    assert code == 0 and len(json.loads(out)["moments"]) == 2
    code, out, _ = run("moments", "--map", "partial_transpose", "--state", path, "--text", "--k-max", 1)
    assert code == 0 and out.startswith("map ")


def test_network_export(run):
    code, out, _ = run("network", "--map", "partial_transpose", "--k", 2, "--dims", 2, 2, "--include-ua")
    obj = json.loads(out)
    assert code == 0 and obj["k"] == 2 and "u_a" in obj
    assert np.max(np.abs(io.unitary_from_network_json(obj) - io.matrix_from_json(obj["u_a"]))) < 1e-10


def test_invalid_state_exit_1(tmp_path, run):
    path = tmp_path / "bad.json"
    obj = io.state_to_json(io.state_from_json(json.loads(run("generate", "bell")[1]))[0])
    obj["matrix"][0][0][0] += 0.5
    path.write_text(json.dumps(obj))
    code, _, err = run("detect", "--criterion", "ppt", "--state", path)
    assert code == 1 and "trace" in err
    code, _, err = run("detect", "--criterion", "ppt", "--state", tmp_path / "missing.json")
    assert code == 1


def test_size_cap_exit_2(werner_file, run, monkeypatch):
    monkeypatch.setenv("MAPNET_NETWORK_CAP", "8")
    code, _, err = run("detect", "--criterion", "ppt", "--state", werner_file, "--shots", 100)
    assert code == 2 and "cap" in err
