import json

import pytest

from heckezeta.cli import parse_complex, run_command


def _run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert parse_complex("0.5+9.5337i") == complex(0.5, 9.5337)
    assert parse_complex("2") == 2
    assert parse_complex("-3i") == -3j
    with pytest.raises(ValueError):
        parse_complex("two")


def test_info_q5(capsys):
    code, out, _ = _run(capsys, "info", "--q", "5")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["lambda"] == pytest.approx(1.618034, abs=1e-6)
    assert res["minimal_polynomial"] == "x^2-x-1"
    assert res["m"] == 3 and res["parity"] == "odd"


def test_header_echoes_config(capsys):
    _, out, _ = _run(capsys, "--seed", "7", "info", "--q", "4")
    header = json.loads(out)["header"]
    assert header["config"]["seed"] == 7 and header["config"]["q"] == 4
    assert header["version"] and header["numpy"]


def test_verify_algebra(capsys):
    code, _, err = _run(capsys, "verify", "--suite", "algebra", "--q", "3")
    assert code == 0
    assert "PASS" in err


def test_det_near_q3_odd_zero(capsys):
    code, out, _ = _run(capsys, "det", "--q", "3", "--parity", "minus", "--s", "0.5+9.5337i", "--dim", "40")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["abs"] < 1e-3
    assert doc["header"]["config"]["dim"] == 40


def test_zeta_names(capsys):
    for which in ("Z", "Zplus", "Zminus", "ZVplus", "ZVminus", "Zcplus", "Zcminus"):
        code, out, _ = _run(capsys, "zeta", "--q", "4", "--s", "3", "--which", which, "--X", "200")
        assert code == 0, which
        assert json.loads(out)["result"]["which"] == which


def test_usage_errors_exit_2(capsys):
    assert _run(capsys, "det", "--q", "3", "--s", "abc")[0] == 2
    assert _run(capsys, "frobnicate")[0] == 2
    assert _run(capsys, "info", "--q", "2")[0] == 2
    assert _run(capsys, "det", "--q", "3")[0] == 2


def test_computational_error_exit_1(capsys):
    code, _, err = _run(capsys, "zeta", "--q", "5", "--s", "2", "--which", "Zcplus")
    assert code == 1
    msg = json.loads(err.strip().splitlines()[-1])
    assert msg["error"] == "DomainError"


def test_precision_other_than_binary64(capsys, monkeypatch):
    monkeypatch.setenv("HECKEZETA_PRECISION", "113")
    assert _run(capsys, "info", "--q", "3")[0] == 1


def test_dim_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("HECKEZETA_DIM", "12")
    _, out, _ = _run(capsys, "det", "--q", "4", "--s", "2")
    assert json.loads(out)["header"]["config"]["dim"] == 12


def test_config_file_under_flags(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"s": "2+1i", "dim": 16, "parity": "plus"}))
    _, out, _ = _run(capsys, "--config", str(cfg), "det", "--q", "4", "--dim", "12")
    conf = json.loads(out)["header"]["config"]
    assert conf["dim"] == 12
    assert conf["params"]["parity"] == "plus"
    assert complex(conf["params"]["s"]) == 2 + 1j


def test_identical_config_identical_files(tmp_path):
    path = tmp_path / "scan.csv"
    args = ["--format", "csv", "--output", str(path), "scan", "--q", "4", "--t-max", "1.0", "--mode", "line", "--dim", "12"]
    runs = []
    for _ in range(2):
        assert run_command(args) == 0
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]
    lines = runs[0].decode().splitlines()
    assert lines[0].startswith("# ") and lines[1] == "t,re,im,abs,arg"


def test_maps_dump(capsys):
    code, out, _ = _run(capsys, "maps", "--q", "4", "--system", "FQ_even", "--parity", "minus")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["name"] == "FQ_even" and res["branches"]


def test_words_and_classes_csv(capsys):
    code, out, _ = _run(capsys, "--format", "csv", "words", "--q", "3", "--alphabet", "GQ", "--length", "1", "--max-exp", "2")
    assert code == 0 and len(out.strip().splitlines()) == 2 + 4
    code, out, _ = _run(capsys, "--format", "csv", "classes", "--q", "3", "--X", "7")
    assert code == 0 and out.strip().splitlines()[-1].startswith("g1 g2,")
