import json

import pytest

from qtorus.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_uqg_a1(capsys):
    code, out, err = run(capsys, "verify", "--family", "uqg", "--type", "A", "--rank", "1", "--m", "1", "--lattice", "adjoint", "--mode", "symbolic")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["report"]["status"] == "pass"
    assert "runtime_seconds" not in doc
    assert "pass:" in err


def test_negative_l_exit_2(capsys):
    code, _, err = run(capsys, "verify", "--family", "yangian", "--type", "A", "--rank", "2", "--m", "1,3")
    assert code == 2 and "NegativeL" in err


def test_modes_exit_0(capsys):
    code, out, _ = run(capsys, "verify", "--family", "qaffine", "--type", "A", "--rank", "1", "--m", "1", "--mode", "modes", "--truncation", "8")
    assert code == 0
    results = json.loads(out)["report"]["instances"]
    assert all(r["detail"]["modes_checked"] > 0 for r in results)


def test_rank_zero_exit_2(capsys):
    assert run(capsys, "print-generators", "--family", "uqg", "--type", "A", "--rank", "0", "--m", "")[0] == 2


def test_bad_flag_exit_2(capsys):
    assert run(capsys, "verify", "--family", "nope")[0] == 2
    assert run(capsys, "verify", "--family", "yangian", "--matrix", "2,0;-1,2", "--m", "1,1")[0] == 2


def test_mutation_exit_1(capsys, monkeypatch):
    monkeypatch.setenv("QTORUS_INJECT_MUTATION", "drop-factor")
    code, out, _ = run(capsys, "verify", "--family", "qaffine", "--type", "A", "--rank", "1", "--m", "1")
    assert code == 1
    fails = [r for r in json.loads(out)["report"]["instances"] if r["status"] == "fail"]
    assert fails and all(r["residual"] for r in fails)


def test_determinism(capsys, tmp_path):
    argv = ["verify", "--family", "uqg", "--type", "B", "--rank", "2", "--m", "1,1", "--lattice", "simply-connected", "--mode", "random", "--seeds", "3", "--trials", "3", "--seed", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_round_trip(capsys, tmp_path):
    cfg = RunConfig(family="qaffine", type="A", rank=1, m=[1], rsplit=[[1]], nu={"w_1_1": "2"})
    assert RunConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_json()))
    code, out, _ = run(capsys, "verify", "--config", str(path))
    assert code == 0
    assert RunConfig.from_json(json.loads(out)["run_config"]) == cfg


def test_unknown_config_key(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"family": "uqg", "colour": 1}))
    assert run(capsys, "verify", "--config", str(path))[0] == 2


def test_print_generators_yangian(capsys):
    code, out, _ = run(capsys, "print-generators", "--family", "yangian", "--type", "A", "--rank", "1", "--m", "1")
    assert code == 0
    assert out.startswith("H_1(u) = ")
    assert "E_1(u)" in out and "F_1(u)" in out


def test_print_generators_qaffine_json(capsys):
    code, out, _ = run(capsys, "print-generators", "--family", "qaffine", "--type", "A", "--rank", "1", "--m", "1", "--format", "json")
    assert code == 0
    gens = json.loads(out)["generators"]
    assert set(gens) == {"K_1(z)", "E_1(z)", "F_1(z)"}
    assert "delta" in gens["E_1(z)"]["text"]


def test_selfcheck(capsys):
    code, out, _ = run(capsys, "selfcheck", "--seed", "1")
    assert code == 0
    first = out
    run(capsys, "selfcheck", "--seed", "1")
    assert main(["selfcheck", "--seed", "1"]) == 0
    assert capsys.readouterr().out == first


def test_selfcheck_mutation(capsys, monkeypatch):
    monkeypatch.setenv("QTORUS_INJECT_MUTATION", "wrong-shift")
    code, out, _ = run(capsys, "selfcheck")
    assert code == 1
    assert json.loads(out)["status"] == "fail"
