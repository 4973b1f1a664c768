import json
import subprocess
import sys
from importlib import resources

import pytest

from permred.cli import main
from permred.permanent import per_ryser
from permred.reduce import load_instance

CORPUS = resources.files("permred") / "corpus"


def bf(name):
    return str(CORPUS / f"{name}.bf")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    pairs = {}
    for line in out.splitlines():
        key, _, value = line.partition(" ")
        pairs.setdefault(key, value)
    return code, out, err, pairs


def test_compile_cz(capsys, tmp_path):
    out = tmp_path / "cz.pm.json"
    code, _, _, kv = run(capsys, "compile", bf("cz"), "--out", str(out))
    assert code == 0
    assert (kv["n"], kv["k"], kv["gamma"], kv["m"], kv["N"], kv["b"]) == ("2", "2", "1", "8", "4", "24")
    assert load_instance(out.read_text()).N == 4


def test_compile_const1(capsys, tmp_path):
    out = tmp_path / "c.pm.json"
    run(capsys, "compile", bf("const1"), "--out", str(out))
    inst = load_instance(out.read_text())
    assert inst.N == 1 and inst.A == ((2**inst.b,),)


def test_compile_ccz(capsys, tmp_path):
    code, _, _, kv = run(capsys, "compile", bf("ccz"), "--out", str(tmp_path / "x.pm.json"), "--variant", "y")
    assert code == 0 and kv["N"] == "18" and kv["variant"] == "y"


def test_compile_default_output_path(capsys, tmp_path):
    src = tmp_path / "f.bf"
    src.write_text("n 2\nrepr phasepoly\nterm 1 2\n")
    run(capsys, "compile", str(src))
    assert (tmp_path / "f.pm.json").exists()


def test_permanent_plain_files(capsys, tmp_path):
    eye = tmp_path / "i3.txt"
    eye.write_text("3\n1 0 0\n0 1 0\n0 0 1\n")
    m = tmp_path / "m.txt"
    m.write_text("2\n1 2\n3 4\n")
    assert run(capsys, "permanent", str(eye))[3]["permanent"] == "1"
    assert run(capsys, "permanent", str(m), "--algo", "naive")[3]["permanent"] == "10"


def test_permanent_of_instance_matches_recovery(capsys, tmp_path):
    out = tmp_path / "cz.pm.json"
    run(capsys, "compile", bf("cz"), "--out", str(out))
    inst = load_instance(out.read_text())
    assert run(capsys, "permanent", str(out))[3]["permanent"] == str(per_ryser(inst.A))


@pytest.mark.parametrize("name, want", [("cz", "2"), ("const1", "2"), ("zero", "0"), ("neg4", "-4")])
def test_recover(capsys, tmp_path, name, want):
    out = tmp_path / "x.pm.json"
    run(capsys, "compile", bf(name), "--out", str(out))
    code, _, _, kv = run(capsys, "recover", str(out))
    assert code == 0 and kv["delta"] == want


@pytest.mark.parametrize("name", ["cz", "network_and", "neg2"])
def test_verify_ok(capsys, name):
    code, _, _, kv = run(capsys, "verify", bf(name))
    assert code == 0 and kv["result"] == "OK"
    assert kv["status_w"] == kv["status_y"] == "OK"


def test_signsearch_traces(capsys):
    code, out, err, kv = run(capsys, "signsearch", bf("cz"))
    assert code == 0 and out.splitlines()[-1] == "delta 2"
    assert "Δ_C = 2" in err
    _, out, _, kv = run(capsys, "signsearch", bf("zero"), "--backend", "permanent")
    assert kv["calls"] == "1" and kv["delta"] == "0"
    _, out, _, kv = run(capsys, "signsearch", bf("neg4"))
    assert kv["delta"] == "-4"
    assert [ln for ln in out.splitlines() if ln.startswith("probe")] == ["probe 0 -1", "probe 1 -1", "probe 2 -1", "probe 4 0"]


def test_selftest_quick_passes(capsys):
    code, _, _, kv = run(capsys, "selftest", "--quick")
    assert code == 0 and kv["result"] == "PASS"


def test_selftest_catches_corrupted_w(capsys):
    code, _, _, kv = run(capsys, "selftest", "--quick", "--corrupt-w")
    assert code == 4
    assert kv["ns1_w"] == "FAIL" and kv["csign_w"] == "FAIL" and kv["ns1_y"] == "PASS"


def test_corrupt_flag_is_hidden():
    proc = subprocess.run([sys.executable, "-m", "permred.cli", "selftest", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "corrupt" not in proc.stdout


def test_exit_code_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.bf"
    bad.write_text("n 2\nrepr phasepoly\nterm 1 9\n")
    code, _, err, _ = run(capsys, "compile", str(bad))
    assert code == 2 and "line 3" in err
    assert run(capsys, "recover", str(tmp_path / "missing.pm.json"))[0] == 2


def test_exit_code_budget(capsys, tmp_path):
    out = tmp_path / "x.pm.json"
    run(capsys, "compile", bf("network_and"), "--out", str(out))
    code, _, err, _ = run(capsys, "recover", str(out), "--max-n", "10")
    assert code == 3 and "2^15" in err


def test_exit_code_argparse():
    with pytest.raises(SystemExit) as info:
        main(["compile"])
    assert info.value.code == 2


def test_precision_environment_variable(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PERMRED_PRECISION", "40")
    assert run(capsys, "compile", bf("cz"), "--out", str(tmp_path / "a.json"))[0] == 2
    monkeypatch.setenv("PERMRED_PRECISION", "300")
    code, _, _, kv = run(capsys, "compile", bf("cz"), "--out", str(tmp_path / "b.json"))
    assert code == 0
    monkeypatch.delenv("PERMRED_PRECISION")
    run(capsys, "compile", bf("cz"), "--out", str(tmp_path / "c.json"))
    assert (tmp_path / "b.json").read_bytes() == (tmp_path / "c.json").read_bytes()


def test_compile_is_byte_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.pm.json", tmp_path / "b.pm.json"
    run(capsys, "compile", bf("network_or"), "--out", str(a), "--threads", "1")
    run(capsys, "compile", bf("network_or"), "--out", str(b), "--threads", "4")
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["N"] == 15


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "permred.cli", "compile", bf("cz"), "--out", str(tmp_path / "e.pm.json"), "-q"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "N 4" in proc.stdout and proc.stderr == ""
