import json
import subprocess
import sys

import pytest

from invchain.cli import Config, main, parse_config, render, run_and_report
from invchain.errors import ConfigError


def strip_times(report):
    out = json.loads(json.dumps(report))
    for c in out["checks"]:
        c.pop("runtime_ms")
    return out


def test_parse_example():
    cmd, cfg = parse_config("verify --char 5 --trunc 6 --depth 3 --seed 42".split())
    assert cmd == "verify"
    assert (cfg.char, cfg.trunc, cfg.depth, cfg.seed) == (5, 6, 3, 42)


def test_parse_defaults():
    cmd, cfg = parse_config("certify --char 0 --depth 5".split())
    assert cmd == "certify" and cfg == Config(char=0, depth=5)


@pytest.mark.parametrize("argv", ["verify --char 4", "verify --trunc 3", "verify --char 1", "verify --samples 0"])
def test_parse_rejects(argv):
    with pytest.raises(ConfigError):
        parse_config(argv.split())


@pytest.mark.parametrize("argv", ["verify --char 4", "verify --trunc 3", "frobnicate", "verify --format xml"])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv.split()) == 2


def test_verify_char2_passes(capsys):
    assert main("verify --char 2 --samples 20".split()) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["overall"] == "pass"
    assert {"command", "config", "window", "checks", "overall"} <= report.keys()
    for c in report["checks"]:
        assert set(c) == {"id", "anchor", "status", "runtime_ms", "witness"}
        assert c["status"] == "pass"
    ids = [c["id"] for c in report["checks"]]
    assert ids == sorted(ids)
    assert report["window"]["max_index"] >= 7


def test_determinism():
    cmd, cfg = parse_config("verify --char 3 --samples 15 --seed 7".split())
    r1, c1 = run_and_report(cmd, cfg)
    r2, c2 = run_and_report(cmd, cfg)
    assert c1 == c2 == 0
    assert strip_times(r1) == strip_times(r2)


def test_seed_changes_samples():
    _, cfg = parse_config("verify --samples 10 --seed 1".split())
    _, cfg2 = parse_config("verify --samples 10 --seed 2".split())
    w1 = {c["id"]: c["witness"] for c in run_and_report("verify", cfg)[0]["checks"]}
    w2 = {c["id"]: c["witness"] for c in run_and_report("verify", cfg2)[0]["checks"]}
    assert w1["04_eq1_random"] != w2["04_eq1_random"] or w1["06_eq2_family"] != w2["06_eq2_family"]


def test_negative_control(capsys):
    assert main("verify --samples 10 --tamper-sigma".split()) == 1
    report = json.loads(capsys.readouterr().out)
    failed = {c["id"] for c in report["checks"] if c["status"] != "pass"}
    assert "01_fixed_points" in failed
    assert report["config"]["tamper_sigma"] is True


def test_certify_n1_residual(capsys):
    assert main("certify --depth 1".split()) == 0
    wit = json.loads(capsys.readouterr().out)["checks"][0]["witness"]
    assert wit["cleared_residual"]["text"] == "a1*a3 - a2^2"
    assert wit["cleared_equals_a1a3_minus_a2sq_up_to_unit"] is True


def test_budget_exceeded_marks_check():
    _, cfg = parse_config("certify --depth 2 --budget 1e-9".split())
    report, code = run_and_report("certify", cfg)
    assert code == 1
    assert all(c["status"] == "failed-budget" for c in report["checks"])


def test_probabilistic_flag_reported():
    _, cfg = parse_config("verify --samples 10 --fast-probabilistic".split())
    report, code = run_and_report("verify", cfg)
    assert code == 0 and report["zero_test"] == "probabilistic"
    report, _ = run_and_report("certify", Config(depth=1, fast_probabilistic=True))
    assert report["zero_test"] == "exact"


def test_bench_runs():
    report, code = run_and_report("bench", Config(depth=3))
    assert code == 0 and len(report["checks"]) == 3


def test_text_format():
    report, _ = run_and_report("certify", Config(depth=2))
    text = render(report, "text")
    assert text.splitlines()[-1] == "overall: pass"
    assert "[PASS] cert_n01" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "invchain", "verify", "--char", "4"], capture_output=True, text=True)
    assert proc.returncode == 2 and "config error" in proc.stderr
