"""End-to-end CLI behaviour: subcommands, artifacts, exit codes."""

import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "banditlab.cli"]


def run_cli(*args):
    return subprocess.run(CLI + list(args), capture_output=True, text=True)


def test_list_builtins_prints_the_catalog():
    proc = run_cli("list-builtins")
    assert proc.returncode == 0
    names = proc.stdout.split()
    assert "ucb-fixed-T" in names
    assert len(names) >= 13


def test_run_builtin_writes_artifacts(tmp_path):
    proc = run_cli("run-builtin", "example4-argmax", "--reps", "60", "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    raw = tmp_path / "example4-argmax-raw.csv"
    summary = tmp_path / "example4-argmax-summary.json"
    assert raw.exists() and summary.exists()
    assert str(raw) in proc.stdout and str(summary) in proc.stdout
    doc = json.loads(summary.read_text())
    assert doc["scenario"] == "example4-argmax"
    assert doc["report"]["reps"] == 60


def test_run_with_config_file_and_overrides(tmp_path):
    config = {
        "name": "tiny",
        "arms": [{"family": "bernoulli", "p": 0.5}, {"family": "bernoulli", "p": 0.5}],
        "sampling": {"rule": "round-robin"},
        "stopping": {"rule": "fixed-horizon", "horizon": 4},
        "choosing": {"rule": "argmax-mean"},
        "reps": 999,
    }
    cfg_path = tmp_path / "tiny.json"
    cfg_path.write_text(json.dumps(config))
    proc = run_cli("run", "--config", str(cfg_path), "--reps", "25", "--seed", "7", "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    doc = json.loads((tmp_path / "tiny-summary.json").read_text())
    assert doc["report"]["reps"] == 25


def test_summarize_stdout_matches_the_written_summary(tmp_path):
    run_cli("run-builtin", "example1-geometric", "--reps", "40", "--out", str(tmp_path))
    proc = run_cli("summarize", str(tmp_path / "example1-geometric-raw.csv"))
    assert proc.returncode == 0
    assert proc.stdout == (tmp_path / "example1-geometric-summary.json").read_text()


def test_certify_writes_verdicts_and_prints_counts(tmp_path):
    proc = run_cli(
        "certify", "--rule-set", "sampling-greedy", "--sweeps", "3", "--out", str(tmp_path)
    )
    assert proc.returncode == 0, proc.stderr
    assert "sampling-greedy: 3 passed, 0 failed, 0 inconclusive" in proc.stdout
    assert (tmp_path / "certification.csv").exists()


def test_certify_all_covers_every_rule_set(tmp_path):
    proc = run_cli("certify", "--rule-set", "all", "--sweeps", "1", "--out", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    assert len([l for l in proc.stdout.splitlines() if " passed, " in l]) >= 13


@pytest.mark.parametrize(
    "args",
    [
        ("run-builtin", "no-such-scenario", "--out", "/tmp/x"),
        ("certify", "--rule-set", "no-such-set", "--out", "/tmp/x"),
        ("run-builtin", "example4-argmax", "--reps", "0", "--out", "/tmp/x"),
        ("run-builtin", "example4-argmax", "--threads", "0", "--out", "/tmp/x"),
    ],
)
def test_validation_problems_exit_2(args):
    proc = run_cli(*args)
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_bad_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "arms": [], "sampling": {}, "stopping": {}, "choosing": {}}')
    proc = run_cli("run", "--config", str(bad), "--out", str(tmp_path))
    assert proc.returncode == 2
    assert "arms" in proc.stderr


def test_malformed_raw_csv_exits_2(tmp_path):
    junk = tmp_path / "junk.csv"
    junk.write_text("not,a,raw,file\n1,2,3,4\n")
    proc = run_cli("summarize", str(junk))
    assert proc.returncode == 2
    assert ":1" in proc.stderr


def test_io_failures_exit_3(tmp_path):
    proc = run_cli("summarize", str(tmp_path / "missing.csv"))
    assert proc.returncode == 3
    proc = run_cli("run-builtin", "example4-argmax", "--reps", "5", "--out", "/dev/null/out")
    assert proc.returncode == 3


def test_reps_override_changes_only_the_replication_count(tmp_path):
    run_cli("run-builtin", "example4-argmax", "--reps", "30", "--out", str(tmp_path / "a"))
    run_cli("run-builtin", "example4-argmax", "--reps", "30", "--out", str(tmp_path / "b"))
    a = (tmp_path / "a" / "example4-argmax-raw.csv").read_bytes()
    b = (tmp_path / "b" / "example4-argmax-raw.csv").read_bytes()
    assert a == b
