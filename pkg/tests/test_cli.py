from pathlib import Path

import pytest

from qorch.cli import cli_main

BELL = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q -> c;
"""


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.qasm"
    path.write_text(BELL, encoding="utf-8")
    return path


def test_backends_list(capsys):
    assert cli_main(["backends", "list"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 2
    assert out[0].startswith("statevec ")
    assert out[1].startswith("mock-hw ")


def test_submit_writes_report(tmp_path, bell_file):
    out_dir = tmp_path / "run"
    code = cli_main(
        [
            "submit", str(bell_file), "--shots", "100", "--seed", "7",
            "--model", "per_job", "--app-nodes", "1", "--sim-nodes", "2",
            "--out", str(out_dir),
        ]
    )
    assert code == 0
    assert (out_dir / "report.txt").exists()
    assert (out_dir / "events.log").exists()
    assert (out_dir / "config.ini").exists()
    text = (out_dir / "report.txt").read_text()
    assert "scenario submit" in text
    assert "status ok" in text


def test_unknown_flag_exits_one(capsys):
    assert cli_main(["submit", "x.qasm", "--bogus"]) == 1
    assert "usage error" in capsys.readouterr().err


def test_missing_file_exits_two(capsys, tmp_path):
    assert cli_main(["submit", str(tmp_path / "none.qasm")]) == 2


def test_scenario_report_roundtrip(tmp_path, capsys):
    out_dir = tmp_path / "sc"
    code = cli_main(
        ["scenario", "single_circuit", "--n", "3", "--shots", "500",
         "--seed", "3", "--out", str(out_dir)]
    )
    assert code == 0
    capsys.readouterr()
    assert cli_main(["report", str(out_dir)]) == 0
    rendered = capsys.readouterr().out
    assert "scenario: single_circuit" in rendered
    assert "answer:" in rendered


def test_scenario_determinism_two_invocations(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    for out in (a_dir, b_dir):
        assert cli_main(
            ["scenario", "ensemble", "--k", "3", "--n", "3", "--layers", "1",
             "--shots", "400", "--seed", "11", "--out", str(out)]
        ) == 0
    a = (a_dir / "report.txt").read_bytes()
    b = (b_dir / "report.txt").read_bytes()
    assert a == b
    assert (a_dir / "events.log").read_bytes() == (b_dir / "events.log").read_bytes()


def test_workflow_command(tmp_path, bell_file):
    flow = tmp_path / "flow.ini"
    flow.write_text(
        "[stage:prepare]\nkind = quantum\nqasm = bell.qasm\nshots = 400\n\n"
        "[stage:check]\nkind = classical\nop = threshold_count\nargs = 11, 0.4\n",
        encoding="utf-8",
    )
    out_dir = tmp_path / "wf"
    assert cli_main(["workflow", str(flow), "--out", str(out_dir)]) == 0
    text = (out_dir / "report.txt").read_text()
    assert "stage check" in text
    assert "value=True" in text


def test_custom_config_flag(tmp_path, bell_file):
    cfg = tmp_path / "sys.ini"
    cfg.write_text(
        "[cluster]\nnodes = 4\ndevice = sv\n\n"
        "[backend:sv]\nkind = state_vector\nmax_qubits = 20\n",
        encoding="utf-8",
    )
    out_dir = tmp_path / "run"
    code = cli_main(
        ["--config", str(cfg), "submit", str(bell_file), "--shots", "50",
         "--out", str(out_dir)]
    )
    assert code == 0
    assert "backend=sv" in (out_dir / "report.txt").read_text()


def test_in_sequence_scenario_cli(tmp_path):
    out_dir = tmp_path / "seq"
    code = cli_main(
        ["scenario", "in_sequence", "--theta", "1.5707963267948966",
         "--shots", "4000", "--seed", "5", "--out", str(out_dir)]
    )
    assert code == 0
    assert "iteration 0" in (out_dir / "report.txt").read_text()
