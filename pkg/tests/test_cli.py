import json

import numpy as np
import pytest

from state_transport.cli import EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION, main
from state_transport.serialize import encode_vector
from state_transport.suites import random_state


def _write_geodesic_config(path, rng):
    xi = random_state(rng, 4)
    eta = random_state(rng, 4)
    config = {
        "command": "geodesic",
        "xi": encode_vector(xi),
        "eta": encode_vector(eta),
    }
    path.write_text(json.dumps(config))


def test_run_geodesic_pass(tmp_path, rng):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "report.json"
    csv = tmp_path / "path.csv"
    _write_geodesic_config(cfg, rng)
    code = main(["run", "--config", str(cfg), "--out", str(out),
                 "--csv", str(csv)])
    assert code == EXIT_PASS
    report = json.loads(out.read_text())
    assert report["pass"] is True
    assert report["measured"]["terminal_error"] < 1e-8
    lines = csv.read_text().strip().split("\n")
    assert lines[0] == "t,distance_to_target,length_so_far"
    assert len(lines) == 34
    last = lines[-1].split(",")
    assert float(last[1]) < 1e-8  # converged to the target


def test_run_malformed_config(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["run", "--config", str(cfg)]) == EXIT_USAGE


def test_run_unknown_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "nope"}))
    assert main(["run", "--config", str(cfg)]) == EXIT_USAGE


def test_run_missing_field(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "geodesic", "xi": [[1.0, 0.0]]}))
    assert main(["run", "--config", str(cfg)]) == EXIT_USAGE


def test_run_hypothesis_violation_reports(tmp_path):
    # states with different block statistics violate the commutant
    # transport hypothesis; the report records it and the exit code is 1
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "report.json"
    xi = np.array([1.0, 0, 0, 0], dtype=complex)
    eta = np.array([0, 0, 1.0, 0], dtype=complex)
    cfg.write_text(json.dumps({
        "command": "commutant",
        "n": 2,
        "multiplicity": 2,
        "xi": encode_vector(xi),
        "eta": encode_vector(eta),
        "eps": 0.01,
    }))
    code = main(["run", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_VIOLATION
    report = json.loads(out.read_text())
    assert report["pass"] is False
    assert "violated_hypothesis" in report


def test_verify_suite_pass(tmp_path):
    out = tmp_path / "suite.json"
    code = main(["verify", "--suite", "spectrum", "--seed", "7",
                 "--instances", "5", "--out", str(out)])
    assert code == EXIT_PASS
    summary = json.loads(out.read_text())
    assert summary["pass"] is True
    assert summary["instances"] == 5


def test_verify_deterministic_output(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        assert main(["verify", "--suite", "gram", "--seed", "3",
                     "--instances", "8", "--out", str(out)]) == EXIT_PASS
    assert a.read_bytes() == b.read_bytes()


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE
    capsys.readouterr()


def test_bad_suite_name_is_usage_error(capsys):
    assert main(["verify", "--suite", "bogus"]) == EXIT_USAGE
    capsys.readouterr()
