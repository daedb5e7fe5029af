import json
import math
import subprocess
import sys

import numpy as np
import pytest

from glome import geodesics as geo
from glome.cli import main

FAST = ["--samples", "60", "--seed", "0"]
FAST_VERIFY = FAST + ["--trajectories", "2"]

REFERENCE_TABLE = [
    ["zero", "-chi6", "-chi4", "+chi3", "zero", "+chi2"],
    ["+chi6", "zero", "-chi5", "zero", "+chi3", "-chi1"],
    ["+chi4", "+chi5", "zero", "-chi1", "-chi2", "zero"],
    ["-chi3", "zero", "+chi1", "zero", "-chi6", "+chi5"],
    ["zero", "-chi3", "+chi2", "+chi6", "zero", "-chi4"],
    ["-chi2", "+chi1", "zero", "-chi5", "+chi4", "zero"],
]


def read_json(path):
    return json.loads(path.read_text())


def test_verify_passes_and_reproduces_table(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", *FAST_VERIFY, "--out", str(out)])
    assert code == 0
    report = read_json(out)
    assert report["passed"] is True
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names))
    by_name = {c["name"]: c for c in report["checks"]}
    table = by_name["bracket_table"]["table"]["entries"]
    grid = [[cell["id"] for cell in row] for row in table]
    assert grid == REFERENCE_TABLE
    for check in report["checks"]:
        assert {"name", "passed", "max_residual", "tolerance"} <= set(check)


def test_verify_reports_are_byte_identical(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["verify", *FAST_VERIFY, "--out", str(out1)]) == 0
    assert main(["verify", *FAST_VERIFY, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_verify_zero_tolerances_fail(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", *FAST_VERIFY, "--tol-all", "0", "--out", str(out)])
    assert code == 1
    report = read_json(out)
    assert report["passed"] is False
    for check in report["checks"]:
        assert check["passed"] is False


def test_verify_single_tolerance_override(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", *FAST_VERIFY, "--tol", "noether_drift=1e-30",
                 "--out", str(out)])
    assert code == 1
    by_name = {c["name"]: c for c in read_json(out)["checks"]}
    assert by_name["noether_drift"]["passed"] is False
    assert by_name["variational_criterion"]["passed"] is True


def test_verify_rejects_bad_config():
    assert main(["verify", "--step", "0.5"]) == 2
    assert main(["verify", "--margin", "3.2"]) == 2
    assert main(["verify", "--samples", "0"]) == 2
    assert main(["verify", "--tol", "nonsense"]) == 2
    assert main(["verify", "--tol", "unknown_check=1"]) == 2


def test_brackets_json(tmp_path):
    out = tmp_path / "table.json"
    code = main(["brackets", "--samples", "600", "--out", str(out)])
    assert code == 0
    table = read_json(out)["entries"]
    grid = [[cell["id"] for cell in row] for row in table]
    assert grid == REFERENCE_TABLE


def test_integrate_constant_state(tmp_path):
    out = tmp_path / "flat.csv"
    code = main(["integrate", "--initial", "0,0,0,0,0", "--x-end", "0.5",
                 "--out", str(out)])
    assert code == 0
    traj = geo.Trajectory.from_csv(out)
    assert np.max(np.abs(traj.samples[:, 1])) < 1e-15
    assert np.max(np.abs(traj.samples[:, 2])) < 1e-15
    sidecar = read_json(out.with_suffix(".json"))
    assert sidecar["status"] == "ok"
    assert sidecar["k"] == 0.0


def test_integrate_sidecar_diagnostics(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(["integrate", "--initial", "0,0,0,0.4,0.7", "--x-end", "0.8",
                 "--out", str(out)])
    assert code == 0
    sidecar = read_json(out.with_suffix(".json"))
    assert sidecar["noether_drift"] < 1e-8
    assert sidecar["oracle_endpoint_error"] < 1e-7
    assert sidecar["samples"] == 801


def test_integrate_domain_exit_flagged(tmp_path):
    out = tmp_path / "exit.csv"
    code = main(["integrate", "--initial", "1.4,0,0,0,0", "--x-end", "1.55",
                 "--out", str(out)])
    assert code == 1
    sidecar = read_json(out.with_suffix(".json"))
    assert sidecar["status"] == "DomainExit"
    traj = geo.Trajectory.from_csv(out)  # partial trajectory was written
    assert len(traj) > 1
    assert traj.x[-1] < 1.55


def test_integrate_domain_exit_via_runaway_slope(tmp_path):
    out = tmp_path / "steep.csv"
    code = main(["integrate", "--initial", "0,1.4,0,5,0", "--x-end", "0.5",
                 "--out", str(out)])
    assert code == 1
    assert read_json(out.with_suffix(".json"))["status"] == "DomainExit"


def test_integrate_rejects_bad_initial():
    assert main(["integrate", "--initial", "0,0,0,0", "--x-end", "0.5"]) == 2
    assert main(["integrate", "--initial", "2.0,0,0,0,0", "--x-end", "0.5"]) == 2


def test_reduce_pipeline(tmp_path):
    csv_path = tmp_path / "traj.csv"
    assert main(["integrate", "--initial", "0,0,0,0.4,0.7", "--x-end", "0.8",
                 "--out", str(csv_path)]) == 0
    out = tmp_path / "reduction.json"
    assert main(["reduce", str(csv_path), "--out", str(out)]) == 0
    report = read_json(out)
    assert report["alpha_rel_dev"] < 1e-5
    assert report["branch"] in ("+", "-")
    assert report["samples"] + report["excluded_rows"] == 801


def test_reduce_planar_reports_k_zero(tmp_path):
    csv_path = tmp_path / "planar.csv"
    assert main(["integrate", "--initial", "0,0.3,1.0,0.4,0", "--x-end", "0.8",
                 "--out", str(csv_path)]) == 0
    out = tmp_path / "reduction.json"
    assert main(["reduce", str(csv_path), "--out", str(out)]) == 0
    assert read_json(out)["k"] == 0.0


def test_reduce_empty_csv_is_usage_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["reduce", str(empty)]) == 2
    missing = tmp_path / "missing.csv"
    assert main(["reduce", str(missing)]) == 2


def test_flow_json(tmp_path):
    out = tmp_path / "flow.json"
    code = main(["flow", "--point", "0.5,0.3", "--lambda", "0.2",
                 "--out", str(out)])
    assert code == 0
    payload = read_json(out)
    assert abs(payload["omega_residual"]) < 1e-12
    assert abs(payload["tau_shift_residual"]) < 1e-9
    X, Y = payload["image"]
    assert abs(X) < math.pi / 2 and abs(Y) < math.pi / 2


def test_flow_prints_image(capsys):
    code = main(["flow", "--point", "0.5,0.3", "--lambda", "0.0"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    values = {line.split("=")[0].strip(): line.split("=")[1].strip() for line in lines}
    assert abs(float(values["X"]) - 0.5) < 1e-15
    assert abs(float(values["Y"]) - 0.3) < 1e-15


def test_flow_rejects_bad_point():
    assert main(["flow", "--point", "0.5", "--lambda", "0.1"]) == 2
    assert main(["flow", "--point", "2.0,0.3", "--lambda", "0.1"]) == 2


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "glome.cli", "flow", "--point", "0.4,0.2",
         "--lambda", "0.1", "--json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["point"] == [0.4, 0.2]
