import json
import os
import subprocess
import sys

from jsonschema import validate

from accellab._artifacts import SCHEMAS
from accellab.cli import main


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env.pop("LAB_OUT_DIR", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "accellab.cli", *args],
        capture_output=True, text=True, env=env,
    )


class TestMethodRun:
    def test_deterministic_artifacts(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        base = ["method-run", "--method", "gd", "--problem", "random-quadratic:5",
                "--iters", "100", "--seed", "7"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--out", str(b)]) == 0
        for name in ("run.csv", "snapshots.jsonl", "report.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_artifacts_and_report(self, tmp_path):
        out = tmp_path / "o"
        code = main(["method-run", "--method", "nag-3seq", "--problem", "segment2d",
                     "--seq", "linear", "--iters", "500", "--out", str(out)])
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        validate(rep, SCHEMAS["report"])
        assert rep["passed"] is True
        rate_checks = [c for c in rep["checks"] if c["check_id"].startswith("rate")]
        assert rate_checks and all(c["passed"] for c in rate_checks)
        header = (out / "run.csv").read_text().splitlines()[0]
        assert header.startswith("k,gap,grad_norm,E_m0")
        for line in (out / "snapshots.jsonl").read_text().splitlines():
            validate(json.loads(line), SCHEMAS["snapshot_line"])

    def test_gd_has_no_energy_columns(self, tmp_path):
        out = tmp_path / "o"
        assert main(["method-run", "--method", "gd", "--problem", "quad-iso",
                     "--iters", "10", "--out", str(out)]) == 0
        assert (out / "run.csv").read_text().splitlines()[0] == "k,gap,grad_norm"

    def test_usage_errors(self, tmp_path):
        out = str(tmp_path / "o")
        assert main(["method-run", "--method", "gd", "--problem", "quad-iso",
                     "--iters", "0", "--out", out]) == 2
        assert main(["method-run", "--method", "gd", "--problem", "no-such",
                     "--iters", "5", "--out", out]) == 2
        assert main(["method-run", "--method", "ogm-3seq", "--problem", "quad-iso",
                     "--seq", "linear", "--iters", "5", "--out", out]) == 2
        assert main(["method-run", "--method", "warp", "--problem", "quad-iso",
                     "--iters", "5", "--out", out]) == 2

    def test_out_dir_required_without_env(self, tmp_path, monkeypatch):
        monkeypatch.delenv("LAB_OUT_DIR", raising=False)
        assert main(["method-run", "--method", "gd", "--problem", "quad-iso",
                     "--iters", "5"]) == 2

    def test_lab_out_dir_env_default(self, tmp_path):
        out = tmp_path / "env_out"
        proc = run_cli(["method-run", "--method", "gd", "--problem", "quad-iso",
                        "--iters", "5"], env_extra={"LAB_OUT_DIR": str(out)})
        assert proc.returncode == 0
        assert (out / "run.csv").exists()


class TestOdeRun:
    def test_critically_damped_report(self, tmp_path):
        out = tmp_path / "o"
        code = main(["ode-run", "--r", "3", "--problem", "quad-iso", "--t0", "0",
                     "--horizon", "50", "--x0", "1,0", "--out", str(out)])
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        validate(rep, SCHEMAS["report"])
        assert rep["passed"] is True
        mono = [c for c in rep["checks"] if c["check_id"].startswith("energy-monotone")]
        assert mono and all(c["passed"] for c in mono)
        header = (out / "trajectory.csv").read_text().splitlines()[0]
        assert header == "t,x_0,x_1,v_0,v_1"
        e_header = (out / "energies_m0.csv").read_text().splitlines()[0]
        assert e_header == "t,e_z,f_z,osc"

    def test_counterexample_events_artifact(self, tmp_path, golden):
        out = tmp_path / "o"
        code = main(["ode-run", "--r", "1", "--problem", "counterexample", "--t0", "1",
                     "--horizon", "200", "--x0", "2", "--out", str(out)])
        assert code == 0
        events = json.loads((out / "events.json").read_text())
        validate(events, SCHEMAS["events"])
        assert len(events) == golden["full"]["counterexample"]["event_count"]
        assert len(events) >= 4
        kinds = [e["kind"] for e in events[:4]]
        assert kinds == ["enter_flat_from_right", "exit_flat_left",
                         "enter_flat_from_left", "exit_flat_right"]

    def test_deterministic_artifacts(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        base = ["ode-run", "--r", "2", "--problem", "segment2d", "--t0", "1",
                "--horizon", "20", "--x0", "2,3"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--out", str(b)]) == 0
        for name in ("trajectory.csv", "energies_m0.csv", "events.json", "report.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_horizon_equals_t0(self, tmp_path):
        out = tmp_path / "o"
        code = main(["ode-run", "--r", "3", "--problem", "quad-iso", "--t0", "5",
                     "--horizon", "5", "--x0", "1,0", "--out", str(out)])
        assert code == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert len(lines) == 2  # header + single sample

    def test_usage_errors(self, tmp_path):
        out = str(tmp_path / "o")
        common = ["ode-run", "--problem", "quad-iso", "--t0", "1", "--horizon", "5",
                  "--x0", "1,0", "--out", out]
        assert main(common[:1] + ["--r", "0"] + common[1:]) == 2
        assert main(common[:1] + ["--r", "-2"] + common[1:]) == 2
        assert main(["ode-run", "--r", "3", "--problem", "quad-iso", "--t0", "1",
                     "--horizon", "5", "--x0", "1,0,0", "--out", out]) == 2
        assert main(["ode-run", "--r", "3", "--problem", "quad-iso", "--t0", "1",
                     "--horizon", "5", "--x0", "abc", "--out", out]) == 2

    def test_numerical_failure_exit_code_and_report(self, tmp_path):
        out = tmp_path / "o"
        code = main(["ode-run", "--r", "1", "--problem", "counterexample", "--t0", "1",
                     "--horizon", "10", "--x0", "1e200", "--out", str(out)])
        assert code == 3
        rep = json.loads((out / "report.json").read_text())
        assert rep["failure"] is not None
        assert rep["failure"]["at"] == 1.0


class TestVerify:
    def test_filtered_quick_run(self, tmp_path):
        out = tmp_path / "o"
        code = main(["verify", "--budget", "quick", "--filter", "counterexample-*",
                     "--out", str(out)])
        assert code == 0
        body = json.loads((out / "verify.json").read_text())
        validate(body, SCHEMAS["verify"])
        assert body["passed"] is True
        assert body["counts"]["failed"] == 0
        assert all(c["check_id"].startswith("counterexample") for c in body["checks"])

    def test_filter_excludes_other_checks(self, tmp_path):
        out = tmp_path / "o"
        assert main(["verify", "--budget", "quick", "--filter", "seq-*",
                     "--out", str(out)]) == 0
        body = json.loads((out / "verify.json").read_text())
        assert [c["check_id"] for c in body["checks"]] == ["seq-growth"]

    def test_corrupted_golden_fails_named_check(self, tmp_path, golden):
        bad = json.loads(json.dumps(golden))
        bad["quick"]["counterexample"]["event_count"] = 99
        bad_path = tmp_path / "golden_bad.json"
        bad_path.write_text(json.dumps(bad))
        out = tmp_path / "o"
        code = main(["verify", "--budget", "quick", "--filter", "counterexample-*",
                     "--golden", str(bad_path), "--out", str(out)])
        assert code == 1
        body = json.loads((out / "verify.json").read_text())
        failed = [c["check_id"] for c in body["checks"] if not c["passed"]]
        assert failed == ["counterexample-events"]

    def test_broken_golden_schema_still_exits_one(self, tmp_path):
        bad_path = tmp_path / "golden_broken.json"
        bad_path.write_text(json.dumps({"quick": {}, "full": {}}))
        out = tmp_path / "o"
        code = main(["verify", "--budget", "quick", "--filter", "counterexample-events",
                     "--golden", str(bad_path), "--out", str(out)])
        assert code == 1
        body = json.loads((out / "verify.json").read_text())
        assert any(not c["passed"] for c in body["checks"])

    def test_unknown_flag_exits_two(self):
        proc = run_cli(["verify", "--frobnicate"])
        assert proc.returncode == 2

    def test_no_command_exits_two(self):
        proc = run_cli([])
        assert proc.returncode == 2
