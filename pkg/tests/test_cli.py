import json
import math

import numpy as np
import pytest

from qcgibbs.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    main,
    parse_config,
)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# spectrum command


def test_spectrum_box(capsys):
    code, out, _ = run(
        ["spectrum", "--model", "box", "--N", "1", "--L", "1", "--h", "1",
         "--count", "10"], capsys)
    assert code == EXIT_OK
    rows = [l for l in out.splitlines() if l and not l.startswith("#") and l != "n,E"]
    assert len(rows) == 10
    first = float(rows[0].split(",")[1])
    assert first == pytest.approx(4.9348, abs=1e-4)


def test_spectrum_oscillator_uniform_gaps(capsys):
    code, out, _ = run(
        ["spectrum", "--model", "homogeneous", "--nu", "2", "--h", "1",
         "--count", "5"], capsys)
    assert code == EXIT_OK
    rows = [l for l in out.splitlines() if l and not l.startswith("#") and l != "n,E"]
    levels = np.array([float(r.split(",")[1]) for r in rows])
    gaps = np.diff(levels)
    assert np.max(np.abs(gaps - gaps[0])) / gaps[0] < 1e-4


def test_spectrum_rejects_negative_nu(capsys):
    code, _, err = run(
        ["spectrum", "--model", "homogeneous", "--nu", "-1", "--count", "3"], capsys)
    assert code == EXIT_USAGE
    assert "nu" in err


def test_spectrum_writes_file(tmp_path, capsys):
    out_file = tmp_path / "levels.csv"
    code, _, _ = run(
        ["spectrum", "--model", "box", "--L", "1", "--count", "4",
         "--output", str(out_file)], capsys)
    assert code == EXIT_OK
    assert out_file.read_text().startswith("# h=1\n# source=analytic_box\nn,E\n")


# ---------------------------------------------------------------------------
# table command


def test_table_box_row(capsys):
    code, out, _ = run(
        ["table", "--model", "box", "--L", "1", "--beta", "1", "--h", "1"], capsys)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "beta,h,Zq_scaled,Zc,Eq,Ec,Sq,Sc"
    vals = dict(zip(lines[0].split(","), [float(x) for x in lines[1].split(",")]))
    assert vals["Zc"] == pytest.approx(2.50663, abs=1e-5)


def test_table_rows_satisfy_entropy_identity(capsys):
    code, out, _ = run(
        ["table", "--model", "box", "--L", "1", "--beta", "0.5,1,2",
         "--h", "0.5,1"], capsys)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        row = dict(zip(header, [float(x) for x in line.split(",")]))
        lhs = row["Sq"]
        rhs = row["beta"] * row["Eq"] + math.log(row["Zq_scaled"]) - math.log(
            2 * math.pi * row["h"])
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_table_json_mirror(tmp_path, capsys):
    args = ["table", "--model", "box", "--L", "1", "--beta", "1,2", "--h", "1"]
    code, csv_out, _ = run(args, capsys)
    code_j, json_out, _ = run(args + ["--format", "json"], capsys)
    assert code == code_j == EXIT_OK
    rows = json.loads(json_out)["rows"]
    csv_lines = csv_out.strip().splitlines()
    header = csv_lines[0].split(",")
    for row, line in zip(rows, csv_lines[1:]):
        csv_vals = [float(x) for x in line.split(",")]
        for name, val in zip(header, csv_vals):
            assert row[name] == val


def test_table_truncation_failure_exit_code(capsys):
    # tiny level budget cannot cover beta = 1e-4: rows flagged, exit 3
    code, out, _ = run(
        ["table", "--model", "box", "--L", "1", "--beta", "0.0001", "--h", "1",
         "--max-levels", "64"], capsys)
    assert code == EXIT_NUMERICAL
    lines = out.strip().splitlines()
    assert lines[0].endswith(",status")
    assert "error" in lines[1]


# ---------------------------------------------------------------------------
# verify command


def test_verify_box_theorem_claims(tmp_path, capsys):
    out_file = tmp_path / "reports.json"
    code, out, _ = run(
        ["verify", "--model", "box", "--L", "1", "--claims", "c11,t31",
         "--beta", "0.1,1,10", "--h", "0.5,1,2", "--output", str(out_file)],
        capsys)
    assert code == EXIT_OK
    reports = json.loads(out_file.read_text())
    assert {r["claim_id"] for r in reports} == {"C1_1", "T3_1"}
    assert all(r["status"] == "Holds" for r in reports)
    assert "C1_1" in out  # human-readable table on stdout


def test_verify_c12_oscillator(capsys):
    code, out, _ = run(
        ["verify", "--model", "homogeneous", "--nu", "2", "--claims", "c12",
         "--beta", "0.1,1,10", "--h", "0.5,1,2"], capsys)
    assert code == EXIT_OK
    reports = json.loads(out)
    assert reports[0]["claim_id"] == "C1_2"
    assert reports[0]["status"] == "Holds"


def test_verify_unknown_claim(capsys):
    code, _, err = run(
        ["verify", "--model", "box", "--L", "1", "--claims", "c99"], capsys)
    assert code == EXIT_USAGE
    assert "unknown claim" in err


def test_verify_exit_4_on_theorem_violation(capsys, monkeypatch):
    # wire-level check: a Violated theorem-class report must exit 4
    import qcgibbs.cli as cli_mod
    from qcgibbs.verify import ClaimId, Status, VerificationReport

    def fake_run_claims(family, keys, **overrides):
        return [VerificationReport(ClaimId.C1_1, {}, {}, Status.VIOLATED,
                                   -1.0, 0.0, {})]

    monkeypatch.setattr(cli_mod, "run_claims", fake_run_claims)
    code, _, _ = run(["verify", "--model", "box", "--L", "1", "--claims", "c11"],
                     capsys)
    assert code == 4


# ---------------------------------------------------------------------------
# game command


def test_game_minor_signs(capsys):
    code, out, _ = run(
        ["game", "--levels", "1,2,3", "--lambda", "-1", "--minors", "2"], capsys)
    assert code == EXIT_OK
    assert "minor_signs = -,+" in out


def test_game_uniform_at_lambda_zero(capsys):
    code, out, _ = run(["game", "--levels", "1,2", "--lambda", "0"], capsys)
    assert code == EXIT_OK
    lines = dict(
        l.split(" = ") for l in out.splitlines() if " = " in l
    )
    assert float(lines["F"]) == pytest.approx(math.log(2.0), rel=1e-12)
    p_rows = [l for l in out.splitlines() if l[:1].isdigit()]
    probs = [float(r.split(",")[1]) for r in p_rows]
    assert probs == pytest.approx([0.5, 0.5], rel=1e-12)


def test_game_ascent_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(
        ["game", "--levels", "1,2,3,4", "--lambda", "-0.5", "--ascend",
         "--seed", "7", "--output", str(trace)], capsys)
    assert code == EXIT_OK
    lines = trace.read_text().strip().splitlines()
    assert lines[0] == "iter,F,grad_norm"
    f_col = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(b >= a for a, b in zip(f_col, f_col[1:]))


def test_game_levels_file(tmp_path, capsys):
    levels_file = tmp_path / "levels.txt"
    levels_file.write_text("1.0\n2.0\n3.0\n")
    code, out, _ = run(
        ["game", "--levels-file", str(levels_file), "--lambda", "-1",
         "--minors", "2"], capsys)
    assert code == EXIT_OK
    assert "minor_signs = -,+" in out


def test_game_seed_determinism(tmp_path, capsys):
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["game", "--levels", "1,2,3", "--lambda", "-1", "--ascend", "--seed", "11"]
    assert main(args + ["--output", str(t1)]) == EXIT_OK
    assert main(args + ["--output", str(t2)]) == EXIT_OK
    capsys.readouterr()
    assert t1.read_bytes() == t2.read_bytes()


# ---------------------------------------------------------------------------
# config handling


def test_config_round_trip():
    cfg = RunConfig(model="homogeneous", nu=4.0, beta=(0.5, 1.0),
                    h=(0.25, 1.0, 4.0), count=7, seed=3, output="x.csv")
    back = parse_config(cfg.to_text())
    assert back == cfg


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("model = box\nlengths = 1\nbeta = 1\nh = 1\ncount = 3\n")
    code, out, _ = run(
        ["spectrum", "--config", str(cfg_file), "--count", "5"], capsys)
    assert code == EXIT_OK
    rows = [l for l in out.splitlines() if l and not l.startswith("#") and l != "n,E"]
    assert len(rows) == 5


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("modle = box\n")
    code, _, err = run(["spectrum", "--config", str(cfg_file)], capsys)
    assert code == EXIT_USAGE
    assert "unknown config key" in err


def test_grid_range_syntax():
    cfg = parse_config("beta = 0.01:10:9\n")
    assert len(cfg.beta) == 28
    assert cfg.beta[0] == pytest.approx(0.01)
    assert cfg.beta[-1] == pytest.approx(10.0)


def test_outdir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QCGIBBS_OUTDIR", str(tmp_path))
    code, _, _ = run(
        ["spectrum", "--model", "box", "--L", "1", "--count", "2",
         "--output", "sub/levels.csv"], capsys)
    assert code == EXIT_OK
    assert (tmp_path / "sub" / "levels.csv").exists()


def test_threads_env_same_output(capsys, monkeypatch):
    args = ["table", "--model", "box", "--L", "1", "--beta", "0.5,1,2", "--h", "0.5,1"]
    code1, out1, _ = run(args, capsys)
    monkeypatch.setenv("QCGIBBS_THREADS", "4")
    code2, out2, _ = run(args, capsys)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2


def test_usage_error_on_bad_flag(capsys):
    code, _, _ = run(["spectrum", "--model", "nosuch"], capsys)
    assert code == EXIT_USAGE
