import json
import math

import pytest

from symext.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_threshold_six_state_plain(capsys):
    code, out, err = run_cli(capsys, "threshold", "--scheme", "six-state", "--tol", "1e-9")
    assert code == 0
    assert err == ""
    value = float(out.strip())
    assert out.startswith("0.27639320")
    assert abs(value - (5 - math.sqrt(5)) / 10) < 1e-9


def test_threshold_bb84_json(capsys):
    code, out, _ = run_cli(
        capsys, "threshold", "--scheme", "bb84", "--tol", "1e-9", "--output", "json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["scheme"] == "bb84"
    assert abs(data["q_max"] - 0.2) < 1e-9


def test_analyze_phi_plus(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--p", "1,0,0,0")
    assert code == 0
    data = json.loads(out)
    assert data["extendible"] is False
    assert data["separable"] is False
    assert data["certificate"] is None
    assert data["rounds_to_break"] == 0
    assert data["alpha"] == pytest.approx([1.0, 1.0, math.sqrt(2), 0.0])


def test_analyze_alpha_input(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--alpha", "0,0,0")
    assert code == 0
    data = json.loads(out)
    assert data["p"] == pytest.approx([0.25, 0.25, 0.25, 0.25])
    assert data["separable"] is True
    assert data["extendible"] is True
    assert data["certificate"]["trace"] == pytest.approx(0.75)


def test_analyze_scheme_input(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--scheme", "six-state", "--q", "0.2")
    assert code == 0
    data = json.loads(out)
    assert data["p"] == pytest.approx([0.7, 0.1, 0.1, 0.1])
    assert data["qber"]["x"] == pytest.approx(0.2)
    assert data["d_c"] == pytest.approx(math.log2(2.25))
    assert data["rounds_to_break"] == 1


def test_analyze_csv_output(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--p", "1,0,0,0", "--output", "csv")
    assert code == 0
    header, row = out.strip().split("\n")
    assert "extendible" in header.split(",")
    assert dict(zip(header.split(","), row.split(",")))["extendible"] == "false"


def test_exactly_one_input_required(capsys):
    code, _, err = run_cli(capsys, "analyze", "--p", "1,0,0,0", "--alpha", "0,0,0")
    assert code == 2
    code, _, err = run_cli(capsys, "analyze")
    assert code == 2


def test_parse_error_position(capsys):
    code, out, err = run_cli(capsys, "analyze", "--p", "1,0,zero,0")
    assert code == 2
    assert out == ""
    assert "position 2" in err


def test_not_a_state_exits_2(capsys):
    code, _, err = run_cli(capsys, "analyze", "--p", "0.9,0.3,0,0")
    assert code == 2
    assert "error" in err


def test_invalid_scheme_q(capsys):
    code, _, err = run_cli(capsys, "analyze", "--scheme", "bb84", "--q", "0.7")
    assert code == 2


def test_distill_jsonl(capsys):
    code, out, _ = run_cli(
        capsys, "distill", "--scheme", "six-state", "--q", "0.2", "--max-rounds", "5"
    )
    assert code == 0
    lines = out.strip().split("\n")
    records = [json.loads(line) for line in lines]
    assert records[-1] == {"terminated": "broke_extension"}
    assert records[0]["round"] == 0
    assert records[0]["extendible"] is True
    assert records[1]["extendible"] is False
    assert records[1]["d_c"] == pytest.approx(2 * math.log2(2.25))


def test_distill_csv(capsys):
    code, out, _ = run_cli(
        capsys, "distill", "--p", "0.7,0.1,0.1,0.1", "--output", "csv", "--max-rounds", "3"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("round,p_i,p_x,p_y,p_z")
    assert lines[-1].startswith("terminated,")


def test_region_scan_csv(capsys):
    code, out, _ = run_cli(capsys, "region-scan", "--resolution", "9")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "alpha1,alpha2,region,d_c,symext"
    assert len(lines) > 5
    code2, out2, _ = run_cli(capsys, "region-scan", "--resolution", "9")
    assert out2 == out  # byte-deterministic


def test_region_scan_rect_resolution_json(capsys):
    code, out, _ = run_cli(
        capsys, "region-scan", "--resolution", "5,7", "--output", "json"
    )
    assert code == 0
    rec = json.loads(out.strip().split("\n")[0])
    assert set(rec) == {"alpha1", "alpha2", "region", "d_c", "symext"}


def test_region_scan_bad_resolution(capsys):
    code, _, _ = run_cli(capsys, "region-scan", "--resolution", "five")
    assert code == 2


def test_verify_sdp_consistency(capsys):
    code, out, _ = run_cli(capsys, "verify-sdp", "--scheme", "bb84", "--q", "0.19")
    assert code == 0
    data = json.loads(out)
    assert data["agree"] is True
    assert data["analytic"]["extendible"] is True
    assert data["simplified_primal"]["extendible"] is True
    assert data["simplified_dual"]["extendible"] is True
    assert data["full_sdp"]["extendible"] is True
    assert data["slackness_residual"] < 1e-5


def test_verify_sdp_non_extendible(capsys):
    code, out, _ = run_cli(capsys, "verify-sdp", "--p", "1,0,0,0")
    assert code == 0
    data = json.loads(out)
    assert data["agree"] is True
    assert data["analytic"]["extendible"] is False
    assert data["simplified_primal"]["margin"] == pytest.approx(1.5, abs=1e-6)
    assert data["simplified_dual"]["margin"] == pytest.approx(-1.5, abs=1e-6)


def test_certificate_extendible(capsys):
    code, out, _ = run_cli(capsys, "certificate", "--scheme", "six-state", "--q", "0.2")
    assert code == 0
    data = json.loads(out)
    assert data["extendible"] is True
    assert data["certificate"]["kind"] == "rank_one"
    assert data["certificate"]["trace"] == pytest.approx(0.9)
    lift = data["lift"]
    assert lift["min_eigenvalue"] >= -1e-9
    assert lift["trace"] == pytest.approx(1.0, abs=1e-12)
    assert lift["swap_residual"] <= 1e-12
    assert lift["marginal_error"] <= 1e-9


def test_certificate_non_extendible_reports_dual(capsys):
    code, out, _ = run_cli(capsys, "certificate", "--p", "1,0,0,0")
    assert code == 0
    data = json.loads(out)
    assert data["extendible"] is False
    assert data["certificate"] is None
    assert data["dual_value"] < -1
    assert len(data["dual_witness_x"]) == 3


def test_unknown_command_exits_2(capsys):
    assert main(["frobnicate"]) == 2


def test_floats_print_17_significant_digits(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--p", "0.7,0.1,0.1,0.1")
    data = json.loads(out)
    # exact round trip of the parsed state
    assert data["p"][0] == 0.7
    assert data["alpha"][2] == 0.6 * math.sqrt(2)
