import json
import math

import numpy as np

import bhdensity as bh
from bhdensity.cli import main, parse_plane
from conftest import V9_GAP, W0_AREA


def run_cli(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out), "--deterministic"])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_section_w0(tmp_path):
    code, data, _ = run_cli(["section", "--body", "rotated-cross4", "--plane", "w0"], tmp_path)
    assert code == 0
    assert abs(data["area"] - W0_AREA) < 1e-12
    assert data["method"] == "exact-halfplane"
    assert len(data["vertices"]) == 8
    assert data["toolkit_version"] == bh.__version__
    assert data["config_echo"]["plane"] == "w0"


def test_section_euclid_pi(tmp_path):
    code, data, _ = run_cli(
        ["section", "--body", "euclid-n", "--n", "4", "--plane", "w0"], tmp_path
    )
    assert code == 0
    assert abs(data["area"] - math.pi) < 1e-6


def test_gap_v9(tmp_path):
    code, data, _ = run_cli(
        ["gap", "--body", "rotated-cross4", "--proj", "0,0,0,0", "--plane", "v9"], tmp_path
    )
    assert code == 0
    assert abs(data["gap"] - V9_GAP) < 1e-12


def test_density_subcommand(tmp_path):
    code, data, _ = run_cli(
        ["density", "--body", "rotated-cross4", "--bivector", "1,0,0,0,0,0"], tmp_path
    )
    assert code == 0
    assert abs(data["value"] - math.pi / W0_AREA) < 1e-12
    assert data["stderr"] is None


def test_probe_subcommand(tmp_path):
    code, data, _ = run_cli(
        ["probe", "--body", "rotated-cross4", "--trials", "200"], tmp_path
    )
    assert code == 0
    assert data["violations"] == 0
    assert "slack" in data["worst_trial"]


def test_certify_failure_exit_code(tmp_path):
    code, data, _ = run_cli(
        [
            "certify", "--body", "euclid-n", "--n", "4", "--box", "2", "--grid", "21",
            "--eps", "0.05", "--extra-planes", "4",
        ],
        tmp_path,
    )
    assert code == 2
    assert data["success"] is False
    assert data["failed_at"] == [0.0, 0.0, 0.0, 0.0]


def test_usage_error_exit_code(tmp_path):
    assert main(["section", "--body", "nonsense", "--plane", "w0"]) == 1
    assert main(["section", "--body", "rotated-cross4", "--plane", "zzz"]) == 1


def test_reports_bitwise_identical(tmp_path):
    # identical config (including the output path) => identical bytes
    args = ["section", "--body", "rotated-cross4", "--plane", "v1:0.05"]
    _, _, out = run_cli(args, tmp_path, "same.json")
    first = out.read_bytes()
    _, _, out = run_cli(args, tmp_path, "same.json")
    assert out.read_bytes() == first


def test_seventeen_digit_serialization(tmp_path):
    _, data, out = run_cli(["section", "--body", "rotated-cross4", "--plane", "w0"], tmp_path)
    text = out.read_text()
    token = format(data["area"], ".17g")
    assert token in text
    assert json.loads(text)["area"] == data["area"]  # round-trips exactly


def test_plane_mini_language():
    w0 = parse_plane("w0", 4)
    assert np.array_equal(w0.u, [1, 0, 0, 0])
    v5 = parse_plane("v5:0.1", 4)
    assert abs(v5.u[3] - 0.1 / math.sqrt(1.01)) < 1e-15
    r = parse_plane("random:7", 4)
    assert abs(np.dot(r.u, r.v)) < 1e-12
    raw = parse_plane("1,0,0,0, 1,1,0,0", 4)
    assert np.allclose(raw.u, [1, 0, 0, 0]) and np.allclose(raw.v, [0, 1, 0, 0], atol=1e-15)
    raw6 = parse_plane("1,0,0,0,0,0, 0,1,0,0,0,0", 6)
    assert raw6.n == 6


def test_body_json_file_ingestion(tmp_path):
    from bhdensity._jsonfmt import dumps

    body_file = tmp_path / "body.json"
    body_file.write_text(dumps(bh.body_to_dict(bh.make_rotated_cross_polytope())))
    code, data, _ = run_cli(["section", "--body", str(body_file), "--plane", "w0"], tmp_path)
    assert code == 0
    assert abs(data["area"] - W0_AREA) < 1e-12


def test_lemmas_csv(tmp_path):
    out = tmp_path / "lemmas.csv"
    code = main(["lemmas", "--eps-grid", "0.002,0.004,0.008,0.012,0.016,0.02", "--out", str(out), "--deterministic"])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "family,eps,lower_bound,exact_area,fitted_c"
    assert len(lines) == 1 + 4 * 6
    first = lines[1].split(",")
    assert first[0] == "v1v2"
    assert abs(float(first[2]) - bh.lemma_lower_bound("v1v2", 0.002)) < 1e-15
    # swap-tilt families carry no closed-form bound column
    v5_row = next(l for l in lines if l.startswith("v5v6")).split(",")
    assert v5_row[2] == ""
