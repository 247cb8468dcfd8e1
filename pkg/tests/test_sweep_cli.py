import csv
import io
import json

import numpy as np
import pytest

from cgme.cli import main
from cgme.quadrature import QuadratureConfig
from cgme.sweep import COLUMNS, TRAJECTORY_COLUMNS, SweepSpec, emit, run_point, run_sweep

CFG = QuadratureConfig(rel_tol=1e-7, abs_tol=1e-11)

FAST = {
    "omega1": 1.0,
    "omega2": 1.1,
    "beta": 1.0,
    "omega_c": 5.0,
    "delta_t": 2.0,
    "lambda": 0.1,
}


def fast_flags(**extra):
    flags = [
        "--omega1", "1.0", "--omega2", "1.1", "--beta", "1.0",
        "--omega-c", "5.0", "--delta-t", "2.0", "--lambda", "0.1",
        "--rel-tol", "1e-7", "--abs-tol", "1e-11",
    ]
    for k, v in extra.items():
        flags.extend([k, v] if v is not None else [k])
    return flags


def test_run_point_record_columns():
    rec = run_point(FAST, CFG)
    assert list(rec.keys()) == COLUMNS
    assert rec["error"] is None
    assert isinstance(rec["dissipatively_entangling"], bool)


def test_run_point_equal_frequencies_entangling():
    params = dict(FAST, omega2=1.0)
    rec = run_point(params, CFG)
    assert rec["dissipatively_entangling"] is True


def test_run_point_huge_dt_unequal_not_dissipative():
    params = dict(FAST, beta=0.1, omega_c=10.0, omega2=1.2, delta_t=60.0)
    rec = run_point(params, CFG)
    assert rec["dissipatively_entangling"] is False


def test_run_point_invalid_parameters_raise():
    with pytest.raises(ValueError):
        run_point(dict(FAST, beta=-1.0), CFG)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):  # duplicate binding
        SweepSpec(axes=[("beta", [1.0, 2.0])], fixed=dict(FAST))
    with pytest.raises(ValueError):  # missing parameter
        SweepSpec(axes=[("beta", [1.0, 2.0])], fixed={"omega1": 1.0})
    with pytest.raises(ValueError):  # non-monotone grid
        fixed = {k: v for k, v in FAST.items() if k != "beta"}
        SweepSpec(axes=[("beta", [1.0, 3.0, 2.0])], fixed=fixed)
    with pytest.raises(ValueError):  # delta_omega needs omega_mean
        fixed = {k: v for k, v in FAST.items() if k not in ("omega1", "omega2")}
        SweepSpec(axes=[("delta_omega", [0.0, 0.1])], fixed=fixed)
    with pytest.raises(ValueError):  # derived frequency must stay positive
        fixed = {k: v for k, v in FAST.items() if k not in ("omega1", "omega2")}
        SweepSpec(axes=[("delta_omega", [0.0, 2.0])], fixed=fixed, omega_mean=1.0)


def test_single_point_sweep_matches_run_point():
    fixed = {k: v for k, v in FAST.items() if k != "beta"}
    spec = SweepSpec(axes=[("beta", [1.0])], fixed=fixed)
    rows = run_sweep(spec, CFG)
    assert len(rows) == 1
    assert rows[0] == run_point(FAST, CFG)


def test_sweep_row_count_and_order():
    fixed = {k: v for k, v in FAST.items() if k not in ("beta", "delta_t")}
    spec = SweepSpec(axes=[("beta", [0.5, 1.0]), ("delta_t", [1.0, 2.0, 3.0])], fixed=fixed)
    rows = run_sweep(spec, CFG)
    assert len(rows) == 6
    assert [r["beta"] for r in rows] == [0.5, 0.5, 0.5, 1.0, 1.0, 1.0]
    assert [r["delta_t"] for r in rows] == [1.0, 2.0, 3.0, 1.0, 2.0, 3.0]
    assert all(r["error"] is None for r in rows)


def test_sweep_delta_omega_axis():
    fixed = {"beta": 1.0, "omega_c": 5.0, "delta_t": 2.0, "lambda": 0.1}
    spec = SweepSpec(axes=[("delta_omega", [0.0, 0.05])], fixed=fixed, omega_mean=1.0)
    rows = run_sweep(spec, CFG)
    assert rows[0]["omega1"] == rows[0]["omega2"] == 1.0
    assert rows[1]["omega1"] == pytest.approx(0.95)
    assert rows[1]["omega2"] == pytest.approx(1.05)


def test_sweep_worker_independence():
    fixed = {k: v for k, v in FAST.items() if k != "beta"}
    spec = SweepSpec(axes=[("beta", [0.5, 1.0, 2.0])], fixed=fixed)
    serial = run_sweep(spec, CFG, workers=1)
    parallel = run_sweep(spec, CFG, workers=2)
    buf_a, buf_b = io.StringIO(), io.StringIO()
    emit(serial, "csv", buf_a)
    emit(parallel, "csv", buf_b)
    assert buf_a.getvalue() == buf_b.getvalue()


def test_emit_header_exact():
    buf = io.StringIO()
    emit([], "csv", buf)
    assert buf.getvalue() == (
        "omega1,omega2,beta,omega_c,delta_t,lambda,d11_mm,d22_pp,re_d12,im_d12,"
        "re_h12,im_h12,delta,delta_tilde,entangling,dissipatively_entangling,error\n"
    )


def test_emit_floats_round_trip():
    rec = run_point(FAST, CFG)
    buf = io.StringIO()
    emit([rec], "csv", buf)
    reader = csv.DictReader(io.StringIO(buf.getvalue()))
    row = next(reader)
    for key in ("d11_mm", "d22_pp", "re_d12", "delta", "delta_tilde"):
        assert float(row[key]) == rec[key]
    assert row["entangling"] in ("true", "false")
    assert row["error"] == ""


def test_emit_json_round_trip_stable():
    rec = run_point(FAST, CFG)
    buf = io.StringIO()
    emit([rec], "json", buf)
    first = buf.getvalue()
    parsed = json.loads(first)
    assert list(parsed[0].keys()) == COLUMNS
    buf2 = io.StringIO()
    emit(parsed, "json", buf2)
    assert buf2.getvalue() == first


def test_emit_deterministic():
    rows = [run_point(FAST, CFG)]
    a, b = io.StringIO(), io.StringIO()
    emit(rows, "csv", a)
    emit([run_point(FAST, CFG)], "csv", b)
    assert a.getvalue() == b.getvalue()


def test_cli_witness_to_file(tmp_path):
    out = tmp_path / "point.csv"
    code = main(["witness", *fast_flags(), "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("omega1,omega2,beta")
    assert len(lines) == 2


def test_cli_witness_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["witness", *fast_flags(), "--out", str(out1)]) == 0
    assert main(["witness", *fast_flags(), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_validation_error_exit_code(tmp_path, capsys):
    code = main(["witness", *fast_flags(), "--beta", "-1.0"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_missing_parameter_exit_code(capsys):
    code = main(["witness", "--omega1", "1.0"])
    assert code == 2
    err = capsys.readouterr().err
    assert "--beta" in err


def test_cli_sweep_with_config_file(tmp_path):
    cfg_file = tmp_path / "defaults.json"
    cfg_file.write_text(json.dumps(FAST))
    out = tmp_path / "sweep.csv"
    code = main(
        [
            "sweep",
            "--config", str(cfg_file),
            "--axis", "beta=0.5:1.5:3",
            "--rel-tol", "1e-7", "--abs-tol", "1e-11",
            "--out", str(out),
        ]
    )
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3
    assert [float(r["beta"]) for r in rows] == [0.5, 1.0, 1.5]
    # flag overrides config default
    out2 = tmp_path / "sweep2.csv"
    code = main(
        [
            "sweep",
            "--config", str(cfg_file),
            "--axis", "beta=0.5,1.5",
            "--delta-t", "3.0",
            "--rel-tol", "1e-7", "--abs-tol", "1e-11",
            "--out", str(out2),
        ]
    )
    assert code == 0
    rows2 = list(csv.DictReader(out2.open()))
    assert all(float(r["delta_t"]) == 3.0 for r in rows2)


def test_cli_sweep_malformed_axis(capsys):
    code = main(["sweep", *fast_flags(), "--axis", "beta=1:2"])
    assert code == 2


def test_cli_evolve_columns(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(["evolve", *fast_flags(), "--t-final", "5.0", "--steps", "20", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 21
    assert list(rows[0].keys()) == TRAJECTORY_COLUMNS
    assert float(rows[0]["re_rho_22"]) == 1.0
    assert float(rows[-1]["trace_residual"]) < 1e-9


def test_cli_coeffs_json(tmp_path):
    out = tmp_path / "coeffs.json"
    code = main(["coeffs", *fast_flags(), "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload["dissipative_blocks"]) == {"11", "12", "21", "22"}
    assert set(payload["hamiltonian_blocks"]) == {"11", "12", "21", "22"}
    assert len(payload["kossakowski"]) == 4
    assert len(payload["lamb_shift_interaction"]) == 2
    assert payload["kossakowski_min_eigenvalue"] >= -1e-8


def test_cli_coeffs_rejects_csv():
    assert main(["coeffs", *fast_flags(), "--format", "csv"]) == 2
