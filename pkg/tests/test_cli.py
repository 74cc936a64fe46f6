import json
import math

import numpy as np
import pytest

from phasefisher.cli import main


def run_cli(args):
    return main(args)


def test_qfi_coherent(capsys):
    assert run_cli(["qfi", "--probe", "coherent", "--alpha", "1"]) == 0
    out = capsys.readouterr().out
    assert "QFI = 4" in out


def test_qfi_scs_oracle(capsys):
    code = run_cli(["qfi", "--probe", "scs", "--alpha", "3.1623", "--nav", "1",
                    "--oracle"])
    assert code == 0
    out = capsys.readouterr().out
    value = float(out.split("QFI = ")[1].split()[0])
    ref = float(out.split("closed form = ")[1].split()[0])
    assert abs(value - ref) / ref < 0.02
    assert abs(value - 40.0) / 40.0 < 0.02


def test_qfi_fock_zero(capsys):
    assert run_cli(["qfi", "--probe", "fock", "--n", "3"]) == 0
    assert "QFI = 0" in capsys.readouterr().out


def test_qfi_lossy_oracle(capsys):
    code = run_cli(["qfi", "--probe", "on", "--n", "10", "--nav", "1",
                    "--eta", "0.9", "--oracle"])
    assert code == 0
    out = capsys.readouterr().out
    assert "relative error" in out
    rel = float(out.split("relative error = ")[1].split("%")[0])
    assert rel < 5.0


def test_curve_on_peak_count(tmp_path, capsys):
    out = tmp_path / "on.csv"
    code = run_cli(["curve", "cfi", "--probe", "on", "--n", "10", "--nav", "1",
                    "--theta-min", str(-math.pi), "--theta-max", str(math.pi),
                    "--points", "4001", "--out", str(out)])
    assert code == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    vals = data[:, 1]
    peaks = [i for i in range(1, vals.size - 1)
             if vals[i] > vals[i - 1] and vals[i] > vals[i + 1] and vals[i] > 1.0]
    assert len(peaks) == 20


def test_curve_protocol_lossy_nonzero_at_origin(tmp_path, capsys):
    out = tmp_path / "proto.csv"
    code = run_cli(["curve", "protocol", "--alpha", "4", "--epsilon", "0.3",
                    "--eta", "0.99", "--basis", "sigma_y",
                    "--theta-min", "-0.002", "--theta-max", "0.002",
                    "--points", "5", "--out", str(out)])
    assert code == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    mid = data[np.argmin(np.abs(data[:, 0])), 1]
    assert mid > 1.0


def test_curve_vacuum_probe_flat(tmp_path, capsys):
    out = tmp_path / "flat.csv"
    code = run_cli(["curve", "protocol", "--alpha", "4", "--epsilon", "0",
                    "--theta-min", "-0.01", "--theta-max", "0.01",
                    "--points", "5", "--out", str(out)])
    assert code == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    vals = [float(r.split(",")[1]) for r in rows[1:]]
    assert max(vals) < 1e-6


def test_curve_gaussian_cfi(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code = run_cli(["curve", "gaussian-cfi", "--nav", "1", "--eta", "0.9",
                    "--theta-min", "-0.5", "--theta-max", "0.5",
                    "--points", "101", "--out", str(out)])
    assert code == 0
    rows = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    i0 = int(np.argmin(np.abs(data[:, 0])))
    assert data[i0, 1] < 1e-9  # dip at the origin under loss


def test_study_thresholds_check(tmp_path, capsys):
    out = tmp_path / "thr.csv"
    code = run_cli(["study", "thresholds", "--kind", "eta_min_scs", "--check",
                    "--out", str(out)])
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["checks"]["pass"] is True
    assert abs(summary["value"] - 0.802) < 0.005


def test_study_bias_check(tmp_path, capsys):
    out = tmp_path / "bias.csv"
    code = run_cli(["study", "bias", "--alpha", "3", "--epsilon", "0.7",
                    "--rabi-error", "0.01", "--points", "5", "--check",
                    "--out", str(out)])
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["checks"]["pass"] is True


def test_study_contrast_check(tmp_path, capsys):
    out = tmp_path / "contrast.csv"
    code = run_cli(["study", "contrast", "--nav", "1", "--epsilon", "0.3333",
                    "--eta", "0.9", "--family", "on", "--points", "120",
                    "--check", "--out", str(out)])
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["checks"]["pass"] is True


def test_study_frontier_writes_csv_and_json(tmp_path, capsys):
    out = tmp_path / "frontier.csv"
    code = run_cli(["study", "frontier", "--family", "scs", "--nav", "1",
                    "--eta", "0.99", "--check", "--out", str(out)])
    assert code == 0
    assert out.exists() and out.with_suffix(".json").exists()
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["checks"]["nondominated"] is True


def test_study_determinism(tmp_path, capsys):
    a = tmp_path / "m1.csv"
    b = tmp_path / "m2.csv"
    for out in (a, b):
        code = run_cli(["study", "mixture", "--samples", "120", "--seed", "5",
                        "--out", str(out)])
        assert code == 0
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]
    assert strip(a) == strip(b)


def test_parse_failure_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["study", "unknown-study"])
    assert exc.value.code == 2


def test_config_file_defaults(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"alpha": 1.0, "probe": "coherent"}))
    code = run_cli(["--config", str(cfgfile), "qfi"])
    assert code == 0
    assert "QFI = 4" in capsys.readouterr().out


def test_plot_rendering(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = run_cli(["curve", "cfi", "--probe", "on", "--n", "6", "--nav", "1",
                    "--points", "101", "--out", str(out), "--plot"])
    assert code == 0
    assert out.with_suffix(".png").exists()
