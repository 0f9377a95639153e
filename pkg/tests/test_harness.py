import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from wedgenorm import harness as hz
from wedgenorm.asymptotics import alpha_p
from wedgenorm.cli import main
from wedgenorm.errors import InvalidArgument
from wedgenorm.exterior import load_tensor


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_default_trials():
    assert hz.default_trials(2, 400) == 200
    assert hz.default_trials(3, 60) == 100
    assert hz.default_trials(3, 300) == 20
    assert hz.default_trials(4, 70) == 100
    assert hz.default_trials(4, 71) == 10


def test_config_validation_and_range():
    with pytest.raises(InvalidArgument):
        hz.ExperimentConfig(field="quaternion")
    with pytest.raises(InvalidArgument):
        hz.ExperimentConfig(trials=0)
    with pytest.raises(InvalidArgument):
        hz.ExperimentConfig(seed=-1)
    with pytest.raises(InvalidArgument):
        hz.ExperimentConfig(d_min=10, d_max=5).d_values()
    assert hz.ExperimentConfig(d_min=10, d_max=20, d_step=5).d_values() == [10, 15, 20]


def test_sweep_csv_schema_and_determinism(tmp_path):
    args = ["injnorm-sweep", "--p", "3", "--d-min", "7", "--d-max", "9", "--d-step", "2",
            "--trials", "2", "--restarts", "3", "--seed", "11", "--no-timing"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a), "--plot", str(tmp_path / "a.svg")]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text().splitlines()
    assert text[0].startswith("# ")
    header = next(line for line in text if not line.startswith("#"))
    assert header == ",".join(hz.RUN_FIELDS)
    rows = read_rows(a)
    assert len(rows) == 4
    for r in rows:
        assert float(r["normalized"]) > 0
        assert int(r["restarts_used"]) == 3
        assert float(r["normalized"]) == pytest.approx(float(r["estimate"]) / np.sqrt(int(r["d"]) - 3))
    svg = (tmp_path / "a.svg").read_text()
    ET.fromstring(svg)
    assert f"{alpha_p(3):.4f}" in svg


def test_serial_and_parallel_agree():
    cfg = hz.ExperimentConfig(p=3, d=8, trials=3, restarts=2, no_timing=True)
    serial = hz.run_injnorm_sweep(cfg)
    parallel = hz.run_injnorm_sweep(hz.ExperimentConfig(p=3, d=8, trials=3, restarts=2, no_timing=True, workers=2))
    assert serial == parallel


def test_trials_are_independent_of_range():
    # the stream of (d, trial) does not depend on what else is in the run
    one = hz.run_injnorm_sweep(hz.ExperimentConfig(p=2, d=12, trials=3, no_timing=True))
    many = hz.run_injnorm_sweep(hz.ExperimentConfig(p=2, d_min=10, d_max=12, trials=3, no_timing=True))
    assert [r for r in many if r["d"] == 12] == one


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"p": 2, "d": 20, "trials": 5, "no-timing": True, "seed": 3}))
    out = tmp_path / "o.csv"
    assert main(["injnorm-sweep", "--config", str(conf), "--trials", "2", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 2
    assert {r["seed"] for r in rows} == {"3"} and {r["d"] for r in rows} == {"20"}
    assert all(r["wall_ms"] == "0.0" for r in rows)


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"dimension": 3}))
    assert main(["bounds", "--config", str(conf)]) != 0
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "InvalidArgument"


def test_error_line_and_exit_code(capsys, tmp_path):
    assert main(["injnorm-sweep", "--p", "3", "--out", str(tmp_path / "x.csv")]) == 2
    line = capsys.readouterr().err.strip()
    payload = json.loads(line)
    assert payload["command"] == "injnorm-sweep" and "d" in payload["message"]
    assert main(["injnorm-sweep", "--p", "3", "--d", "5", "--trials", "1", "--out", str(tmp_path / "no/such/x.csv")]) == 2


def test_bounds_files(tmp_path, capsys):
    out = tmp_path / "bounds.csv"
    assert main(["bounds", "--out", str(out), "--plot", str(tmp_path / "beta.svg")]) == 0
    alpha = read_rows(tmp_path / "bounds.alpha.csv")
    assert [float(r["alpha"]) for r in alpha] == pytest.approx([2.0, 2.870, 3.588], abs=0.005)
    beta = read_rows(tmp_path / "bounds.beta.csv")
    assert all(r["beta"] == r["beta_mirror"] for r in beta)
    gamma = read_rows(tmp_path / "bounds.gamma.csv")
    assert [float(r["d"]) for r in gamma] == [1e2, 1e4, 1e6, 1e8]
    res = [float(r["scaled_residual"]) for r in gamma]
    assert res[1] < res[0] and res[2] < res[1]
    ET.parse(tmp_path / "beta.svg")


def test_spectra_command(tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert main(["spectra", "--p", "3", "--m", "150", "--trials", "3", "--out", str(out),
                 "--plot", str(tmp_path / "h.svg")]) == 0
    summary = dict(line.split("=", 1) for line in capsys.readouterr().out.split())
    assert summary["kind"] == "BHGAE"
    assert float(summary["l1_distance"]) < 0.1
    assert float(summary["edge_rel_error"]) < 0.05
    assert read_rows(out)[0].keys() == {"bin_lo", "bin_hi", "emp_density", "theory_density"}
    ET.parse(tmp_path / "h.svg")


def test_spectra_complex_matches_real_density():
    summary, _, _ = hz.run_spectra(hz.ExperimentConfig(p=3, m=200, field="complex", trials=2))
    assert summary.kind == "cBHGAE"
    assert summary.l1_distance < 0.06


def test_duality_command(tmp_path, capsys):
    out = tmp_path / "du.csv"
    assert main(["duality", "--trials", "6", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 6
    for r in rows:
        assert float(r["relative_gap"]) < 1e-3
        assert float(r["gme_T"]) == pytest.approx(float(r["gme_hodge_T"]), abs=2 * max(float(r["relative_gap"]), 1e-12))
    rows = hz.run_duality(hz.ExperimentConfig(p=2, d=4, trials=5))
    assert max(r["relative_gap"] for r in rows) < 1e-9


def test_duality_rejects_small_codimension():
    with pytest.raises(InvalidArgument):
        hz.run_duality(hz.ExperimentConfig(p=4, d=5))


def test_sample_tensor(tmp_path):
    out = tmp_path / "t.npz"
    assert main(["sample-tensor", "--p", "3", "--d", "6", "--field", "complex", "--seed", "4", "--out", str(out)]) == 0
    T = load_tensor(out)
    assert (T.d, T.p, T.field) == (6, 3, "complex")


def test_ratio_figure_small(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["ratio-figure", "--d-min", "8", "--d-max", "12", "--d-step", "4", "--trials", "2",
                 "--restarts", "3", "--out", str(out), "--plot", str(tmp_path / "r.svg")]) == 0
    rows = read_rows(out)
    assert len(rows) == 4
    for r in rows:
        assert 0 < float(r["skew"]) and 0 < float(r["asym"]) and 0 < float(r["sym"])
        assert float(r["skew_over_asym"]) == pytest.approx(float(r["skew"]) / float(r["asym"]), rel=1e-9)
    ET.parse(tmp_path / "r.svg")
    assert main(["ratio-figure", "--p", "4", "--d", "8", "--out", str(out)]) == 2


def test_ratio_curves_slowly_varying():
    rows = hz.run_ratio_figure(hz.ExperimentConfig(d_min=20, d_max=60, d_step=20, trials=2, restarts=4))
    means = hz.ratio_means(rows)
    for key in ("skew", "asym", "sym"):
        vals = np.array([m[key] for m in means.values()])
        assert np.all(vals > 1) and np.all(vals < 6)
        assert vals.max() / vals.min() < 1.3
