import csv
import subprocess
import sys

import numpy as np
import pytest

from isac_subspace import Scenario, SweepSpec
from isac_subspace.cli import main
from isac_subspace.experiments import (BEAM_COLUMNS, CORR_COLUMNS, PARETO_COLUMNS, REGION_COLUMNS,
                                       beam_covariances, channel_for, max_rate, pareto_rows)


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_pareto_rows_pair_methods():
    scn, spec = Scenario(), SweepSpec(gamma_points=4)
    rows = pareto_rows(scn, spec)
    assert len(rows) == 8
    assert [r["method"] for r in rows[:2]] == ["closed", "oracle"]
    for closed, oracle in zip(rows[::2], rows[1::2]):
        assert closed["root_crb_deg"] == pytest.approx(oracle["root_crb_deg"], rel=1e-6)


def test_infeasible_point_has_blank_metrics():
    scn = Scenario()
    spec = SweepSpec(gamma_points=2, gamma_min_bpshz=1.0, gamma_max_bpshz=50.0)
    rows = pareto_rows(scn, spec)
    assert rows[-1]["regime"] == "infeasible"
    assert rows[-1].get("crb_trace") is None


def test_beampattern_peak_at_target():
    scn, spec = Scenario(), SweepSpec()
    ch = channel_for(scn, spec)
    bc = beam_covariances(scn, ch, 0.5 * max_rate(scn, ch))
    for R in (bc.ao, bc.detmax, bc.crbmin, bc.commopt):
        assert np.trace(R).real == pytest.approx(scn.P, rel=1e-9)


@pytest.mark.parametrize("cmd, name, columns", [
    ("pareto", "pareto.csv", PARETO_COLUMNS),
    ("beampattern", "beampattern.csv", BEAM_COLUMNS),
    ("corr-study", "corr_study.csv", CORR_COLUMNS),
])
def test_cli_writes_csv(tmp_path, cmd, name, columns):
    out = tmp_path / name
    assert main([cmd, "--out", str(out)]) == 0
    rows = read(out)
    assert rows and list(rows[0]) == columns
    if cmd == "corr-study":
        region = read(tmp_path / "corr_study_region.csv")
        assert list(region[0]) == REGION_COLUMNS
        assert max(float(r["G_normalized"]) for r in rows) == pytest.approx(1.0)
    if cmd == "beampattern":
        assert len(rows) == 361


def test_cli_threads_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["pareto", "--out", str(a)]) == 0
    assert main(["pareto", "--out", str(b), "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_export_sdp(tmp_path):
    out = tmp_path / "p.dat-s"
    assert main(["export-sdp", "--gamma", "2.0", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[-1].split()[0].isdigit()


def test_cli_seed_changes_channel(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["corr-study", "--out", str(a)])
    main(["corr-study", "--out", str(b), "--seed", "5"])
    assert a.read_bytes() != b.read_bytes()


def test_cli_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n_t = 10\nwidth = 3\n")
    assert main(["pareto", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert "width" in err and "line 2" in err
    assert main(["beampattern", "--gamma", "99", "--out", str(tmp_path / "y.csv")]) == 2
    assert main(["pareto", "--threads", "0"]) == 2
    assert main(["pareto", "--seed", "-1"]) == 2


def test_cli_validate(tmp_path):
    report = tmp_path / "report.txt"
    assert main(["validate", "--out", str(report)]) == 0
    assert report.read_text().splitlines()[-1].startswith("PASS summary")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "isac_subspace", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "export-sdp" in proc.stdout


def test_pareto_file_shape_and_monotone(tmp_path):
    out = tmp_path / "pareto.csv"
    main(["pareto", "--out", str(out)])
    rows = read(out)
    assert len(rows) == 40
    for method in ("closed", "oracle"):
        crb = [float(r["root_crb_deg"]) for r in rows if r["method"] == method]
        assert all(b >= a for a, b in zip(crb, crb[1:]))
    for c, o in zip(rows[::2], rows[1::2]):
        assert c["gamma_bpshz"] == o["gamma_bpshz"]
        assert float(c["root_crb_deg"]) == pytest.approx(float(o["root_crb_deg"]), rel=1e-2)


def test_beampattern_columns_agree(tmp_path):
    out = tmp_path / "b.csv"
    main(["beampattern", "--out", str(out)])
    rows = read(out)
    for r in rows:
        assert float(r["p_isac_ao"]) == pytest.approx(float(r["p_isac_detmax"]), abs=1e-9)
    at = next(r for r in rows if float(r["theta_deg"]) == 15.0)
    assert float(at["p_commopt"]) <= float(at["p_isac_ao"]) <= float(at["p_crbmin"]) + 1e-9


def test_corr_study_rank_matches_mean_nu1(tmp_path):
    out = tmp_path / "c.csv"
    main(["corr-study", "--out", str(out)])
    summary = read(out)
    region = read(tmp_path / "c_region.csv")
    assert sum(float(r["G_normalized"]) == 1.0 for r in summary) == 1
    for r in summary:
        assert abs(float(r["G"]) - float(r["G_quadrature"])) <= 1e-6 * float(r["G"])
    mean_nu1 = [np.mean([float(x["nu1_sq"]) for x in region if x["channel_id"] == r["channel_id"]])
                for r in summary]
    G = [float(r["G"]) for r in summary]
    assert list(np.argsort(G)) == list(np.argsort(mean_nu1))


def test_validate_report_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["validate", "--out", str(a)])
    main(["validate", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert "PASS mutation_varsigma_detected" in a.read_text()
