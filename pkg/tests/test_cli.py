import csv
import io
import json
import math

import numpy as np
import pytest

from deaorient import DataError, Orientation, RunConfig, emit_bars, evaluate_dmus, read_csv, solve_lo, solve_qo
from deaorient.batch import parse_zero_policy, report_table, thread_count, write_csv
from deaorient.cli import main

from conftest import PUBLISHED, orient


@pytest.fixture
def data(tmp_path, tech):
    path = tmp_path / "five_units.csv"
    write_csv(tech, path)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_eval_lo_report_matches_published(data, tmp_path):
    out = tmp_path / "lo"
    assert main(["eval", "--data", str(data), "--model", "lo", "--orient", "1,1:1,1", "--rts", "crs",
                 "--out", str(out)]) == 0
    rows = {r["dmu"]: r for r in _rows(f"{out}.csv")}
    for dmu, (beta, rho, target, proj) in PUBLISHED[("lo", (1, 1), (1, 1))].items():
        assert float(rows[dmu]["beta"]) == pytest.approx(beta, abs=1e-3)
        assert float(rows[dmu]["rho"]) == pytest.approx(rho, abs=1e-3)
        got = [float(rows[dmu][f"target:{v}"]) for v in ("x1", "x2", "y1", "y2")]
        assert np.allclose(got, target, atol=1e-3)
        got = [float(rows[dmu][f"projection:{v}"]) for v in ("x1", "x2", "y1", "y2")]
        assert np.allclose(got, proj, atol=1e-3)


def test_eval_qo_mixed_orientation(data, tmp_path):
    out = tmp_path / "qo"
    assert main(["eval", "--data", str(data), "--model", "qo", "--orient", "1,0.5:1,0.5", "--rts", "crs",
                 "--out", str(out)]) == 0
    rows = {r["dmu"]: r for r in _rows(f"{out}.csv")}
    for dmu, (beta, rho, _, _) in PUBLISHED[("qo", (1, 0.5), (1, 0.5))].items():
        assert float(rows[dmu]["beta"]) == pytest.approx(beta, abs=1e-3)
        assert float(rows[dmu]["rho"]) == pytest.approx(rho, abs=1e-3)


def test_zero_orientation_is_a_data_error(data, capsys):
    assert main(["eval", "--data", str(data), "--model", "qo", "--orient", "0,0:0,0"]) == 1
    assert "orientation must be nonzero" in capsys.readouterr().err


def test_negative_entry_exit_code(tmp_path, capsys):
    path = tmp_path / "neg.csv"
    path.write_text("dmu,i:x1,o:y1\nA,1,2\nB,-1,3\n")
    assert main(["self-check", "--data", str(path)]) == 1
    assert main(["eval", "--data", str(path)]) == 1
    assert "negative" in capsys.readouterr().err


def test_self_check_passes_on_five_units(data, capsys):
    assert main(["self-check", "--data", str(data)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 6


def test_self_check_corrupted_comparator_fails(data, capsys):
    assert main(["self-check", "--data", str(data), "--corrupt-comparator", "--samples", "5"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_round_trip_full_precision_and_table(data, tech, tmp_path):
    out = tmp_path / "both"
    assert main(["eval", "--data", str(data), "--model", "both", "--orient", "1,0.5:1,0.5",
                 "--out", str(out)]) == 0
    doc = json.loads((tmp_path / "both.json").read_text())
    d = orient((1, 0.5), (1, 0.5))
    rows = _rows(f"{out}.csv")
    for model, solve in (("lo", solve_lo), ("qo", solve_qo)):
        recs = doc["results"][model]
        assert [r["dmu"] for r in recs] == list(tech.names)
        for rec in recs:
            ev = solve(tech, rec["dmu"], d)
            assert rec["beta"] == ev.beta  # bit-for-bit
            assert rec["target"]["y"] == [float(v) for v in ev.target.y]
        for row in (r for r in rows if r["model"] == model):
            ev = solve(tech, row["dmu"], d)
            assert row["beta"] == f"{ev.beta:.6f}"
            assert row["rho"] == f"{ev.rho:.6f}"


def test_round_option(data, capsys):
    assert main(["eval", "--data", str(data), "--orient", "1,1:1,1", "--round", "3"]) == 0
    out = capsys.readouterr().out
    assert "lo,B,0.333,0.500,0.667,1.333,1.333,2.667,0.667,0.667,2.667,2.667" in out


def test_config_file_and_flag_precedence(data, tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "qo", "orient": "1,1:0.5,0.5", "rts": "crs", "second_stage": "off"}))
    assert main(["eval", "--data", str(data), "--config", str(cfg), "--round", "3"]) == 0
    assert "qo,B,0.382" in capsys.readouterr().out
    assert main(["eval", "--data", str(data), "--config", str(cfg), "--model", "lo", "--round", "3"]) == 0
    assert "lo,B,0.400" in capsys.readouterr().out


def test_orientation_from_file(data, tmp_path, capsys):
    f = tmp_path / "d.txt"
    f.write_text("1,0.5:1,0.5\n")
    assert main(["eval", "--data", str(data), "--orient", str(f), "--round", "3"]) == 0
    assert "lo,D,0.667,0.333" in capsys.readouterr().out


def test_bars_for_dmu_b(data, capsys):
    assert main(["bars", "--data", str(data), "--model", "both", "--orient", "1,0.5:1,0.5", "--dmu", "B"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 8
    qo_y1 = next(r for r in rows if r["model"] == "qo" and r["variable"] == "y1")
    qo_x1 = next(r for r in rows if r["model"] == "qo" and r["variable"] == "x1")
    assert float(qo_y1["factor"]) == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-6)
    assert qo_y1["inverse_factor"] == qo_x1["factor"]


def test_bars_unknown_dmu(data):
    assert main(["bars", "--data", str(data), "--dmu", "Q"]) == 1


def test_emit_bars_rows(tech):
    d = orient((1, 0.5), (1, 0.5))
    rows = emit_bars(solve_lo(tech, "B", d))
    assert [r["kind"] for r in rows] == ["contraction"] * 2 + ["dilation"] * 2
    assert np.allclose([r["factor"] for r in rows], [0.6, 0.8, 1.4, 1.2])
    assert np.allclose([r["relative_slack"] for r in rows], [0.4, 0.2, 0.4, 0.2])
    assert [r["orientation_coeff"] for r in rows] == [1.0, 0.5, 1.0, 0.5]
    rows = emit_bars(solve_lo(tech, "A", d))
    assert all(r["factor"] == 1 and r["relative_slack"] == 0 for r in rows)


def test_read_csv_diagnostics(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("dmu,x1,o:y1\nA,1,2\n")
    with pytest.raises(DataError, match="prefix"):
        read_csv(bad)
    bad.write_text("dmu,i:x1,o:y1\nA,1,two\nB,1\n")
    with pytest.raises(DataError) as err:
        read_csv(bad)
    assert len(err.value.diagnostics) == 2


def test_thread_count_env(monkeypatch, tech):
    monkeypatch.setenv("DEAORIENT_THREADS", "0")
    assert thread_count() is None
    monkeypatch.setenv("DEAORIENT_THREADS", "1")
    assert thread_count() == 1
    serial = report_table(evaluate_dmus(tech, RunConfig(model="both")))
    monkeypatch.setenv("DEAORIENT_THREADS", "4")
    assert report_table(evaluate_dmus(tech, RunConfig(model="both"))) == serial


def test_zero_policy_parsing():
    assert parse_zero_policy("impossible") == "impossible"
    assert parse_zero_policy("y1=impossible, y2=potential") == {"y1": "impossible", "y2": "potential"}


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        RunConfig.from_mapping({"modle": "lo"})
    cfg = RunConfig.from_mapping({"orient": {"d_minus": [1, 1], "d_plus": [0, 1]}, "tolerances": {"bisection": 1e-10}})
    assert isinstance(cfg.orient, Orientation) and cfg.bisection_tol == 1e-10
