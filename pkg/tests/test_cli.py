import csv
import json

import pytest

from chaoscope.cli import main

SWEEP_OP = '{"kind":"scalar_multiple","lambda":$lambda,"inner":"B"}'


def verdicts(report):
    return {p["predicate"]: p["verdict"] for p in report["result"]["predicates"]}


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_missing_operator_is_usage_error(capsys):
    code, _, err = run(["classify", "--x", "e1"], capsys)
    assert code == 2
    assert "operator spec required" in err


def test_malformed_spec_names_field(capsys):
    code, _, err = run(["classify", "--op",
                        '{"kind":"weighted_backward_shift","weights":{"rule":"bogus"}}',
                        "--x", "e1", "--horizon", "64"], capsys)
    assert code == 2
    assert "rule" in err


def test_classify_doubling_third(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["classify", "--op", "doubling", "--x", "1/3", "--y", "0",
                      "--horizon", "256", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert verdicts(rep)["proximal"] == "refuted"
    man = rep["manifest"]
    assert man["command"] == "classify"
    assert len(man["config_hash"]) == 64


def test_classify_pair_requires_y(capsys):
    code, _, err = run(["classify-pair", "--op", "2B", "--x", "e1"], capsys)
    assert code == 2
    assert "--y" in err


def test_classify_writes_trace_csv(tmp_path, capsys):
    csv_path = tmp_path / "t.csv"
    code, out, _ = run(["classify", "--op", "0.5B", "--x", "e3", "--horizon", "128",
                        "--trace-csv", str(csv_path)], capsys)
    assert code == 0
    json.loads(out)
    rows = list(csv.DictReader(csv_path.open()))
    assert len(rows) == 128


def test_sweep_rows(capsys):
    code, out, _ = run(["sweep", "--op", SWEEP_OP, "--start", "0.5", "--stop", "2.0",
                        "--step", "0.25", "--horizon", "512"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert [float(r["lambda"]) for r in rows] == [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
    for r in rows:
        assert (r["sensitive"] == "true") == (float(r["lambda"]) > 1)
    assert set(rows[0]) == {"lambda", "dichotomy", "sensitive", "cesaro_bounded",
                            "ly_criterion"}


def test_sweep_single_point(capsys):
    code, out, _ = run(["sweep", "--op", SWEEP_OP, "--start", "2", "--stop", "2",
                        "--step", "1", "--horizon", "256"], capsys)
    assert code == 0
    assert len(out.strip().splitlines()) == 2


@pytest.mark.parametrize("start,stop,step", [("0.5", "2", "0"), ("2", "0.5", "0.25")])
def test_sweep_bad_range(start, stop, step, capsys):
    code, _, _ = run(["sweep", "--op", SWEEP_OP, "--start", start, "--stop", stop,
                      "--step", step], capsys)
    assert code == 2


def test_sweep_template_must_mention_param(capsys):
    code, _, err = run(["sweep", "--op", "2B", "--start", "1", "--stop", "2",
                        "--step", "1"], capsys)
    assert code == 2
    assert "$lambda" in err


def test_construct_failure_report(capsys):
    code, out, _ = run(["construct", "--op", "halfB", "--targets", "e1,e2,e3",
                        "--samples", "4", "--horizon", "4096"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["status"] == "failure"
    assert res["basis"] == []
    assert res["diagnostics"]


def test_construct_no_targets(capsys):
    code, out, _ = run(["construct", "--op", "2B", "--samples", "4"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["basis"] == []


def test_criterion_mean_ly(capsys):
    code, out, _ = run(["criterion", "mean-ly", "--op", "2B", "--cap", "10"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "certified"
    code, out, _ = run(["criterion", "mean-ly", "--op", "I", "--cap", "10"], capsys)
    assert json.loads(out)["result"]["verdict"] == "refuted"


def test_criterion_ly(capsys):
    code, out, _ = run(["criterion", "ly", "--op", "2B"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "certified"


def test_search_irregular_block(capsys):
    code, out, _ = run(["search-irregular", "--op", "2B", "--horizon", "4096"], capsys)
    assert code == 0
    assert "result" in json.loads(out)


def test_export_trace(tmp_path, capsys):
    path = tmp_path / "tr.csv"
    code, _, _ = run(["export-trace", "--op", "doubling", "--x", "1/3", "--y", "0",
                      "--horizon", "64", "--out", str(path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 64


def test_reports_are_byte_identical(tmp_path, capsys):
    argv = ["classify", "--op", "2B", "--x", '{"kind":"pattern","index":"k^2",'
            '"amplitude":"k*2^(-k^2)","k_min":2}', "--horizon", "1024", "--seed", "7"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
