import csv
import json

import pytest

from alomari.cli import main
from alomari.harness import CSV_COLUMNS, RunConfig, run_sweep, summarize, verify_pair, Tolerances
from alomari.errors import InvalidParameters
from alomari.funcspace import Interval, get_function
from alomari.rules import RuleParams

SMALL = {
    "interval": [0, 1],
    "lambda_grid": [0, "1/3", 1],
    "mu_grid": [0.5, 1],
    "x_grid": [0.25, "mid", "xstar"],
    "corpus_filter": ["e2", "abs_c030", "hoelder_a050_c030"],
    "tolerances": {"integral": 1e-12, "constant": 1e-9, "inequality": 1e-8},
    "output": {"format": "csv", "path": "ignored.csv"},
}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_bound_trapezoid(capsys):
    code, out = run(capsys, "bound", "--a", "0", "--b", "1", "--lambda", "1", "--mu", "0.5", "--x", "0.5")
    assert code == 0
    assert "Case1 order2 constant 0.08333333333333333" in out.out
    line = next(l for l in out.out.splitlines() if l.startswith("Case1 order2"))
    assert line.endswith("verdict Match")


def test_bound_ostrowski(capsys):
    code, out = run(capsys, "bound", "--lambda", "0", "--mu", "1", "--x", "0.25")
    assert code == 0 and "first-derivative bound 0.3125 " in out.out


def test_bound_near_simpson_warning(capsys):
    code, out = run(capsys, "bound", "--lambda", "0.33333", "--mu", "0.5", "--x", "0.5")
    assert code == 0 and "warning" in out.out and "exactness 1 not 3" in out.out


def test_usage_errors(capsys):
    assert run(capsys, "bound", "--lambda", "2", "--mu", "0.5")[0] == 2
    assert run(capsys, "bound", "--a", "1", "--b", "0", "--lambda", "0", "--mu", "0.5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2
    assert run(capsys, "verify", "--config", "missing.json")[0] == 2


def test_eval(capsys):
    code, out = run(capsys, "eval", "--f", "e4", "--lambda", str(1 / 3), "--mu", "0.5")
    assert code == 0
    assert json.loads(out.out)["E"] == pytest.approx(-1 / 120)


def test_exactness_single_and_sweep(capsys, tmp_path):
    code, out = run(capsys, "exactness", "--lambda", "0.25", "--mu", "0.5", "--x", str(1 / 3))
    assert code == 0 and "classified 3" in out.out
    path = tmp_path / "sweep.csv"
    assert run(capsys, "exactness", "--sweep", "--out", str(path))[0] == 0
    rows = list(csv.DictReader(path.open()))
    assert rows and all(r["agree"] == "true" for r in rows)
    assert {"lambda", "mu", "x", "classified_n", "probed_n", "agree"} == set(rows[0])


def test_table1(capsys):
    code, out = run(capsys, "table1", "--a", "-1", "--b", "2")
    rows = list(csv.DictReader(out.out.splitlines()))
    assert code == 0 and len(rows) == 8
    lam1 = next(r for r in rows if r["row"] == "lambda=1")
    assert lam1["classified_n"] == "1" and lam1["agree"] == "true"


@pytest.mark.parametrize("x,alpha", [("0", "1"), ("0.5", "1"), ("0.3", "0.5")])
def test_sharpness(capsys, x, alpha):
    code, out = run(capsys, "sharpness", "--x", x, "--alpha", alpha)
    assert code == 0
    gap = float(out.out.split("relative gap ")[1])
    assert gap <= 1e-8


def test_sharpness_domain(capsys):
    assert run(capsys, "sharpness", "--x", "0.8", "--alpha", "1")[0] == 2


def test_modulus_cmd(capsys):
    code, out = run(capsys, "modulus", "--f", "abs_c030", "--order", "1", "--h", "0.1")
    assert code == 0 and float(out.out) == pytest.approx(0.1)


def test_sperling_cmd(capsys):
    code, out = run(capsys, "sperling", "--s", "4")
    d = json.loads(out.out)
    assert code == 0 and d["general"]["Dtilde1"] == 135045
    assert d["s4"]["factor_recomputed"] == 4575644650432


def _write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_verify_small_config_deterministic(capsys, tmp_path):
    cfg = _write(tmp_path, SMALL)
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert run(capsys, "verify", "--config", str(cfg), "--out", str(out1))[0] == 0
    code, out = run(capsys, "verify", "--config", str(cfg), "--out", str(out2), "--workers", "2")
    assert code == 0 and "violations=0" in out.out
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0].split(",")
    assert tuple(header) == CSV_COLUMNS
    assert not list(tmp_path.glob(".*.tmp"))


def test_verify_json_format(capsys, tmp_path):
    cfg = _write(tmp_path, SMALL)
    out = tmp_path / "r.json"
    assert run(capsys, "verify", "--config", str(cfg), "--out", str(out), "--format", "json")[0] == 0
    data = json.loads(out.read_text())
    assert data[0]["exactness"]["classified"] == data[0]["exactness"]["probed"]


def test_verify_zero_tolerance_can_fail(capsys, tmp_path):
    cfg = dict(SMALL, corpus_filter=["e2"], lambda_grid=[1], mu_grid=[0.5], x_grid=["mid"],
               tolerances={"integral": 1e-12, "constant": 1e-9, "inequality": -1.0})
    assert run(capsys, "verify", "--config", str(_write(tmp_path, cfg)))[0] == 2
    # trapezoid on t^2 attains its order-2 bound; only the 1e-6 sup inflation is left as slack
    rec = verify_pair(RuleParams(1.0, 0.5, 0.5, Interval(0.0, 1.0)), get_function("e2", Interval(0.0, 1.0)),
                      Tolerances(inequality=0.0))
    tight = [c for c in rec.checks if c.source == "Case1-order2"][0]
    assert tight.satisfied and 0 <= tight.slack <= 1e-6 * tight.bound


def test_config_validation():
    with pytest.raises(InvalidParameters):
        RunConfig.from_dict(dict(SMALL, corpus_filter=["nothing"]))
    with pytest.raises(InvalidParameters):
        RunConfig.from_dict(dict(SMALL, lambda_grid=[]))
    with pytest.raises(InvalidParameters):
        RunConfig.from_dict(dict(SMALL, x_grid=[2.0]))


def test_empty_filter_usage_error(capsys, tmp_path):
    cfg = dict(SMALL, corpus_filter=["nothing"])
    assert run(capsys, "verify", "--config", str(_write(tmp_path, cfg)))[0] == 2


def test_packaged_default_config_loads():
    cfg = RunConfig.load("default.json")
    assert cfg.interval == Interval(0.0, 1.0) and cfg.function_ids()


def test_records_sorted():
    recs = run_sweep(RunConfig.from_dict(SMALL))
    keys = [(r.params.lam, r.params.mu, r.params.x, r.function_id) for r in recs]
    assert keys == sorted(keys)
    assert summarize(recs).violations == 0
