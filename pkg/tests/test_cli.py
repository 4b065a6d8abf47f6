import json
from fractions import Fraction

import pytest

from kakutani import scheme as sch
from kakutani.cli import main
from kakutani.errors import ConfigError
from kakutani.cli import load_config, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partitions_csv(capsys):
    code, out, _ = run(capsys, "partitions", "fig2", "-n", "2")
    assert code == 0
    assert out.splitlines() == [
        "level,largest_length,n_intervals,missing_mass,endpoints",
        "0,1/1,1,0/1,0/1 1/1",
        "1,1/2,3,0/1,0/1 1/2 2/3 1/1",
        "2,1/3,5,0/1,0/1 1/4 1/3 1/2 2/3 1/1",
    ]


def test_partitions_svg(tmp_path, capsys):
    code, out, _ = run(capsys, "--out", str(tmp_path), "--svg", "partitions", "third")
    assert code == 0
    svg = (tmp_path / "partitions.svg").read_text()
    assert svg.startswith("<svg") and "211/243" in svg
    assert (tmp_path / "partitions.csv").exists()


def test_points_formats(capsys):
    code, out, _ = run(capsys, "points", "dyadic", "--lambda", "1/4")
    assert code == 0 and out.splitlines()[1:] == ["0,0/1,0", "1,1/4,0.25", "2,1/2,0.5", "3,3/4,0.75"]
    code, out, _ = run(capsys, "points", "fig3", "--level", "2", "--format", "json")
    assert json.loads(out)["points"] == ["0/1", "1/2"]


def test_points_needs_one_threshold(capsys):
    assert run(capsys, "points", "dyadic")[0] == 2
    assert run(capsys, "points", "dyadic", "--lambda", "1/4", "--level", "2")[0] == 2


def test_count_columns(capsys):
    code, out, _ = run(capsys, "count", "dyadic", "--grid", "geometric:1/2:0:3")
    rows = [r.split(",") for r in out.splitlines()]
    assert rows[0] == ["lambda_exact", "lambda_float", "count_A", "count_X", "lambda_count_A", "predicted_constant"]
    assert rows[1][:4] == ["1/1", "1", "1", "1"]
    assert rows[4][:4] == ["1/8", "0.125", "15", "8"]
    assert rows[4][4] == "1.875"


def test_count_without_zero_symbol(capsys):
    code, out, _ = run(capsys, "count", "binary-tail-desc", "--grid", "geometric:1/2:1:4")
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert [r[2] for r in rows] == ["2", "4", "8", "16"]


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "eighths", "--precision", "128")
    doc = json.loads(out)
    assert doc["renewal"]["rank"] == 1 and doc["renewal"]["exponents"] == [1, 2, 3, 3]
    assert doc["spectral"]["mode"] == "geometric"
    assert len(doc["spectral"]["R_star_sweep"]) == 3
    code, out, _ = run(capsys, "analyze", "fig3")
    doc = json.loads(out)
    assert doc["renewal"]["rank"] == 2 and doc["renewal"]["limit"]["mode"] == "non-lattice"
    assert "r_hat" in doc["spectral"]
    code, out, _ = run(capsys, "analyze", "binary-tail", "--taylor-terms", "4")
    doc = json.loads(out)
    assert doc["spectral"]["taylor_g"] == ["-1/2", "0/1", "0/1", "0/1", "0/1"]


def test_discrepancy_outputs(tmp_path, capsys):
    code, out, err = run(capsys, "discrepancy", "dyadic", "--grid", "geometric:1/2:1:10")
    assert code == 0
    assert [r.split(",")[3] for r in out.splitlines()[1:]] == [f"1/{2**n}" for n in range(1, 11)]
    fit = json.loads(err)["fit"]
    assert float(fit["rho_hat"]) == pytest.approx(0.5, abs=1e-12)
    code, _, _ = run(capsys, "--out", str(tmp_path), "--svg", "discrepancy", "third", "--grid", "ladder:1:12")
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"discrepancy.csv", "fit.json", "discrepancy.svg"}


def test_determinism_across_threads(capsys):
    a = run(capsys, "--threads", "1", "discrepancy", "sixths", "--grid", "decade:4:1:3")
    b = run(capsys, "--threads", "4", "discrepancy", "sixths", "--grid", "decade:4:1:3")
    assert a == b


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "dyadic", "third")
    assert code == 0
    assert out.splitlines()[-1].endswith(" 0 failed")


@pytest.mark.parametrize(
    "argv,code",
    [
        (["partitions", "1/2,1/3"], 2),  # mass not one
        (["partitions", "nope"], 2),
        (["--precision", "32", "analyze", "dyadic"], 2),
        (["--budget", "0", "count", "dyadic"], 3),
        (["--budget", "0", "verify"], 3),
        (["--budget", "100", "points", "dyadic", "--lambda", "1/4096"], 3),
        (["count", "dyadic", "--grid", "decade:4:3:1"], 2),
        (["count", "dyadic", "--grid", "spiral:1:2"], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    doc = json.loads(err.strip().splitlines()[-1])
    assert doc["code"] == code and doc["error"]


def test_config_file(tmp_path, capsys):
    cfg = {
        "schema_version": 1,
        "scheme": sch.scheme_to_dict(sch.bundled("dyadic")),
        "grid": {"kind": "geometric", "base": "1/2", "start": 1, "stop": 3},
    }
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "--config", str(p), "count")
    assert code == 0 and len(out.splitlines()) == 4
    # command-line values win over the config
    code, out, _ = run(capsys, "--config", str(p), "count", "--grid", "geometric:1/2:1:2")
    assert len(out.splitlines()) == 3


def test_config_strictness(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"schema_version": 1, "colour": "red"}))
    with pytest.raises(ConfigError):
        load_config(str(p), "count")
    p.write_text(json.dumps({"schema_version": 1, "levels": 3}))
    with pytest.raises(ConfigError):
        load_config(str(p), "count")
    p.write_text(json.dumps({"scheme": "dyadic"}))
    with pytest.raises(ConfigError):
        load_config(str(p), "count")


def test_grid_specs():
    assert parse_grid("decade:1:0:2") == [1, Fraction(1, 10), Fraction(1, 100)]
    assert parse_grid({"kind": "ladder", "start": 1, "stop": 2}, sch.bundled("third")) == [Fraction(2, 3), Fraction(4, 9)]
    with pytest.raises(ConfigError):
        parse_grid({"kind": "decade", "start": 0, "stop": 1, "step": 2})
