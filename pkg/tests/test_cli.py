import json
import math

import numpy as np
import pytest

from sirgld.cli import main
from sirgld.epi_data import load_series

HEADER = "day,new_infected,new_died,new_recovered\n"


@pytest.fixture(scope="module")
def sir_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sim") / "sir.csv"
    assert main(["simulate", "--model", "sir", "--noise", "0", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def gld_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sim") / "gld.csv"
    assert main(["simulate", "--model", "gld", "--out", str(path)]) == 0
    return path


def test_validate_ok(tmp_path, capsys):
    p = tmp_path / "ok.csv"
    p.write_text(HEADER + "1,2,0,0\n2,3,0,1\n3,5,1,0\n")
    assert main(["validate", str(p)]) == 0
    assert "valid, 3 days" in capsys.readouterr().out


def test_validate_writes_derived_columns(tmp_path):
    p = tmp_path / "ok.csv"
    p.write_text(HEADER + "1,2,0,0\n2,3,0,1\n")
    out = tmp_path / "derived.csv"
    assert main(["validate", str(p), "--out", str(out)]) == 0
    assert out.read_text().splitlines()[-1] == "2,3,0,1,5,1,4"


def test_validate_negative_count(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text(HEADER + "1,2,0,0\n2,-3,0,0\n")
    assert main(["validate", str(p)]) == 1
    assert "row 3" in capsys.readouterr().err


def test_validate_empty(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    assert main(["validate", str(p)]) == 1


def test_validate_missing_file(tmp_path):
    assert main(["validate", str(tmp_path / "nope.csv")]) == 1


def test_fit_gld(gld_csv, tmp_path):
    assert main(["fit-gld", str(gld_csv), "--truncate", "60", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "gld_fit.json").read_text())
    assert report["converged"] is True
    assert report["sigma"] == pytest.approx(5, rel=0.05)
    assert report["beta"] == pytest.approx(0.8, rel=0.05)
    assert report["mu"] == pytest.approx(30, abs=0.5)
    assert report["N_hat"] == pytest.approx(70_000, rel=0.05)
    rows = [line.split(",") for line in (tmp_path / "gld_curve.csv").read_text().splitlines()[1:]]
    F = np.array([float(r[1]) for r in rows])
    assert np.all((F > 0) & (F < 1)) and np.all(np.diff(F) > 0)


def test_fit_gld_two_days(tmp_path):
    p = tmp_path / "two.csv"
    p.write_text(HEADER + "1,5,0,0\n2,7,0,0\n")
    assert main(["fit-gld", str(p), "--out", str(tmp_path)]) == 1


def test_fit_gld_not_converged(gld_csv, tmp_path):
    assert main(["fit-gld", str(gld_csv), "--max-iterations", "3", "--out", str(tmp_path)]) == 2
    assert json.loads((tmp_path / "gld_fit.json").read_text())["converged"] is False


def test_fit_sir_round_trip(sir_csv, tmp_path):
    assert main(["fit-sir", str(sir_csv), "--N", "10000", "--truncate", "60", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "bbs_fit.json").read_text())
    assert report["lambda"] == pytest.approx(2e-5, rel=0.01)
    assert report["gamma"] == pytest.approx(0.1, rel=0.01)
    assert report["window_s"] == 7


def test_fit_sir_N_too_small(sir_csv, tmp_path, capsys):
    assert main(["fit-sir", str(sir_csv), "--N", "100", "--out", str(tmp_path)]) == 1
    assert "negative" in capsys.readouterr().err


def test_fit_sir_not_converged(sir_csv, tmp_path):
    args = ["fit-sir", str(sir_csv), "--N", "10000", "--truncate", "60", "--max-iterations", "2", "--out", str(tmp_path)]
    assert main(args) == 2


def test_lplot_both_models(gld_csv, tmp_path):
    args = ["lplot", str(gld_csv), "--t-conv", "117", "--N", "70000", "--start", "20", "--stop", "24", "--out", str(tmp_path)]
    assert main(args) == 0
    lines = (tmp_path / "lplot.csv").read_text().splitlines()
    assert lines[0] == "truncation_day,estimate,model,status"
    models = [line.split(",")[2] for line in lines[1:]]
    assert models == ["GLD"] * 5 + ["SIR"] * 5


def test_lplot_infinite_t_conv_gld_only(gld_csv, tmp_path):
    assert main(["lplot", str(gld_csv), "--t-conv", "inf", "--stop", "25", "--out", str(tmp_path)]) == 0
    models = {line.split(",")[2] for line in (tmp_path / "lplot.csv").read_text().splitlines()[1:]}
    assert models == {"GLD"}


def test_forecast(gld_csv, tmp_path):
    truncated = tmp_path / "part.csv"
    truncated.write_text("".join(gld_csv.read_text().splitlines(keepends=True)[:32]))
    assert main(["forecast", str(truncated), "--horizon", "30", "--out", str(tmp_path)]) == 0
    header = json.loads((tmp_path / "forecast.json").read_text())
    assert set(header) == {"N_hat", "lambda", "gamma", "stabilization_day"}
    assert header["N_hat"] == pytest.approx(70_000, rel=0.1)
    rows = (tmp_path / "forecast.csv").read_text().splitlines()
    assert rows[0] == "t,S,I,R,T" and len(rows) == 32
    assert math.isclose(float(rows[1].split(",")[0]), 31.0)


def test_forecast_override_N(gld_csv, tmp_path):
    assert main(["forecast", str(gld_csv), "--horizon", "0", "--N", "80000", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "forecast.json").read_text())["N_hat"] == 80000


def test_forecast_truncate_matches_truncated_file(gld_csv, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["forecast", str(gld_csv), "--truncate", "31", "--horizon", "5", "--N", "70000", "--out", str(a)]) == 0
    short = tmp_path / "short.csv"
    short.write_text("".join(gld_csv.read_text().splitlines(keepends=True)[:32]))
    assert main(["forecast", str(short), "--horizon", "5", "--N", "70000", "--out", str(b)]) == 0
    assert (a / "forecast.csv").read_bytes() == (b / "forecast.csv").read_bytes()
    assert (a / "forecast.csv").read_text().splitlines()[1].startswith("31,")


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["simulate", "--model", "sir", "--noise", "1", "--seed", "11", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    load_series(a)


def test_simulate_stdout(capsys):
    assert main(["simulate", "--model", "gld", "--days", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == HEADER.strip() and len(out) == 6


def test_reruns_are_byte_identical(gld_csv, tmp_path):
    outs = []
    for name in ("r1", "r2"):
        d = tmp_path / name
        assert main(["fit-gld", str(gld_csv), "--truncate", "40", "--out", str(d)]) == 0
        outs.append(((d / "gld_fit.json").read_bytes(), (d / "gld_curve.csv").read_bytes()))
    assert outs[0] == outs[1]
