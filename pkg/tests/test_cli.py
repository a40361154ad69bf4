import numpy as np
import pytest

from tseval import TimeSeries, load_csv, write_csv
from tseval.cli import main


def run_cli(*args):
    return main(list(args))


def test_simulate_per_trial_csvs(tmp_path):
    out = tmp_path / "sims"
    code = run_cli(
        "simulate", "--dgp", "s1", "--trials", "3", "--seed", "4", "--out-dir", str(out)
    )
    assert code == 0
    files = sorted(p.name for p in out.glob("*.csv"))
    assert files == ["s1-0000.csv", "s1-0001.csv", "s1-0002.csv"]
    series = load_csv(out / "s1-0000.csv")
    assert len(series) == 200
    assert series.values.min() == 1.0


def test_simulate_long_csv(tmp_path):
    long = tmp_path / "long.csv"
    code = run_cli(
        "simulate", "--dgp", "s2", "--trials", "2", "--length", "50",
        "--seed", "1", "--long-csv", str(long),
    )
    assert code == 0
    lines = long.read_text().splitlines()
    assert lines[0] == "trial,t,value"
    assert len(lines) == 1 + 2 * 50
    assert lines[1].startswith("0,0,")


def test_simulate_requires_some_output():
    assert run_cli("simulate", "--dgp", "s1") == 1


def test_benchmark_writes_results_and_ranks(tmp_path, capsys):
    out = tmp_path / "res.csv"
    ranks = tmp_path / "ranks.csv"
    code = run_cli(
        "benchmark", "--dgp", "s1", "--trials", "2", "--seed", "3",
        "--out", str(out), "--ranks", str(ranks), "--bayes-samples", "2000",
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "method,mean_rank,sd_rank" in printed
    assert "p_left" in printed
    assert out.read_text().splitlines()[0] == "problem_id,method,estimate,true_loss,apae,pae,pct_diff"
    assert ranks.read_text().splitlines()[0] == "method,mean_rank,sd_rank"
    assert len(out.read_text().splitlines()) == 1 + 22


def test_evaluate_then_rank_and_compare(tmp_path, capsys):
    rng = np.random.default_rng(2)
    series_path = tmp_path / "s.csv"
    write_csv(TimeSeries(np.cumsum(rng.normal(size=150)) + 40.0, name="s"), series_path)
    out = tmp_path / "results.csv"
    code = run_cli(
        "evaluate", "--csv", str(series_path), "--p", "3",
        "--methods", "Holdout,CV,CV-Bl,Rep-Holdout", "--out", str(out), "--seed", "2",
    )
    assert code == 0
    assert len(out.read_text().splitlines()) == 5

    capsys.readouterr()
    assert run_cli("rank", "--results", str(out)) == 0
    ranked = capsys.readouterr().out.splitlines()
    assert ranked[0] == "method,mean_rank,sd_rank"
    assert len(ranked) == 5

    assert run_cli("compare", "--results", str(out), "--baseline", "Rep-Holdout",
                   "--rope", "2.5", "--samples", "2000") == 0
    compared = capsys.readouterr().out.splitlines()
    assert compared[0] == "method,baseline,p_left,p_rope,p_right"
    assert len(compared) == 4


def test_evaluate_auto_embedding(tmp_path):
    y = np.sin(2 * np.pi * np.arange(400) / 20.0) + 0.05 * np.random.default_rng(0).normal(size=400)
    series_path = tmp_path / "wave.csv"
    write_csv(TimeSeries(y, name="wave"), series_path)
    out = tmp_path / "res.csv"
    code = run_cli(
        "evaluate", "--csv", str(series_path), "--methods", "Holdout",
        "--out", str(out), "--d-max", "6",
    )
    assert code == 0


def test_stationarity_table(tmp_path, capsys):
    rng = np.random.default_rng(0)
    flat = tmp_path / "flat.csv"
    write_csv(TimeSeries(rng.normal(size=300), name="flat"), flat)
    walk = tmp_path / "walk.csv"
    write_csv(TimeSeries(np.cumsum(rng.normal(size=300)), name="walk"), walk)
    code = run_cli("stationarity", "--csv", str(flat), "--csv", str(walk))
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,I,S,rejections"
    flat_row = next(l for l in lines if l.startswith("flat,"))
    assert flat_row.split(",")[1] == "0"
    walk_row = next(l for l in lines if l.startswith("walk,"))
    assert walk_row.split(",")[1] == "1"


def test_embed_subcommand(tmp_path, capsys):
    series_path = tmp_path / "s.csv"
    write_csv(TimeSeries(np.arange(30.0), name="s"), series_path)
    out = tmp_path / "rows.csv"
    code = run_cli("embed", "--csv", str(series_path), "--p", "4", "--out", str(out))
    assert code == 0
    assert capsys.readouterr().out.strip() == "p=4"
    lines = out.read_text().splitlines()
    assert lines[0] == "target_time,x1,x2,x3,x4,y"
    assert len(lines) == 1 + 26


def test_config_file_supplies_flags(tmp_path, capsys):
    config = tmp_path / "run.conf"
    out = tmp_path / "sims"
    config.write_text(
        f"# simulation settings\ndgp=s1\ntrials=2\nseed=8\nout_dir={out}\n"
    )
    code = run_cli("simulate", "--config", str(config))
    assert code == 0
    assert len(list(out.glob("*.csv"))) == 2


def test_flags_override_config(tmp_path):
    config = tmp_path / "run.conf"
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    config.write_text(f"dgp=s1\ntrials=1\nout_dir={out_a}\n")
    code = run_cli("simulate", "--config", str(config), "--out-dir", str(out_b))
    assert code == 0
    assert not out_a.exists()
    assert len(list(out_b.glob("*.csv"))) == 1


def test_config_rejects_unknown_key(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("dgp=s1\nwibble=3\n")
    assert run_cli("simulate", "--config", str(config)) == 1


def test_fatal_error_exit_code(tmp_path):
    assert run_cli("rank", "--results", str(tmp_path / "missing.csv")) == 1


def test_partial_failure_exit_code(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "tiny.csv"
    write_csv(TimeSeries(rng.normal(size=20), name="tiny"), path)
    code = run_cli(
        "evaluate", "--csv", str(path), "--p", "2", "--learner", "knn",
        "--methods", "Holdout,Preq-Bls", "--out", str(tmp_path / "r.csv"),
    )
    assert code == 2


def test_determinism_of_benchmark_command(tmp_path):
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out_a, out_b):
        assert run_cli("benchmark", "--dgp", "s2", "--trials", "2", "--seed", "5",
                       "--out", str(out), "--no-compare", "--bayes-samples", "1000") == 0
    assert out_a.read_bytes() == out_b.read_bytes()
