"""Tests for the command-line experiment runner and its CSV contract."""

import math

import numpy as np
import pytest

from tsvf_sim.cli import main
from tsvf_sim.experiments import EXPERIMENTS


def run_cli(*args):
    return main(list(args))


def test_list_names_every_experiment(capsys):
    assert run_cli("list") == 0
    out = capsys.readouterr().out
    for name in ("born", "weakvalue", "convergence", "commutator",
                 "robustness", "threshold", "decay"):
        assert name in out


def test_born_csv_layout(tmp_path):
    out = tmp_path / "born.csv"
    code = run_cli("run", "--experiment", "born", "--seed", "7",
                   "--param", "alpha2=0.36", "--param", "trials=2000",
                   "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# meta experiment=born seed=7")
    assert "alpha2=0.36" in lines[0] and "trials=2000" in lines[0]
    assert lines[1].startswith("# summary ")
    assert lines[2] == "trial,outcome"
    assert len(lines) == 3 + 2000
    outcomes = {line.split(",")[1] for line in lines[3:]}
    assert outcomes <= {"1", "-1"}


def test_born_summary_frequency_within_binomial_band(tmp_path):
    out = tmp_path / "born.csv"
    run_cli("run", "--experiment", "born", "--seed", "11",
            "--param", "trials=20000", "--out", str(out))
    summary = out.read_text().splitlines()[1]
    fields = dict(kv.split("=") for kv in summary.removeprefix("# summary ").split())
    freq = float(fields["frequency_plus"])
    assert abs(freq - 0.36) < 3 * math.sqrt(0.36 * 0.64 / 20000)


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("run", "--experiment", "weakvalue", "--seed", "5",
            "--param", "trials=5000")
    assert run_cli(*args, "--out", str(a)) == 0
    assert run_cli(*args, "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_changes_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("run", "--experiment", "born", "--seed", "1",
            "--param", "trials=500", "--out", str(a))
    run_cli("run", "--experiment", "born", "--seed", "2",
            "--param", "trials=500", "--out", str(b))
    assert a.read_bytes() != b.read_bytes()


def test_convergence_columns_and_slope(tmp_path):
    out = tmp_path / "conv.csv"
    code = run_cli("run", "--experiment", "convergence", "--seed", "1",
                   "--param", "Ns=100,1000,10000,100000", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[2] == "N,residual"
    fields = dict(kv.split("=") for kv in lines[1].removeprefix("# summary ").split())
    assert abs(float(fields["slope"]) - (-0.5)) < 0.01


def test_unknown_experiment_exits_2(capsys):
    assert run_cli("run", "--experiment", "nope") == 2
    assert "nope" in capsys.readouterr().err


def test_unknown_param_exits_2_and_names_key(capsys):
    assert run_cli("run", "--experiment", "born", "--param", "bogus=1") == 2
    err = capsys.readouterr().err
    assert "bogus" in err


def test_malformed_param_value_exits_2(capsys):
    assert run_cli("run", "--experiment", "born", "--param", "trials=abc") == 2
    assert "trials" in capsys.readouterr().err


def test_param_without_equals_exits_2(capsys):
    assert run_cli("run", "--experiment", "born", "--param", "trials") == 2
    assert "KEY=VALUE" in capsys.readouterr().err


def test_out_of_range_param_exits_2(capsys):
    assert run_cli("run", "--experiment", "born", "--param", "alpha2=1.5") == 2
    assert "alpha2" in capsys.readouterr().err


def test_missing_experiment_exits_2(capsys):
    assert run_cli("run") == 2
    assert "experiment" in capsys.readouterr().err


@pytest.mark.parametrize("seed", ["-1", "18446744073709551616", "2.5", "xyz"])
def test_invalid_seed_exits_2(seed):
    assert run_cli("run", "--experiment", "decay", "--seed", seed) == 2


def test_seed_defaults_to_zero(tmp_path):
    out = tmp_path / "d.csv"
    run_cli("run", "--experiment", "decay", "--out", str(out))
    assert "seed=0" in out.read_text().splitlines()[0]


def test_config_file_supplies_everything(tmp_path):
    out = tmp_path / "born.csv"
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# a comment line\n"
        "experiment = born\n"
        "seed = 9\n"
        "trials = 1000\n"
        f"out = {out}\n"
    )
    assert run_cli("run", "--config", str(cfg)) == 0
    meta = out.read_text().splitlines()[0]
    assert "experiment=born" in meta and "seed=9" in meta and "trials=1000" in meta


def test_flags_override_config_file(tmp_path):
    out = tmp_path / "born.csv"
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("experiment = born\nseed = 9\ntrials = 1000\n")
    assert run_cli("run", "--config", str(cfg), "--seed", "4",
                   "--param", "trials=600", "--out", str(out)) == 0
    meta = out.read_text().splitlines()[0]
    assert "seed=4" in meta and "trials=600" in meta


def test_config_file_bad_line_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("experiment born\n")
    assert run_cli("run", "--config", str(cfg)) == 2
    assert "key=value" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path):
    assert run_cli("run", "--config", str(tmp_path / "absent.cfg")) == 2


def test_unwritable_output_exits_3(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    out = blocker / "sub.csv"  # parent is a regular file
    code = run_cli("run", "--experiment", "decay", "--out", str(out))
    assert code == 3
    assert "cannot write" in capsys.readouterr().err


def test_runtime_failure_exits_3(capsys):
    # post_angle = pi/4 makes the backward state orthogonal to |+>
    code = run_cli("run", "--experiment", "weakvalue",
                   "--param", f"post_angle={math.pi / 4}",
                   "--param", "trials=10")
    assert code == 3
    assert "runtime error" in capsys.readouterr().err


def test_threads_env_validation(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TSVF_SIM_THREADS", "banana")
    assert run_cli("run", "--experiment", "decay", "--out",
                   str(tmp_path / "d.csv")) == 2
    assert "TSVF_SIM_THREADS" in capsys.readouterr().err


def test_threads_env_cap_accepted(tmp_path, monkeypatch):
    monkeypatch.setenv("TSVF_SIM_THREADS", "1")
    out = tmp_path / "k.csv"
    assert run_cli("run", "--experiment", "commutator",
                   "--param", "brute_max=4", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[2] == "spins,method,scale,identity_error"


def test_commutator_rows_ordered_by_spin_count(tmp_path, monkeypatch):
    monkeypatch.setenv("TSVF_SIM_THREADS", "0")  # 0 = auto
    out = tmp_path / "k.csv"
    run_cli("run", "--experiment", "commutator", "--param", "brute_max=5",
            "--param", "closed_Ns=1000000", "--out", str(out))
    rows = [line.split(",") for line in out.read_text().splitlines()[3:]]
    brute = [r for r in rows if r[1] == "brute"]
    assert [int(r[0]) for r in brute] == [1, 2, 3, 4, 5]
    closed = [r for r in rows if r[1] == "closed"]
    assert np.isclose(float(closed[0][2]), 5e-7)


def test_robustness_csv_brute_column(tmp_path):
    out = tmp_path / "r.csv"
    assert run_cli("run", "--experiment", "robustness", "--seed", "3",
                   "--param", "env_sizes=8,10,12", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[2] == "env_size,n_collapsed,log_ratio,ratio,brute_ratio"
    first = lines[3].split(",")
    assert np.isclose(float(first[3]), float(first[4]), rtol=1e-9)


def test_robustness_env_sizes_must_exceed_n(capsys):
    assert run_cli("run", "--experiment", "robustness",
                   "--param", "n=5", "--param", "env_sizes=4,8") == 2
    assert "env_size" in capsys.readouterr().err


def test_threshold_experiment_brackets(tmp_path):
    out = tmp_path / "t.csv"
    assert run_cli("run", "--experiment", "threshold", "--out", str(out)) == 0
    for line in out.read_text().splitlines()[3:]:
        target, size, at, below = line.split(",")
        assert float(at) >= float(target)
        if below:
            assert float(below) < float(target)


def test_decay_rows_match_closed_form(tmp_path):
    out = tmp_path / "d.csv"
    run_cli("run", "--experiment", "decay", "--param", "n0=1000",
            "--param", "time_constant=2.0", "--param", "t_max=4.0",
            "--param", "steps=5", "--out", str(out))
    rows = [line.split(",") for line in out.read_text().splitlines()[3:]]
    assert len(rows) == 5
    for t_str, remaining_str in rows:
        assert np.isclose(float(remaining_str),
                          1000 * math.exp(-float(t_str) / 2.0), atol=1e-9)


def test_every_experiment_has_schema_defaults():
    for exp in EXPERIMENTS.values():
        names = [p.name for p in exp.params]
        assert len(names) == len(set(names))
        for p in exp.params:
            assert p.kind in ("int", "float", "int_list", "float_list")
