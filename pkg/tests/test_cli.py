"""CLI surface: subcommands, outputs, exit codes, determinism."""

import json

import pytest

from orlicz_eigen.cli import main

POWER2 = '{"family": "power", "params": {"p": 2}}'
SUM24 = '{"family": "sum_of_powers", "params": {"p": 2, "q": 4}}'
EXP2 = '{"family": "exp_minus_poly", "params": {"n": 2}}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0


def test_inspect_sum_of_powers(capsys):
    code, out, _ = run(capsys, "inspect", "--young", SUM24)
    assert code == 0
    payload = json.loads(out)
    assert payload["p_index"] == pytest.approx(4.0, abs=1e-6)
    assert payload["matuszewska"]["zero"]["exponent"] == \
        pytest.approx(2.0, abs=1e-2)
    assert payload["matuszewska"]["infinity"]["exponent"] == \
        pytest.approx(4.0, abs=1e-2)


def test_solve_json_and_csv(capsys, tmp_path):
    csv = tmp_path / "u.csv"
    code, out, _ = run(capsys, "solve", "--young", POWER2,
                       "--mesh", "interval:1.0,100", "--alpha", "1.0",
                       "--csv", str(csv))
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"]
    assert payload["lambda"] == pytest.approx(9.8696, rel=1e-3)
    header = csv.read_text().splitlines()[0]
    assert header == "x0,value"


def test_solve_bad_config_exit_2(capsys):
    code, _, err = run(capsys, "solve", "--young",
                       '{"family": "power", "params": {"p": 2, "zzz": 1}}',
                       "--mesh", "interval:1.0,100", "--alpha", "1.0")
    assert code == 2
    assert "zzz" in err


def test_sweep_derivative_check_passes(capsys, tmp_path):
    csv = tmp_path / "sweep.csv"
    plot = tmp_path / "plot.py"
    code, out, _ = run(capsys, "sweep", "--young", POWER2,
                       "--mesh", "interval:1.0,100",
                       "--alpha-min", "0.1", "--alpha-max", "10",
                       "--check", "derivative",
                       "--csv", str(csv), "--plot-script", str(plot))
    assert code == 0
    payload = json.loads(out)
    assert payload["checks"]["derivative"]["overall_pass"]
    assert csv.read_text().startswith("alpha,energy,quotient,lambda")
    assert "matplotlib" in plot.read_text()


def test_sweep_decay_small_domain_exit_2(capsys):
    code, _, err = run(capsys, "sweep", "--young", EXP2,
                       "--mesh", "interval:1.0,100",
                       "--alpha-min", "1", "--alpha-max", "10",
                       "--check", "decay")
    assert code == 2
    assert "inner radius" in err


def test_sweep_unknown_check_exit_2(capsys):
    code, _, _ = run(capsys, "sweep", "--young", POWER2,
                     "--mesh", "interval:1.0,100",
                     "--alpha-min", "0.1", "--alpha-max", "1",
                     "--check", "nonsense")
    assert code == 2


def test_nonlocal_solve(capsys):
    code, out, _ = run(capsys, "nonlocal", "--young", POWER2,
                       "--interval", "1.0", "--nodes", "32",
                       "--s", "0.5", "--alpha", "1.0", "--restarts", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["converged"]
    assert payload["tail_bound"] > 0.0


def test_sweep_csv_deterministic(capsys, tmp_path):
    paths = []
    for k in range(2):
        csv = tmp_path / f"s{k}.csv"
        code, _, _ = run(capsys, "sweep", "--young", SUM24,
                         "--mesh", "interval:1.0,50",
                         "--alpha-min", "0.1", "--alpha-max", "10",
                         "--seed", "3", "--csv", str(csv))
        assert code == 0
        paths.append(csv.read_bytes())
    assert paths[0] == paths[1]


def test_parallel_no_warm_sweep_matches_sequential(capsys, tmp_path):
    texts = []
    for flags in (["--no-warm", "--jobs", "1"], ["--no-warm", "--jobs", "4"]):
        csv = tmp_path / f"p{len(flags)}.csv"
        code, _, _ = run(capsys, "sweep", "--young", POWER2,
                         "--mesh", "interval:1.0,50",
                         "--alpha-min", "0.1", "--alpha-max", "10",
                         "--csv", str(csv), *flags)
        assert code == 0
        texts.append(csv.read_bytes())
    assert texts[0] == texts[1]
