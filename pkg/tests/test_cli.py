import json
import math
from pathlib import Path

import pytest

from approxlab.cli import CATALOG, main

# one cheap invocation per subcommand
SMALL_RUNS = {
    "rearrange": ["--seq", "1,3,2"],
    "norm": ["--spec", "l:2:1", "--seq", "1,1,1,1"],
    "lz-norm": ["--p", "1", "--r", "1", "--gamma", "1", "--seq", "1,1"],
    "membership": ["--spec", "l:1:1", "--beta", "2", "--N", "4096"],
    "dilate": ["--seq", "8,4,2,1", "--C", "2", "--p", "2", "--r", "1"],
    "witness": ["--case", "b", "--p", "1", "--q", "2", "--r", "1", "--N", "4096"],
    "ones-ratio": ["--s1", "l:1:2", "--s2", "l:1:1", "--Nmax", "1000", "--points", "8"],
    "polya": ["--alpha", "1", "--N", "100"],
    "prescribe": ["--eps", "1,0.5,0"],
    "svd": ["--random", "5", "--seed", "3"],
    "separate-linear": ["--s1", "l:1:1", "--s2", "l:1:4", "--Nmax", "2000", "--points", "9"],
    "separate-teo2": ["--s1", "l:1:2", "--s2", "l:1:1", "--Nmax", "4096"],
    "corbrud": ["--r", "1", "--p", "1", "--q", "2", "--N", "4096"],
    "sandwich": ["--N", "20"],
    "kfunc": ["--x", "3,1", "--t", "0.5"],
    "rho": ["--x", "1,0.5", "--kmax", "20"],
    "cond-a": ["--kmax", "4"],
    "k2": ["--x", "1,1,1", "--points", "5"],
    "abn": ["--x", "1,1", "--N", "20"],
    "prop-witness": ["--nmax", "40"],
    "list": [],
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def payload(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    return json.loads(out)["result"]


def test_every_subcommand_is_covered():
    listed = {cmd for _, cmds in CATALOG for cmd in cmds} | {"list"}
    assert listed == set(SMALL_RUNS)


@pytest.mark.parametrize("name", sorted(SMALL_RUNS))
def test_subcommand_runs_and_is_deterministic(name, capsys):
    first = run(capsys, name, *SMALL_RUNS[name])
    second = run(capsys, name, *SMALL_RUNS[name])
    assert first[0] == 0
    assert first[1] == second[1]


def test_rearrange_output(capsys):
    assert payload(capsys, "rearrange", "--seq", "1,3,2")["rearranged"] == [3, 2, 1]


def test_kfunc_from_csv(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("3\n1\n")
    res = payload(capsys, "kfunc", "--couple", "l1linf", "--x", str(data), "--t", "0.5")
    assert res["upper"] == 1.5 and res["bound_type"] == "exact"


def test_witness_report(capsys):
    res = payload(capsys, "witness", "--case", "b", "--p", "1", "--q", "2", "--r", "1")
    assert res["agrees"]
    assert res["oracle_verdicts"] == ["converges", "diverges"]


def test_separate_teo2_diverges(capsys):
    res = payload(capsys, "separate-teo2", "--s1", "l:1:2", "--s2", "l:1:1", "--scheme", "hilbert",
                  "--Nmax", "4096")
    assert res["verdict"] == "diverges"


def test_list_catalog(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for label in ("Lemma 2", "Theorem 4.1", "Corollary 4.4", "Lemma 5.1", "Theorem 6.2"):
        assert label in out
    cat = payload(capsys, "list", "--format", "json")["catalog"]
    assert all(set(e) == {"result", "subcommands"} for e in cat)


def test_float_format_and_infinity(capsys):
    res = payload(capsys, "norm", "--spec", "l:inf:0.5", "--seq", "1,1,1,1,1,1,1,1")
    assert res["spec"]["p"] == "inf"
    assert math.isclose(res["norm"], math.sqrt(8), rel_tol=1e-15)


def test_out_directory(tmp_path, capsys):
    code, out, _ = run(capsys, "ones-ratio", "--s1", "l:1:2", "--s2", "l:1:1", "--Nmax", "100",
                       "--points", "5", "--out", str(tmp_path))
    assert code == 0 and out == ""
    data = json.loads((tmp_path / "result.json").read_text())
    assert data["ok"]
    rows = (tmp_path / "profile.csv").read_text().splitlines()
    assert rows[0] == "N,ratio"
    assert len(rows) == 6


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"experiment": "polya", "params": {"alpha": 1, "N": 100}}))
    res = payload(capsys, "--config", str(cfg))
    assert res["ratio"] == pytest.approx(0.505)
    # explicit flags override the file
    res = payload(capsys, "--config", str(cfg), "--N", "10")
    assert res["N"] == 10


def test_subcommand_config(tmp_path, capsys):
    cfg = tmp_path / "w.json"
    cfg.write_text(json.dumps({"params": {"case": "a", "p": 1, "q": 1, "r": 1, "e": 1,
                                          "N": 4096}}))
    res = payload(capsys, "witness", "--config", str(cfg))
    assert res["family"]["beta"] == 1.5


@pytest.mark.parametrize("argv", [
    ["list", "--bogus"],
    ["norm", "--spec", "l:-1:1", "--seq", "1"],
    ["polya", "--alpha", "-2"],
    ["witness", "--case", "b", "--p", "2", "--q", "1", "--r", "1"],
    ["ones-ratio", "--s1", "l:1:1", "--s2", "l:1:1", "--Nmax", "0"],
    [],
])
def test_bad_input_exits_two(argv, capsys):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_config_exits_two(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"experiment": "polya", "params": {"alpha": 1, "nope": 3}}))
    assert run(capsys, "--config", str(cfg))[0] == 2
    cfg.write_text("{not json")
    assert run(capsys, "--config", str(cfg))[0] == 2


@pytest.mark.parametrize("argv", [
    ["sandwich", "--scale", "4"],
    ["prop-witness", "--family", "constant", "--nmax", "20"],
])
def test_violations_exit_one(argv, capsys):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert json.loads(out)["ok"] is False
    assert "property violated" in err


CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("criterion_*.json")), ids=lambda p: p.stem)
def test_criterion_configs_run(path, capsys):
    code, out, _ = run(capsys, "--config", str(path))
    assert code == 0
    assert json.loads(out)["ok"] is True
