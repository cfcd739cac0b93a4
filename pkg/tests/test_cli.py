import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from parahoric.cli import SCHEMA_VERSION, main

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(*args, env=None):
    res = CliRunner().invoke(main, [str(a) for a in args], env=env)
    return res, (json.loads(res.output) if res.exit_code == 0 else None)


def test_crit_both_conventions():
    res, out = run("crit", "--weight", FIX / "weight_2_1_-1_-2.json")
    assert res.exit_code == 0
    assert out["schema_version"] == SCHEMA_VERSION
    assert out["crit"] == [-1, 0, 1] and out["crit_contragredient"] == [-1, 0, 1]
    assert out["regular"] and out["H-regular"]
    _, out2 = run("crit", "--weight", FIX / "weight_2_0.json")
    assert out2["crit"] == [-2, -1, 0] and out2["crit_contragredient"] == [0, 1, 2]


def test_malformed_weight_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res, _ = run("crit", "--weight", bad)
    assert res.exit_code != 0 and "malformed" in res.output
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"p": 3, "n": 1}))
    res, _ = run("crit", "--weight", schema)
    assert res.exit_code != 0 and "schema error" in res.output
    res, _ = run("crit", "--weight", tmp_path / "missing.json")
    assert res.exit_code != 0


def test_slope_check():
    _, out = run("slope-check", "--weight", FIX / "weight_2_0.json", "--alpha", "1")
    assert out["primes"]["p"] == {"bound": 3, "non_critical": True}
    _, out = run("slope-check", "--weight", FIX / "weight_0_0.json", "--alpha", "2*p^1")
    assert out["slope"] == 1 and not out["primes"]["p"]["non_critical"]
    res, _ = run("slope-check", "--weight", FIX / "weight_2_0.json", "--alpha", "0")
    assert res.exit_code != 0


def test_branch():
    _, out = run("branch", "--weight", FIX / "weight_2_0.json", "--j", -1)
    assert out["dimension"] == 1 and out["nu"] is not None
    _, out = run("branch", "--weight", FIX / "weight_2_0.json", "--j", 1)
    assert out["dimension"] == 0 and out["nu"] is None


def test_up_slopes():
    _, out = run("up-slopes", "--weight", FIX / "weight_0_0.json", "--M", 4)
    assert [r["slope"] for r in out["slopes"] if r["trusted"]] == [1, 2]
    res, _ = run("up-slopes", "--weight", FIX / "weight_0_0.json", "--M", 0)
    assert res.exit_code != 0


def test_precision_from_environment():
    _, out = run("slope-check", "--weight", FIX / "weight_2_0.json", "--alpha", "1", env={"PARAHORIC_PREC": "7"})
    assert out["alpha"].endswith("O(p^7)")
    res, _ = run("--prec", 0, "crit", "--weight", FIX / "weight_2_0.json")
    assert res.exit_code != 0


def test_lift():
    _, out = run("lift", "--level", 11, "--p", 3, "--M", 6)
    assert out["specializes_to_classical"] and out["eigen_defect_valuation"] >= 6
    assert out["level"] == 33


def test_lp_is_admissible_and_deterministic():
    args = ("lp", "--level", 11, "--p", 3, "--beta", 2, "--M", 6)
    _, a = run(*args)
    _, b = run(*args)
    assert a == b
    assert a["admissibility"]["h"] == 0 and a["admissibility"]["admissible"]
    assert a["report"]["beta_independent"]
    assert sorted(a["moments"]) == ["1", "2", "4", "5", "7", "8"]


def test_lp_without_newform():
    res, _ = run("lp", "--level", 1, "--p", 3)
    assert res.exit_code != 0 and "no rational cuspidal" in res.output


def test_reconstruct_fixture():
    _, out = run("reconstruct", "--data", FIX / "interpolation_three_masses.json", "--h", 0)
    assert out["certificate"]["injective"] and out["precision"] >= 2
    assert out["moments"]["1"][0] == "-1*p^1 + O(p^2)"


def test_reconstruct_zero_data(tmp_path):
    from parahoric.galdist import all_characters
    items = [{"beta": 1, "chi": c.to_json(), "j": 0, "value": "0"} for c in all_characters(3, 1)]
    f = tmp_path / "zero.json"
    f.write_text(json.dumps({"p": 3, "crit": [0], "data": items}))
    _, out = run("reconstruct", "--data", f, "--h", 0)
    assert out["is_zero"]


def test_reconstruct_errors(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"crit": [0], "data": []}))
    res, _ = run("reconstruct", "--data", f, "--h", 0)
    assert res.exit_code != 0 and "schema error" in res.output
    res, _ = run("reconstruct", "--data", FIX / "interpolation_three_masses.json", "--h", 2)
    assert res.exit_code != 0 and "uniqueness" in res.output


def test_family_chart_cli():
    _, out = run("family-chart", "--level", 11, "--p", 3, "--D", 1, "--h", "1/2", "--M", 5)
    assert out["free_rank_one"] and out["specialization"]["surjective"]
    res, _ = run("family-chart", "--level", 11, "--p", 3, "--h", "x")
    assert res.exit_code != 0


@pytest.mark.parametrize("cmd", ["crit", "slope-check", "branch", "up-slopes", "lift", "lp", "reconstruct",
                                 "family-chart"])
def test_help(cmd):
    res = CliRunner().invoke(main, [cmd, "--help"])
    assert res.exit_code == 0 and "Usage" in res.output
