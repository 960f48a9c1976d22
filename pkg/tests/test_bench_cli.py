from __future__ import annotations

import csv
import io

import pytest

from isoexplore import bench
from isoexplore.bench import ExperimentConfig, fit_exponent, make_instance, rate_tolerance, run_experiment
from isoexplore.cli import main
from isoexplore.oracle import trees_isomorphic, verify_axiom
from isoexplore.tree import read_tree


def rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("error_rate", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("nope")
    with pytest.raises(ValueError):
        ExperimentConfig("scaling", family="trees")
    assert ExperimentConfig("scaling", base_seed=40).seed(2) == 42


@pytest.mark.parametrize("family", bench.FAMILIES)
def test_families_have_stated_truth(family):
    t1, t2, iso = make_instance(family, 3, 7, size=80)
    assert trees_isomorphic(t1, t2) == iso
    assert verify_axiom(t1, t2).ok


def test_rate_tolerance():
    assert rate_tolerance(0.125, 1000) == pytest.approx(0.156, abs=5e-4)


def test_fit_exponent():
    assert fit_exponent([10], [5]) is None
    assert fit_exponent([10, 100, 1000], [3, 30, 300]) == pytest.approx(1.0)


def test_error_rate_csv_and_reproducibility():
    cfg = ExperimentConfig("error_rate", "mh-iso", (6,), "mc", trials=30, base_seed=5)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.csv_text() == b.csv_text()
    table = rows(a.csv_text())
    assert list(table[0]) == bench.CSV_HEADER
    assert [int(r["trial"]) for r in table] == list(range(30))
    assert [int(r["seed"]) for r in table] == list(range(5, 35))
    assert a.summary["ci_low"] <= a.summary["failure_fraction"] <= a.summary["ci_high"]


def test_error_rate_no_instances():
    r = run_experiment(ExperimentConfig("error_rate", "mh-disjoint", (5,), "mc", trials=40))
    assert r.summary["failures"] == 0
    assert r.passed


def test_scaling_single_point():
    r = run_experiment(ExperimentConfig("scaling", "mh-iso", (6,), "lv", trials=5))
    assert r.summary["exponent"] == "n/a"
    assert r.passed


def test_scaling_baseline_is_linear():
    r = run_experiment(ExperimentConfig("scaling", "mh-disjoint", (6, 8, 10), "det", trials=3))
    assert 0.95 <= r.summary["exponent"] <= 1.05
    assert r.passed


def test_split_probability_variants():
    r = run_experiment(ExperimentConfig("split_probability", "single-leaf", (1,), "lv", trials=5))
    assert r.summary["fraction"] == 1.0
    r = run_experiment(ExperimentConfig("split_probability", "shape-mismatch", (5,), "lv", trials=5))
    assert r.summary["splits"] == 0
    assert r.summary["fraction"] == "n/a"
    assert all(row["verdict"] == "noniso" for row in rows(r.csv_text()))


def test_ir_occurrence_experiment():
    r = run_experiment(ExperimentConfig("ir_occurrence"))
    table = rows(r.csv_text())
    assert r.passed
    c5 = next(row for row in table if row["graph"] == "C5")
    assert (c5["aut_order"], c5["min_count"], c5["max_count"]) == ("10", "10", "10")
    rigid = next(row for row in table if row["graph"] == "rigid6")
    assert (rigid["leaves"], rigid["aut_order"]) == ("1", "1")


def test_bench_writes_out_file(tmp_path):
    out = tmp_path / "t.csv"
    run_experiment(ExperimentConfig("error_rate", "mh-iso", (5,), "lv", trials=4, out=str(out)))
    assert len(rows(out.read_text())) == 4


# -- CLI ------------------------------------------------------------------------------


def test_cli_gen_verify_run(tmp_path, capsys):
    a, b = tmp_path / "a.tree", tmp_path / "b.tree"
    assert main(["gen", "mh", "--h", "4", "--out", str(a)]) == 0
    assert main(["--seed", "3", "gen", "mh-shuffled", "--h", "4", "--out", str(b)]) == 0
    assert trees_isomorphic(read_tree(a), read_tree(b))
    assert main(["verify-axiom", str(a), str(b)]) == 0
    capsys.readouterr()
    assert main(["run", "--strategy", "lv", "--seed", "9", "--tree1", str(a), "--tree2", str(b)]) == 0
    table = rows(capsys.readouterr().out)
    assert table[0]["verdict"] == "match"
    assert table[0]["seed"] == "9"


def test_cli_pair_family(tmp_path):
    a, b = tmp_path / "a.tree", tmp_path / "b.tree"
    assert main(["gen", "mh-disjoint", "--h", "3", "--seed", "1", "--out", str(a)]) == 0
    assert main(["gen", "mh-disjoint", "--h", "3", "--seed", "1", "--which", "2", "--out", str(b)]) == 0
    assert not set(read_tree(a).leaf_colors()) & set(read_tree(b).leaf_colors())


def test_cli_verify_axiom_failure(tmp_path, capsys):
    bad = tmp_path / "bad.tree"
    bad.write_text("tree 5\n0 - -\n1 0 5\n2 0 -\n3 2 5\n4 2 6\n")
    assert main(["verify-axiom", str(bad)]) == 2
    assert "violation tree1 leaf 1 ~ tree1 leaf 3" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.tree"
    bad.write_text("tree 2\n0 - -\n1 0 4\n")
    assert main(["verify-axiom", str(bad)]) == 1
    assert "unary node" in capsys.readouterr().err
    assert main(["run", "--tree1", str(tmp_path / "missing"), "--tree2", str(bad)]) == 1


def test_cli_bench_and_breach(tmp_path, capsys, monkeypatch):
    out = tmp_path / "r.csv"
    code = main(["--trials", "20", "--out", str(out), "bench", "error_rate", "--h", "6", "--strategy", "mc"])
    assert code == 0
    assert len(rows(out.read_text())) == 20
    assert "# result=pass" in capsys.readouterr().out
    args = ["bench", "scaling", "--family", "mh-disjoint", "--strategy", "det", "--h", "4", "6", "--trials", "2"]
    assert main(args) == 0
    monkeypatch.setitem(bench.SCALING_WINDOWS, "det", (0.0, 0.5))
    assert main(args) == 2
    assert "# result=FAIL" in capsys.readouterr().err


def test_cli_ir_tree(tmp_path, capsys):
    g = tmp_path / "c4.g"
    g.write_text("p edge 4 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\n")
    assert main(["ir-tree", str(g)]) == 0
    assert capsys.readouterr().out.startswith("tree 13\n")
    g.write_text("p edge 2 1\ne 1 1\n")
    assert main(["ir-tree", str(g)]) == 1
