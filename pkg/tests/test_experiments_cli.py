import json
import math

import pytest

from rigidity_lab import cli
from rigidity_lab import experiments as X
from rigidity_lab.graph import SimpleGraph, complete_graph, save_graph
from rigidity_lab.pebble import rigid_components
from rigidity_lab.random_models import RngStream, gnp


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text: str) -> str:
    """CSV text without its timestamp line."""
    first, rest = text.split("\n", 1)
    assert first.startswith("# generated ")
    return rest


def test_config_validation():
    with pytest.raises(ValueError):
        X.ExperimentConfig("sweep", c_grid=[3.5], trials=0)
    with pytest.raises(ValueError):
        X.ExperimentConfig("sweep")
    with pytest.raises(ValueError):
        X.ExperimentConfig("nope", c_grid=[1.0])
    assert X.ExperimentConfig("loose", n=100, tau_grid=[3]).n == [100]


def test_csv_six_significant_figures():
    text = X.to_csv([{"a": 1 / 3, "b": 7, "c": float("nan"), "d": 123456789.0}])
    assert body(text) == "a,b,c,d\n0.333333,7,nan,1.23457e+08\n"
    assert X.to_csv([{"a": 1}], stamp=False) == "a\n1\n"


def test_trial_streams_do_not_depend_on_grid():
    a = X.transition_trial((800, 3.8, 5, 2, 0.01))
    cfg = X.ExperimentConfig("sweep", n=[800], c_grid=[3.3, 3.8], trials=3, seed=5)
    recs, _ = X.sweep_transition(cfg)
    b = next(r for r in recs if r.c == 3.8 and r.trial == 2)
    assert (a.edges, a.largest, a.core32) == (b.edges, b.largest, b.core32)
    assert X.trial_stream(1, 0, 10, 3.5, 0).key != X.trial_stream(1, 0, 10, 3.5, 1).key


def test_width_invariance():
    cfg1 = X.ExperimentConfig("sweep", n=[1500], c_grid=[3.4, 3.8], trials=2, seed=3, width=1)
    cfg2 = X.ExperimentConfig("sweep", n=[1500], c_grid=[3.4, 3.8], trials=2, seed=3, width=2)
    rows1, cols = X.record_rows(X.sweep_transition(cfg1)[0])
    rows2, _ = X.record_rows(X.sweep_transition(cfg2)[0])
    assert [[r[k] for k in cols] for r in rows1] == [[r[k] for k in cols] for r in rows2]


def test_record_invariants():
    for r in X.sweep_transition(X.ExperimentConfig("sweep", n=[2000], c_grid=[3.2, 3.8], trials=3, seed=4))[0]:
        assert r.core3 <= r.core32 <= r.n
        assert r.largest <= r.n and r.second <= r.largest
        if r.big:
            assert r.largest <= r.core32


def test_planted_mid_size_component_is_reported():
    n = 2000
    sparse = gnp(n, 1.0, RngStream(21))
    planted = [(u + 100, v + 100) for u, v in complete_graph(8).edge_list()]
    g = SimpleGraph(n, sorted(set(sparse.canonical_edges()) | set(planted)))
    sizes = rigid_components(g).sizes()
    bad = X.gap_violations(sizes, n, 0.01)
    assert bad and 8 <= max(bad) <= 20
    assert X.gap_violations([1, 2, 3, 500], n, 0.01) == []


def test_far_subcritical_gap():
    rows = X.gap_histogram(X.ExperimentConfig("gap", n=[3000], c_grid=[1.0], trials=3, seed=1))
    assert all(r["largest"] <= 3 and r["mid"] == 0 for r in rows)


def test_loose_rows_partition_and_children():
    rows = X.loose_scaling(X.ExperimentConfig("loose", n=[10 ** 5], tau_grid=[2.85], trials=3, seed=2))
    for r in rows:
        assert r["L1"] + r["L2"] + r["L3"] + r["cutoff"] == r["loose"]
        assert r["mean_children"] < 1
        assert r["loose_scaled"] == pytest.approx(r["loose"] / (math.log(10 ** 5) ** 3 * math.sqrt(10 ** 5)))
    rounds = X.round_lengths(X.ExperimentConfig("rounds", n=[2000], c_grid=[3.8], trials=2, seed=2))
    assert set(rounds[0]) == set(X.ROUND_COLUMNS)


def test_compare_rows_have_columns():
    rows = X.compare_analytic(X.ExperimentConfig("compare", n=[5000], c_grid=[3.2, 3.7], trials=2, seed=3))
    assert set(rows[0]) == set(X.COMPARE_COLUMNS)
    assert math.isnan(rows[0]["q_analytic"]) and rows[1]["q_analytic"] > 0.7


# -- command line ----------------------------------------------------------------

@pytest.fixture
def k4_file(tmp_path):
    p = tmp_path / "k4.txt"
    p.write_text(save_graph(SimpleGraph(5, complete_graph(4).edge_list() + [(4, 0), (4, 1)])))
    return p


def test_cli_components_orient_cores(capsys, k4_file, tmp_path):
    code, out, _ = run(capsys, "components", k4_file, "--check")
    assert code == 0 and out == "component 0: 0 1 2 3 4\n"
    code, out, _ = run(capsys, "orient", k4_file)
    assert code == 0 and len(out.splitlines()) == 8 and all(" -> " in x for x in out.splitlines())
    code, out, _ = run(capsys, "cores", k4_file, "--k", 3)
    assert out.splitlines()[:2] == ["core k=3 size=4", "0 1 2 3"]
    code, out, _ = run(capsys, "cores", k4_file, "--three-plus-two")
    assert out.splitlines()[-1] == "4 <- 0 1"
    k6 = tmp_path / "k6.txt"
    k6.write_text(save_graph(complete_graph(6)))
    code, out, _ = run(capsys, "orient", k6)
    assert code == 1 and "witness 0 1 2 3 4 5" in out


def test_cli_bad_graph_file(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\n1 1\n")
    code, _, err = run(capsys, "components", p)
    assert code == 1 and "line 2" in err


def test_cli_sweep_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--c-min", 3.3, "--c-max", 3.8, "--c-step", 0.5, "--n", 1500, "--trials", 2, "--seed", 9]
    run(capsys, *args, "--out", a)
    run(capsys, *args, "--out", b, "--width", 2)
    assert body(a.read_text()) == body(b.read_text())
    header = body(a.read_text()).splitlines()[0].split(",")
    assert header[:4] == ["n", "c", "seed", "trial"] and "wall_time" not in header


def test_cli_seed_from_env_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("RIGIDITY_SEED", "77")
    _, out_env, _ = run(capsys, "gap", "--c", 3.8, "--n", 1000, "--trials", 1)
    _, out_flag, _ = run(capsys, "gap", "--c", 3.8, "--n", 1000, "--trials", 1, "--seed", 77)
    assert body(out_env) == body(out_flag)
    assert ",77,0," in body(out_env)
    monkeypatch.setenv("RIGIDITY_SEED", "x")
    with pytest.raises(SystemExit):
        cli.main(["gap", "--c", "3.8", "--n", "100", "--trials", "1"])


def test_cli_config_file_and_override(capsys, tmp_path):
    conf = tmp_path / "cfg.json"
    conf.write_text(json.dumps({"n": [1000], "c": [3.8], "trials": 2, "seed": 4}))
    _, out, _ = run(capsys, "gap", "--config", conf)
    assert len(body(out).splitlines()) == 3
    _, out, _ = run(capsys, "gap", "--config", conf, "--trials", 1)
    assert len(body(out).splitlines()) == 2


def test_cli_check_exit_codes(capsys):
    code, _, _ = run(capsys, "analytic", "--points", 50, "--check")
    assert code == 0
    # at tau=8 phase three is empty, so both fractions are zero and cannot decrease
    code, _, err = run(capsys, "loose", "--tau", 8, "--n", 100, 200, "--trials", 1, "--check")
    assert code == cli.CHECK_FAILED and "strictly decreasing" in err
    code, _, _ = run(capsys, "loose", "--tau", 8, "--n", 100, 200, "--trials", 1)
    assert code == 0


def test_cli_analytic_table(capsys, tmp_path):
    out = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "analytic", "--tau", 3.0, "--points", 11, "--out", out)
    lines = out.read_text().splitlines()
    assert any(x.startswith("# c2=3.58") for x in lines)
    rows = [x for x in lines if not x.startswith("#")]
    assert rows[0] == "s,delta,a3,mu,lambda" and len(rows) == 12
    assert rows[1].startswith("0,3,")


def test_cli_compare_and_rounds(capsys):
    code, out, _ = run(capsys, "compare", "--c", 3.7, "--n", 20000, "--trials", 1, "--check")
    assert code == 0 and body(out).startswith(",".join(X.COMPARE_COLUMNS))
    code, out, _ = run(capsys, "rounds", "--tau", 2.85, "--n", 2000, "--trials", 2)
    assert code == 0 and "round_ratio_mean" in out
