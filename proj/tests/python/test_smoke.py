import math

import pytest

import crowdcheck as cc


def test_graph_basics():
    g = cc.Graph.synthetic("star", 5)
    assert (g.node_count, g.edge_count) == (5, 4)
    assert g.neighbors(0) == [1, 2, 3, 4]
    assert cc.Graph.from_edges(2, [(0, 1), (1, 0)]).edge_count == 1


def test_graph_load(tmp_path):
    p = tmp_path / "edges.txt"
    p.write_text("# comment\n0 1\n1 2\n2 2\n")
    g = cc.Graph.load(str(p))
    assert (g.node_count, g.edge_count) == (3, 2)
    with pytest.raises(ValueError):
        cc.Graph.load(str(tmp_path / "missing.txt"))


def test_flagging_params():
    nf, f = cc.flagging_params(0.5, 0.5, 0.4)
    assert math.isclose(nf, 0.7) and math.isclose(f, 0.3)


def test_posterior():
    good = [(0.9, 0.9)] * 3
    assert math.isclose(cc.news_fake_posterior(0.2, good, [0, 1, 2], [1], 0), 0.2)
    spam = [(0.1, 0.1)] * 2
    assert math.isclose(cc.news_fake_posterior(0.2, spam, [0, 1], [1], 0), 0.02 / 0.74)


def test_topx():
    assert cc.topx([(0, 0.9, 10), (1, 0.5, 8), (2, 1.0, 20)], 2) == [2, 0]


def test_run_simulation_is_deterministic():
    g = cc.Graph.synthetic("erdos_renyi", 300, 0.02, 1)
    world = {"epochs": 10, "sources_per_epoch": 10}
    a = cc.run_simulation(g, world, "detective", 4)
    b = cc.run_simulation(g, world, "detective", 4)
    assert a == b
    assert len(a["epochs"]) == 10
    cum = [e["cumulative_utility"] for e in a["epochs"]]
    assert cum == sorted(cum)


def test_bad_config_raises():
    g = cc.Graph.synthetic("path", 10)
    with pytest.raises(ValueError):
        cc.run_simulation(g, {"not_a_key": 1}, "opt", 1)


def test_run_experiment_normalizes_oracle():
    g = cc.Graph.synthetic("erdos_renyi", 300, 0.02, 1)
    cfg = {
        "world": {"epochs": 10, "sources_per_epoch": 10},
        "experiment": {"kind": "learning_curve", "seeds": [1, 2], "policies": ["oracle", "no_learn"]},
    }
    r = cc.run_experiment(cfg, g)
    assert len(r["rows"]) == 2 * 2 * 10
    oracle = [p for p in r["final"] if p["policy"] == "oracle"]
    assert oracle[0]["util_norm_mean"] == 1.0


def test_regret_demo_without_graph():
    cfg = {"world": {"epochs": 20}, "experiment": {"kind": "regret_demo", "seeds": [1], "policies": ["detective"]}}
    r = cc.run_experiment(cfg)
    assert len(r["regret"]) == 20


def test_metadata():
    assert "detective" in cc.policies()
    assert cc.version()
