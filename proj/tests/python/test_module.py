import math

import pytest

import netautocorr as na


def path(n):
    return na.WeightMatrix.from_edges([(i, i + 1) for i in range(n - 1)], n)


def test_weight_matrix_basics():
    w = path(4)
    assert w.n == 4
    assert w.nnz == 6
    assert w.symmetric
    assert w.summary() == {"n": 4, "s0": 6.0, "s1": 12.0, "s2": 40.0}
    assert w.to_dense()[1] == [1.0, 0.0, 1.0, 0.0]
    assert na.WeightMatrix.from_dense(w.to_dense()) == w
    assert w.row_normalized().at(1, 0) == 0.5


def test_coordinate_weights():
    pts = [[0.0], [1.0], [10.0]]
    idw = na.WeightMatrix.inverse_distance(pts, 10.0)
    assert idw.at(0, 1) == 10.0
    assert idw.at(0, 2) == 1.0
    assert na.WeightMatrix.knn(pts, 1).nnz == 3
    assert na.WeightMatrix.exp_decay(pts, 0.0).nnz == 6


def test_statistics_match_worked_examples():
    assert na.morans_i([0, 0, 1, 1], path(4)) == pytest.approx(1 / 3)
    assert na.phi([0, 0, 1, 1], path(4)) == pytest.approx(4 / 3)
    assert na.phi([0, 1], path(2)) == pytest.approx(-4.0)
    assert na.moran_moments([0, 0, 1, 1], path(4))["mean"] == pytest.approx(-1 / 3)
    b = na.binary_equivalence([0, 0, 1, 1], path(4))
    assert b["z_moran"] == pytest.approx(b["z_phi"], abs=1e-10)


def test_errors_map_to_exceptions():
    with pytest.raises(na.DegenerateData):
        na.morans_i([2, 2, 2], path(3))
    with pytest.raises(na.InvalidInput):
        na.WeightMatrix.from_edges([(1, 1)], 2)
    assert issubclass(na.DegenerateData, na.Error)


def test_moran_test_is_reproducible():
    w = na.neighbor_matrix(100, 3, 42)
    y = na.sar(w, 0.95, 43)
    a = na.moran_test(y, w, perms=199, seed=44)
    b = na.moran_test(y, w, perms=199, seed=44, threads=3)
    assert a == b
    assert a["p_permutation"] == pytest.approx(1 / 200)
    assert a["statistic_name"] == "moran"
    assert math.isfinite(a["z"])


def test_phi_and_joincount_tests():
    w = na.neighbor_matrix(80, 5, 1)
    labels = na.categorize(na.sar(w, 0.6, 2), [0.25, 0.5, 0.75])
    assert sorted(set(labels)) == [0, 1, 2, 3]
    r = na.phi_test(labels, w, perms=99, seed=3, keep_null=True)
    assert len(r["null_draws"]) == 99
    assert 0 < r["p_permutation"] <= 1
    jc = na.joincount_tests(labels, w, perms=99, seed=3)
    assert [j["category"] for j in jc] == [0, 1, 2, 3]


def test_transmission():
    a = na.network(60, seed=5)
    y0 = na.correlated_error(na.WeightMatrix.exp_decay([[i / 60.0] for i in range(60)], 50.0), 1)
    assert na.transmit_continuous(y0, a, 0, 0.1) == y0
    labels = [i % 3 for i in range(60)]
    assert na.transmit_categorical(labels, a, 2, 0.0, 1) == labels


def test_experiment_replay():
    cfg = na.default_config("table1")
    cfg.update(reps=4, perms=19, seed=9)
    report, csv = na.run_experiment(cfg)
    again, csv_again = na.run_experiment(report["config"])
    assert csv == csv_again
    assert report["settings"] == again["settings"]
    assert [s["id"] for s in report["settings"]] == ["t=0", "t=1", "t=2", "t=3"]
    assert csv.splitlines()[0] == "setting,replicate,statistic,z,p_permutation,p_normal,covered,estimate"
