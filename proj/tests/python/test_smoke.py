import math
import os
import sys

ext_dir = os.environ.get("RANKHC_EXT_DIR")
if ext_dir:
    sys.path.insert(0, ext_dir)
src_dir = os.environ.get("RANKHC_SRC_DIR")
if src_dir:
    sys.path.insert(0, os.path.join(src_dir, "python"))

import rankhc  # noqa: E402


def test_boundary_values():
    assert rankhc.rho(0.75, 0.0) == 2 * 0.75 - 1
    assert abs(rankhc.xi_sigma(1.0) - 1.0) < 1e-8
    assert rankhc.upsilon0("uniform") == 1.0
    assert abs(rankhc.upsilon0("normal") - math.sqrt(math.pi / 3)) < 1e-12


def test_null_panel_does_not_reject():
    rankhc.set_max_threads(2)
    table = rankhc.tabulate(50, 3, 2000, 2000, seed=7)
    assert table.n == 50 and table.t == 3
    rows = rankhc.generate("normal-shift", 0.0, 0.75, 50, 3, seed=11)
    res = rankhc.test_random_ties(rows, table, seed=13)
    assert 0.0 < res["p_value"] <= 1.0
    again = rankhc.test_random_ties(rows, table, seed=13)
    assert again["p_value"] == res["p_value"]
    assert again["statistic"] == res["statistic"]


def test_signal_panel_rejects():
    rankhc.set_max_threads(2)
    table = rankhc.tabulate(200, 7, 3000, 3000, seed=21)
    rows = rankhc.generate("normal-shift", 5.0, 0.6, 200, 7, seed=22)
    res = rankhc.test_random_ties(rows, table, seed=23)
    assert res["p_value"] < 0.01


def test_comparators_run():
    rows = rankhc.generate("normal-shift", 0.0, 0.75, 40, 4, seed=31)
    fr = rankhc.friedman_test(rows, 500, seed=32)
    assert 0.0 < fr["p_value"] <= 1.0
    ph = rankhc.raw_permutation_hc(rows, 200, seed=33)
    assert 0.0 < ph["p_value"] <= 1.0
    dh = rankhc.dist_aware_hc(rows, "normal", 1000, seed=34)
    assert 0.0 < dh["p_value"] <= 1.0


def test_table_round_trip(tmp_path):
    table = rankhc.tabulate(30, 2, 1000, 1000, seed=41)
    path = str(tmp_path / "table.json")
    rankhc.save_table(table, path)
    loaded = rankhc.load_table(path)
    assert loaded.n == table.n and loaded.k_n == table.k_n
    assert loaded.pq == table.pq


def test_two_outcome_fixture():
    fx = rankhc.two_outcome_fixture(10, 4)
    assert fx["identity_holds"]
    assert fx["sum_var"] == 3 / 4
    assert fx["sum_cov"] == 3 / 2
