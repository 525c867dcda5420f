"""violation_search, JSON snapshots and CSV scans."""

import json

import numpy as np
import pytest

from tracechsh.matrixlab import search as search_mod
from tracechsh.matrixlab.io import (CSV_HEADER, SCHEMA_VERSION, dumps_snapshot, load_snapshot, read_csv, scan,
                                    snapshot_dict, write_csv, write_snapshot)
from tracechsh.matrixlab.realization import (RealizationConfig, build_realization, normalization,
                                             numeric_F_TD, validate)
from tracechsh.matrixlab.search import SearchConfig, violation_search

TSIRELSON = 2 * np.sqrt(2)


@pytest.fixture(scope="module")
def quick():
    cfg = SearchConfig(epsilon=0.1, restarts=1, seed=3)
    return cfg, violation_search(cfg)


def test_search_finds_feasible_violation(quick):
    cfg, (r, rep) = quick
    assert rep.success and rep.violation
    assert rep.constraint_residual <= 1e-8
    assert rep.F_TD > TSIRELSON and rep.F_TD < 4
    assert rep.margin_over_tsirelson == pytest.approx(rep.F_TD - TSIRELSON)
    assert rep.distance_below_pr == pytest.approx(4 - rep.F_TD)
    assert validate(r).passed
    assert abs(numeric_F_TD(r) - rep.F_TD) < 1e-12
    assert abs(normalization(r) - 1) <= 1e-8


def test_search_deterministic(quick):
    cfg, (r, rep) = quick
    r2, rep2 = violation_search(cfg)
    assert rep.to_dict() == rep2.to_dict()
    assert dumps_snapshot(r, rep.to_dict()) == dumps_snapshot(r2, rep2.to_dict())


def test_search_report_json(quick):
    _, (_, rep) = quick
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["config"]["seed"] == 3 and d["candidates"]


def test_search_zero_epsilon():
    r, rep = violation_search(SearchConfig(epsilon=0.0))
    assert rep.message == "no violation possible at zero perturbation"
    assert abs(rep.F_TD - TSIRELSON) <= 1e-10 and not rep.violation


def test_search_budget_failure(monkeypatch):
    monkeypatch.setattr(search_mod._Problem, "restore", lambda self, p, **kw: p)
    r, rep = violation_search(SearchConfig(epsilon=0.1, restarts=1, iterations=1, penalties=(1.0,)))
    assert r is None and not rep.success and not rep.violation
    assert "no feasible point" in rep.message
    assert rep.candidates and not any(c.feasible for c in rep.candidates)


def test_search_config_errors():
    for bad in (SearchConfig(cutoff=3), SearchConfig(epsilon=-1), SearchConfig(restarts=0),
                SearchConfig(objective="other")):
        with pytest.raises(ValueError):
            violation_search(bad)


# -- snapshots -------------------------------------------------------------------------

def test_snapshot_roundtrip(tmp_path):
    r = build_realization(RealizationConfig(4, 0.1, 7))
    path = tmp_path / "snap.json"
    write_snapshot(path, r, {"note": "x"})
    d = json.loads(path.read_text())
    assert d["schema_version"] == SCHEMA_VERSION
    assert d["dimension"] == r.dim and d["epsilon"] == 0.1 and d["seed"] == 7
    assert {"alpha1", "alpha2", "beta1", "beta2", "i_eff"} <= set(d["matrices"])
    r2 = load_snapshot(path)
    assert np.array_equal(r2.T4, r.T4) and np.array_equal(r2.chi, r.chi)
    assert numeric_F_TD(r2) == numeric_F_TD(r)
    assert dumps_snapshot(r2, {"note": "x"}) == path.read_text().strip()


def test_snapshot_matrix_entries_row_major():
    r = build_realization(RealizationConfig(4, 0.1, 0))
    entries = snapshot_dict(r)["matrices"]["alpha1"]["entries"]
    keys = [(e[0], e[1]) for e in entries]
    assert keys == sorted(keys)
    M = r.alpha(1).toarray()
    for row, col, re, im in entries[:50]:
        assert M[row, col] == complex(re, im)


def test_snapshot_rejects_tampering():
    r = build_realization(RealizationConfig(4, 0.1, 0))
    d = snapshot_dict(r)
    d["matrices"]["beta2"]["entries"][0][2] += 1.0
    with pytest.raises(ValueError, match="beta2"):
        load_snapshot(d)
    d["schema_version"] = 99
    with pytest.raises(ValueError, match="schema"):
        load_snapshot(d)


# -- scans ---------------------------------------------------------------------------------

def test_scan_sorted_and_csv(tmp_path):
    rows = scan([0.01, 0.0, 0.001], [2, 0, 1], cutoff=4)
    keys = [(r["epsilon"], r["seed"]) for r in rows]
    assert keys == sorted(keys) and len(rows) == 9
    path = tmp_path / "scan.csv"
    write_csv(path, rows)
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = read_csv(path)
    assert back == rows
    for row in rows:
        assert row["F_TD"] < 4
        if row["epsilon"] == 0:
            assert abs(row["F_TD"] - TSIRELSON) <= 1e-10


def test_scan_deterministic():
    assert scan([0.01], [0, 1], cutoff=4) == scan([0.01], [1, 0], cutoff=4)
