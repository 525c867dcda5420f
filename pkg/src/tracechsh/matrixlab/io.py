"""Versioned JSON realization snapshots and CSV epsilon scans."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .realization import (MatrixRealization, RealizationConfig, build_realization, formula_value,
                          numeric_P0, numeric_sandwich)

SCHEMA_VERSION = 1
SNAPSHOT_KIND = "tracechsh.realization"
CSV_HEADER = ("epsilon", "seed", "F_TD", "ReP0", "ImP0", "constraint_residual", "formula_residual")


def _sparse_entries(M) -> dict:
    """Nonzero entries in row-major order as [row, col, re, im]."""
    c = sp.coo_matrix(M)
    order = np.lexsort((c.col, c.row))
    entries = [[int(c.row[i]), int(c.col[i]), float(c.data[i].real), float(c.data[i].imag)]
               for i in order if c.data[i] != 0]
    return {"shape": list(M.shape), "format": "sparse-row-major", "entries": entries}


def _dense_pairs(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).ravel()]


def snapshot_dict(r: MatrixRealization, report: dict | None = None) -> dict:
    mats = {}
    for i in (1, 2):
        mats[f"alpha{i}"] = _sparse_entries(r.alpha(i))
        mats[f"beta{i}"] = _sparse_entries(r.beta(i))
    mats["i_eff"] = _sparse_entries(r.ieff.sparse())
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": SNAPSHOT_KIND,
        "cutoff": r.cutoff,
        "internal_dim": r.internal_dim,
        "dimension": r.dim,
        "epsilon": r.epsilon,
        "seed": r.seed,
        "convention": r.convention,
        "parameters": None if r.params is None else [float(x) for x in r.params],
        "blocks": {"shape": list(r.T4.shape), "data": _dense_pairs(r.T4)},
        "chi": _dense_pairs(r.chi),
        "psi0": {"shape": [r.dim], "entries": [[int(i), float(r.psi0[i].real), float(r.psi0[i].imag)]
                                               for i in np.flatnonzero(r.psi0)]},
        "matrices": mats,
        "report": report or {},
    }


def dumps_snapshot(r: MatrixRealization, report: dict | None = None) -> str:
    return json.dumps(snapshot_dict(r, report), sort_keys=True, separators=(",", ":"))


def write_snapshot(path, r: MatrixRealization, report: dict | None = None) -> None:
    Path(path).write_text(dumps_snapshot(r, report) + "\n")


def _from_pairs(data, shape) -> np.ndarray:
    a = np.array([complex(re, im) for re, im in data], dtype=complex)
    return a.reshape(shape)


def _to_sparse(block: dict) -> sp.csr_matrix:
    e = np.array(block["entries"], dtype=float).reshape(-1, 4)
    n, m = block["shape"]
    return sp.csr_matrix((e[:, 2] + 1j * e[:, 3], (e[:, 0].astype(int), e[:, 1].astype(int))), shape=(n, m))


def load_snapshot(path_or_dict, verify: bool = True) -> MatrixRealization:
    """Rebuild a realization; with ``verify`` the stored matrices must match."""
    d = path_or_dict if isinstance(path_or_dict, dict) else json.loads(Path(path_or_dict).read_text())
    if d.get("schema_version") != SCHEMA_VERSION or d.get("kind") != SNAPSHOT_KIND:
        raise ValueError(f"unsupported snapshot (schema {d.get('schema_version')!r}, kind {d.get('kind')!r})")
    T4 = _from_pairs(d["blocks"]["data"], d["blocks"]["shape"])
    chi = _from_pairs(d["chi"], (d["internal_dim"],))
    r = MatrixRealization(T4, chi, d["cutoff"], d["epsilon"], d["convention"], d["seed"], d["parameters"])
    if verify:
        for i in (1, 2):
            for name, M in ((f"alpha{i}", r.alpha(i)), (f"beta{i}", r.beta(i))):
                diff = _to_sparse(d["matrices"][name]) - M
                if diff.nnz and np.abs(diff.data).max() > 0:
                    raise ValueError(f"snapshot matrix {name} does not match its parameters")
    return r


# -- scans ------------------------------------------------------------------------

def scan_row(epsilon: float, seed: int, cutoff: int = 5, internal_dim: int = 2) -> dict:
    r = build_realization(RealizationConfig(cutoff, epsilon, seed, internal_dim))
    f, nrm = numeric_sandwich(r)
    F = abs(f) / np.sqrt(2)
    P0 = numeric_P0(r)
    return {"epsilon": float(epsilon), "seed": int(seed), "F_TD": float(F), "ReP0": float(P0.real),
            "ImP0": float(P0.imag), "constraint_residual": float(nrm - 1.0),
            "formula_residual": float(F - formula_value(r))}


def scan(epsilons, seeds, cutoff: int = 5, internal_dim: int = 2) -> list:
    rows = [scan_row(e, s, cutoff, internal_dim) for e in epsilons for s in seeds]
    rows.sort(key=lambda row: (row["epsilon"], row["seed"]))
    return rows


def write_csv(target, rows) -> None:
    """Write rows to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(target, rows)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(fh, rows)


def _write_rows(fh, rows) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(row[k]) if isinstance(row[k], float) else row[k] for k in CSV_HEADER})


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k == "seed" else float(v)) for k, v in row.items()} for row in rows]
