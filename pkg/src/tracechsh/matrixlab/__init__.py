"""Finite-dimensional matrix realizations, violation search and scans."""

from .ieff import IEffStructure, effective_projection, split_commuting
from .io import load_snapshot, scan, write_csv, write_snapshot
from .realization import (MatrixRealization, RealizationConfig, build_realization, consistency_check,
                          numeric_F_TD, numeric_P0, validate)
from .search import SearchConfig, SearchReport, violation_search

__all__ = [
    "IEffStructure", "effective_projection", "split_commuting",
    "load_snapshot", "scan", "write_csv", "write_snapshot",
    "MatrixRealization", "RealizationConfig", "build_realization", "consistency_check",
    "numeric_F_TD", "numeric_P0", "validate",
    "SearchConfig", "SearchReport", "violation_search",
]
