"""Seeded search for realizations with F_TD above 2 sqrt2 under the unit-norm constraint."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .realization import (SQRT2, TSIRELSON, blocks_from_params, n_params,
                          numeric_P0, random_params, realization_from_params)

PR_BOUND = 4.0
# sandwiched words hold at most two quanta per mode, so the objective is
# cutoff-exact from L = 4 on; candidates are re-measured at the configured L
EVAL_CUTOFF = 4
OBJECTIVES = ("F_TD", "ReP0")


@dataclass(frozen=True)
class SearchConfig:
    cutoff: int = 5
    epsilon: float = 0.1
    restarts: int = 4
    iterations: int = 4000
    seed: int = 0
    internal_dim: int = 2
    penalties: tuple = (1e2, 1e4, 1e6)
    objective: str = "F_TD"
    tolerance: float = 1e-8

    def check(self) -> None:
        if self.cutoff < 4:
            raise ValueError("cutoff must be >= 4")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("restarts and iterations must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")


@dataclass
class Candidate:
    restart: int
    F_TD: float
    ReP0: float
    ImP0: float
    constraint_residual: float
    sign_flipped: bool
    feasible: bool


@dataclass
class SearchReport:
    config: dict
    success: bool
    violation: bool
    message: str
    F_TD: float | None = None
    ReP0: float | None = None
    ImP0: float | None = None
    constraint_residual: float | None = None
    margin_over_tsirelson: float | None = None
    distance_below_pr: float | None = None
    sign_flipped: bool = False
    candidates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["candidates"] = [asdict(c) if not isinstance(c, dict) else c for c in self.candidates]
        return d


class _Problem:
    def __init__(self, cfg: SearchConfig, cutoff: int = EVAL_CUTOFF):
        self.cfg = cfg
        self.cutoff = cutoff
        self.backend = kernels.backend_name()

    def evaluate(self, p):
        T4, chi = blocks_from_params(p, self.cfg.internal_dim, self.cfg.epsilon)
        f, nrm = kernels.sandwich(T4, chi, self.cutoff, self.backend)
        return float(abs(f) / SQRT2), float(nrm - 1.0)

    def objective(self, p) -> float:
        if self.cfg.objective == "F_TD":
            return self.evaluate(p)[0]
        T4, chi = blocks_from_params(p, self.cfg.internal_dim, self.cfg.epsilon)
        x = kernels.first_order_values(T4, chi, self.cutoff, self.backend)
        return float(x.sum().real)

    def constraint(self, p) -> float:
        return self.evaluate(p)[1]

    def restore(self, p, steps: int = 30, h: float = 1e-7):
        """Newton steps along the constraint gradient until |g| <= 1e-14."""
        p = p.copy()
        eye = np.eye(len(p))
        for _ in range(steps):
            g = self.constraint(p)
            if abs(g) <= 1e-14:
                break
            grad = np.array([(self.constraint(p + h * e) - self.constraint(p - h * e)) / (2 * h) for e in eye])
            nn = float(grad @ grad)
            if nn == 0.0:
                break
            p = p - g * grad / nn
        return p


def _flip_params(p: np.ndarray) -> np.ndarray:
    q = p.copy()
    q[:-2] = -q[:-2]
    return q


def violation_search(cfg: SearchConfig | None = None):
    """Maximize the objective under (1/2) psi_0+ Bra Ket psi_0 = 1.

    Each restart runs Powell on a penalty objective with increasing weights,
    then restores feasibility by Newton steps. A candidate with Re(P0) < 0 is
    also tried with A, B -> -A, -B (re-projected onto the constraint); the
    better of the two is kept. Returns (best realization or None, report).
    """
    cfg = cfg or SearchConfig()
    cfg.check()
    conf = asdict(cfg)
    conf["penalties"] = list(cfg.penalties)
    if cfg.epsilon == 0:
        r = realization_from_params(np.zeros(n_params(cfg.internal_dim)), cfg.cutoff, 0.0,
                                    cfg.internal_dim, cfg.seed)
        F, g = _Problem(cfg, cfg.cutoff).evaluate(r.params)
        return r, SearchReport(conf, True, False, "no violation possible at zero perturbation",
                               F, 0.0, 0.0, abs(g), F - TSIRELSON, PR_BOUND - F)
    prob = _Problem(cfg)
    final = _Problem(cfg, cfg.cutoff)
    rng = np.random.default_rng(cfg.seed)
    best = None
    cands = []
    for restart in range(cfg.restarts):
        x = random_params(rng, cfg.internal_dim)
        for pen in cfg.penalties:
            fun = lambda p, pen=pen: -prob.objective(p) + pen * prob.constraint(p) ** 2
            x = minimize(fun, x, method="Powell",
                         options={"maxfev": cfg.iterations, "xtol": 1e-8, "ftol": 1e-13}).x
        x = prob.restore(x)
        options = [(x, False)]
        r0 = realization_from_params(x, cfg.cutoff, cfg.epsilon, cfg.internal_dim)
        if numeric_P0(r0).real < 0:
            options.append((prob.restore(_flip_params(x)), True))
        for p, flipped in options:
            F, g = final.evaluate(p)
            r = realization_from_params(p, cfg.cutoff, cfg.epsilon, cfg.internal_dim, cfg.seed)
            P0 = numeric_P0(r)
            c = Candidate(restart, F, float(P0.real), float(P0.imag), abs(g), flipped,
                          abs(g) <= cfg.tolerance)
            cands.append(c)
            if c.feasible and (best is None or c.F_TD > best[1].F_TD):
                best = (r, c)
    if best is None:
        return None, SearchReport(conf, False, False,
                                  f"no feasible point within budget ({cfg.restarts} restarts)",
                                  candidates=cands)
    r, c = best
    violation = bool(c.F_TD > TSIRELSON)
    msg = "violation of the Tsirelson bound found" if violation else "feasible, no violation found"
    return r, SearchReport(conf, True, violation, msg, c.F_TD, c.ReP0, c.ImP0, c.constraint_residual,
                           c.F_TD - TSIRELSON, PR_BOUND - c.F_TD, c.sign_flipped, cands)
