"""Command-line entry point: ``tracechsh verify|scan|search``.

Exit codes: 0 every check passed, 1 a check or runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import QI2, Scalar
from .errors import DerivationFailure, TraceCHSHError

SCHEMA_VERSION = 1
SEED_ENV = "TRACECHSH_SEED"
TARGETS = ("quantum", "td", "fermionic", "causality", "charge")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
RENDER_ALL = 24
DEFAULT_CUTOFF = 5


class UsageError(Exception):
    pass


# -- reports ----------------------------------------------------------------------

def poly_magnitude(x) -> float:
    """Largest absolute coefficient of an exact scalar (0 for zero)."""
    if isinstance(x, QI2):
        return abs(complex(x))
    x = Scalar.coerce(x)
    return max((abs(complex(c)) for c in x.terms.values()), default=0.0)


def scalar_entry(value) -> dict:
    """Exact-form string plus float for exact scalars; float only otherwise."""
    if isinstance(value, (QI2, Scalar)):
        s = Scalar.coerce(value)
        entry = {"exact": s.to_text(), "float": None}
        if not s.variables():
            z = complex(s.constant())
            entry["float"] = z.real if z.imag == 0 else [z.real, z.imag]
        return entry
    if isinstance(value, complex):
        return {"exact": None, "float": [value.real, value.imag]}
    if isinstance(value, (bool, str, int, np.integer)) or value is None:
        return {"exact": None, "value": value}
    return {"exact": None, "float": float(value)}


@dataclass
class RunReport:
    suite: str
    seed: int
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def check(self, name: str, residual: float, tolerance: float) -> bool:
        """Pass iff residual <= tolerance; residual is a magnitude."""
        ok = bool(residual <= tolerance)
        self.checks.append({"name": name, "passed": ok, "residual": float(residual),
                            "tolerance": float(tolerance)})
        return ok

    def flag(self, name: str, ok: bool) -> bool:
        """Boolean check; residual 0/1 against tolerance 0."""
        return self.check(name, 0.0 if ok else 1.0, 0.0)

    def result(self, name: str, value) -> None:
        self.results[name] = scalar_entry(value)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "suite": self.suite, "passed": self.passed,
                "seed": self.seed, "config": self.config, "checks": self.checks,
                "results": self.results, "wall_time": self.wall_time}

    def render(self) -> str:
        lines = [f"[{self.suite}] {'PASS' if self.passed else 'FAIL'}  (seed {self.seed}, "
                 f"{self.wall_time:.2f} s)"]
        long = len(self.checks) > RENDER_ALL
        for c in self.checks:
            if long and c["passed"]:
                continue
            mark = "ok  " if c["passed"] else "FAIL"
            lines.append(f"  {mark} {c['name']}  residual={c['residual']:.3e} tol={c['tolerance']:.1e}")
        if long:
            n_ok = sum(c["passed"] for c in self.checks)
            lines.append(f"  {n_ok}/{len(self.checks)} checks passed (--json lists each)")
        for k, v in self.results.items():
            if v.get("exact") is not None:
                shown = v["exact"] if v.get("float") is None else f"{v['exact']} = {v['float']!r}"
            elif v.get("float") is not None:
                shown = repr(v["float"])
            else:
                shown = repr(v.get("value"))
            lines.append(f"  {k}: {shown}")
        return "\n".join(lines)


# -- verify suites ------------------------------------------------------------------

def _verify_quantum(rep: RunReport, args) -> None:
    from . import oracles, spin
    from .algebra import BOSON, FERMION, SQRT2, apply_to_vacuum
    from .matrixlab.realization import RealizationConfig, build_realization, numeric_F_TD

    target = Scalar.coerce(2 * SQRT2)
    for stat in (BOSON, FERMION):
        F = spin.chsh(spin.singlet(stat))
        rep.result(f"chsh canonical [{stat}]", F)
        rep.check(f"chsh canonical = 2*sqrt2 exact [{stat}]", poly_magnitude(F - target), 0.0)
        for name, ok in spin.commutator_check(stat).items():
            rep.flag(f"{name} [{stat}]", ok)
    s = spin.singlet()
    rules, vac = spin.quantum_rules(), spin.quantum_vacuum()
    for k in (1, 2, 3):
        rep.flag(f"S{k} singlet = 0", apply_to_vacuum(spin.total_spin(k) * s.ket(), rules, vac).is_zero())
    zz = spin.correlation(s, spin.Z_AXIS, spin.Z_AXIS)
    rep.result("E(Z,Z) singlet", zz)
    rep.check("E(Z,Z) singlet = -1", poly_magnitude(Scalar.coerce(zz) + 1), 0.0)
    ax = spin.CANONICAL_AXES
    fl = lambda n: [float(x) for x in n]
    pauli = oracles.pauli_chsh(oracles.SINGLET, fl(ax.c), fl(ax.c_prime), fl(ax.d), fl(ax.d_prime))
    rep.result("chsh Pauli oracle", pauli)
    rep.check("Pauli oracle chsh = 2*sqrt2", abs(pauli - 2 * np.sqrt(2)), 1e-12)
    r = build_realization(RealizationConfig(args.cutoff, 0.0, rep.seed))
    Fm = numeric_F_TD(r, backend="sparse")
    rep.result("matrix F_TD at epsilon 0", Fm)
    rep.check("matrix F_TD at epsilon 0 = 2*sqrt2", abs(Fm - 2 * np.sqrt(2)), 1e-10)


def _td_checks(rep: RunReport, case, label: str):
    from .tdsym import derive_F_TD, normalization_constraint

    red = derive_F_TD(case)
    rep.result(f"F_TD [{label}]", red.value)
    rep.result(f"P0 [{label}]", red.P0)
    rep.result(f"Eq residual [{label}]", red.residual)
    rep.check(f"F_TD = 2*sqrt2 + Re(P0)/sqrt2 [{label}]", poly_magnitude(red.residual), 0.0)
    rep.check(f"F_TD = 2*sqrt2 + 4*sqrt2*Re(diag) [{label}]",
              poly_magnitude(red.value - red.diagonal_form()), 0.0)
    try:
        nr = normalization_constraint(case)
        rep.result(f"normalization lhs [{label}]", nr.lhs)
        rep.result(f"P0 under normalization [{label}]", nr.P0_after)
        rep.flag(f"normalization <=> Re(diag) = 0 [{label}]", True)
    except DerivationFailure as e:
        rep.check(f"normalization <=> Re(diag) = 0 [{label}]", poly_magnitude(e.residual), 0.0)
    return red


def _verify_td(rep: RunReport, args) -> None:
    from .algebra import SQRT2
    from .matrixlab.realization import RealizationConfig, build_realization, consistency_check
    from .tdsym import CaseSpec, derive_F_TD, grading_audit, sign_flip

    target = Scalar.coerce(2 * SQRT2)
    case = CaseSpec()
    red = _td_checks(rep, case, "boson")
    flip = derive_F_TD(sign_flip(case))
    rep.check("sign flip negates P0", poly_magnitude(flip.P0 + red.P0), 0.0)
    rep.check("sign flip negates the first-order part",
              poly_magnitude((flip.value - target) + (red.value - target)), 0.0)
    rep.check("zero perturbation gives 2*sqrt2",
              poly_magnitude(derive_F_TD(CaseSpec(perturbed=False)).value - target), 0.0)
    em = derive_F_TD(CaseSpec(emergent=True))
    rep.result("F_TD [emergent]", em.value)
    rep.check("emergent F_TD = 2*sqrt2", poly_magnitude(em.value - target), 0.0)
    rep.flag("epsilon grading preserved by normal ordering", grading_audit(case))
    eps = 1e-3
    r = build_realization(RealizationConfig(args.cutoff, eps, rep.seed))
    cc = consistency_check(r)
    rep.result(f"matrix F_TD at epsilon {eps}", cc["F_TD"])
    rep.result(f"formula residual at epsilon {eps}", cc["formula_residual"])
    rep.check(f"matrix vs derived polynomial at epsilon {eps}", abs(cc["residual"]), 1e-5)


def _verify_fermionic(rep: RunReport, args) -> None:
    from .fermionic import fermionic_derivation, fermionic_spin_check, rules_are_anticommutators, su2_rep_family
    from .tdsym import CaseSpec, derive_F_TD, fermionic_case, sign_flip

    sc = fermionic_spin_check()
    for name, ok in sc.checks.items():
        rep.flag(name, ok)
    case = fermionic_case()
    rep.flag("rules are anticommutators", rules_are_anticommutators(case))
    red = _td_checks(rep, case, "fermion")
    boson = derive_F_TD(CaseSpec())
    rep.check("fermionic and bosonic reductions identical", poly_magnitude(red.value - boson.value), 0.0)
    flip = fermionic_derivation(sign_flip(case))
    rep.check("sign flip negates P0 [fermion]", poly_magnitude(flip.P0 + red.P0), 0.0)
    for n in range(2, 6):
        s = su2_rep_family(n)
        rep.flag(f"SU(2) rep n={n}", s.passed)
        rep.result(f"Casimir n={n}", Scalar.coerce(QI2(s.spin * (s.spin + 1))))


def _verify_causality(rep: RunReport, args) -> None:
    from . import spin

    rng = np.random.default_rng(rep.seed)
    states = {"singlet": spin.singlet()}
    states.update({f"triplet m={m}": spin.triplet(m) for m in (-1, 0, 1)})
    haar = [spin.haar_su2(rng) for _ in range(args.rotations)]
    exact = spin.exact_su2_elements()
    for name, st in states.items():
        cr = spin.causality_check(st, haar)
        rep.result(f"max marginal deviation [{name}]", cr.max_deviation)
        rep.check(f"marginals invariant, {cr.n_rotations} Haar rotations [{name}]", cr.max_deviation, 1e-12)
        ce = spin.causality_check(st, exact)
        rep.check(f"marginals invariant exactly, {ce.n_rotations} exact rotations [{name}]",
                  ce.max_deviation if ce.exact else 1.0, 0.0)


def _verify_charge(rep: RunReport, args) -> None:
    from .matrixlab.realization import (RealizationConfig, adler_millard, build_realization,
                                        emergent_charge_deviation, trace_hamiltonian_complex, validate)
    from .tdsym import CaseSpec, adler_millard_symbolic, emergent_charge_value

    worst_c = worst_h = 0.0
    all_valid = True
    for s in range(rep.seed, rep.seed + args.realizations):
        r = build_realization(RealizationConfig(args.cutoff, args.epsilon, s))
        C = adler_millard(r)
        worst_c = max(worst_c, float(np.abs(C + C.conj().T).max()))
        worst_h = max(worst_h, abs(trace_hamiltonian_complex(r).imag))
        all_valid &= validate(r).passed
    rep.check(f"||C + C+|| over {args.realizations} realizations", worst_c, 1e-12)
    rep.check(f"|Im H| over {args.realizations} realizations", worst_h, 1e-12)
    rep.flag("realizations pass structural validation", all_valid)
    em = build_realization(RealizationConfig(args.cutoff, 0.0, rep.seed, convention="emergent"))
    dev = emergent_charge_deviation(em)
    rep.result("emergent per-term deviation", dev)
    rep.check("emergent per-term effective projection = i on +i sector", dev, 1e-12)
    sym = adler_millard_symbolic(CaseSpec(emergent=True, perturbed=False))
    rep.flag("symbolic emergent charge = 4 i_eff", sym == emergent_charge_value())


VERIFY = {"quantum": _verify_quantum, "td": _verify_td, "fermionic": _verify_fermionic,
          "causality": _verify_causality, "charge": _verify_charge}


# -- commands ------------------------------------------------------------------------

def cmd_verify(args) -> RunReport:
    rep = RunReport(f"verify {args.target}", args.seed, {"target": args.target, "cutoff": args.cutoff})
    if args.target == "causality":
        rep.config["rotations"] = args.rotations
    if args.target == "charge":
        rep.config.update(realizations=args.realizations, epsilon=args.epsilon)
    VERIFY[args.target](rep, args)
    return rep


def cmd_scan(args) -> RunReport:
    from .matrixlab.io import scan, write_csv

    if any(e < 0 for e in args.epsilon):
        raise UsageError("epsilon values must be >= 0")
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = list(range(args.seed, args.seed + args.seeds))
    rep = RunReport("scan", args.seed, {"epsilon": args.epsilon, "seeds": seeds, "cutoff": args.cutoff,
                                        "out": args.out})
    rows = scan(args.epsilon, seeds, args.cutoff)
    write_csv(args.out if args.out else sys.stdout, rows)
    rep.result("rows", len(rows))
    rep.result("max F_TD", max(r["F_TD"] for r in rows))
    rep.result("max |formula_residual|", max(abs(r["formula_residual"]) for r in rows))
    rep.result("max |constraint_residual|", max(abs(r["constraint_residual"]) for r in rows))
    rep.flag("all rows F_TD < 4", all(r["F_TD"] < 4 for r in rows))
    rep.flag("all rows finite", all(np.isfinite(v) for r in rows for v in r.values()))
    return rep


def cmd_search(args) -> RunReport:
    from .matrixlab.io import write_snapshot
    from .matrixlab.realization import TSIRELSON, validate
    from .matrixlab.search import SearchConfig, violation_search

    if args.epsilon < 0:
        raise UsageError("--epsilon must be >= 0")
    if args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    cfg = SearchConfig(cutoff=args.cutoff, epsilon=args.epsilon, restarts=args.restarts, seed=args.seed)
    rep = RunReport("search", args.seed, {"epsilon": args.epsilon, "restarts": args.restarts,
                                          "cutoff": args.cutoff, "out": args.out})
    r, sr = violation_search(cfg)
    rep.result("message", sr.message)
    rep.flag("feasible point found", sr.success)
    if not sr.success:
        return rep
    for name in ("F_TD", "ReP0", "ImP0", "constraint_residual", "margin_over_tsirelson", "distance_below_pr"):
        rep.result(name, getattr(sr, name))
    rep.result("sign_flipped", sr.sign_flipped)
    rep.check("constraint residual", sr.constraint_residual, cfg.tolerance)
    val = validate(r)
    for name, c in val.checks.items():
        if c["kind"] == "max":
            rep.check(name, c["value"], c["tol"])
        else:
            rep.flag(name, c["ok"])
    if args.epsilon > 0:
        rep.flag("F_TD above 2*sqrt2", sr.F_TD > TSIRELSON)
    if args.out:
        write_snapshot(args.out, r, {"search": sr.to_dict(), "validation": val.checks})
    return rep


# -- parser ----------------------------------------------------------------------------

def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _common() -> argparse.ArgumentParser:
    # fresh actions per parser: shared ones would let a subparser overwrite the top-level value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the machine-readable report")
    common.add_argument("--cutoff", type=int, default=argparse.SUPPRESS,
                        help="Fock cutoff L per mode (>= 4, default 5)")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tracechsh", parents=[_common()],
                                description="CHSH values in quantum theory and trace dynamics.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[_common()], help="run a verification suite")
    v.add_argument("target", choices=TARGETS)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--rotations", type=int, default=100, help="Haar rotations (causality)")
    v.add_argument("--realizations", type=int, default=20, help="random realizations (charge)")
    v.add_argument("--epsilon", type=float, default=0.1, help="perturbation scale (charge)")

    s = sub.add_parser("scan", parents=[_common()], help="F_TD over epsilon values and seeds, as CSV")
    s.add_argument("--epsilon", type=float, nargs="+", required=True)
    s.add_argument("--seeds", type=int, default=10, help="number of seeds, counted from the base seed")
    s.add_argument("--seed", type=int, default=None, help="base seed")
    s.add_argument("--out", default=None, help="CSV path (stdout if omitted)")

    q = sub.add_parser("search", parents=[_common()], help="search for a Tsirelson-bound violation")
    q.add_argument("--epsilon", type=float, default=0.1)
    q.add_argument("--restarts", type=int, default=4)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--out", default=None, help="JSON snapshot path")
    return p


COMMANDS = {"verify": cmd_verify, "scan": cmd_scan, "search": cmd_search}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.json = getattr(args, "json", False)
    args.cutoff = getattr(args, "cutoff", DEFAULT_CUTOFF)
    t0 = time.perf_counter()
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.cutoff < 4:
            raise UsageError("--cutoff must be >= 4")
        rep = COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"tracechsh: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TraceCHSHError) as e:
        print(f"tracechsh: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    rep.wall_time = time.perf_counter() - t0
    out = sys.stderr if args.command == "scan" and not args.out else sys.stdout
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2), file=out)
    else:
        print(rep.render(), file=out)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
