"""Unsatisfiability and entailment for hard knowledge bases by Herbrand truncation.

A knowledge base with every weight infinite has a satisfying measure exactly
when it is satisfiable. Unsatisfiability is certified by the first term depth
at which the finite set of ground clauses over terms of that depth is
unsatisfiable; a satisfiable truncation at every depth tried is only evidence,
since satisfiability is semi-decidable here.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cnf import clause_var_types, compile_program, formula_clauses
from .errors import MLNError, SizeError
from .gibbs import DEFAULT_EXACT_CAP, ConditionalDistribution, Volume, clause_sums
from .herbrand import GroundClause, Universe, atom_key, grounder, instantiate, sorted_atoms
from .logic import (
    INF, Not, Program, WeightedClause, WeightedFormula, is_infinite_weight,
)

UNSAT_CERTIFIED = "UnsatisfiableCertified"
SAT_UP_TO = "SatisfiableUpToDepth"


def _hard_kb(kb: Program) -> Program:
    if not kb.compiled:
        kb = compile_program(kb)
    soft = [i for i, c in enumerate(kb.clauses) if not is_infinite_weight(c.weight)]
    if soft:
        raise MLNError("satisfiability needs every clause to have weight inf; "
                       f"clauses {soft} are soft (mixed hard/soft reasoning is not supported)")
    grounder(kb).require_determinate()
    return kb


@dataclass(frozen=True)
class TruncatedKB:
    depth: int
    clauses: tuple[GroundClause, ...]

    @property
    def atoms(self):
        return sorted_atoms({a for gc in self.clauses for a in gc.atoms})


def ground_truncation(kb: Program, depth: int) -> TruncatedKB:
    """Every ground clause of the KB whose atoms all have argument depth <= depth."""
    kb = _hard_kb(kb)
    u = Universe(kb.signature)
    found = {}
    for ci, clause in enumerate(kb.clauses):
        names = [v for v, _ in clause.var_types]
        pools = [u.upto(ty, depth) for _, ty in clause.var_types]
        for combo in itertools.product(*pools):
            gc = instantiate(clause, ci, dict(zip(names, combo)))
            if all(a.depth <= depth for a in gc.atoms):
                found.setdefault((gc.source, gc.literals), gc)
    return TruncatedKB(depth, tuple(found.values()))


# -- ground solver -------------------------------------------------------------

def _assign(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        out.append([l for l in c if l != -lit])
    return out


def _dpll(clauses, model):
    while True:
        if any(not c for c in clauses):
            return None
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        model[abs(unit)] = unit > 0
        clauses = _assign(clauses, unit)
    if not clauses:
        return model
    counts: dict[int, int] = {}
    for c in clauses:
        for l in c:
            counts[abs(l)] = counts.get(abs(l), 0) + 1
    var = max(counts, key=lambda v: (counts[v], -v))
    for lit in (var, -var):
        m = dict(model)
        m[var] = lit > 0
        res = _dpll(_assign(clauses, lit), m)
        if res is not None:
            return res
    return None


@dataclass(frozen=True)
class GroundResult:
    satisfiable: bool
    model: dict | None = None  # GroundAtom -> bool, total on the truncation's atoms


def solve_ground(t: TruncatedKB | list) -> GroundResult:
    """Complete DPLL search with unit propagation."""
    clauses = t.clauses if isinstance(t, TruncatedKB) else t
    atoms = sorted_atoms({a for gc in clauses for a in gc.atoms})
    num = {a: i + 1 for i, a in enumerate(atoms)}
    cnf = []
    for gc in clauses:
        if gc.tautology:
            continue
        cnf.append(sorted({num[a] if pos else -num[a] for pos, a in gc.literals}, key=abs))
    res = _dpll(cnf, {})
    if res is None:
        return GroundResult(False)
    return GroundResult(True, {a: res.get(num[a], False) for a in atoms})


def brute_force_satisfiable(clauses, limit: int = 20) -> bool:
    """Exhaustive assignment enumeration; independent of the DPLL search."""
    atoms = sorted_atoms({a for gc in clauses for a in gc.atoms})
    if len(atoms) > limit:
        raise SizeError(f"{len(atoms)} atoms exceed the enumeration limit {limit}")
    for bits in itertools.product((0, 1), repeat=len(atoms)):
        val = dict(zip(atoms, bits))
        if all(gc.satisfied(val.__getitem__) for gc in clauses):
            return True
    return False


# -- verdicts -----------------------------------------------------------------

@dataclass(frozen=True)
class DepthVerdict:
    depth: int
    satisfiable: bool
    clause_count: int
    atom_count: int


@dataclass(frozen=True)
class SatReport:
    depths: tuple[DepthVerdict, ...]
    verdict: str
    depth: int
    certificate: tuple[str, ...] = ()  # UNSAT: the ground clauses; SAT: true atoms of the model
    model: dict | None = field(default=None, repr=False)

    @property
    def unsatisfiable(self) -> bool:
        return self.verdict == UNSAT_CERTIFIED

    @property
    def entailed(self) -> bool:
        """When the report is about KB + not(alpha): alpha is certainly entailed."""
        return self.unsatisfiable


def check_satisfiable(kb: Program, max_depth: int = 6) -> SatReport:
    kb = _hard_kb(kb)
    verdicts = []
    last = None
    for d in range(max_depth + 1):
        t = ground_truncation(kb, d)
        res = solve_ground(t)
        verdicts.append(DepthVerdict(d, res.satisfiable, len(t.clauses), len(t.atoms)))
        if not res.satisfiable:
            cert = tuple(sorted(str(gc) for gc in t.clauses))
            return SatReport(tuple(verdicts), UNSAT_CERTIFIED, d, cert)
        last = res
    model = last.model if last else {}
    true_atoms = tuple(str(a) for a in sorted(model, key=atom_key) if model[a])
    return SatReport(tuple(verdicts), SAT_UP_TO, max_depth, true_atoms, model)


def with_negated(kb: Program, alpha) -> Program:
    """The hard KB extended with the negation of a closed formula."""
    kb = _hard_kb(kb)
    neg = Not(alpha)
    clauses, var_types = formula_clauses(neg, kb.signature)
    origin = len(kb.formulas)
    extra = tuple(WeightedClause(c, INF, origin, clause_var_types(c, var_types)) for c in clauses)
    return replace(kb, formulas=kb.formulas + (WeightedFormula(neg, INF),),
                   clauses=kb.clauses + extra, compiled=True)


def check_entailment(kb: Program, alpha, max_depth: int = 6) -> SatReport:
    """Satisfiability report for KB + not(alpha); UNSAT certifies that KB entails alpha.

    `alpha` is a closed formula (or text parsed against the KB's signature).
    Universals in alpha turn into existentials when negated and must range
    over finite types.
    """
    if isinstance(alpha, str):
        from .parser import parse_formula
        alpha = parse_formula(alpha, kb.signature)
    return check_satisfiable(with_negated(kb, alpha), max_depth)


# -- infinite-weight limit of the local conditionals ---------------------------

def limit_conditional(v: Volume, y=None, kb: Program | None = None,
                      cap: int = DEFAULT_EXACT_CAP) -> ConditionalDistribution:
    """Uniform distribution over the configurations satisfying the most relevant clauses.

    log_partition holds the log of the number of maximizing configurations.
    """
    if kb is not None:
        _hard_kb(kb)
    soft = [gc for gc in v.relevant_clauses if not is_infinite_weight(gc.weight)]
    if soft:
        raise MLNError("limit_conditional needs a volume of a hard knowledge base")
    n = len(v.atoms)
    if n > cap:
        raise SizeError(f"volume has {n} atoms, above the exact-enumeration cap of {cap}")
    counts = clause_sums(v, y, counts=True)
    best = counts == counts.max()
    k = int(best.sum())
    return ConditionalDistribution(v, dict(y or {}), best / k, math.log(k))


def soften(kb: Program, weight: float) -> Program:
    """Copy of a compiled KB with every clause given the same finite weight."""
    if not kb.compiled:
        kb = compile_program(kb)
    return replace(kb, clauses=tuple(replace(c, weight=weight) for c in kb.clauses),
                   formulas=tuple(replace(f, weight=weight) for f in kb.formulas))


def max_row_deviation(a: ConditionalDistribution, b: ConditionalDistribution) -> float:
    return float(np.max(np.abs(a.table - b.table)))
