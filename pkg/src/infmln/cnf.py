"""Clausal compilation: prenex CNF, finite existential expansion, weight splitting.

Only equivalence-preserving rewrites are used. Each surviving clause of a
formula carries the formula's weight divided by the number of clauses it
produced, so introducing auxiliary variables would change the distribution.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import replace

from .errors import QuantifierRestrictionError, SizeError
from .logic import (
    And, Atom, Const, Exists, Forall, Iff, Implies, Literal, Not, Or, Program, Signature,
    Var, WeightedClause, subst_formula, subst_term, term_vars,
)

log = logging.getLogger(__name__)

DEFAULT_CLAUSE_LIMIT = 10_000


def _nnf(f, positive=True):
    """Negation normal form with => and <=> eliminated."""
    if isinstance(f, Atom):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = tuple(_nnf(a, positive) for a in f.args)
        return And(parts) if positive else Or(parts)
    if isinstance(f, Or):
        parts = tuple(_nnf(a, positive) for a in f.args)
        return Or(parts) if positive else And(parts)
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.left), f.right)), positive)
    if isinstance(f, Iff):
        # (a => b) & (b => a)
        both = And((Or((Not(f.left), f.right)), Or((f.left, Not(f.right)))))
        return _nnf(both, positive)
    if isinstance(f, (Forall, Exists)):
        flip = isinstance(f, Forall) != positive
        cls = Exists if flip else Forall
        return cls(f.var, f.type, _nnf(f.body, positive))
    raise TypeError(f"not a formula: {f!r}")


class _Names:
    def __init__(self, taken=()):
        self.taken = set(taken)

    def fresh(self, base):
        stem = base.rstrip("0123456789_") or "v"
        for k in itertools.count(1):
            cand = f"{stem}_{k}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


def _all_var_names(f, acc):
    if isinstance(f, Atom):
        for a in f.args:
            acc.update(term_vars(a))
    elif isinstance(f, Not):
        _all_var_names(f.arg, acc)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _all_var_names(a, acc)
    elif isinstance(f, (Forall, Exists)):
        acc.add(f.var)
        _all_var_names(f.body, acc)
    return acc


def _pull_quantifiers(f, names, seen):
    """Split an NNF formula into (prefix, matrix), renaming clashing binders."""
    if isinstance(f, (Atom, Not)):
        return [], f
    if isinstance(f, (And, Or)):
        prefix, parts = [], []
        for a in f.args:
            p, m = _pull_quantifiers(a, names, seen)
            prefix.extend(p)
            parts.append(m)
        return prefix, type(f)(tuple(parts))
    if isinstance(f, (Forall, Exists)):
        var, body = f.var, f.body
        if var in seen:
            new = names.fresh(var)
            body = subst_formula(body, {var: Var(new)})
            var = new
        seen.add(var)
        p, m = _pull_quantifiers(body, names, seen)
        kind = "forall" if isinstance(f, Forall) else "exists"
        return [(kind, var, f.type)] + p, m
    raise TypeError(f"not in NNF: {f!r}")


def _lit(f) -> Literal:
    return Literal(False, f.arg) if isinstance(f, Not) else Literal(True, f)


def _clean(clause):
    """Merge duplicate literals; None if the clause is a tautology."""
    out = []
    for lit in clause:
        if lit.negate() in out:
            return None
        if lit not in out:
            out.append(lit)
    return tuple(out)


def _distribute(clause_sets, limit):
    """CNF of a disjunction of CNFs."""
    total = 1
    for cs in clause_sets:
        total *= len(cs)
        if total > limit:
            raise SizeError(f"CNF distribution exceeds the clause limit ({limit})")
    out = []
    for combo in itertools.product(*clause_sets):
        c = _clean(itertools.chain.from_iterable(combo))
        if c is not None and c not in out:
            out.append(c)
    return out


def _matrix_cnf(m, limit):
    if isinstance(m, (Atom, Not)):
        return [(_lit(m),)]
    if isinstance(m, And):
        out = []
        for a in m.args:
            for c in _matrix_cnf(a, limit):
                if c not in out:
                    out.append(c)
            if len(out) > limit:
                raise SizeError(f"CNF distribution exceeds the clause limit ({limit})")
        return out
    if isinstance(m, Or):
        return _distribute([_matrix_cnf(a, limit) for a in m.args], limit)
    raise TypeError(f"not an NNF matrix: {m!r}")


def _lit_formula(lit):
    return lit.atom if lit.positive else Not(lit.atom)


def _build(prefix, clauses):
    ors = [_lit_formula(c[0]) if len(c) == 1 else Or(tuple(map(_lit_formula, c)))
           for c in clauses]
    body = ors[0] if len(ors) == 1 else And(tuple(ors))  # And(()) is true
    for kind, var, ty in reversed(prefix):
        body = (Forall if kind == "forall" else Exists)(var, ty, body)
    return body


def prenex_cnf_parts(f, clause_limit=DEFAULT_CLAUSE_LIMIT):
    """(prefix, clauses): prefix is [(kind, var, type)], clauses tuples of Literals."""
    names = _Names(_all_var_names(f, set()))
    prefix, matrix = _pull_quantifiers(_nnf(f), names, set())
    return prefix, _matrix_cnf(matrix, clause_limit)


def to_prenex_cnf(f, clause_limit=DEFAULT_CLAUSE_LIMIT):
    """Equivalent formula in prenex form whose matrix is a CNF.

    Quantifier order is kept as written. Tautological clauses are dropped,
    which leaves a matrix of And(()) (true) when nothing survives.
    """
    prefix, clauses = prenex_cnf_parts(f, clause_limit)
    return _build(prefix, clauses)


def _subst_clause(clause, binding):
    return tuple(Literal(l.positive, Atom(l.atom.pred, tuple(subst_term(a, binding) for a in l.atom.args)))
                 for l in clause)


def _expand(prefix, clauses, sig: Signature, names, limit):
    """Eliminate existentials right to left; returns (clauses, universal var types)."""
    inner: dict[str, str] = {}
    for kind, var, ty in reversed(prefix):
        if kind == "forall":
            inner[var] = ty
            continue
        if not sig.is_finite(ty):
            raise QuantifierRestrictionError(
                f"existential variable {var} ranges over infinite type {ty}; existentially "
                "quantified variables must have finite domains (an existential over an "
                "infinite domain is not local and admits no consistent measure)")
        consts = sig.types[ty].constants
        branches, new_inner = [], {}
        for c in consts:
            rename = {}
            for v, vt in inner.items():
                nv = names.fresh(v) if len(consts) > 1 else v
                rename[v] = Var(nv)
                new_inner[nv] = vt
            binding = dict(rename)
            binding[var] = Const(c)
            branches.append([_subst_clause(cl, binding) for cl in clauses])
        clauses = _distribute(branches, limit)
        inner = new_inner
    return clauses, inner


def expand_finite_existentials(f, sig: Signature, clause_limit=DEFAULT_CLAUSE_LIMIT):
    """Quantifier-free CNF equivalent of a prenex formula.

    Existentials over finite types become disjunctions over the type's
    constants; universals are dropped and their variables stay implicitly
    universal. Universals nested inside an existential are renamed apart in
    each disjunct so that they can be pulled back out.
    """
    names = _Names(_all_var_names(f, set()))
    prefix, clauses = prenex_cnf_parts(f, clause_limit)
    clauses, _ = _expand(prefix, clauses, sig, names, clause_limit)
    return _build([], clauses)


def _canonical(clause):
    return tuple(sorted(clause, key=lambda l: (str(l.atom), not l.positive)))


def formula_clauses(f, sig: Signature, clause_limit=DEFAULT_CLAUSE_LIMIT):
    """Canonical quantifier-free clauses of a closed formula and their variable types."""
    names = _Names(_all_var_names(f, set()))
    prefix, clauses = prenex_cnf_parts(f, clause_limit)
    clauses, var_types = _expand(prefix, clauses, sig, names, clause_limit)
    out = []
    for c in clauses:
        c = _clean(c)
        if c is None:
            log.warning("dropping tautological clause")
            continue
        c = _canonical(c)
        if c not in out:
            out.append(c)
    return out, var_types


def clause_var_types(clause, var_types):
    seen = []
    for lit in clause:
        for a in lit.atom.args:
            for v in term_vars(a):
                if v not in seen:
                    seen.append(v)
    return tuple((v, var_types[v]) for v in seen)


def compile_clauses(p: Program, clause_limit=DEFAULT_CLAUSE_LIMIT) -> list[WeightedClause]:
    out = []
    for i, wf in enumerate(p.formulas):
        clauses, var_types = formula_clauses(wf.formula, p.signature, clause_limit)
        if not clauses:
            log.warning("formula %d is a tautology and contributes no clauses", i)
            continue
        w = wf.weight / len(clauses)
        for c in clauses:
            out.append(WeightedClause(c, w, i, clause_var_types(c, var_types)))
    return out


def compile_program(p: Program, clause_limit=DEFAULT_CLAUSE_LIMIT) -> Program:
    return replace(p, clauses=tuple(compile_clauses(p, clause_limit)), compiled=True)
