"""Lazy Herbrand universe and base.

Ground terms and atoms are hash-consed: constructing the same term twice
returns the same object, so equality is identity. Grounding never
materializes the (infinite) Herbrand base; the clauses touching an atom are
found by matching each clause literal against it.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from .cnf import compile_program
from .errors import MLNError, NotDeterminateError
from .logic import App, Atom, Const, Program, Signature, Var, WeightedClause

_lock = threading.Lock()
_terms: dict = {}
_atoms: dict = {}


class GroundTerm:
    __slots__ = ("head", "args", "depth", "__weakref__")

    def __new__(cls, head: str, args: tuple = ()):
        key = (head, args)
        t = _terms.get(key)
        if t is not None:
            return t
        with _lock:
            t = _terms.get(key)
            if t is None:
                t = object.__new__(cls)
                t.head = head
                t.args = args
                t.depth = 1 + max(a.depth for a in args) if args else 0
                _terms[key] = t
        return t

    def __reduce__(self):
        return GroundTerm, (self.head, self.args)

    def __str__(self):
        if not self.args:
            return self.head
        return f"{self.head}({', '.join(map(str, self.args))})"

    __repr__ = __str__


class GroundAtom:
    __slots__ = ("pred", "args", "id", "depth", "_str", "__weakref__")

    def __new__(cls, pred: str, args: tuple = ()):
        key = (pred, args)
        a = _atoms.get(key)
        if a is not None:
            return a
        with _lock:
            a = _atoms.get(key)
            if a is None:
                a = object.__new__(cls)
                a.pred = pred
                a.args = args
                a.id = len(_atoms)
                a.depth = max((t.depth for t in args), default=0)
                a._str = f"{pred}({', '.join(map(str, args))})" if args else pred
                _atoms[key] = a
        return a

    def __reduce__(self):
        return GroundAtom, (self.pred, self.args)

    def __str__(self):
        return self._str

    __repr__ = __str__


def atom_key(a: GroundAtom):
    """Deterministic, process-independent sort key."""
    return (a.depth, a._str)


def sorted_atoms(atoms):
    return sorted(atoms, key=atom_key)


def to_ground_term(t, binding=None) -> GroundTerm:
    if isinstance(t, Const):
        return GroundTerm(t.name)
    if isinstance(t, App):
        return GroundTerm(t.func, tuple(to_ground_term(a, binding) for a in t.args))
    if isinstance(t, Var):
        if binding is None or t.name not in binding:
            raise MLNError(f"unbound variable {t.name}")
        return binding[t.name]
    if isinstance(t, GroundTerm):
        return t
    raise TypeError(f"not a term: {t!r}")


def ground_atom(atom: Atom, binding=None) -> GroundAtom:
    return GroundAtom(atom.pred, tuple(to_ground_term(a, binding) for a in atom.args))


def parse_ground_atom(text: str, sig: Signature) -> GroundAtom:
    from .parser import parse_formula
    f = parse_formula(text, sig)
    if not isinstance(f, Atom):
        raise MLNError(f"not a ground atom: {text!r}")
    return ground_atom(f)


def term_type(t: GroundTerm, sig: Signature) -> str:
    if t.args:
        return sig.functions[t.head].return_type
    return sig.constants[t.head]


# -- universe -----------------------------------------------------------------

class Universe:
    """Terms of every type, generated level by level (level = exact depth)."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.levels = {name: [] for name in sig.types}
        self._build_level(0)

    def _build_level(self, d):
        sig = self.sig
        if d == 0:
            for name in sig.types:
                self.levels[name].append(sorted((GroundTerm(c) for c in sig.domain_constants(name)),
                                                key=str))
            return
        new = {}
        for name in sig.types:
            out = []
            for fs in sig.generators(name):
                pools = [self.upto(ty, d - 1) for ty in fs.arg_types]
                for args in itertools.product(*pools):
                    if max(a.depth for a in args) == d - 1:
                        out.append(GroundTerm(fs.name, args))
            new[name] = sorted(out, key=str)
        for name, terms in new.items():
            self.levels[name].append(terms)

    def level(self, type_name, d):
        while len(self.levels[type_name]) <= d:
            self._build_level(len(self.levels[type_name]))
        return self.levels[type_name][d]

    def upto(self, type_name, d):
        out = []
        for k in range(d + 1):
            out.extend(self.level(type_name, k))
        return out


def enumerate_universe(sig: Signature, type_name: str, max_depth: int) -> list[GroundTerm]:
    """Ground terms of `type_name` with depth <= max_depth, depth-major then lexicographic."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    return Universe(sig).upto(type_name, max_depth)


def enumerate_atoms(sig: Signature, max_depth: int, universe: Universe | None = None):
    """All ground atoms whose arguments have depth <= max_depth."""
    u = universe or Universe(sig)
    out = []
    for pred, arg_types in sig.predicates.items():
        for args in itertools.product(*(u.upto(t, max_depth) for t in arg_types)):
            out.append(GroundAtom(pred, args))
    return out


# -- sigma-determinacy --------------------------------------------------------

def _literal_vars(lit):
    vs = set()
    stack = list(lit.atom.args)
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            vs.add(t.name)
        elif isinstance(t, App):
            stack.extend(t.args)
    return vs


@dataclass(frozen=True)
class ClauseVerdict:
    index: int
    clause: str
    determinate: bool
    violating: tuple[str, ...] = ()


@dataclass(frozen=True)
class DeterminacyReport:
    clauses: tuple[ClauseVerdict, ...]
    determinate: bool
    clause_bound: int  # max ground clauses containing any one atom
    neighbor_bound: int

    @property
    def locally_finite(self) -> bool | None:
        # sufficient, not necessary: a non-determinate program is "unknown"
        return True if self.determinate else None


def _finite_product(clause: WeightedClause, sig: Signature, exclude=()):
    n = 1
    for v, ty in clause.var_types:
        if v not in exclude and sig.is_finite(ty):
            n *= len(sig.types[ty].constants)
    return n


def check_sigma_determinate(p: Program) -> DeterminacyReport:
    if not p.compiled:
        p = compile_program(p)
    sig = p.signature
    verdicts = []
    cbound = nbound = 0
    for i, c in enumerate(p.clauses):
        infinite = [v for v, ty in c.var_types if not sig.is_finite(ty)]
        per_lit = [_literal_vars(l) for l in c.literals]
        bad = tuple(v for v in infinite if any(v not in s for s in per_lit))
        verdicts.append(ClauseVerdict(i, str(c), not bad, bad))
        k = len(c.literals)
        groundings = k * _finite_product(c, sig)
        cbound += groundings
        nbound += groundings * (k - 1)
    ok = all(v.determinate for v in verdicts)
    return DeterminacyReport(tuple(verdicts), ok, cbound, nbound)


# -- grounding ----------------------------------------------------------------

@dataclass(frozen=True)
class GroundClause:
    source: int
    literals: tuple  # ((positive, GroundAtom), ...) sorted by atom id
    weight: float
    binding: tuple = field(default=(), compare=False)

    @property
    def atoms(self) -> tuple:
        seen = []
        for _, a in self.literals:
            if a not in seen:
                seen.append(a)
        return tuple(seen)

    def satisfied(self, value) -> bool:
        """`value` maps a GroundAtom to 0/1."""
        return any(bool(value(a)) == pos for pos, a in self.literals)

    @property
    def tautology(self) -> bool:
        return len(self.atoms) < len(self.literals)

    def __str__(self):
        lits = sorted(self.literals, key=lambda l: (atom_key(l[1]), not l[0]))
        return " | ".join(str(a) if pos else f"!{a}" for pos, a in lits)


def _match(pattern, term: GroundTerm, binding: dict, var_types, sig) -> bool:
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is not None:
            return bound is term
        if term_type(term, sig) != var_types[pattern.name]:
            return False
        binding[pattern.name] = term
        return True
    if isinstance(pattern, Const):
        return not term.args and term.head == pattern.name
    if not term.args or term.head != pattern.func or len(term.args) != len(pattern.args):
        return False
    return all(_match(p, t, binding, var_types, sig) for p, t in zip(pattern.args, term.args))


def instantiate(clause: WeightedClause, index: int, binding: dict) -> GroundClause:
    lits = {}
    for lit in clause.literals:
        a = ground_atom(lit.atom, binding)
        lits[(lit.positive, a)] = None
    ordered = tuple(sorted(lits, key=lambda l: (l[1].id, not l[0])))
    return GroundClause(index, ordered, clause.weight,
                        tuple(sorted((k, v) for k, v in binding.items())))


class Grounder:
    """Per-program grounding state: determinacy verdict and a predicate index."""

    def __init__(self, p: Program):
        if not p.compiled:
            p = compile_program(p)
        self.program = p
        self.sig = p.signature
        self.report = check_sigma_determinate(p)
        self.by_pred: dict[str, list] = {}
        for ci, c in enumerate(p.clauses):
            for li, lit in enumerate(c.literals):
                self.by_pred.setdefault(lit.atom.pred, []).append((ci, li))
        self._cache: dict = {}

    def require_determinate(self):
        if not self.report.determinate:
            bad = [f"clause {v.index} ({v.clause}): {', '.join(v.violating)}"
                   for v in self.report.clauses if not v.determinate]
            raise NotDeterminateError(
                "program is not sigma-determinate; infinite-domain variables missing from "
                "some literal in " + "; ".join(bad))

    def clauses_containing(self, atom: GroundAtom) -> tuple[GroundClause, ...]:
        hit = self._cache.get(atom)
        if hit is not None:
            return hit
        self.require_determinate()
        sig = self.sig
        found = {}
        for ci, li in self.by_pred.get(atom.pred, ()):
            clause = self.program.clauses[ci]
            var_types = clause.variables
            pattern = clause.literals[li].atom
            binding: dict = {}
            if len(pattern.args) != len(atom.args):
                continue
            if not all(_match(p, t, binding, var_types, sig) for p, t in zip(pattern.args, atom.args)):
                continue
            rest = [v for v in var_types if v not in binding]
            pools = []
            for v in rest:
                ty = var_types[v]
                if not sig.is_finite(ty):  # pragma: no cover - excluded by determinacy
                    raise NotDeterminateError(f"variable {v} left unbound by matching")
                pools.append([GroundTerm(c) for c in sig.types[ty].constants])
            for combo in itertools.product(*pools):
                b = dict(binding)
                b.update(zip(rest, combo))
                gc = instantiate(clause, ci, b)
                found.setdefault((gc.source, gc.literals), gc)
        out = tuple(found.values())
        self._cache[atom] = out
        return out

    def neighbors(self, atom: GroundAtom) -> set:
        out = set()
        for gc in self.clauses_containing(atom):
            out.update(gc.atoms)
        out.discard(atom)
        return out


def grounder(p: Program) -> Grounder:
    g = p.__dict__.get("_grounder")
    if g is None:
        g = Grounder(p)
        p.__dict__["_grounder"] = g
    return g


def ground_clauses_containing(atom: GroundAtom, p: Program) -> list[GroundClause]:
    """Every ground clause of the program in which `atom` occurs."""
    return list(grounder(p).clauses_containing(atom))


def neighbors(atom: GroundAtom, p: Program) -> set:
    return grounder(p).neighbors(atom)
