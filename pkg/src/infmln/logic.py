"""First-order syntax: signatures, terms, formulas, weighted clauses and programs.

Every object here is immutable. Formulas are plain trees of frozen
dataclasses so they compare and hash structurally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

INF = math.inf


def is_infinite_weight(w: float) -> bool:
    return math.isinf(w) and w > 0


# -- signature ---------------------------------------------------------------

@dataclass(frozen=True)
class DomainType:
    name: str
    kind: str  # "finite" | "infinite"
    constants: tuple[str, ...] = ()
    seed: str | None = None

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def __post_init__(self):
        if self.kind == "finite":
            if not self.constants:
                raise ValueError(f"finite type {self.name} needs at least one constant")
        elif self.kind == "infinite":
            if self.seed is None:
                raise ValueError(f"infinite type {self.name} needs a seed constant")
        else:
            raise ValueError(f"unknown type kind {self.kind!r}")


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg_types: tuple[str, ...]
    return_type: str


@dataclass(frozen=True, eq=True)
class Signature:
    types: Mapping[str, DomainType] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    functions: Mapping[str, FunctionSymbol] = field(default_factory=dict)
    predicates: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def type_of_constant(self, name: str) -> str:
        return self.constants[name]

    def generators(self, type_name: str) -> list[FunctionSymbol]:
        """Function symbols returning `type_name`, sorted by name."""
        return sorted((f for f in self.functions.values() if f.return_type == type_name),
                      key=lambda f: f.name)

    def domain_constants(self, type_name: str) -> tuple[str, ...]:
        t = self.types[type_name]
        return t.constants if t.finite else (t.seed,)

    def is_finite(self, type_name: str) -> bool:
        return self.types[type_name].finite


# -- terms --------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    func: str
    args: tuple

    def __str__(self):
        return f"{self.func}({', '.join(map(str, self.args))})"


Term = Var | Const | App


def term_vars(t, acc=None) -> list[str]:
    """Variables of a term in order of first occurrence."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, acc)
    return acc


def subst_term(t, binding: Mapping[str, object]):
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if isinstance(t, App):
        return App(t.func, tuple(subst_term(a, binding) for a in t.args))
    return t


# -- formulas -----------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Forall:
    var: str
    type: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    type: str
    body: object


Formula = Atom | Not | And | Or | Implies | Iff | Forall | Exists


def free_vars(f, bound=frozenset(), acc=None) -> list[str]:
    if acc is None:
        acc = []
    if isinstance(f, Atom):
        for a in f.args:
            for v in term_vars(a):
                if v not in bound and v not in acc:
                    acc.append(v)
    elif isinstance(f, Not):
        free_vars(f.arg, bound, acc)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            free_vars(a, bound, acc)
    elif isinstance(f, (Implies, Iff)):
        free_vars(f.left, bound, acc)
        free_vars(f.right, bound, acc)
    elif isinstance(f, (Forall, Exists)):
        free_vars(f.body, bound | {f.var}, acc)
    else:
        raise TypeError(f"not a formula: {f!r}")
    return acc


def subst_formula(f, binding: Mapping[str, object]):
    """Substitute terms for free variables. Bound variables shadow the binding."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, binding) for a in f.args))
    if isinstance(f, Not):
        return Not(subst_formula(f.arg, binding))
    if isinstance(f, And):
        return And(tuple(subst_formula(a, binding) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(subst_formula(a, binding) for a in f.args))
    if isinstance(f, Implies):
        return Implies(subst_formula(f.left, binding), subst_formula(f.right, binding))
    if isinstance(f, Iff):
        return Iff(subst_formula(f.left, binding), subst_formula(f.right, binding))
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in binding.items() if k != f.var}
        return type(f)(f.var, f.type, subst_formula(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f, world, domains: Mapping[str, tuple] | None = None) -> bool:
    """Truth value of a formula in a world.

    `world` is a callable or mapping from ground Atom to bool. Quantifiers
    range over `domains[type]`, a finite list of ground terms.
    """
    lookup = world if callable(world) else world.__getitem__
    if isinstance(f, Atom):
        return bool(lookup(f))
    if isinstance(f, Not):
        return not evaluate(f.arg, world, domains)
    if isinstance(f, And):
        return all(evaluate(a, world, domains) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, world, domains) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.left, world, domains)) or evaluate(f.right, world, domains)
    if isinstance(f, Iff):
        return evaluate(f.left, world, domains) == evaluate(f.right, world, domains)
    if isinstance(f, (Forall, Exists)):
        if domains is None:
            raise ValueError("quantified formula needs finite domains to evaluate")
        vals = (evaluate(subst_formula(f.body, {f.var: c}), world, domains)
                for c in domains[f.type])
        return all(vals) if isinstance(f, Forall) else any(vals)
    raise TypeError(f"not a formula: {f!r}")


# -- weighted formulas and clauses -------------------------------------------

@dataclass(frozen=True)
class WeightedFormula:
    formula: object
    weight: float

    @property
    def hard(self) -> bool:
        return is_infinite_weight(self.weight)


@dataclass(frozen=True, order=True)
class Literal:
    positive: bool
    atom: Atom

    def __str__(self):
        return str(self.atom) if self.positive else f"!{self.atom}"

    def negate(self) -> "Literal":
        return Literal(not self.positive, self.atom)


@dataclass(frozen=True)
class WeightedClause:
    literals: tuple[Literal, ...]
    weight: float
    origin: int
    var_types: tuple[tuple[str, str], ...] = ()

    @property
    def variables(self) -> dict[str, str]:
        return dict(self.var_types)

    @property
    def hard(self) -> bool:
        return is_infinite_weight(self.weight)

    def __str__(self):
        body = " | ".join(map(str, self.literals)) if self.literals else "FALSE"
        return body


@dataclass(frozen=True)
class Program:
    signature: Signature
    formulas: tuple[WeightedFormula, ...] = ()
    clauses: tuple[WeightedClause, ...] = ()
    compiled: bool = False

    __hash__ = None  # type: ignore[assignment]

    @property
    def has_infinite_weights(self) -> bool:
        return any(f.hard for f in self.formulas) or any(c.hard for c in self.clauses)

    @property
    def all_hard(self) -> bool:
        return all(f.hard for f in self.formulas) and all(c.hard for c in self.clauses)
