"""Reader and printer for the .mln text format.

    // comment
    type person = {Anna, Bob}
    type nat = infinite seed 0
    function s(nat) -> nat
    predicate Q(nat, nat)
    1.5   forall x:nat, y:nat Q(x, y) <=> Q(s(x), y)
    inf   Q(0, 0)

Whitespace, including newlines, only separates tokens. Variables start with a
lowercase letter; constants must be declared (as members of a finite type or
as the seed of an infinite one). Variables left free in a formula are
universally quantified, and an unannotated quantifier takes its type from the
argument positions its variable occupies.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ParseError, TypeCheckError
from .logic import (
    INF, And, App, Atom, Const, DomainType, Exists, Forall, FunctionSymbol, Iff,
    Implies, Not, Or, Program, Signature, Var, WeightedFormula,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=>|=>|->|[(){},:=!&|])
""", re.VERBOSE)

KEYWORDS = {"type", "function", "predicate", "infinite", "seed", "forall", "exists", "inf"}


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | kw | eof
    text: str
    line: int
    col: int


def tokenize(text: str, source: str | None = None) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            if kind == "ident" and val in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, val, line, pos - line_start + 1))
        nl = val.count("\n")
        if nl:
            line += nl
            line_start = pos + val.rfind("\n") + 1
        pos = m.end()
    if tokens:  # report end of input right after the last token
        last = tokens[-1]
        tokens.append(Token("eof", "", last.line, last.col + len(last.text)))
    else:
        tokens.append(Token("eof", "", 1, 1))
    return tokens


class _Slot:
    """Type cell for one variable binding; filled by inference if unannotated."""
    __slots__ = ("name", "type", "tok")

    def __init__(self, name, type_, tok):
        self.name, self.type, self.tok = name, type_, tok


class _Parser:
    def __init__(self, text, source=None, signature=None):
        self.source = source
        self.toks = tokenize(text, source)
        self.i = 0
        sig = signature or Signature()
        self.types = dict(sig.types)
        self.constants = dict(sig.constants)
        self.functions = dict(sig.functions)
        self.predicates = dict(sig.predicates)

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col, self.source)

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text, kind=None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != "eof"

    def expect(self, text) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident":
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {shown!r}")
        return self.advance()

    def signature(self) -> Signature:
        return Signature(self.types, self.constants, self.functions, self.predicates)

    # -- statements
    def program(self) -> Program:
        formulas = []
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "kw" and t.text == "type":
                self.type_decl()
            elif t.kind == "kw" and t.text == "function":
                self.function_decl()
            elif t.kind == "kw" and t.text == "predicate":
                self.predicate_decl()
            elif t.kind == "num" or (t.kind == "kw" and t.text == "inf"):
                w = self.weight()
                formulas.append(WeightedFormula(self.closed_formula(), w))
            else:
                raise self.error(f"expected a declaration or a weighted formula, found {t.text!r}")
        return Program(self.signature(), tuple(formulas))

    def weight(self) -> float:
        t = self.advance()
        if t.kind == "kw":
            return INF
        w = float(t.text)
        if math.isnan(w) or math.isinf(w):
            raise self.error("weight must be a finite decimal or 'inf'", t)
        return w

    def _fresh_name(self, tok, what):
        name = tok.text
        if name in self.types and what == "type":
            raise self.error(f"type {name} already declared", tok)
        if what == "constant" and name in self.constants:
            raise self.error(f"constant {name} already declared", tok)
        if what == "function" and name in self.functions:
            raise self.error(f"function {name} already declared", tok)
        if what == "predicate" and name in self.predicates:
            raise self.error(f"predicate {name} already declared", tok)
        return name

    def constant_token(self) -> Token:
        if self.tok.kind in ("ident", "num"):
            return self.advance()
        raise self.error(f"expected a constant, found {self.tok.text!r}")

    def type_decl(self):
        self.advance()
        name = self._fresh_name(self.ident("type name"), "type")
        self.expect("=")
        if self.at("infinite", "kw"):
            self.advance()
            self.expect("seed")
            ct = self.constant_token()
            seed = self._fresh_name(ct, "constant")
            self.types[name] = DomainType(name, "infinite", (), seed)
            self.constants[seed] = name
            return
        self.expect("{")
        consts = []
        while True:
            ct = self.constant_token()
            c = self._fresh_name(ct, "constant")
            if c in consts:
                raise self.error(f"constant {c} listed twice", ct)
            consts.append(c)
            if self.at(","):
                self.advance()
                continue
            self.expect("}")
            break
        self.types[name] = DomainType(name, "finite", tuple(consts))
        for c in consts:
            self.constants[c] = name

    def type_list(self) -> tuple[str, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                t = self.ident("type name")
                if t.text not in self.types:
                    raise self.error(f"undeclared type {t.text}", t, TypeCheckError)
                out.append(t.text)
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        return tuple(out)

    def function_decl(self):
        self.advance()
        ntok = self.ident("function name")
        name = self._fresh_name(ntok, "function")
        args = self.type_list()
        if not args:
            raise self.error(f"function {name} needs at least one argument; declare constants in a type", ntok)
        self.expect("->")
        rt = self.ident("return type")
        if rt.text not in self.types:
            raise self.error(f"undeclared type {rt.text}", rt, TypeCheckError)
        if self.types[rt.text].finite:
            raise self.error(f"function {name} returns finite type {rt.text}; "
                             "only infinite types may have generating functions", rt, TypeCheckError)
        self.functions[name] = FunctionSymbol(name, args, rt.text)

    def predicate_decl(self):
        self.advance()
        name = self._fresh_name(self.ident("predicate name"), "predicate")
        args = self.type_list() if self.at("(") else ()
        self.predicates[name] = args

    # -- formulas
    def closed_formula(self):
        self.scope: dict[str, _Slot] = {}
        self.free: dict[str, _Slot] = {}
        self.bound_names: set[str] = set()
        f = self.formula()
        for name in reversed(list(self.free)):
            slot = self.free[name]
            if slot.type is None:  # pragma: no cover - free vars are typed on first use
                raise self.error(f"cannot infer type of variable {name}", slot.tok, TypeCheckError)
            f = Forall(name, slot.type, f)
        return f

    def formula(self):
        return self.iff()

    def iff(self):
        left = self.implication()
        while self.at("<=>"):
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("=>"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        parts = [self.conjunction()]
        while self.at("|"):
            self.advance()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.at("&"):
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.tok.kind == "kw" and self.tok.text in ("forall", "exists"):
            return self.quantified()
        return self.atom()

    def quantified(self):
        q = self.advance().text
        slots = []
        while True:
            vt = self.ident("variable")
            if not vt.text[0].islower():
                raise self.error(f"variable names start with a lowercase letter: {vt.text}", vt)
            if (vt.text in self.scope or vt.text in self.free
                    or any(s.name == vt.text for s in slots)):
                raise self.error(f"variable {vt.text} is already in scope", vt, TypeCheckError)
            if vt.text in self.constants:
                raise self.error(f"{vt.text} is a constant, not a variable", vt, TypeCheckError)
            annot = None
            if self.at(":"):
                self.advance()
                tt = self.ident("type name")
                if tt.text not in self.types:
                    raise self.error(f"undeclared type {tt.text}", tt, TypeCheckError)
                annot = tt.text
            slots.append(_Slot(vt.text, annot, vt))
            self.bound_names.add(vt.text)
            if self.at(","):
                self.advance()
                continue
            break
        saved = dict(self.scope)
        for s in slots:
            self.scope[s.name] = s
        body = self.formula()
        self.scope = saved
        cls = Forall if q == "forall" else Exists
        for s in reversed(slots):
            if s.type is None:
                raise self.error(f"cannot infer type of variable {s.name}; annotate it",
                                 s.tok, TypeCheckError)
            body = cls(s.name, s.type, body)
        return body

    def atom(self):
        pt = self.tok
        if pt.kind != "ident":
            shown = pt.text or "end of input"
            raise self.error(f"expected an atom, found {shown!r}")
        self.advance()
        if pt.text not in self.predicates:
            raise self.error(f"undeclared predicate {pt.text}", pt, TypeCheckError)
        arg_toks, args = [], []
        if self.at("("):
            self.advance()
            if not self.at(")"):
                while True:
                    arg_toks.append(self.tok)
                    args.append(self.term())
                    if self.at(","):
                        self.advance()
                        continue
                    break
            self.expect(")")
        atom = Atom(pt.text, tuple(args))
        expected = self.predicates[pt.text]
        if len(expected) != len(args):
            raise self.error(f"arity mismatch in atom {atom}: {pt.text} takes "
                             f"{len(expected)} argument(s), got {len(args)}", pt, TypeCheckError)
        for t, ty, tok in zip(args, expected, arg_toks):
            self.check_term(t, ty, tok, atom)
        return atom

    def term(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(t.text)
        if t.kind != "ident":
            raise self.error(f"expected a term, found {t.text or 'end of input'!r}")
        self.advance()
        if self.at("("):
            self.advance()
            args = []
            while True:
                args.append(self.term())
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(")")
            return App(t.text, tuple(args))
        if t.text in self.constants:
            return Const(t.text)
        if t.text[0].islower():
            return Var(t.text)
        raise self.error(f"undeclared constant {t.text}", t, TypeCheckError)

    def check_term(self, term, expected, tok, atom):
        if isinstance(term, Const):
            if term.name not in self.constants:
                raise self.error(f"undeclared constant {term.name} in atom {atom}", tok, TypeCheckError)
            actual = self.constants[term.name]
            if actual != expected:
                raise self.error(f"type error in atom {atom}: {term.name} has type {actual}, "
                                 f"expected {expected}", tok, TypeCheckError)
        elif isinstance(term, App):
            fs = self.functions.get(term.func)
            if fs is None:
                raise self.error(f"undeclared function {term.func} in atom {atom}", tok, TypeCheckError)
            if len(fs.arg_types) != len(term.args):
                raise self.error(f"arity mismatch in atom {atom}: {term.func} takes "
                                 f"{len(fs.arg_types)} argument(s)", tok, TypeCheckError)
            if fs.return_type != expected:
                raise self.error(f"type error in atom {atom}: {term} has type {fs.return_type}, "
                                 f"expected {expected}", tok, TypeCheckError)
            for a, ty in zip(term.args, fs.arg_types):
                self.check_term(a, ty, tok, atom)
        else:
            slot = self.scope.get(term.name)
            if slot is None:
                slot = self.free.get(term.name)
                if slot is None:
                    if term.name in self.bound_names:
                        raise self.error(f"variable {term.name} used both bound and free",
                                         tok, TypeCheckError)
                    slot = self.free[term.name] = _Slot(term.name, None, tok)
            if slot.type is None:
                slot.type = expected
            elif slot.type != expected:
                raise self.error(f"type error in atom {atom}: variable {term.name} has type "
                                 f"{slot.type}, expected {expected}", tok, TypeCheckError)


def parse_program(text: str, source: str | None = None) -> Program:
    """Parse and type-check a program. Clauses are not compiled yet."""
    return _Parser(text, source).program()


def parse_formula(text: str, signature: Signature):
    """Parse a single formula against an existing signature; free variables become universal."""
    p = _Parser(text, None, signature)
    f = p.closed_formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return f


# -- printing -----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Atom: 6}


def format_weight(w: float) -> str:
    return "inf" if math.isinf(w) and w > 0 else repr(float(w))


def format_formula(f) -> str:
    return _fmt(f, 0)


def _fmt(f, ctx: int) -> str:
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        s = f"{q} {f.var}:{f.type} {_fmt(f.body, 0)}"
        return s if ctx == 0 else f"({s})"
    prec = _PREC[type(f)]
    if isinstance(f, Atom):
        s = str(f)
    elif isinstance(f, Not):
        s = "!" + _fmt(f.arg, prec)
    elif isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        s = op.join(_fmt(a, prec + 1) for a in f.args)
    elif isinstance(f, Implies):
        s = f"{_fmt(f.left, prec + 1)} => {_fmt(f.right, prec)}"
    else:
        s = f"{_fmt(f.left, prec)} <=> {_fmt(f.right, prec + 1)}"
    # a quantifier inside the right operand would swallow what follows, hence ctx > 0 parenthesizes
    return f"({s})" if ctx > prec else s


def format_signature(sig: Signature) -> list[str]:
    lines = []
    for t in sig.types.values():
        if t.finite:
            lines.append(f"type {t.name} = {{{', '.join(t.constants)}}}")
        else:
            lines.append(f"type {t.name} = infinite seed {t.seed}")
    for fs in sig.functions.values():
        lines.append(f"function {fs.name}({', '.join(fs.arg_types)}) -> {fs.return_type}")
    for name, args in sig.predicates.items():
        lines.append(f"predicate {name}({', '.join(args)})" if args else f"predicate {name}")
    return lines


def format_program(p: Program) -> str:
    lines = format_signature(p.signature)
    for wf in p.formulas:
        lines.append(f"{format_weight(wf.weight)} {format_formula(wf.formula)}")
    return "\n".join(lines) + "\n"
