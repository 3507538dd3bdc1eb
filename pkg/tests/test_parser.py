import pytest
from hypothesis import given, settings, strategies as st

from infmln import ParseError, TypeCheckError, format_program, parse_formula, parse_program
from infmln.logic import And, Atom, Const, Exists, Forall, Iff, Implies, Not, Or, Var

from conftest import fixture_text

HEADER = """
type person = {Anna, Bob}
type nat = infinite seed 0
function s(nat) -> nat
predicate P(person)
predicate L(person, person)
predicate Q(nat)
predicate Z
"""


def test_single_weighted_formula():
    p = parse_program("type person = {Anna}\npredicate P(person)\n1.5 P(Anna)")
    assert len(p.formulas) == 1
    assert p.formulas[0].weight == 1.5
    assert p.formulas[0].formula == Atom("P", (Const("Anna"),))


def test_arity_mismatch_names_atom():
    with pytest.raises(TypeCheckError, match="P"):
        parse_program("type person = {Anna, Bob}\npredicate P(person)\n1 P(Anna, Bob)")


def test_type_mismatch():
    with pytest.raises(TypeCheckError):
        parse_program(HEADER + "1 Q(Anna)")


def test_error_positions():
    with pytest.raises(ParseError) as e:
        parse_program("type t = {A}\npredicate P(t)\n1 P(A) &", source="x.mln")
    assert str(e.value).startswith("x.mln:3:")


def test_inf_and_negative_weights():
    p = parse_program(HEADER + "inf P(Anna)\n-2.5 Z")
    assert p.formulas[0].hard
    assert p.formulas[1].weight == -2.5


def test_free_variables_are_universal():
    p = parse_program(HEADER + "1 L(x, y) => P(x)")
    f = p.formulas[0].formula
    assert isinstance(f, Forall) and f.var == "x" and f.type == "person"
    assert isinstance(f.body, Forall) and f.body.var == "y"


def test_quantifier_type_inferred():
    p = parse_program(HEADER + "1 forall x Q(x) => Q(s(x))")
    assert p.formulas[0].formula.type == "nat"


def test_precedence():
    sig = parse_program(HEADER).signature
    a, b, c = (Atom("P", (Const(n),)) for n in ("Anna", "Bob", "Anna"))
    z = Atom("Z", ())
    assert parse_formula("P(Anna) | P(Bob) & Z", sig) == Or((a, And((b, z))))
    assert parse_formula("P(Anna) => P(Bob) => Z", sig) == Implies(a, Implies(b, z))
    assert parse_formula("!P(Anna) <=> Z", sig) == Iff(Not(a), z)


def test_quantifier_body_extends_right():
    sig = parse_program(HEADER).signature
    f = parse_formula("exists x:person P(x) & Z", sig)
    assert isinstance(f, Exists) and isinstance(f.body, And)


def test_double_binding_rejected():
    with pytest.raises(ParseError):
        parse_program(HEADER + "1 forall x:person forall x:person P(x)")


def test_functions_must_return_infinite_type():
    with pytest.raises(ParseError):
        parse_program("type t = {A}\nfunction f(t) -> t\npredicate P(t)\n1 P(f(A))")


def test_comments_ignored():
    p = parse_program("// header\ntype t = {A} // inline\npredicate P(t)\n1 P(A) // tail\n")
    assert len(p.formulas) == 1


def test_lattice_round_trip():
    p = parse_program(fixture_text("lattice.mln"))
    assert len(p.formulas) == 2
    assert parse_program(format_program(p)) == p


@pytest.mark.parametrize("name", ["chain.mln", "lattice.mln", "loves.mln", "contradiction.mln",
                                  "induction.mln", "induction_refuted.mln", "base.mln",
                                  "determinate.mln"])
def test_fixture_round_trip(name):
    p = parse_program(fixture_text(name))
    assert parse_program(format_program(p)) == p


# -- random formulas for the round trip property -------------------------------

SIG = parse_program(HEADER).signature


def _terms(vars_):
    consts = st.sampled_from([Const("Anna"), Const("Bob")])
    return consts if not vars_ else st.one_of(consts, st.sampled_from([Var(v) for v in vars_]))


def formulas(depth=3, vars_=()):
    atoms = st.one_of(
        st.just(Atom("Z", ())),
        st.builds(lambda t: Atom("P", (t,)), _terms(vars_)),
        st.builds(lambda a, b: Atom("L", (a, b)), _terms(vars_), _terms(vars_)),
    )
    if depth == 0:
        return atoms
    sub = formulas(depth - 1, vars_)
    name = f"v{len(vars_)}"
    inner = formulas(depth - 1, vars_ + (name,))
    return st.one_of(
        atoms,
        st.builds(Not, sub),
        st.builds(lambda a, b: And((a, b)), sub, sub),
        st.builds(lambda a, b: Or((a, b)), sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(Iff, sub, sub),
        st.builds(lambda b: Forall(name, "person", b), inner),
        st.builds(lambda b: Exists(name, "person", b), inner),
    )


weights = st.one_of(st.just(float("inf")),
                    st.floats(-10, 10, allow_nan=False).map(lambda w: w + 0.0))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(weights, formulas()), min_size=1, max_size=4))
def test_parse_print_round_trip(items):
    text = HEADER + "\n".join(f"{'inf' if w == float('inf') else repr(w)} {_fmt(f)}"
                              for w, f in items)
    p = parse_program(text)
    assert parse_program(format_program(p)) == p


def _fmt(f):
    from infmln import format_formula
    return format_formula(f)
