import itertools

import pytest

from infmln import (INF, MLNError, QuantifierRestrictionError, build_volume, check_entailment,
                    check_satisfiable, conditional, ground_truncation, limit_conditional,
                    solve_ground)
from infmln.gibbs import constant_boundary
from infmln.herbrand import GroundClause
from infmln.satisfiability import (SAT_UP_TO, UNSAT_CERTIFIED, brute_force_satisfiable,
                                   max_row_deviation, soften)

import oracles
from conftest import atom, lattice_atom, load, program


def strs(t):
    return {str(gc) for gc in t.clauses}


def oracle_truncation(p, d):
    """Ground clauses whose atoms all have argument depth <= d, by brute force."""
    sig = p.signature
    pools = {ty: oracles.terms(sig, ty, d) for ty in sig.types}
    ok = set()
    for pred, args in sig.predicates.items():
        for combo in itertools.product(*(pools[ty] for ty in args)):
            ok.add(f"{pred}({', '.join(combo)})" if args else pred)
    return {g for g in oracles.ground_all(p, d) if all(a in ok for _, a in g[1])}


def test_contradiction_truncation():
    assert len(ground_truncation(load("contradiction.mln"), 0).clauses) == 2


def test_induction_truncation():
    got = strs(ground_truncation(load("induction.mln"), 2))
    assert got == {"P(0)", "!P(0) | P(f(0))", "!P(f(0)) | P(f(f(0)))"}


def test_hard_lattice_truncation():
    t = ground_truncation(load("lattice.mln", weight=INF), 1)
    assert len(t.clauses) == 8
    assert {str(a) for a in t.atoms} == {"Q(0, 0)", "Q(0, s(0))", "Q(s(0), 0)", "Q(s(0), s(0))"}


@pytest.mark.parametrize("name", ["contradiction.mln", "induction.mln", "induction_refuted.mln",
                                  "base.mln"])
def test_truncation_matches_oracle(name):
    p = load(name)
    for d in range(4):
        got = {oracles.key_of(gc) for gc in ground_truncation(p, d).clauses}
        assert got == oracle_truncation(p, d)


def test_soft_rejected():
    with pytest.raises(MLNError, match="soft"):
        ground_truncation(load("chain.mln"), 1)


def _gc(*lits):
    return GroundClause(0, tuple(lits), INF)


def test_solve_contradiction():
    p = load("contradiction.mln")
    a = atom(p, "P(A)")
    assert not solve_ground([_gc((True, a)), _gc((False, a))]).satisfiable


def test_solve_empty():
    res = solve_ground([])
    assert res.satisfiable and res.model == {}


def test_solve_induction_chain():
    p = load("induction.mln")
    a0, a1, a2 = (atom(p, t) for t in ("P(0)", "P(f(0))", "P(f(f(0)))"))
    clauses = [_gc((True, a0)), _gc((False, a0), (True, a1)), _gc((False, a2)),
               _gc((False, a1), (True, a2))]
    assert not solve_ground(clauses).satisfiable
    assert not brute_force_satisfiable(clauses)


def test_contradiction_certified():
    rep = check_satisfiable(load("contradiction.mln"), 4)
    assert rep.verdict == UNSAT_CERTIFIED and rep.depth == 0


def test_refuted_induction_certified():
    rep = check_satisfiable(load("induction_refuted.mln"), 6)
    assert rep.verdict == UNSAT_CERTIFIED and rep.depth == 2
    assert [d.satisfiable for d in rep.depths] == [True, True, False]


@pytest.mark.parametrize("max_depth", range(7))
def test_induction_satisfiable_up_to(max_depth):
    rep = check_satisfiable(load("induction.mln"), max_depth)
    assert rep.verdict == SAT_UP_TO and rep.depth == max_depth
    assert not rep.unsatisfiable


def test_entail_unit():
    kb = program("type t = {A}\npredicate P(t)\ninf P(A)")
    rep = check_entailment(kb, "P(A)", 3)
    assert rep.entailed and rep.depth == 0


def test_entail_induction():
    rep = check_entailment(load("induction.mln"), "P(f(f(0)))", 6)
    assert rep.entailed and rep.depth == 2


@pytest.mark.parametrize("max_depth", range(7))
def test_non_entailment_inconclusive(max_depth):
    rep = check_entailment(load("base.mln"), "P(f(0))", max_depth)
    assert not rep.entailed and rep.verdict == SAT_UP_TO
    if max_depth >= 1:
        assert rep.model[atom(load("base.mln"), "P(f(0))")] is False


def test_entail_finite_universal():
    kb = program("type t = {A, B}\npredicate P(t)\ninf P(A)\ninf P(B)")
    assert check_entailment(kb, "forall x P(x)", 2).entailed


def test_entail_infinite_universal_rejected():
    with pytest.raises(QuantifierRestrictionError):
        check_entailment(load("induction.mln"), "forall x:nat P(x)", 2)


# -- properties -----------------------------------------------------------------

HARD = ["contradiction.mln", "induction.mln", "induction_refuted.mln", "base.mln"]


@pytest.mark.parametrize("name", HARD)
def test_truncation_monotone(name):
    p = load(name)
    prev = set()
    for d in range(6):
        cur = {(gc.source, gc.literals) for gc in ground_truncation(p, d).clauses}
        assert prev <= cur
        prev = cur


@pytest.mark.parametrize("name", ["contradiction.mln", "induction_refuted.mln"])
def test_unsat_persists(name):
    p = load(name)
    d0 = check_satisfiable(p, 6).depth
    for d in range(d0, 7):
        t = ground_truncation(p, d)
        assert not solve_ground(t).satisfiable


@pytest.mark.parametrize("name", ["contradiction.mln", "induction_refuted.mln"])
def test_unsat_cross_checked(name):
    p = load(name)
    rep = check_satisfiable(p, 6)
    assert not brute_force_satisfiable(ground_truncation(p, rep.depth).clauses)


@pytest.mark.parametrize("name", ["induction.mln", "base.mln"])
def test_models_verified(name):
    p = load(name)
    for d in range(6):
        t = ground_truncation(p, d)
        res = solve_ground(t)
        assert res.satisfiable
        assert all(gc.satisfied(res.model.__getitem__) for gc in t.clauses)
        if len(t.atoms) <= 20:
            assert brute_force_satisfiable(t.clauses)


def test_limit_point_mass():
    p = program("type t = {A}\npredicate P(t)\ninf P(A)")
    cd = limit_conditional(build_volume([atom(p, "P(A)")], p))
    assert list(cd.table) == [0.0, 1.0]


def test_limit_contradiction_uniform():
    p = load("contradiction.mln")
    cd = limit_conditional(build_volume([atom(p, "P(A)")], p))
    assert list(cd.table) == [0.5, 0.5]


def test_limit_lattice_center():
    p = load("lattice.mln", weight=INF)
    v = build_volume([lattice_atom(p, 3, 3)], p)
    cd = limit_conditional(v, constant_boundary(v, 1))
    assert list(cd.table) == [0.0, 1.0]


def _volumes(p):
    """Every volume of up to two low atoms, with each boundary assignment."""
    atoms = sorted({a for gc in ground_truncation(p, 2).clauses for a in gc.atoms}, key=str)
    for k in (1, 2):
        for xs in itertools.combinations(atoms, k):
            v = build_volume(xs, p)
            for bits in itertools.product((0, 1), repeat=len(v.boundary_atoms)):
                yield v, dict(zip(v.boundary_atoms, bits))


@pytest.mark.parametrize("name", HARD + ["lattice_hard"])
def test_limit_consistency(name):
    p = load("lattice.mln", weight=INF) if name == "lattice_hard" else load(name)
    devs = {5: [], 10: [], 20: []}
    for v, y in _volumes(p):
        lim = limit_conditional(v, y)
        for w in devs:
            soft = soften(p, w)
            sv = build_volume(v.atoms, soft)
            devs[w].append(max_row_deviation(conditional(sv, y), lim))
    d5, d10, d20 = (max(devs[w]) for w in (5, 10, 20))
    assert d10 <= d5 / 2 and d20 <= d10 / 2
