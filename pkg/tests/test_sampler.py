import math

import numpy as np
import pytest

from infmln import (MLNError, TruncationSpec, boundary_sensitivity, build_volume, conditional,
                    estimate_marginals, truncate)
from infmln.sampler import ball, batch_means_se, gibbs_sweep, run_chain

from conftest import atom, chain_atom, lattice_atom, load, program


def test_ball_radius_zero():
    p = load("lattice.mln")
    q = lattice_atom(p, 2, 2)
    assert ball([q], 0, p) == [q]


def test_ball_lattice_radius_one():
    p = load("lattice.mln")
    got = ball([lattice_atom(p, 1, 1)], 1, p)
    assert {str(a) for a in got} == {"Q(s(0), s(0))", "Q(0, s(0))", "Q(s(s(0)), s(0))",
                                     "Q(s(0), 0)", "Q(s(0), s(s(0)))"}


def test_ball_chain():
    p = load("chain.mln")
    v, y = truncate(TruncationSpec((chain_atom(p, 3),), 2, "one"), p)
    assert {str(a) for a in v.atoms} == {str(chain_atom(p, k)) for k in range(1, 6)}
    assert {str(b) for b in v.boundary_atoms} == {str(chain_atom(p, 0)), str(chain_atom(p, 6))}
    assert set(y.values()) == {1}


def test_lattice_r8_size():
    p = load("lattice.mln")
    v, _ = truncate(TruncationSpec((lattice_atom(p, 8, 8),), 8, "zero"), p)
    assert len(v.atoms) == 145


def test_policies():
    p = load("chain.mln")
    q = (chain_atom(p, 3),)
    v, y = truncate(TruncationSpec(q, 1, "free"), p)
    assert v.free and y == {} and v.boundary_atoms == ()
    _, y = truncate(TruncationSpec(q, 1, "all-zero"), p)
    assert set(y.values()) == {0}
    with pytest.raises(MLNError):
        TruncationSpec(q, 1, "sideways")


def test_explicit_boundary_must_be_total():
    p = load("chain.mln")
    q = chain_atom(p, 3)
    with pytest.raises(MLNError, match="missing"):
        truncate(TruncationSpec((q,), 0, "explicit", {chain_atom(p, 2): 1}), p)
    v, y = truncate(TruncationSpec((q,), 0, "explicit",
                                   {chain_atom(p, 2): 1, chain_atom(p, 4): 0}), p)
    assert y == {chain_atom(p, 2): 1, chain_atom(p, 4): 0}


def test_single_site_kernel_is_exact():
    # one sweep on one atom sets it to 1 exactly when the uniform falls below P(1)
    p = program("type t = {A}\npredicate P(t)\n0.8 P(A)")
    v = build_volume([atom(p, "P(A)")], p)
    p1 = conditional(v).prob([1])
    for seed in range(50):
        u = np.random.default_rng(seed).random((1, 1))[0, 0]
        got = gibbs_sweep(v, {}, np.array([0]), np.random.default_rng(seed))
        assert got[0] == (1 if u < p1 else 0)


def _within(m, exact, k=3.0):
    return [abs(m.estimates[a] - exact[a]) <= k * m.std_errors[a] for a in exact]


def test_zero_weight_fair_coins():
    p = load("lattice.mln", weight=0.0)
    m = estimate_marginals(TruncationSpec((lattice_atom(p, 3, 3),), 2, "one"), 20_000, 1_000, 1, p)
    assert all(abs(e - 0.5) <= 3 * m.std_errors[a] for a, e in m.estimates.items())


def test_empty_program():
    p = program("type t = {A}\npredicate P(t)")
    a = atom(p, "P(A)")
    m = estimate_marginals(TruncationSpec((a,)), 20_000, 1_000, 3, p)
    assert abs(m.estimates[a] - 0.5) <= 3 * m.std_errors[a]


def test_unit_clause_sigmoid():
    p = program("type t = {A}\npredicate P(t)\n2 P(A)")
    a = atom(p, "P(A)")
    m = estimate_marginals(TruncationSpec((a,)), 50_000, 1_000, 4, p)
    assert abs(m.estimates[a] - math.exp(2) / (1 + math.exp(2))) <= 3 * m.std_errors[a]


def test_two_atom_joint():
    p = load("chain.mln", weight=1.5)
    spec = TruncationSpec((chain_atom(p, 2), chain_atom(p, 3)), 0, "explicit",
                          {chain_atom(p, 1): 1, chain_atom(p, 4): 0})
    v, y = truncate(spec, p)
    exact = conditional(v, y)
    states = run_chain(v, y, 100_000, 11)[1_000:]
    codes = states[:, 0].astype(int) * 2 + states[:, 1]
    ind = np.stack([(codes == k) for k in range(4)], axis=1).astype(float)
    se = batch_means_se(ind)
    assert np.all(np.abs(ind.mean(axis=0) - exact.table) <= 3 * se)


def test_twelve_atom_volume():
    p = load("chain.mln", weight=1.0)
    spec = TruncationSpec(tuple(chain_atom(p, k) for k in range(1, 13)), 0, "explicit",
                          {chain_atom(p, 0): 1, chain_atom(p, 13): 0})
    v, y = truncate(spec, p)
    assert len(v.atoms) == 12
    exact = conditional(v, y).marginals()
    m = estimate_marginals(spec, 50_000, 2_000, 5, p)
    assert sum(_within(m, exact)) >= 11


def test_determinism():
    p = load("lattice.mln", weight=0.8)
    spec = TruncationSpec((lattice_atom(p, 3, 3),), 2, "one")
    a = estimate_marginals(spec, 5_000, 500, 42, p)
    b = estimate_marginals(spec, 5_000, 500, 42, p)
    assert a.estimates == b.estimates and a.std_errors == b.std_errors
    c = estimate_marginals(spec, 5_000, 500, 43, p)
    assert a.estimates != c.estimates


def test_free_boundary_symmetry():
    p = load("lattice.mln", weight=0.5)
    q = lattice_atom(p, 4, 4)
    m = estimate_marginals(TruncationSpec((q,), 3, "free"), 40_000, 2_000, 9, p)
    assert abs(m.estimates[q] - 0.5) <= 3 * m.std_errors[q]


def test_trace(tmp_path):
    p = load("chain.mln")
    path = tmp_path / "trace.txt"
    m = estimate_marginals(TruncationSpec((chain_atom(p, 2),), 1, "zero"), 200, 10, 0, p,
                           trace=str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 200
    assert all(len(line.split()) == len(m.atoms) and set(line.split()) <= {"0", "1"}
               for line in lines)


def test_bad_sweeps():
    p = load("chain.mln")
    with pytest.raises(MLNError):
        estimate_marginals(TruncationSpec((chain_atom(p, 2),)), 100, 100, 0, p)


def test_infinite_weights_not_sampled():
    p = load("induction.mln")
    with pytest.raises(MLNError):
        estimate_marginals(TruncationSpec((atom(p, "P(f(0))"),), 0, "zero"), 100, 10, 0, p)


def test_batch_means_iid():
    x = np.random.default_rng(0).integers(0, 2, (50_000, 1)).astype(float)
    se = batch_means_se(x)[0]
    assert se == pytest.approx(0.5 / math.sqrt(50_000), rel=0.3)


def test_sensitivity_zero_weight():
    p = load("lattice.mln", weight=0.0)
    q = lattice_atom(p, 3, 3)
    rep = boundary_sensitivity(p, [q], 2, sweeps=10_000, burnin=500, seed=2)
    assert rep.spreads[q] <= 3 * rep.combined_se[q] + 1e-12


def test_sensitivity_needs_two_policies():
    p = load("lattice.mln")
    with pytest.raises(MLNError):
        boundary_sensitivity(p, [lattice_atom(p, 1, 1)], 1, policies=("one",))
