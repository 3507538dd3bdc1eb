"""Single-site Gibbs sampling on truncated volumes and boundary sensitivity.

Boundary sensitivity is a diagnostic only: a large spread between marginals
under all-one and all-zero boundaries is evidence consistent with several
Gibbs measures, not a proof of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numba import njit

from .errors import MLNError
from .gibbs import Volume, build_volume, constant_boundary
from .herbrand import GroundAtom, grounder, sorted_atoms
from .logic import Program

POLICIES = ("free", "zero", "one", "explicit")
_ALIASES = {"all-zero": "zero", "all-one": "one", "0": "zero", "1": "one"}

DEFAULT_SWEEPS = 100_000
DEFAULT_BURNIN = 10_000
N_BATCHES = 50
_CHUNK = 4096


def normalize_policy(policy: str) -> str:
    policy = _ALIASES.get(policy, policy)
    if policy not in POLICIES:
        raise MLNError(f"unknown boundary policy {policy!r}; expected one of {POLICIES}")
    return policy


@dataclass(frozen=True)
class TruncationSpec:
    query: tuple[GroundAtom, ...]
    radius: int = 0
    policy: str = "free"
    assignment: Mapping[GroundAtom, int] | None = None

    def __post_init__(self):
        if self.radius < 0:
            raise MLNError("radius must be >= 0")
        object.__setattr__(self, "policy", normalize_policy(self.policy))
        object.__setattr__(self, "query", tuple(self.query))


def ball(query: Sequence[GroundAtom], radius: int, p: Program) -> list[GroundAtom]:
    """Atoms within neighbor-graph distance `radius` of any query atom, in BFS order."""
    g = grounder(p)
    g.require_determinate()
    seen = []
    for a in query:
        if a not in seen:
            seen.append(a)
    members = set(seen)
    frontier = list(seen)
    for _ in range(radius):
        nxt = set()
        for a in frontier:
            nxt.update(b for b in g.neighbors(a) if b not in members)
        frontier = sorted_atoms(nxt)
        members.update(frontier)
        seen.extend(frontier)
        if not frontier:
            break
    return seen


def truncate(spec: TruncationSpec, p: Program) -> tuple[Volume, dict]:
    atoms = ball(spec.query, spec.radius, p)
    if spec.policy == "free":
        return build_volume(atoms, p, free=True), {}
    v = build_volume(atoms, p)
    if spec.policy == "explicit":
        y = dict(spec.assignment or {})
        missing = [b for b in v.boundary_atoms if b not in y]
        if missing:
            raise MLNError("explicit boundary assignment is missing "
                           + ", ".join(map(str, missing)))
        return v, {b: int(y[b]) for b in v.boundary_atoms}
    return v, constant_boundary(v, 1 if spec.policy == "one" else 0)


# -- kernel -------------------------------------------------------------------

@dataclass(frozen=True)
class _Tables:
    n: int
    site_ptr: np.ndarray
    site_clauses: np.ndarray
    clause_ptr: np.ndarray
    lit_index: np.ndarray
    lit_positive: np.ndarray
    weight: np.ndarray


def _tables(v: Volume) -> _Tables:
    n = len(v.atoms)
    compiled = v.compiled()
    clause_ptr = [0]
    lit_index, lit_positive, weight = [], [], []
    incident = [[] for _ in range(n)]
    for c, (w, lits) in enumerate(compiled):
        if not math.isfinite(w):
            raise MLNError("cannot sample a volume with infinite clause weights")
        weight.append(w)
        touched = set()
        for i, pos in lits:
            lit_index.append(i)
            lit_positive.append(1 if pos else 0)
            if i < n:
                touched.add(i)
        clause_ptr.append(len(lit_index))
        for i in touched:
            incident[i].append(c)
    site_ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        site_ptr[i + 1] = site_ptr[i] + len(incident[i])
    site_clauses = np.array([c for inc in incident for c in inc], dtype=np.int64)
    return _Tables(n, site_ptr, site_clauses, np.array(clause_ptr, dtype=np.int64),
                   np.array(lit_index, dtype=np.int64), np.array(lit_positive, dtype=np.int8),
                   np.array(weight, dtype=np.float64))


@njit(cache=True)
def _sweeps(state, n, site_ptr, site_clauses, clause_ptr, lit_index, lit_positive,
            weight, uniforms, out):
    for t in range(uniforms.shape[0]):
        for i in range(n):
            h0 = 0.0
            h1 = 0.0
            for k in range(site_ptr[i], site_ptr[i + 1]):
                c = site_clauses[k]
                other = False
                pos_i = False
                neg_i = False
                for l in range(clause_ptr[c], clause_ptr[c + 1]):
                    j = lit_index[l]
                    if j == i:
                        if lit_positive[l] == 1:
                            pos_i = True
                        else:
                            neg_i = True
                    elif state[j] == lit_positive[l]:
                        other = True
                if other or pos_i:
                    h1 += weight[c]
                if other or neg_i:
                    h0 += weight[c]
            p1 = 1.0 / (1.0 + math.exp(h0 - h1))
            state[i] = 1 if uniforms[t, i] < p1 else 0
        if out.shape[0] > 0:
            for i in range(n):
                out[t, i] = state[i]


def _full_state(v: Volume, x, y) -> np.ndarray:
    n = len(v.atoms)
    state = np.zeros(n + len(v.boundary_atoms), dtype=np.int8)
    state[:n] = np.asarray(x, dtype=np.int8)
    y = y or {}
    for k, b in enumerate(v.boundary_atoms):
        state[n + k] = int(y[b])
    return state


def gibbs_sweep(v: Volume, y, state, rng: np.random.Generator) -> np.ndarray:
    """One systematic scan: each atom resampled from its exact single-site conditional."""
    t = _tables(v)
    full = _full_state(v, state, y)
    u = rng.random((1, t.n))
    _sweeps(full, t.n, t.site_ptr, t.site_clauses, t.clause_ptr, t.lit_index,
            t.lit_positive, t.weight, u, np.zeros((0, t.n), dtype=np.int8))
    return full[:t.n].copy()


def run_chain(v: Volume, y, sweeps: int, seed: int, trace=None) -> np.ndarray:
    """All sweep states (sweeps x |X|) of a chain started from a seeded random state."""
    rng = np.random.default_rng(seed)
    t = _tables(v)
    full = _full_state(v, rng.integers(0, 2, t.n), y)
    states = np.empty((sweeps, t.n), dtype=np.int8)
    done = 0
    while done < sweeps:
        m = min(_CHUNK, sweeps - done)
        u = rng.random((m, t.n))
        _sweeps(full, t.n, t.site_ptr, t.site_clauses, t.clause_ptr, t.lit_index,
                t.lit_positive, t.weight, u, states[done:done + m])
        done += m
    if trace is not None:
        write_trace(trace, states)
    return states


def write_trace(path, states: np.ndarray):
    with open(path, "w") as fh:
        for row in states:
            fh.write(" ".join("1" if b else "0" for b in row))
            fh.write("\n")


def batch_means_se(samples: np.ndarray, batches: int = N_BATCHES) -> np.ndarray:
    """Standard error of the column means from non-overlapping batch means."""
    n = samples.shape[0]
    b = min(batches, n)
    if b < 2:
        return np.zeros(samples.shape[1])
    size = n // b
    trimmed = samples[n - size * b:].astype(np.float64)
    means = trimmed.reshape(b, size, -1).mean(axis=1)
    return means.std(axis=0, ddof=1) / math.sqrt(b)


@dataclass(frozen=True)
class MarginalEstimate:
    atoms: tuple[GroundAtom, ...]
    estimates: dict
    std_errors: dict
    effective_samples: dict
    sweeps: int
    burnin: int
    seed: int
    query: tuple[GroundAtom, ...] = ()
    volume: Volume | None = field(default=None, repr=False, compare=False)


def estimate_marginals(spec: TruncationSpec, sweeps: int, burnin: int, seed: int,
                       p: Program, trace=None) -> MarginalEstimate:
    if not sweeps > burnin >= 0:
        raise MLNError("need sweeps > burnin >= 0")
    v, y = truncate(spec, p)
    states = run_chain(v, y, sweeps, seed, trace)
    kept = states[burnin:]
    means = kept.mean(axis=0)
    se = batch_means_se(kept)
    var = kept.astype(np.float64).var(axis=0, ddof=1) if len(kept) > 1 else np.zeros(len(v.atoms))
    ess = {}
    for i, a in enumerate(v.atoms):
        ess[a] = float(var[i] / se[i] ** 2) if se[i] > 0 else float(len(kept))
    return MarginalEstimate(
        v.atoms,
        {a: float(means[i]) for i, a in enumerate(v.atoms)},
        {a: float(se[i]) for i, a in enumerate(v.atoms)},
        ess, sweeps, burnin, seed, spec.query, v)


@dataclass(frozen=True)
class SensitivityReport:
    query: tuple[GroundAtom, ...]
    policies: tuple[str, ...]
    spreads: dict
    combined_se: dict
    estimates: dict  # policy -> {atom: estimate}
    std_errors: dict
    radius: int
    weights: tuple[float, ...]
    sweeps: int
    burnin: int
    seed: int
    volume_size: int


def boundary_sensitivity(p: Program, query: Sequence[GroundAtom], radius: int,
                         policies: Sequence[str] = ("one", "zero"),
                         sweeps: int = DEFAULT_SWEEPS, burnin: int = DEFAULT_BURNIN,
                         seed: int = 0, assignment=None) -> SensitivityReport:
    """Spread of query marginals across boundary policies.

    Every policy uses the same seed, so the chains share their initial state
    and uniform stream (common random numbers).
    """
    policies = tuple(normalize_policy(pol) for pol in policies)
    if len(policies) < 2:
        raise MLNError("boundary sensitivity needs at least two policies")
    est, errs = {}, {}
    size = 0
    for pol in policies:
        spec = TruncationSpec(tuple(query), radius, pol, assignment)
        m = estimate_marginals(spec, sweeps, burnin, seed, p)
        est[pol] = {a: m.estimates[a] for a in spec.query}
        errs[pol] = {a: m.std_errors[a] for a in spec.query}
        size = len(m.atoms)
    spreads, comb = {}, {}
    for a in query:
        vals = [(est[pol][a], pol) for pol in policies]
        hi, lo = max(vals), min(vals)
        spreads[a] = hi[0] - lo[0]
        comb[a] = math.sqrt(errs[hi[1]][a] ** 2 + errs[lo[1]][a] ** 2)
    return SensitivityReport(tuple(query), policies, spreads, comb, est, errs, radius,
                             tuple(wf.weight for wf in p.formulas), sweeps, burnin, seed, size)
