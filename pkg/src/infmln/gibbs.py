"""Hamiltonians and exact local conditionals of the Gibbsian specification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import MLNError, SizeError
from .herbrand import GroundAtom, GroundClause, grounder, sorted_atoms
from .logic import Program, is_infinite_weight

DEFAULT_EXACT_CAP = 20

BoundaryAssignment = Mapping[GroundAtom, int]


@dataclass(frozen=True)
class Volume:
    atoms: tuple[GroundAtom, ...]
    relevant_clauses: tuple[GroundClause, ...]
    boundary_atoms: tuple[GroundAtom, ...]
    free: bool = False

    def index(self) -> dict[GroundAtom, int]:
        """Position of each atom in atoms + boundary_atoms."""
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {a: i for i, a in enumerate(self.atoms + self.boundary_atoms)}
            self.__dict__["_index"] = idx
        return idx

    def compiled(self):
        """Clauses as (weight, [(position, positive), ...]) over atoms + boundary."""
        cc = self.__dict__.get("_compiled")
        if cc is None:
            idx = self.index()
            cc = [(gc.weight, [(idx[a], pos) for pos, a in gc.literals])
                  for gc in self.relevant_clauses]
            self.__dict__["_compiled"] = cc
        return cc

    @property
    def has_infinite_weights(self) -> bool:
        return any(is_infinite_weight(gc.weight) for gc in self.relevant_clauses)


def build_volume(atoms, p: Program, free: bool = False) -> Volume:
    """Volume over `atoms` with every ground clause touching it.

    With free=True only clauses lying entirely inside the volume are kept and
    the boundary is empty.
    """
    g = grounder(p)
    g.require_determinate()
    xs = []
    for a in atoms:
        if a not in xs:
            xs.append(a)
    inside = set(xs)
    found = {}
    for a in xs:
        for gc in g.clauses_containing(a):
            found.setdefault((gc.source, gc.literals), gc)
    clauses = list(found.values())
    if free:
        clauses = [gc for gc in clauses if all(b in inside for b in gc.atoms)]
    boundary = {b for gc in clauses for b in gc.atoms if b not in inside}
    return Volume(tuple(xs), tuple(clauses), tuple(sorted_atoms(boundary)), free)


def _values(v: Volume, x, y) -> list[int]:
    if isinstance(x, Mapping):
        missing = [a for a in v.atoms if a not in x]
        if missing:
            raise MLNError(f"assignment is not total on the volume; missing {missing[:5]}")
        xs = [int(x[a]) for a in v.atoms]
    else:
        xs = [int(b) for b in x]
        if len(xs) != len(v.atoms):
            raise MLNError(f"assignment has {len(xs)} values for {len(v.atoms)} atoms")
    return xs + _boundary_values(v, y)


def _boundary_values(v: Volume, y) -> list[int]:
    y = y or {}
    missing = [b for b in v.boundary_atoms if b not in y]
    if missing:
        raise MLNError("boundary assignment is not total; missing " + ", ".join(map(str, missing)))
    return [int(y[b]) for b in v.boundary_atoms]


def _require_finite(v: Volume):
    if v.has_infinite_weights:
        raise MLNError("infinite clause weights give no finite Hamiltonian; "
                       "use satisfiability.limit_conditional")


def hamiltonian(v: Volume, x, y: BoundaryAssignment | None = None) -> float:
    """Total weight of the relevant clauses satisfied by (x, y)."""
    _require_finite(v)
    vals = _values(v, x, y)
    return math.fsum(w for w, lits in v.compiled()
                     if any(vals[i] == pos for i, pos in lits))


@dataclass(frozen=True)
class ConditionalDistribution:
    volume: Volume
    boundary: Mapping
    table: np.ndarray = field(repr=False)
    log_partition: float

    # row k assigns atom i the bit (k >> (n - 1 - i)) & 1: first atom most significant

    def configurations(self):
        n = len(self.volume.atoms)
        for k in range(len(self.table)):
            yield tuple((k >> (n - 1 - i)) & 1 for i in range(n))

    def prob(self, x: Sequence[int] | Mapping) -> float:
        if isinstance(x, Mapping):
            x = [x[a] for a in self.volume.atoms]
        k = 0
        for b in x:
            k = (k << 1) | int(b)
        return float(self.table[k])

    def marginal(self, atom: GroundAtom) -> float:
        n = len(self.volume.atoms)
        i = self.volume.atoms.index(atom)
        ks = np.arange(len(self.table))
        return float(self.table[((ks >> (n - 1 - i)) & 1) == 1].sum())

    def marginals(self) -> dict:
        return {a: self.marginal(a) for a in self.volume.atoms}


def clause_sums(v: Volume, y, counts: bool = False) -> np.ndarray:
    """Per-configuration total weight of satisfied relevant clauses.

    With counts=True every clause counts 1 regardless of its weight.
    """
    n = len(v.atoms)
    ks = np.arange(1 << n, dtype=np.int64)
    bits = [((ks >> (n - 1 - i)) & 1).astype(bool) for i in range(n)]
    vals = _boundary_values(v, y)
    h = np.zeros(1 << n)
    for w, lits in v.compiled():
        w = 1.0 if counts else w
        sat = np.zeros(1 << n, dtype=bool)
        for i, pos in lits:
            if i >= n:
                if vals[i - n] == pos:
                    sat[:] = True
                    break
            else:
                sat |= bits[i] if pos else ~bits[i]
        h += w * sat
    return h


def conditional(v: Volume, y: BoundaryAssignment | None = None,
                cap: int = DEFAULT_EXACT_CAP) -> ConditionalDistribution:
    """Exact conditional table of the volume given a boundary assignment."""
    _require_finite(v)
    n = len(v.atoms)
    if n > cap:
        raise SizeError(f"volume has {n} atoms, above the exact-enumeration cap of {cap}; "
                        "use the sampler")
    h = clause_sums(v, y)
    m = h.max()
    e = np.exp(h - m)
    z = e.sum()
    return ConditionalDistribution(v, dict(y or {}), e / z, float(m + math.log(z)))


def constant_boundary(v: Volume, value: int) -> dict:
    return {b: int(value) for b in v.boundary_atoms}
