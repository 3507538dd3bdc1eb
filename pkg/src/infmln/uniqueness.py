"""Sufficient condition for a unique Gibbs measure.

For every ground atom, sum (|C| - 1) * |w| over the ground clauses C that
contain it; if the supremum of these sums over all atoms is below 2 the
specification admits exactly one Gibbs measure. The supremum ranges over
an infinite set, so it is estimated by sweeping atoms by term depth and
watching the running maximum settle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MLNError
from .herbrand import GroundAtom, Universe, enumerate_atoms, grounder
from .logic import Program

UNIQUE = "UniqueCertified"
INCONCLUSIVE = "Inconclusive"

OTHER_CONDITIONS = (
    "Two further sufficient conditions exist but are not checked: unit-clause weights "
    "large relative to non-unit weights, and, for one-dimensional lattices, finite total "
    "interaction across every cut."
)


def oscillation(values) -> float:
    """Difference between the largest and smallest value."""
    values = list(values)
    if not values:
        raise MLNError("oscillation of an empty list")
    return max(values) - min(values)


@dataclass(frozen=True)
class AtomInteraction:
    atom: GroundAtom
    sum: float
    clause_count: int


def _check_finite(p: Program):
    if p.has_infinite_weights:
        raise MLNError("the uniqueness bound needs finite weights")


def interaction_sum(atom: GroundAtom, p: Program) -> AtomInteraction:
    _check_finite(p)
    clauses = grounder(p).clauses_containing(atom)
    total = math.fsum((len(gc.atoms) - 1) * abs(gc.weight) for gc in clauses)
    return AtomInteraction(atom, total, len(clauses))


@dataclass(frozen=True)
class UniquenessReport:
    per_depth_max: tuple[float, ...]
    argmax_atoms: tuple[str, ...]
    supremum: float
    stabilized: bool
    verdict: str
    window: int
    atoms_checked: int
    note: str = OTHER_CONDITIONS


def check_uniqueness(p: Program, max_depth: int = 8, window: int = 3) -> UniquenessReport:
    """Depth sweep of interaction sums.

    Certification requires the running maximum to stay below 2 and to be
    unchanged over the last `window` depth steps. A failed check is reported
    as inconclusive, never as non-unique.
    """
    if window < 1 or max_depth < window:
        raise MLNError("need max_depth >= window >= 1")
    _check_finite(p)
    g = grounder(p)
    g.require_determinate()
    u = Universe(p.signature)
    by_depth: list[list[GroundAtom]] = [[] for _ in range(max_depth + 1)]
    for a in enumerate_atoms(p.signature, max_depth, u):
        by_depth[a.depth].append(a)
    running, maxima, where = 0.0, [], []
    best = None
    count = 0
    for d in range(max_depth + 1):
        for a in sorted(by_depth[d], key=str):
            s = interaction_sum(a, p).sum
            count += 1
            if best is None or s > running:
                running, best = s, a
        maxima.append(running)
        where.append(str(best) if best is not None else "")
    tail = maxima[max_depth - window:]
    stabilized = all(m == tail[0] for m in tail)
    verdict = UNIQUE if (running < 2 and stabilized) else INCONCLUSIVE
    return UniquenessReport(tuple(maxima), tuple(where), running, stabilized, verdict,
                            window, count)
