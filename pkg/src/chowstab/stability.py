"""Chow stability of weighted 0-cycles under diagonal 1-PS actions.

The Mumford weight of a point uses the traceless normalization of the
weight vector and the minimum over the support of the point, so a cycle is
destabilized exactly by the 1-PS with positive total weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import SubspaceNotSpannedBySupport
from .exactcore import QQ, _rref, _solve
from .geometry import (DiagonalOnePS, ProductPoint, ProjectivePoint,
                       WeightedCycle)

__all__ = [
    "mumford_weight",
    "chow_weight",
    "Subspace",
    "RatioRecord",
    "Destabilizer",
    "InstabilityCertificate",
    "StabilityVerdict",
    "SearchResult",
    "find_unstable_subspace",
    "destabilizer_from_subspace",
    "classify",
    "exhaustive_ops_search",
    "STABLE",
    "STRICTLY_SEMISTABLE",
    "UNSTABLE",
]

STABLE = "stable"
STRICTLY_SEMISTABLE = "strictly_semistable"
UNSTABLE = "unstable"


def mumford_weight(x: ProjectivePoint, alpha: DiagonalOnePS) -> Fraction:
    """min of the traceless weights over the nonzero coordinates of x."""
    if len(alpha.weights) != len(x.coords):
        raise ValueError("weight vector length does not match the point")
    wbar = alpha.normalized()
    return min(wbar[i] for i in x.support())


def chow_weight(cycle: WeightedCycle, alpha: DiagonalOnePS,
                alpha2: Optional[DiagonalOnePS] = None) -> Fraction:
    """Total Chow weight: multiplicity-weighted sum of Mumford weights.

    On a product ambient the 1-PS acts on the first factor and `alpha2`
    (trivial when omitted) on the second; the weight of a pair of points
    under the degree (1,1) embedding is the sum of the factor weights.
    """
    if cycle.ambient.is_projective:
        if alpha2 is not None:
            raise ValueError("second weight vector needs a product ambient")
        return sum((m * mumford_weight(p, alpha) for p, m in cycle.points),
                   Fraction(0))
    n1, n2 = cycle.ambient.dims
    if alpha2 is None:
        alpha2 = DiagonalOnePS.trivial(n2 + 1)
    total = Fraction(0)
    for p, m in cycle.points:
        assert isinstance(p, ProductPoint)
        total += m * (mumford_weight(p.parts[0], alpha)
                      + mumford_weight(p.parts[1], alpha2))
    return total


# ---------------------------------------------------------------------------
# linear subspaces spanned by support points


class Subspace:
    """A proper linear subspace of P^n spanned by cycle support points."""

    __slots__ = ("rref", "spanning_points")

    def __init__(self, spanning_points: Sequence[ProjectivePoint]):
        pts = tuple(spanning_points)
        if not pts:
            raise ValueError("a subspace needs at least one spanning point")
        rows = [list(p.coords) for p in pts]
        rank, _ = _rref(rows)
        self.rref = tuple(tuple(r) for r in rows[:rank])
        self.spanning_points = pts

    @property
    def dim(self) -> int:
        """Projective dimension."""
        return len(self.rref) - 1

    @property
    def ambient_dim(self) -> int:
        return len(self.rref[0]) - 1

    def contains(self, p: ProjectivePoint) -> bool:
        rows = [list(r) for r in self.rref] + [list(p.coords)]
        rank, _ = _rref(rows)
        return rank == len(self.rref)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.rref == other.rref

    def __hash__(self):
        return hash(self.rref)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, spanned by {self.spanning_points})"


@dataclass(frozen=True)
class RatioRecord:
    """One examined subspace with its mass ratio data."""

    subspace: Subspace
    mass_on_v: int
    total_mass: int
    ratio: Fraction       # mass_on_v / (dim V + 1)
    threshold: Fraction   # total_mass / (n + 1)

    @property
    def is_violating(self) -> bool:
        return self.ratio > self.threshold

    @property
    def is_boundary(self) -> bool:
        return self.ratio == self.threshold


def _scan_subspaces(cycle: WeightedCycle) -> list[tuple[tuple[int, ...], RatioRecord]]:
    """All distinct proper subspaces spanned by support subsets.

    Enumeration goes by subset size then lexicographic index order, and a
    span is kept with its first (hence minimal independent) spanning subset.
    Returns pairs (spanning index tuple, record).
    """
    if not cycle.ambient.is_projective:
        raise ValueError("subspace scan needs a projective ambient")
    n = cycle.ambient.n
    support = cycle.support()
    total = cycle.total_mass()
    threshold = Fraction(total, n + 1)
    seen: set = set()
    out = []
    for size in range(1, min(len(support), n) + 1):
        for idx in itertools.combinations(range(len(support)), size):
            v = Subspace([support[i] for i in idx])
            if v.dim > n - 1:
                continue
            if v.rref in seen:
                continue
            seen.add(v.rref)
            mass = sum(m for p, m in cycle.points if v.contains(p))
            rec = RatioRecord(v, mass, total, Fraction(mass, v.dim + 1),
                              threshold)
            out.append((idx, rec))
    return out


def find_unstable_subspace(cycle: WeightedCycle) -> Optional[RatioRecord]:
    """Best destabilizing subspace, or None when no ratio is strict.

    The winner maximizes mass/(dim+1); ties prefer lower dimension, then
    the lexicographically earliest spanning subset.
    """
    best = None
    best_key = None
    for idx, rec in _scan_subspaces(cycle):
        if not rec.is_violating:
            continue
        key = (-rec.ratio, rec.subspace.dim, idx)
        if best is None or key < best_key:
            best, best_key = rec, key
    return best


@dataclass(frozen=True)
class Destabilizer:
    """A destabilizing 1-PS in coordinates adapted to a subspace."""

    ops: DiagonalOnePS
    adapted_basis: tuple[tuple[Fraction, ...], ...]
    chow_weight: Fraction


def _complete_basis(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Extend independent rows to a basis of Q^(n+1) by standard vectors."""
    basis = [list(r) for r in rows]
    for i in range(n + 1):
        if len(basis) == n + 1:
            break
        cand = [Fraction(0)] * (n + 1)
        cand[i] = Fraction(1)
        probe = [list(r) for r in basis] + [cand]
        rank, _ = _rref(probe)
        if rank == len(basis) + 1:
            basis.append(cand)
    assert len(basis) == n + 1
    return basis


def _adapted_coords(basis: Sequence[Sequence[Fraction]],
                    p: ProjectivePoint) -> list[Fraction]:
    """Coordinates of p in the given row basis."""
    n1 = len(basis)
    cols = [[basis[i][j] for i in range(n1)] for j in range(n1)]
    return _solve(cols, list(p.coords))


def destabilizer_from_subspace(cycle: WeightedCycle,
                               subspace: Subspace) -> Destabilizer:
    """Adapted 1-PS with weights n-k on V and -(k+1) off V.

    The returned Chow weight always satisfies the closed form
    (n+1)*massOnV - totalMass*(k+1), which is positive exactly when the
    subspace violates the ratio criterion.
    """
    n = cycle.ambient.n
    support = set(cycle.support())
    for p in subspace.spanning_points:
        if p not in support:
            raise SubspaceNotSpannedBySupport(f"{p!r} is not a support point")
    k = subspace.dim
    if k > n - 1:
        raise ValueError("subspace must be proper")
    # reduce the spanning points to an independent set, in order
    rows: list[list[Fraction]] = []
    for p in subspace.spanning_points:
        probe = [list(r) for r in rows] + [list(p.coords)]
        rank, _ = _rref(probe)
        if rank == len(rows) + 1:
            rows.append(list(p.coords))
    assert len(rows) == k + 1
    basis = _complete_basis(rows, n)
    weights = tuple([n - k] * (k + 1) + [-(k + 1)] * (n - k))
    ops = DiagonalOnePS(weights)
    total = Fraction(0)
    for p, m in cycle.points:
        coords = _adapted_coords(basis, p)
        adapted = ProjectivePoint(coords)
        total += m * mumford_weight(adapted, ops)
    mass_on_v = sum(m for p, m in cycle.points if subspace.contains(p))
    closed_form = Fraction((n + 1) * mass_on_v
                           - cycle.total_mass() * (k + 1))
    assert total == closed_form, "adapted weight identity failed"
    return Destabilizer(ops, tuple(tuple(r) for r in basis), total)


@dataclass(frozen=True)
class InstabilityCertificate:
    """Self-contained evidence that a cycle is Chow unstable."""

    subspace: Subspace
    mass_on_v: int
    total_mass: int
    ratio: Fraction
    threshold: Fraction
    destabilizer: Destabilizer


@dataclass(frozen=True)
class StabilityVerdict:
    status: str
    certificate: Optional[InstabilityCertificate]
    witness_ratios: tuple[RatioRecord, ...]

    @property
    def is_unstable(self) -> bool:
        return self.status == UNSTABLE


def classify(cycle: WeightedCycle) -> StabilityVerdict:
    """Full stability verdict with a certificate in the unstable case.

    witness_ratios collects the subspaces sitting exactly on the boundary
    ratio, which separate the stable and strictly semistable outcomes.
    """
    records = _scan_subspaces(cycle)
    boundary = tuple(rec for _, rec in records if rec.is_boundary)
    best = None
    best_key = None
    for idx, rec in records:
        if not rec.is_violating:
            continue
        key = (-rec.ratio, rec.subspace.dim, idx)
        if best is None or key < best_key:
            best, best_key = rec, key
    if best is not None:
        dest = destabilizer_from_subspace(cycle, best.subspace)
        cert = InstabilityCertificate(best.subspace, best.mass_on_v,
                                      best.total_mass, best.ratio,
                                      best.threshold, dest)
        return StabilityVerdict(UNSTABLE, cert, boundary)
    if boundary:
        return StabilityVerdict(STRICTLY_SEMISTABLE, None, boundary)
    return StabilityVerdict(STABLE, None, ())


# ---------------------------------------------------------------------------
# brute-force oracle over bounded integer weights


@dataclass(frozen=True)
class SearchResult:
    weight: Fraction
    weights: tuple[int, ...]
    basis: tuple[tuple[Fraction, ...], ...]
    basis_points: tuple[int, ...]  # support indices, () for the standard basis


def exhaustive_ops_search(cycle: WeightedCycle, bound: int) -> SearchResult:
    """Maximal Chow weight over all integer weight vectors in [-B, B].

    Weight vectors run in coordinates adapted to every independent subset
    of support points (completed by standard vectors), plus the standard
    basis itself.  Ties keep the lexicographically smallest weight vector,
    then the earliest basis.  This is the reference oracle for classify.
    """
    if not cycle.ambient.is_projective:
        raise ValueError("search needs a projective ambient")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    n = cycle.ambient.n
    support = cycle.support()
    masses = [m for _, m in cycle.points]
    std = tuple(tuple(Fraction(1 if i == j else 0) for j in range(n + 1))
                for i in range(n + 1))
    bases: list[tuple[tuple[int, ...], tuple]] = [((), std)]
    seen = {std}
    for size in range(1, min(len(support), n + 1) + 1):
        for idx in itertools.combinations(range(len(support)), size):
            rows = [list(support[i].coords) for i in idx]
            probe = [list(r) for r in rows]
            rank, _ = _rref(probe)
            if rank < size:
                continue  # dependent subset, its span shows up earlier
            basis = _complete_basis(rows, n)
            key = tuple(tuple(r) for r in basis)
            if key in seen:
                continue
            seen.add(key)
            bases.append((idx, key))

    best_score = None
    best = None
    for order, (idx, basis) in enumerate(bases):
        masks = []
        for p in support:
            coords = _adapted_coords(basis, p)
            masks.append(tuple(i for i, c in enumerate(coords) if c != 0))
        for wvec in itertools.product(range(-bound, bound + 1), repeat=n + 1):
            s = sum(wvec)
            score = 0
            for mask, m in zip(masks, masses):
                score += m * ((n + 1) * min(wvec[i] for i in mask) - s)
            key = (-score, wvec, order)
            if best_score is None or key < best_score:
                best_score = key
                best = (score, wvec, idx, basis)
    score, wvec, idx, basis = best  # loop always runs: bound >= 0
    return SearchResult(Fraction(score, n + 1), wvec, basis, idx)
