"""Ambient spaces, rational points, weighted 0-cycles and diagonal 1-PS.

Points carry exact rational homogeneous coordinates and are kept in the
canonical scaling where the first nonzero coordinate equals 1, so equality
of points is structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ZeroPoint
from .exactcore import QQ

__all__ = [
    "Ambient",
    "ProjectivePoint",
    "ProductPoint",
    "WeightedCycle",
    "DiagonalOnePS",
    "normalize_cycle",
    "chow_multiplicities",
    "limit_point",
    "collision_clusters",
    "project_cycle",
]


@dataclass(frozen=True)
class Ambient:
    """Either a single projective space or a product of exactly two."""

    kind: str
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("projective", "product"):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        if self.kind == "projective" and len(self.dims) != 1:
            raise ValueError("projective ambient takes a single dimension")
        if self.kind == "product" and len(self.dims) != 2:
            raise ValueError("product ambient takes exactly two factors")
        if any(d < 1 for d in self.dims):
            raise ValueError("factor dimensions must be at least 1")

    @classmethod
    def projective(cls, n: int) -> "Ambient":
        return cls("projective", (n,))

    @classmethod
    def product(cls, n1: int, n2: int) -> "Ambient":
        return cls("product", (n1, n2))

    @property
    def is_projective(self) -> bool:
        return self.kind == "projective"

    @property
    def n(self) -> int:
        if not self.is_projective:
            raise ValueError("product ambient has no single dimension")
        return self.dims[0]


class ProjectivePoint:
    """A rational point of P^n in canonical scaling (first nonzero = 1)."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        raw = tuple(c if isinstance(c, Fraction) else Fraction(c)
                    for c in coords)
        pivot = None
        for c in raw:
            if c != 0:
                pivot = c
                break
        if pivot is None:
            raise ZeroPoint("all coordinates are zero")
        self.coords = tuple(c / pivot for c in raw)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def pivot_index(self) -> int:
        for i, c in enumerate(self.coords):
            if c != 0:
                return i
        raise ZeroPoint("all coordinates are zero")  # unreachable

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coords) if c != 0)

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other: "ProjectivePoint"):
        return self.coords < other.coords

    def __repr__(self):
        return "[" + ":".join(str(c) for c in self.coords) + "]"


class ProductPoint:
    """A point of a product ambient, one projective point per factor."""

    __slots__ = ("parts",)

    def __init__(self, part1: ProjectivePoint, part2: ProjectivePoint):
        self.parts = (part1, part2)

    def __eq__(self, other):
        return isinstance(other, ProductPoint) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __lt__(self, other: "ProductPoint"):
        return (self.parts[0].coords, self.parts[1].coords) < (
            other.parts[0].coords, other.parts[1].coords)

    def __repr__(self):
        return f"{self.parts[0]!r} x {self.parts[1]!r}"


CyclePoint = Union[ProjectivePoint, ProductPoint]


@dataclass(frozen=True)
class WeightedCycle:
    """A 0-cycle: distinct points with positive integer multiplicities.

    The point list is sorted by coordinates, so two cycles are equal as
    dataclass values exactly when they are equal as cycles.
    """

    ambient: Ambient
    points: tuple[tuple[CyclePoint, int], ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.points

    def support(self) -> tuple[CyclePoint, ...]:
        return tuple(p for p, _ in self.points)

    def total_mass(self) -> int:
        return sum(m for _, m in self.points)

    def __len__(self):
        return len(self.points)


def _as_point(ambient: Ambient, coords) -> CyclePoint:
    if ambient.is_projective:
        if isinstance(coords, ProjectivePoint):
            pt = coords
        else:
            pt = ProjectivePoint(coords)
        if pt.dim != ambient.n:
            raise ValueError(
                f"point has {pt.dim + 1} coordinates, ambient wants "
                f"{ambient.n + 1}")
        return pt
    if isinstance(coords, ProductPoint):
        pair = coords.parts
    elif (isinstance(coords, (tuple, list)) and len(coords) == 2
          and isinstance(coords[0], (tuple, list, ProjectivePoint))):
        pair = tuple(p if isinstance(p, ProjectivePoint) else ProjectivePoint(p)
                     for p in coords)
    else:
        # flat list split by factor dimensions
        n1, n2 = ambient.dims
        coords = list(coords)
        if len(coords) != n1 + n2 + 2:
            raise ValueError("flat product coordinates have the wrong length")
        pair = (ProjectivePoint(coords[:n1 + 1]),
                ProjectivePoint(coords[n1 + 1:]))
    for part, n in zip(pair, ambient.dims):
        if part.dim != n:
            raise ValueError("product factor has the wrong dimension")
    return ProductPoint(*pair)


def normalize_cycle(ambient: Ambient, raw: Iterable[tuple]) -> WeightedCycle:
    """Canonicalize, merge equal points and sort; rejects mult < 1."""
    acc: dict = {}
    order: list = []
    for coords, mult in raw:
        mult = int(mult)
        if mult < 1:
            raise ValueError("multiplicities must be positive integers")
        pt = _as_point(ambient, coords)
        if pt in acc:
            acc[pt] += mult
        else:
            acc[pt] = mult
            order.append(pt)
    pts = tuple(sorted((p, acc[p]) for p in order))
    return WeightedCycle(ambient, pts)


@dataclass(frozen=True)
class DiagonalOnePS:
    """A 1-parameter subgroup acting diagonally with integer weights.

    t acts on homogeneous coordinates by x_i -> t**w_i x_i, so limits at
    t -> 0 concentrate on the minimal-weight coordinates of each point.
    """

    weights: tuple[int, ...]

    def __post_init__(self):
        ws = tuple(int(w) for w in self.weights)
        if not ws:
            raise ValueError("empty weight vector")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def trivial(cls, ncoords: int) -> "DiagonalOnePS":
        return cls((0,) * ncoords)

    @property
    def is_trivial(self) -> bool:
        return all(w == self.weights[0] for w in self.weights)

    def normalized(self) -> tuple[Fraction, ...]:
        """Traceless representative: subtract the average weight."""
        mean = Fraction(sum(self.weights), len(self.weights))
        return tuple(Fraction(w) - mean for w in self.weights)

    def shifted(self, c: int) -> "DiagonalOnePS":
        return DiagonalOnePS(tuple(w + c for w in self.weights))


def chow_multiplicities(cycle: WeightedCycle) -> WeightedCycle:
    """Chow masses of the blowup cycle: multiplicity a becomes a**(n-1)."""
    if not cycle.ambient.is_projective:
        raise ValueError("chow multiplicities need a projective ambient")
    n = cycle.ambient.n
    pts = tuple((p, m ** (n - 1)) for p, m in cycle.points)
    return WeightedCycle(cycle.ambient, pts)


def limit_point(p: ProjectivePoint, alpha: DiagonalOnePS) -> ProjectivePoint:
    """The limit of alpha(t).p as t -> 0.

    Coordinates survive exactly on the indices where p is nonzero and the
    weight attains its minimum over the support of p.
    """
    if len(alpha.weights) != len(p.coords):
        raise ValueError("weight vector length does not match the point")
    lo = min(alpha.weights[i] for i in p.support())
    masked = tuple(c if (c != 0 and alpha.weights[i] == lo) else Fraction(0)
                   for i, c in enumerate(p.coords))
    return ProjectivePoint(masked)


def collision_clusters(cycle: WeightedCycle, alpha: DiagonalOnePS
                       ) -> dict[ProjectivePoint, tuple[ProjectivePoint, ...]]:
    """Group support points by their common limit under alpha.

    Keys are sorted by coordinates; members keep their cycle order.
    """
    if not cycle.ambient.is_projective:
        raise ValueError("collision clusters need a projective ambient")
    groups: dict[ProjectivePoint, list[ProjectivePoint]] = {}
    for p, _ in cycle.points:
        q = limit_point(p, alpha)
        groups.setdefault(q, []).append(p)
    return {q: tuple(groups[q]) for q in sorted(groups)}


def project_cycle(cycle: WeightedCycle, factor: int) -> WeightedCycle:
    """Push a product cycle down to one factor, merging collisions."""
    if cycle.ambient.is_projective:
        raise ValueError("projection needs a product ambient")
    if factor not in (1, 2):
        raise ValueError("factor must be 1 or 2")
    target = Ambient.projective(cycle.ambient.dims[factor - 1])
    raw = [(p.parts[factor - 1], m) for p, m in cycle.points]
    return normalize_cycle(target, raw)
