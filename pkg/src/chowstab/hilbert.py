"""Monomial bases, fat point jets, section traces and expansion data.

Conventions used throughout the package are fixed here.  The 1-PS acts on
homogeneous point coordinates by x_i -> t**w_i x_i, hence on coordinate
functions with the opposite weight; the induced weight of a degree-d
monomial section x^e is -<w, e>.  All jet conditions are taken in the
affine chart where the first nonzero coordinate of the point equals 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import SubspaceNotWeightHomogeneous, ZeroLeadingCoefficient
from .exactcore import QQ, RatMatrix, _rref, int_rank_profile
from .geometry import (DiagonalOnePS, ProjectivePoint, WeightedCycle,
                       collision_clusters)

__all__ = [
    "MonomialBasis",
    "FatPointSpec",
    "ExpansionCoeffs",
    "CentralPrediction",
    "fat_point_length",
    "jet_vanishing_matrix",
    "h0_with_vanishing",
    "section_trace",
    "futaki_from_coeffs",
    "lifting_shift",
    "base_coeffs",
    "predicted_central_coeffs",
    "line_weight",
    "level_weight",
]


@lru_cache(maxsize=None)
def _exponents(nvars: int, total: int) -> tuple[tuple[int, ...], ...]:
    if nvars == 1:
        return ((total,),)
    out = []
    for e in range(total, -1, -1):
        for rest in _exponents(nvars - 1, total - e):
            out.append((e,) + rest)
    return tuple(out)


class MonomialBasis:
    """Degree-d monomials in n+1 variables, graded lex, descending."""

    __slots__ = ("n", "degree", "exponents", "_index")

    def __init__(self, n: int, degree: int):
        if n < 1 or degree < 0:
            raise ValueError("need n >= 1 and degree >= 0")
        self.n = n
        self.degree = degree
        self.exponents = _exponents(n + 1, degree)
        self._index = {e: i for i, e in enumerate(self.exponents)}

    def __len__(self):
        return len(self.exponents)

    def index(self, e: tuple[int, ...]) -> int:
        return self._index[e]

    def weights(self, alpha: DiagonalOnePS) -> list[int]:
        """<w, e> for each monomial, in basis order."""
        w = alpha.weights
        if len(w) != self.n + 1:
            raise ValueError("weight vector length mismatch")
        return [sum(wi * ei for wi, ei in zip(w, e)) for e in self.exponents]

    def evaluate(self, coords: Sequence[Fraction]) -> list[Fraction]:
        """Value of every monomial at the given coordinates."""
        if len(coords) != self.n + 1:
            raise ValueError("coordinate length mismatch")
        vals = []
        for e in self.exponents:
            v = Fraction(1)
            for c, k in zip(coords, e):
                if k:
                    v *= Fraction(c) ** k
            vals.append(v)
        return vals


def fat_point_length(n: int, a: int) -> int:
    """Length of the order-a fat point in n-space: C(n+a-1, n)."""
    if n < 1 or a < 0:
        raise ValueError("need n >= 1 and a >= 0")
    return math.comb(n + a - 1, n)


@dataclass(frozen=True)
class FatPointSpec:
    """Degree-d forms constrained to vanish to order r*a_i at each point."""

    cycle: WeightedCycle
    degree: int
    r: int = 1

    def __post_init__(self):
        if not self.cycle.ambient.is_projective:
            raise ValueError("fat point conditions need a projective ambient")
        if self.degree < 0 or self.r < 1:
            raise ValueError("need degree >= 0 and r >= 1")

    @property
    def expected_rows(self) -> int:
        n = self.cycle.ambient.n
        return sum(fat_point_length(n, self.r * a)
                   for _, a in self.cycle.points)


def _falling(e: int, b: int) -> int:
    out = 1
    for i in range(b):
        out *= e - i
    return out


def _point_int_data(p: ProjectivePoint) -> tuple[int, list[int], int]:
    """Pivot index, integer numerators of affine coords, common denominator."""
    piv = p.pivot_index
    affine = [p.coords[j] for j in range(len(p.coords)) if j != piv]
    den = 1
    for u in affine:
        den = den * u.denominator // math.gcd(den, u.denominator)
    nums = [int(u * den) for u in affine]
    return piv, nums, den


def _int_jet_rows(p: ProjectivePoint, order: int,
                  basis: MonomialBasis) -> list[list[int]]:
    """Jet rows at p, scaled by den**degree so every entry is an integer.

    Row for the functional d^beta/du^beta (|beta| < order), evaluated on
    the dehomogenization of each monomial in the chart where the pivot
    coordinate of p is set to 1.
    """
    piv, nums, den = _point_int_data(p)
    d = basis.degree
    n = basis.n
    # power tables
    num_pow = [[1] * (d + 1) for _ in nums]
    for j, v in enumerate(nums):
        for k in range(1, d + 1):
            num_pow[j][k] = num_pow[j][k - 1] * v
    den_pow = [1] * (d + 1)
    for k in range(1, d + 1):
        den_pow[k] = den_pow[k - 1] * den
    affine_of = [j if j < piv else j - 1 for j in range(n + 1)]
    rows = []
    for o in range(order):
        for beta in _exponents(n, o):
            row = []
            for e in basis.exponents:
                coeff = 1
                deg_aff = 0
                for j in range(n + 1):
                    if j == piv:
                        continue
                    ej = e[j]
                    bj = beta[affine_of[j]]
                    if bj > ej:
                        coeff = 0
                        break
                    if bj:
                        coeff *= _falling(ej, bj)
                    if ej - bj:
                        coeff *= num_pow[affine_of[j]][ej - bj]
                        deg_aff += ej - bj
                row.append(coeff * den_pow[d - deg_aff] if coeff else 0)
            rows.append(row)
    return rows


def _all_int_jet_rows(spec: FatPointSpec,
                      basis: MonomialBasis) -> list[list[int]]:
    rows: list[list[int]] = []
    for p, a in spec.cycle.points:
        rows.extend(_int_jet_rows(p, spec.r * a, basis))
    return rows


def jet_vanishing_matrix(spec: FatPointSpec) -> RatMatrix:
    """The exact jet condition matrix; its kernel is the section space.

    Rows run over support points in cycle order and derivative functionals
    in graded order; columns over the degree-d monomial basis.
    """
    n = spec.cycle.ambient.n
    basis = MonomialBasis(n, spec.degree)
    rows = []
    for p, a in spec.cycle.points:
        _, _, den = _point_int_data(p)
        scale = Fraction(1, den ** spec.degree)
        for int_row in _int_jet_rows(p, spec.r * a, basis):
            rows.append([x * scale for x in int_row])
    return RatMatrix.from_rows(rows)


def h0_with_vanishing(spec: FatPointSpec) -> int:
    """dim of degree-d forms vanishing to order r*a_i at every point."""
    n = spec.cycle.ambient.n
    basis = MonomialBasis(n, spec.degree)
    rows = _all_int_jet_rows(spec, basis)
    if not rows:
        return len(basis)
    rank, _ = int_rank_profile(rows, len(basis))
    return len(basis) - rank


# ---------------------------------------------------------------------------
# traces of the induced action on section spaces


def weight_classes(basis: MonomialBasis, alpha: DiagonalOnePS
                   ) -> dict[int, list[int]]:
    """Column indices of the monomial basis grouped by <w, e>."""
    classes: dict[int, list[int]] = {}
    for i, c in enumerate(basis.weights(alpha)):
        classes.setdefault(c, []).append(i)
    return classes


def section_trace(alpha: DiagonalOnePS, n: int, d: int,
                  subspace: Optional[Sequence[Sequence[Fraction]]] = None
                  ) -> Fraction:
    """Trace of the induced generator on a space of degree-d sections.

    Monomial x^e contributes -<w, e>: the action on coordinate functions
    is inverse to the action on points.  Without `subspace` the trace runs
    over the full degree-d space.  With it, the subspace must decompose
    along the weight-graded blocks; the trace is then the weighted sum of
    the block ranks.
    """
    basis = MonomialBasis(n, d)
    if subspace is None:
        return Fraction(-sum(basis.weights(alpha)))
    rows = [list(map(Fraction, v)) for v in subspace]
    if rows and len(rows[0]) != len(basis):
        raise ValueError("subspace vectors do not match the monomial basis")
    work = [row[:] for row in rows]
    total_rank, _ = _rref(work)
    tr = Fraction(0)
    block_rank_sum = 0
    for c, cols in weight_classes(basis, alpha).items():
        proj = [[row[j] for j in cols] for row in rows]
        rk, _ = _rref(proj)
        tr += -c * rk
        block_rank_sum += rk
    if block_rank_sum != total_rank:
        raise SubspaceNotWeightHomogeneous(
            f"graded block ranks sum to {block_rank_sum}, "
            f"subspace dimension is {total_rank}")
    return tr


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Leading coefficients of dim and trace expansions.

    h0(k) = c0 k^n + c1 k^(n-1) + O(k^(n-2)) and
    tr(k) = b0 k^(n+1) + b1 k^n + O(k^(n-1)).
    """

    c0: Fraction
    c1: Fraction
    b0: Fraction
    b1: Fraction

    def __post_init__(self):
        for f in ("c0", "c1", "b0", "b1"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))


def futaki_from_coeffs(e: ExpansionCoeffs) -> Fraction:
    """Donaldson-Futaki invariant c1 b0 / c0 - b1."""
    if e.c0 == 0:
        raise ZeroLeadingCoefficient("c0 vanishes")
    return e.c1 * e.b0 / e.c0 - e.b1

def lifting_shift(e: ExpansionCoeffs, lam: Fraction) -> ExpansionCoeffs:
    """Change of linearization A_k -> A_k + k lam Id.

    Shifts b0 by lam c0 and b1 by lam c1, and therefore leaves
    futaki_from_coeffs unchanged; that identity is what makes the final
    invariant independent of the chosen lifting.
    """
    lam = Fraction(lam)
    return ExpansionCoeffs(e.c0, e.c1, e.b0 + lam * e.c0, e.b1 + lam * e.c1)


def base_coeffs(n: int, alpha: DiagonalOnePS) -> ExpansionCoeffs:
    """Expansion data of the full space of degree-k forms on P^n.

    h0(k) = C(k+n, n) gives c0 = 1/n! and c1 = (n+1)/(2 (n-1)!).  The sum
    of <w, e> over degree-k monomials is S k C(k+n, n)/(n+1) with
    S = sum(w), and the section weights are the negatives, so
    b0 = -S/((n+1) n!) and b1 = -S/(2 (n-1)!).
    """
    if len(alpha.weights) != n + 1:
        raise ValueError("weight vector length mismatch")
    s = sum(alpha.weights)
    return ExpansionCoeffs(
        Fraction(1, math.factorial(n)),
        Fraction(n + 1, 2 * math.factorial(n - 1)),
        Fraction(-s, (n + 1) * math.factorial(n)),
        Fraction(-s, 2 * math.factorial(n - 1)),
    )


def line_weight(q: ProjectivePoint, alpha: DiagonalOnePS) -> int:
    """Weight of the induced action on the degree-1 line over a limit point.

    The tautological line of q scales by the minimal weight on the support
    of q; the dual (section side) weight is its negative.
    """
    if len(alpha.weights) != len(q.coords):
        raise ValueError("weight vector length mismatch")
    return -min(alpha.weights[i] for i in q.support())


@dataclass(frozen=True)
class CentralPrediction:
    """Explicit expansion terms for the blowup central fibre.

    The c coefficients are exact; the b coefficients omit a remainder
    bounded in gamma, which the flags record.
    """

    coeffs: ExpansionCoeffs
    b0_slack_O1: bool = True
    b1_slack_O1: bool = True


def predicted_central_coeffs(cycle: WeightedCycle, alpha: DiagonalOnePS,
                             gamma: int,
                             base: Optional[ExpansionCoeffs] = None
                             ) -> CentralPrediction:
    """Predicted primed coefficients for the blowup test configuration.

    c0' = c0 g^n - sum a^n / n!
    c1' = c1 g^(n-1) - sum a^(n-1) / (2 (n-2)!)
    b0' = b0 g^(n+1) - sum_q lam(q) (sum_{A_q} a^n) g / n!       + O(1)
    b1' = b1 g^n     - sum_q lam(q) (sum_{A_q} a^(n-1)) g / (2 (n-2)!) + O(1)

    where q runs over limit points, A_q is the cluster of support points
    colliding into q, and lam(q) is line_weight(q, alpha).
    """
    n = cycle.ambient.n
    if n < 2:
        raise ValueError("prediction needs ambient dimension at least 2")
    if gamma < 1:
        raise ValueError("gamma must be positive")
    if base is None:
        base = base_coeffs(n, alpha)
    mult = dict(cycle.points)
    nf = math.factorial(n)
    half_n2 = 2 * math.factorial(n - 2)
    sum_an = sum(a ** n for _, a in cycle.points)
    sum_an1 = sum(a ** (n - 1) for _, a in cycle.points)
    c0p = base.c0 * gamma ** n - Fraction(sum_an, nf)
    c1p = base.c1 * gamma ** (n - 1) - Fraction(sum_an1, half_n2)
    b0p = base.b0 * gamma ** (n + 1)
    b1p = base.b1 * gamma ** n
    for q, members in collision_clusters(cycle, alpha).items():
        lam = line_weight(q, alpha)
        cl_an = sum(mult[p] ** n for p in members)
        cl_an1 = sum(mult[p] ** (n - 1) for p in members)
        b0p -= Fraction(lam * cl_an * gamma, nf)
        b1p -= Fraction(lam * cl_an1 * gamma, half_n2)
    return CentralPrediction(ExpansionCoeffs(c0p, c1p, b0p, b1p))


def level_weight(p: ProjectivePoint, alpha: DiagonalOnePS,
                 gamma: int) -> Fraction:
    """Mumford weight of p at polarisation level gamma, computed honestly.

    Evaluates every degree-gamma monomial at p and minimizes <w, e> over
    the nonvanishing ones, then subtracts the level-gamma average weight.
    Used as an independent cross-check of the scaling law
    level_weight = gamma * mumford_weight for traceless alpha.
    """
    n = len(p.coords) - 1
    basis = MonomialBasis(n, gamma)
    vals = basis.evaluate(p.coords)
    ws = basis.weights(alpha)
    lo = min(w for w, v in zip(ws, vals) if v != 0)
    mean = Fraction(gamma * sum(alpha.weights), n + 1)
    return Fraction(lo) - mean
