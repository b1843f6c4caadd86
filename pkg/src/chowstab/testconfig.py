"""Blowup test configurations via degreewise flat limits.

The family of section spaces attached to a cycle Z and a diagonal 1-PS is
the kernel, over the rational function field in t, of the jet conditions
at the moved points alpha(t).p_i.  Because moving the points is a linear
substitution, that kernel is the orbit of the kernel at t=1, which gives
polynomial basis vectors directly: the coefficient of x^e in a cleared
kernel vector v picks up t**(max_weight(v) - <w, e>).  Evaluating at t=0
keeps the top weight part of each vector, and the flat limit of the family
is computed from there by exact elimination.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (NotWeightHomogeneous, PolynomialityFailed, RankDrop,
                     VerificationFailed)
from .exactcore import (PolyT, _rref, _solve, int_rank_profile,
                        interpolate_poly, limit_subspace, poly_eval,
                        rank_kernel)
from .geometry import (DiagonalOnePS, ProjectivePoint, WeightedCycle,
                       chow_multiplicities, collision_clusters, normalize_cycle)
from .hilbert import (ExpansionCoeffs, FatPointSpec, MonomialBasis,
                      _all_int_jet_rows, base_coeffs, futaki_from_coeffs,
                      jet_vanishing_matrix, lifting_shift,
                      predicted_central_coeffs, section_trace, weight_classes)
from .stability import chow_weight

__all__ = [
    "SectionFamily",
    "CentralFibre",
    "DegreeReport",
    "TestConfigSpec",
    "CentralFibreData",
    "DFResult",
    "ExpansionReport",
    "moving_section_family",
    "central_fibre_sections",
    "central_fibre_cycle",
    "df_invariant",
    "expansion_comparison",
]

_GUARD_SEED = 977


@dataclass(frozen=True)
class SectionFamily:
    """A basis, polynomial in t, of the moving space of sections."""

    cycle: WeightedCycle
    alpha: DiagonalOnePS
    degree: int
    r: int
    basis: tuple[tuple[PolyT, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _int_rows(rat_rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rat_rows:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _moved_coords(p: ProjectivePoint, alpha: DiagonalOnePS,
                  t0: Fraction) -> list[Fraction]:
    """Coordinates of alpha(t0).p cleared so the limit pivot stays constant."""
    lo = min(alpha.weights[i] for i in p.support())
    return [c * t0 ** (alpha.weights[i] - lo)
            for i, c in enumerate(p.coords)]


def moving_section_family(cycle: WeightedCycle, alpha: DiagonalOnePS,
                          gamma: int, r: int, *,
                          check: bool = True) -> SectionFamily:
    """Degree gamma*r forms vanishing to order r*a_i along the moved cycle.

    The returned vectors are primitive in t (some coefficient is constant
    and nonzero).  With check=True the construction is verified at a random
    rational t: the jet matrix there must have the t=1 rank and must
    annihilate every returned vector, otherwise RankDrop is raised.
    """
    if not cycle.ambient.is_projective:
        raise ValueError("test configurations need a projective ambient")
    n = cycle.ambient.n
    if len(alpha.weights) != n + 1:
        raise ValueError("weight vector length mismatch")
    if gamma < 1 or r < 1:
        raise ValueError("need gamma >= 1 and r >= 1")
    degree = gamma * r
    spec = FatPointSpec(cycle, degree, r)
    basis = MonomialBasis(n, degree)
    matrix = jet_vanishing_matrix(spec)
    rank1, kernel = rank_kernel(matrix)
    mu = basis.weights(alpha)
    family = []
    for v in kernel:
        top = max(mu[i] for i, x in enumerate(v) if x != 0)
        family.append(tuple(
            PolyT.t_power(top - mu[i], x) if x != 0 else PolyT()
            for i, x in enumerate(v)))
    fam = SectionFamily(cycle, alpha, degree, r, tuple(family))
    if check:
        _verify_family(fam, rank1)
    return fam


def _verify_family(fam: SectionFamily, rank1: int) -> None:
    rng = random.Random(_GUARD_SEED)
    t0 = Fraction(rng.randint(2, 97), 101)
    moved = normalize_cycle(
        fam.cycle.ambient,
        [(_moved_coords(p, fam.alpha, t0), a) for p, a in fam.cycle.points])
    if len(moved) != len(fam.cycle):
        raise RankDrop("moved points collided at a nonzero parameter")
    spec = FatPointSpec(moved, fam.degree, fam.r)
    matrix = jet_vanishing_matrix(spec)
    rows = _int_rows(matrix.entries)
    rank_t0, _ = int_rank_profile([row[:] for row in rows], matrix.ncols)
    if rank_t0 != rank1:
        raise RankDrop(
            f"jet rank {rank_t0} at t={t0} differs from generic rank {rank1}")
    for v in fam.basis:
        vals = [p(t0) for p in v]
        for row in matrix.entries:
            if sum(a * b for a, b in zip(row, vals)) != 0:
                raise RankDrop("family vector left the jet kernel")


@dataclass(frozen=True)
class CentralFibre:
    """The flat limit at t=0 of a moving section family."""

    degree: int
    basis: tuple[tuple[Fraction, ...], ...]
    graded_dims: dict[int, int]
    trace: Fraction

    @property
    def dim(self) -> int:
        return len(self.basis)


def central_fibre_sections(family: SectionFamily) -> CentralFibre:
    """Flat limit of the family, verified weight-homogeneous.

    The limit must split as a direct sum of its intersections with the
    weight-graded monomial blocks; if the block ranks do not add up to the
    limit dimension, NotWeightHomogeneous is raised.
    """
    n = family.cycle.ambient.n
    basis = MonomialBasis(n, family.degree)
    lim = limit_subspace(family.basis)
    rows = [list(v) for v in lim]
    graded: dict[int, int] = {}
    total = 0
    tr = Fraction(0)
    for c, cols in weight_classes(basis, family.alpha).items():
        proj = [[row[j] for j in cols] for row in rows]
        rk, _ = _rref(proj)
        if rk:
            graded[c] = rk
            total += rk
            tr += -c * rk
    if total != len(lim):
        raise NotWeightHomogeneous(
            f"block ranks sum to {total}, limit dimension is {len(lim)}")
    return CentralFibre(family.degree, tuple(tuple(v) for v in lim),
                        graded, tr)


def _central_summary(cycle: WeightedCycle, alpha: DiagonalOnePS,
                     degree: int, r: int
                     ) -> tuple[int, Fraction, dict[int, int], bool]:
    """dim, trace and graded dimensions of the limit section space.

    Works on the jet condition matrix instead of the kernel.  The limit
    keeps the top-weight part of each kernel vector, so its weight-c piece
    is (kernel inside weight <= c) modulo (kernel inside weight < c); with
    columns sorted by ascending monomial weight the rank increment of the
    weight-c column block counts the kernel directions lost there, and the
    graded limit dimension is the block size minus that increment.  Agrees
    with central_fibre_sections and scales to large degrees.
    """
    n = cycle.ambient.n
    basis = MonomialBasis(n, degree)
    mu = basis.weights(alpha)
    order = sorted(range(len(basis)), key=lambda j: (mu[j], j))
    spec = FatPointSpec(cycle, degree, r)
    raw = _all_int_jet_rows(spec, basis)
    rows = [[row[j] for j in order] for row in raw]
    rank, pivots = int_rank_profile(rows, len(basis))
    pivot_weights = [mu[order[j]] for j in pivots]
    graded: dict[int, int] = {}
    for j in range(len(basis)):
        graded[mu[j]] = graded.get(mu[j], 0) + 1
    for c in pivot_weights:
        graded[c] -= 1
    graded = {c: d for c, d in graded.items() if d}
    dim = len(basis) - rank
    tr = sum((Fraction(-c) * d for c, d in graded.items()), Fraction(0))
    return dim, tr, graded, rank == spec.expected_rows


@dataclass(frozen=True)
class DegreeReport:
    """Limit data of the degree-d piece of the moving ideal (r=1)."""

    degree: int
    dim: int
    vanishing_orders: dict[ProjectivePoint, int]


def central_fibre_cycle(cycle: WeightedCycle, alpha: DiagonalOnePS,
                        probe_degrees: Sequence[int]) -> list[DegreeReport]:
    """Diagnostic for-the-limit cycle: guaranteed vanishing orders.

    For each probe degree d, takes the flat limit of the degree-d forms
    through the moved cycle (order multiplier 1) and reports, at every
    collision point q, the largest order to which all limit sections
    vanish.  This bounds the fat point of the limit scheme at q from
    below; it is a diagnostic, not a full ideal presentation.
    """
    reports = []
    clusters = collision_clusters(cycle, alpha)
    for d in probe_degrees:
        fam = moving_section_family(cycle, alpha, gamma=d, r=1)
        fibre = central_fibre_sections(fam)
        orders: dict[ProjectivePoint, int] = {}
        if fibre.dim:
            n = cycle.ambient.n
            basis = MonomialBasis(n, d)
            for q in clusters:
                o = 0
                while o <= d:
                    probe_cycle = WeightedCycle(cycle.ambient, ((q, 1),))
                    spec = FatPointSpec(probe_cycle, d, o + 1)
                    rows = jet_vanishing_matrix(spec).entries
                    ok = all(
                        sum(a * b for a, b in zip(row, v)) == 0
                        for row in rows for v in fibre.basis)
                    if not ok:
                        break
                    o += 1
                orders[q] = o
        reports.append(DegreeReport(d, fibre.dim, orders))
    return reports


# ---------------------------------------------------------------------------
# the Donaldson-Futaki invariant of a blowup test configuration


@dataclass(frozen=True)
class TestConfigSpec:
    """Blowup test configuration data: cycle, 1-PS, level and r samples."""

    __test__ = False  # keep pytest from collecting the domain name

    cycle: WeightedCycle
    alpha: DiagonalOnePS
    gamma: int
    r_samples: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.cycle.ambient.is_projective:
            raise ValueError("test configurations need a projective ambient")
        n = self.cycle.ambient.n
        if len(self.alpha.weights) != n + 1:
            raise ValueError("weight vector length mismatch")
        if self.gamma < 1:
            raise ValueError("gamma must be positive")
        rs = tuple(self.r_samples) or tuple(range(2, n + 6))
        if sorted(set(rs)) != list(rs) or rs[0] < 1:
            raise ValueError("r samples must be increasing positive integers")
        if len(rs) < n + 4:
            raise ValueError(
                f"need at least {n + 4} r samples: degree n+1 trace fit "
                "plus two held-out verification points")
        object.__setattr__(self, "r_samples", rs)


@dataclass(frozen=True)
class CentralFibreData:
    """Per-exponent data of the central fibre and the fitted expansions."""

    dims: dict[int, int]
    traces: dict[int, Fraction]
    fitted: ExpansionCoeffs
    normalized: ExpansionCoeffs     # after the level-gamma lifting shift
    lam_gamma: Fraction
    jet_separation: dict[int, bool]


@dataclass(frozen=True)
class DFResult:
    """Exact Donaldson-Futaki invariant with its asymptotic prediction."""

    gamma: int
    f_exact: Fraction
    f_predicted_leading: Optional[Fraction]
    ch_weight: Fraction
    central: CentralFibreData


def df_invariant(spec: TestConfigSpec) -> DFResult:
    """Exact F at level gamma from degreewise dims and traces.

    Dimensions are fitted by a degree-n polynomial in r and traces by a
    degree-(n+1) polynomial, each interpolated on the minimal prefix of
    r_samples and verified exactly on the held-out rest; any mismatch
    raises PolynomialityFailed (sampling started below the stability
    threshold r0 of the data).  The level-gamma lifting normalization is
    applied and, since the invariant is blind to liftings, checked to
    leave F unchanged.
    """
    n = spec.cycle.ambient.n
    gamma = spec.gamma
    dims: dict[int, int] = {}
    traces: dict[int, Fraction] = {}
    separation: dict[int, bool] = {}
    for r in spec.r_samples:
        dim, tr, _, full = _central_summary(spec.cycle, spec.alpha,
                                            gamma * r, r)
        dims[r] = dim
        traces[r] = tr
        separation[r] = full
    try:
        dim_fit = interpolate_poly(
            [(r, Fraction(dims[r])) for r in spec.r_samples[:n + 1]],
            n,
            [(r, Fraction(dims[r])) for r in spec.r_samples[n + 1:]])
        trace_fit = interpolate_poly(
            [(r, traces[r]) for r in spec.r_samples[:n + 2]],
            n + 1,
            [(r, traces[r]) for r in spec.r_samples[n + 2:]])
    except VerificationFailed as exc:
        raise PolynomialityFailed(
            f"r samples {spec.r_samples} start below the polynomial range: "
            f"{exc}") from exc
    fitted = ExpansionCoeffs(dim_fit[n], dim_fit[n - 1] if n >= 1 else 0,
                             trace_fit[n + 1], trace_fit[n])
    h0_gamma = math.comb(gamma + n, n)
    lam_gamma = -section_trace(spec.alpha, n, gamma) / (gamma * h0_gamma)
    normalized = lifting_shift(fitted, gamma * lam_gamma)
    f = futaki_from_coeffs(fitted)
    assert f == futaki_from_coeffs(normalized), "lifting shift moved F"
    ch = chow_weight(chow_multiplicities(spec.cycle), spec.alpha)
    predicted = None
    if n >= 2:
        f_base = futaki_from_coeffs(base_coeffs(n, spec.alpha))
        predicted = (f_base * gamma ** n
                     - ch * gamma / (2 * math.factorial(n - 2)))
    central = CentralFibreData(dims, traces, fitted, normalized, lam_gamma,
                               separation)
    return DFResult(gamma, f, predicted, ch, central)


@dataclass(frozen=True)
class GammaRow:
    """Per-gamma entry of an expansion comparison report."""

    gamma: int
    f_value: Fraction
    c0_dev: Fraction
    c1_dev: Fraction
    b0_dev: Fraction
    b1_dev: Fraction


@dataclass(frozen=True)
class ExpansionReport:
    """Degree-2 fit of F(gamma) against the asymptotic prediction.

    fit_coeffs holds (a0, a1, a2) of the exact least squares quadratic;
    leading_coeff is a2 and gamma_coeff is a1.  centered_slope is the
    derivative of the fit at the window average, the stable way to read
    the linear rate off a short window.  predicted_gamma_coeff is the
    asymptotic coefficient of gamma, minus the Chow weight over
    2 (n-2)!, and predicted_gamma_power_coeff the coefficient of gamma^n
    (the base Futaki invariant, zero here).
    """

    gammas: tuple[int, ...]
    f_values: tuple[Fraction, ...]
    fit_coeffs: tuple[Fraction, Fraction, Fraction]
    residuals: tuple[Fraction, ...]
    ch_weight: Fraction
    predicted_gamma_coeff: Fraction
    predicted_gamma_power_coeff: Fraction
    rows: tuple[GammaRow, ...]

    @property
    def leading_coeff(self) -> Fraction:
        return self.fit_coeffs[2]

    @property
    def gamma_coeff(self) -> Fraction:
        return self.fit_coeffs[1]

    @property
    def centered_slope(self) -> Fraction:
        mid = Fraction(sum(self.gammas), len(self.gammas))
        return self.fit_coeffs[1] + 2 * self.fit_coeffs[2] * mid


def expansion_comparison(cycle: WeightedCycle, alpha: DiagonalOnePS,
                         gammas: Sequence[int],
                         r_samples: Sequence[int] = ()) -> ExpansionReport:
    """Run df_invariant over a gamma window and compare with the expansion."""
    n = cycle.ambient.n
    if n < 2:
        raise ValueError("expansion comparison needs ambient dimension >= 2")
    gs = tuple(sorted(set(int(g) for g in gammas)))
    if len(gs) < 4:
        raise ValueError("need at least four gamma values for a quadratic fit")
    f_values = []
    rows = []
    ch = None
    for g in gs:
        res = df_invariant(TestConfigSpec(cycle, alpha, g, tuple(r_samples)))
        ch = res.ch_weight
        pred = predicted_central_coeffs(cycle, alpha, g)
        fit = res.central.fitted
        f_values.append(res.f_exact)
        rows.append(GammaRow(g, res.f_exact,
                             fit.c0 - pred.coeffs.c0,
                             fit.c1 - pred.coeffs.c1,
                             fit.b0 - pred.coeffs.b0,
                             fit.b1 - pred.coeffs.b1))
    # exact quadratic least squares via the normal equations
    powers = [[Fraction(g) ** k for k in range(3)] for g in gs]
    ata = [[sum(row[i] * row[j] for row in powers) for j in range(3)]
           for i in range(3)]
    atf = [sum(row[i] * f for row, f in zip(powers, f_values))
           for i in range(3)]
    coeffs = _solve(ata, atf)
    residuals = tuple(f - poly_eval(coeffs, g)
                      for g, f in zip(gs, f_values))
    predicted_slope = -ch / (2 * math.factorial(n - 2))
    f_base = futaki_from_coeffs(base_coeffs(n, alpha))
    return ExpansionReport(gs, tuple(f_values),
                           (coeffs[0], coeffs[1], coeffs[2]),
                           residuals, ch, predicted_slope, f_base,
                           tuple(rows))
