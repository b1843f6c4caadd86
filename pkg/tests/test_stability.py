"""Tests for the stability classifier, certificates, and the search oracle.

Independent recomputations use sympy so that the exact linear algebra in
the package is never trusted to check itself.
"""

import random
from fractions import Fraction

import pytest
from sympy import Matrix, Rational

from chowstab import (Ambient, DiagonalOnePS, ProjectivePoint, Subspace,
                      SubspaceNotSpannedBySupport, chow_weight, classify,
                      destabilizer_from_subspace, exhaustive_ops_search,
                      find_unstable_subspace, mumford_weight, normalize_cycle)

P1 = Ambient.projective(1)
P2 = Ambient.projective(2)

COLLINEAR = normalize_cycle(P2, [([1, 0, 0], 1), ([0, 1, 0], 1),
                                 ([1, 1, 0], 1)])
HEAVY = normalize_cycle(P2, [([1, 0, 0], 2), ([0, 1, 0], 1), ([0, 0, 1], 1)])
FOUR_GENERAL = normalize_cycle(P2, [([1, 0, 0], 1), ([0, 1, 0], 1),
                                    ([0, 0, 1], 1), ([1, 1, 1], 1)])
TRIANGLE = normalize_cycle(P2, [([1, 0, 0], 1), ([0, 1, 0], 1),
                                ([0, 0, 1], 1)])


def _random_cycle(rng, n, max_points, coord_bound=2):
    pts = []
    for _ in range(rng.randint(1, max_points)):
        while True:
            c = [rng.randint(-coord_bound, coord_bound) for _ in range(n + 1)]
            if any(c):
                break
        pts.append((c, rng.randint(1, 3)))
    return normalize_cycle(Ambient.projective(n), pts)


class TestMumfordWeight:
    def test_traceless_hand_values(self):
        w = DiagonalOnePS((1, 1, -2))
        assert mumford_weight(ProjectivePoint([1, 0, 0]), w) == 1
        assert mumford_weight(ProjectivePoint([1, 1, 0]), w) == 1
        assert mumford_weight(ProjectivePoint([0, 0, 1]), w) == -2
        assert mumford_weight(ProjectivePoint([1, 0, 1]), w) == -2

    def test_normalizes_before_taking_min(self):
        w = DiagonalOnePS((3, 0, 0))  # traceless form (2, -1, -1)
        assert mumford_weight(ProjectivePoint([1, 0, 0]), w) == 2
        assert mumford_weight(ProjectivePoint([0, 1, 1]), w) == -1
        assert mumford_weight(ProjectivePoint([1, 1, 1]), w) == -1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            mumford_weight(ProjectivePoint([1, 0]), DiagonalOnePS((1, 0, -1)))

    def test_invariant_under_constant_shift(self):
        rng = random.Random(1301)
        for _ in range(30):
            n = rng.randint(1, 3)
            coords = [rng.randint(-3, 3) for _ in range(n + 1)]
            if not any(coords):
                coords[0] = 1
            p = ProjectivePoint(coords)
            w = [rng.randint(-4, 4) for _ in range(n + 1)]
            c = rng.randint(-5, 5)
            assert mumford_weight(p, DiagonalOnePS(w)) == mumford_weight(
                p, DiagonalOnePS(tuple(wi + c for wi in w)))


class TestChowWeight:
    def test_collinear_hand_value(self):
        assert chow_weight(COLLINEAR, DiagonalOnePS((1, 1, -2))) == 3

    def test_heavy_point_hand_value(self):
        # 2*2 + 1*(-1) + 1*(-1) with traceless weights (2, -1, -1)
        assert chow_weight(HEAVY, DiagonalOnePS((2, -1, -1))) == 2

    def test_invariant_under_constant_shift(self):
        rng = random.Random(1302)
        for _ in range(20):
            cyc = _random_cycle(rng, rng.randint(1, 2), 4)
            n = cyc.ambient.n
            w = [rng.randint(-3, 3) for _ in range(n + 1)]
            c = rng.randint(-4, 4)
            assert chow_weight(cyc, DiagonalOnePS(w)) == chow_weight(
                cyc, DiagonalOnePS(tuple(wi + c for wi in w)))

    def test_product_ambient_sums_factor_weights(self):
        amb = Ambient.product(1, 1)
        cyc = normalize_cycle(amb, [([1, 0, 1, 0], 1), ([0, 1, 1, 1], 2)])
        # (3, 1) normalizes to (1, -1); contributions 1*(1+1) + 2*(-1-1)
        assert chow_weight(cyc, DiagonalOnePS((1, -1)),
                           DiagonalOnePS((3, 1))) == -2
        # omitted second factor acts trivially
        assert chow_weight(cyc, DiagonalOnePS((1, -1))) == -1

    def test_second_weight_rejected_on_projective_space(self):
        with pytest.raises(ValueError):
            chow_weight(COLLINEAR, DiagonalOnePS((1, 1, -2)),
                        DiagonalOnePS((1, -1, 0)))


class TestSubspace:
    def test_dim_and_containment(self):
        line = Subspace([ProjectivePoint([1, 0, 0]),
                         ProjectivePoint([0, 1, 0])])
        assert line.dim == 1 and line.ambient_dim == 2
        assert line.contains(ProjectivePoint([3, -2, 0]))
        assert not line.contains(ProjectivePoint([0, 0, 1]))

    def test_canonical_across_spanning_sets(self):
        a = Subspace([ProjectivePoint([1, 0, 0]), ProjectivePoint([0, 1, 0])])
        b = Subspace([ProjectivePoint([1, 1, 0]), ProjectivePoint([1, -1, 0])])
        assert a == b and hash(a) == hash(b)

    def test_dependent_spanning_points_collapse(self):
        s = Subspace([ProjectivePoint([1, 2, 0]), ProjectivePoint([2, 4, 0])])
        assert s.dim == 0

    def test_needs_a_point(self):
        with pytest.raises(ValueError):
            Subspace([])


class TestClassify:
    def test_single_point_is_unstable(self):
        cyc = normalize_cycle(P2, [([1, 0, 0], 1)])
        assert classify(cyc).status == "unstable"

    def test_four_general_points_are_stable(self):
        verdict = classify(FOUR_GENERAL)
        assert verdict.status == "stable"
        assert verdict.certificate is None
        assert verdict.witness_ratios == ()

    def test_coordinate_triangle_is_strictly_semistable(self):
        verdict = classify(TRIANGLE)
        assert verdict.status == "strictly_semistable"
        assert verdict.certificate is None
        # all three vertices and all three edges sit on the boundary ratio
        assert len(verdict.witness_ratios) == 6
        assert all(r.is_boundary for r in verdict.witness_ratios)

    def test_two_unit_points_on_line_are_strictly_semistable(self):
        cyc = normalize_cycle(P1, [([1, 0], 1), ([0, 1], 1)])
        assert classify(cyc).status == "strictly_semistable"

    def test_unstable_certificate_content(self):
        verdict = classify(HEAVY)
        assert verdict.is_unstable
        cert = verdict.certificate
        assert cert.subspace.dim == 0
        assert cert.subspace.contains(ProjectivePoint([1, 0, 0]))
        assert cert.mass_on_v == 2 and cert.total_mass == 4
        assert cert.ratio == 2 and cert.threshold == Fraction(4, 3)
        assert cert.destabilizer.ops.weights == (2, -1, -1)
        assert cert.destabilizer.chow_weight == 2

    def test_collinear_destabilizer_is_line_weighting(self):
        cert = classify(COLLINEAR).certificate
        assert cert.subspace.dim == 1
        assert cert.destabilizer.ops.weights == (1, 1, -2)
        assert cert.destabilizer.chow_weight == 3

    def test_find_unstable_subspace_matches_certificate(self):
        rec = find_unstable_subspace(HEAVY)
        assert rec is not None and rec.is_violating
        assert rec.subspace == classify(HEAVY).certificate.subspace
        assert find_unstable_subspace(FOUR_GENERAL) is None


def _independent_destabilizer_weight(cycle, dest):
    """Recompute the adapted chow weight with sympy linear solves."""
    basis = Matrix([[Rational(x) for x in row] for row in dest.adapted_basis])
    w = dest.ops.normalized()
    total = Fraction(0)
    for p, m in cycle.points:
        coords = basis.T.LUsolve(Matrix([Rational(c) for c in p.coords]))
        mins = min(w[i] for i in range(len(w)) if coords[i] != 0)
        total += m * mins
    return total


class TestDestabilizer:
    def test_weight_vector_shape(self):
        cert = classify(COLLINEAR).certificate
        n, k = 2, cert.subspace.dim
        ws = cert.destabilizer.ops.weights
        assert ws == tuple([n - k] * (k + 1) + [-(k + 1)] * (n - k))
        assert sum(ws) == 0

    def test_matches_independent_recompute(self):
        rng = random.Random(1303)
        checked = 0
        for _ in range(40):
            cyc = _random_cycle(rng, rng.randint(1, 2), 4, coord_bound=1)
            verdict = classify(cyc)
            if not verdict.is_unstable:
                continue
            dest = verdict.certificate.destabilizer
            assert dest.chow_weight == _independent_destabilizer_weight(
                cyc, dest)
            checked += 1
        assert checked >= 10

    def test_positive_weight_iff_ratio_violated(self):
        rng = random.Random(1304)
        for _ in range(25):
            cyc = _random_cycle(rng, 2, 4, coord_bound=1)
            support = cyc.support()
            n = cyc.ambient.n
            size = rng.randint(1, min(len(support), n))
            pts = rng.sample(list(support), size)
            v = Subspace(pts)
            if v.dim > n - 1:
                continue
            dest = destabilizer_from_subspace(cyc, v)
            mass = sum(m for p, m in cyc.points if v.contains(p))
            violating = Fraction(mass, v.dim + 1) > Fraction(
                cyc.total_mass(), n + 1)
            assert (dest.chow_weight > 0) == violating

    def test_requires_support_spanning_points(self):
        v = Subspace([ProjectivePoint([5, 7, 1])])
        with pytest.raises(SubspaceNotSpannedBySupport):
            destabilizer_from_subspace(COLLINEAR, v)

    def test_rejects_full_ambient_span(self):
        v = Subspace([ProjectivePoint([1, 0, 0]), ProjectivePoint([0, 1, 0]),
                      ProjectivePoint([0, 0, 1])])
        with pytest.raises(ValueError):
            destabilizer_from_subspace(TRIANGLE, v)


class TestSearchOracle:
    def test_semistable_and_stable_peak_at_zero(self):
        assert exhaustive_ops_search(TRIANGLE, 2).weight == 0
        assert exhaustive_ops_search(FOUR_GENERAL, 2).weight == 0

    def test_unstable_peak_is_positive(self):
        res = exhaustive_ops_search(HEAVY, 2)
        assert res.weight > 0

    def test_agrees_with_classify_on_line(self):
        rng = random.Random(1305)
        for _ in range(12):
            cyc = _random_cycle(rng, 1, 4)
            unstable = classify(cyc).is_unstable
            assert (exhaustive_ops_search(cyc, 3).weight > 0) == unstable

    def test_agrees_with_classify_on_plane(self):
        rng = random.Random(1306)
        for _ in range(6):
            cyc = _random_cycle(rng, 2, 4, coord_bound=1)
            unstable = classify(cyc).is_unstable
            assert (exhaustive_ops_search(cyc, 2).weight > 0) == unstable

    def test_input_validation(self):
        with pytest.raises(ValueError):
            exhaustive_ops_search(HEAVY, -1)
        amb = Ambient.product(1, 1)
        cyc = normalize_cycle(amb, [([1, 0, 1, 0], 1)])
        with pytest.raises(ValueError):
            exhaustive_ops_search(cyc, 1)
