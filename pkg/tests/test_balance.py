"""Tests for the numerical balancing flow and its exact side conditions."""

import math

import numpy as np
import pytest

from chowstab import Ambient, ZeroPoint, normalize_cycle
from chowstab.balance import (DIVERGENCE_NORM, BalanceCycle, balance_flow,
                              balance_residual, check_no_common_zero,
                              check_spanning, moment_map, total_moment)

P1 = Ambient.projective(1)
P2 = Ambient.projective(2)

# (name, coords, masses, expected flow status); statuses frozen after
# checking each case against the ratio criterion by hand
CORPUS = [
    ("p1_coordinate_pair", [[1, 0], [0, 1]], [1, 1], "converged"),
    ("p1_three_points", [[1, 0], [0, 1], [1, 1]], [1, 1, 1], "converged"),
    ("p1_four_with_complex", [[1, 0], [0, 1], [1, 1], [1, [0, 1]]],
     [1, 1, 1, 1], "converged"),
    ("p2_triangle_plus_unit", [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
     [1, 1, 1, 1], "converged"),
    ("p2_triangle", [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1],
     "converged"),
    ("p2_five_mixed", [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1],
                       [1, -1, [0, 1]]], [1, 1, 1, 1, 1], "converged"),
    ("p1_mass_two_one", [[1, 0], [0, 1]], [2, 1], "diverged"),
    ("p1_heavy_triple", [[1, 0], [0, 1], [1, 1]], [3, 1, 1], "diverged"),
    ("p2_collinear", [[1, 0, 0], [0, 1, 0], [1, 1, 0]], [1, 1, 1],
     "diverged"),
    ("p2_heavy_vertex", [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [2, 1, 1],
     "diverged"),
    ("p2_single_point", [[1, 0, 0]], [1], "diverged"),
    ("p1_skew_masses", [[1, 1], [1, -1]], [1, 2], "diverged"),
]


def _random_unit_vector(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class TestMomentMap:
    def test_hand_values(self):
        np.testing.assert_allclose(moment_map([1, 0]),
                                   [[0.5, 0], [0, -0.5]], atol=1e-15)
        np.testing.assert_allclose(moment_map([1, 1]),
                                   [[0, 0.5], [0.5, 0]], atol=1e-15)
        np.testing.assert_allclose(moment_map([1, [0, 1]]),
                                   [[0, -0.5j], [0.5j, 0]], atol=1e-15)

    def test_hermitian_traceless(self):
        rng = np.random.default_rng(555)
        for _ in range(10):
            h = moment_map(_random_unit_vector(rng, rng.integers(2, 5)))
            np.testing.assert_allclose(h, h.conj().T, atol=1e-14)
            assert abs(np.trace(h)) < 1e-14

    def test_unitary_equivariance(self):
        rng = np.random.default_rng(556)
        for _ in range(10):
            dim = int(rng.integers(2, 5))
            p = _random_unit_vector(rng, dim)
            q, _ = np.linalg.qr(rng.standard_normal((dim, dim))
                                + 1j * rng.standard_normal((dim, dim)))
            np.testing.assert_allclose(moment_map(q @ p),
                                       q @ moment_map(p) @ q.conj().T,
                                       atol=1e-10)

    def test_scale_invariance(self):
        np.testing.assert_allclose(moment_map([2, 0]), moment_map([1, 0]),
                                   atol=1e-15)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroPoint):
            moment_map([0, 0, 0])


class TestResidual:
    def test_coordinate_pair_is_exactly_balanced(self):
        cyc = BalanceCycle.from_raw([[1, 0], [0, 1]], [1, 1])
        assert balance_residual(cyc) == 0.0

    def test_triangle_is_balanced(self):
        cyc = BalanceCycle.from_raw([[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                    [1, 1, 1])
        assert balance_residual(cyc) < 1e-14

    def test_single_heavy_point(self):
        cyc = BalanceCycle.from_raw([[1, 0]], [2])
        assert balance_residual(cyc) == pytest.approx(math.sqrt(2))

    def test_total_moment_accepts_substitute_points(self):
        cyc = BalanceCycle.from_raw([[1, 0], [0, 1]], [1, 1])
        moved = (np.array([1 + 0j, 1 + 0j]), np.array([0j, 1 + 0j]))
        m = total_moment(cyc, moved)
        assert np.linalg.norm(m) > 0.1


class TestBalanceCycle:
    def test_complex_entries(self):
        cyc = BalanceCycle.from_raw([[1, [2, 3]]], [1])
        assert cyc.points[0][1] == 2 + 3j
        assert cyc.n == 1

    def test_chow_masses_from_weighted_cycle(self):
        amb = Ambient.projective(3)
        cyc = normalize_cycle(amb, [([1, 0, 0, 0], 3), ([0, 1, 0, 0], 2)])
        bal = BalanceCycle.from_weighted(cyc)
        assert sorted(bal.masses) == [4.0, 9.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            BalanceCycle.from_raw([[1, 0]], [1, 2])
        with pytest.raises(ValueError):
            BalanceCycle.from_raw([], [])
        with pytest.raises(ValueError):
            BalanceCycle.from_raw([[1, 0], [1, 0, 0]], [1, 1])
        with pytest.raises(ValueError):
            BalanceCycle.from_raw([[1, 0]], [0])
        with pytest.raises(ZeroPoint):
            BalanceCycle.from_raw([[0, 0]], [1])
        with pytest.raises(ValueError):
            BalanceCycle.from_raw([[[1, 2, 3], 0]], [1])


class TestBalanceFlow:
    @pytest.mark.parametrize("name,coords,masses,expect",
                             CORPUS, ids=[c[0] for c in CORPUS])
    def test_corpus_statuses(self, name, coords, masses, expect):
        rep = balance_flow(BalanceCycle.from_raw(coords, masses))
        assert rep.status == expect
        if expect == "converged":
            assert rep.residual_norm < 1e-9
        else:
            assert rep.group_element_norm > DIVERGENCE_NORM
        assert not rep.stalled

    def test_balanced_input_returns_immediately(self):
        rep = balance_flow(BalanceCycle.from_raw([[1, 0], [0, 1]], [1, 1]))
        assert rep.status == "converged" and rep.iterations == 0

    def test_residual_is_monotone_in_iterations(self):
        cyc = BalanceCycle.from_raw([[1, 0], [0, 1], [1, 1], [1, [0, 1]]],
                                    [1, 1, 1, 1])
        prev = None
        for cap in (1, 3, 8, 20, 50):
            rep = balance_flow(cyc, max_iter=cap)
            if prev is not None:
                assert rep.residual_norm <= prev + 1e-15
            prev = rep.residual_norm

    def test_flow_is_deterministic(self):
        cyc = BalanceCycle.from_raw([[1, 0, 0], [0, 1, 0], [0, 0, 1],
                                     [1, 1, 1]], [1, 1, 1, 1])
        a = balance_flow(cyc)
        b = balance_flow(cyc)
        assert a.status == b.status and a.iterations == b.iterations
        assert a.residual_norm == b.residual_norm
        assert np.array_equal(a.group_element, b.group_element)

    def test_group_element_moves_points(self):
        cyc = BalanceCycle.from_raw([[1, 0], [0, 1], [1, 1]], [1, 1, 1])
        rep = balance_flow(cyc)
        for p, q in zip(cyc.points, rep.points):
            moved = rep.group_element @ (p / np.linalg.norm(p))
            np.testing.assert_allclose(moved / np.linalg.norm(moved), q,
                                       atol=1e-12)

    def test_step_validation(self):
        cyc = BalanceCycle.from_raw([[1, 0]], [1])
        with pytest.raises(ValueError):
            balance_flow(cyc, step=0.0)


class TestCheckSpanning:
    def test_four_points_span(self):
        cyc = BalanceCycle.from_raw([[1, 0], [0, 1], [1, 1], [1, [0, 1]]],
                                    [1, 1, 1, 1])
        assert check_spanning(cyc)

    def test_small_configurations_do_not_span(self):
        assert not check_spanning(BalanceCycle.from_raw([[1, 0]], [1]))
        assert not check_spanning(
            BalanceCycle.from_raw([[1, 0], [0, 1]], [1, 1]))
        assert not check_spanning(
            BalanceCycle.from_raw([[1, 1], [2, 2]], [1, 1]))


class TestCheckNoCommonZero:
    def test_examples(self):
        tri = normalize_cycle(P2, [([1, 0, 0], 1), ([0, 1, 0], 1),
                                   ([0, 0, 1], 1)])
        assert not check_no_common_zero(tri)  # diagonal matrices fix it
        four = normalize_cycle(P2, [([1, 0, 0], 1), ([0, 1, 0], 1),
                                    ([0, 0, 1], 1), ([1, 1, 1], 1)])
        assert check_no_common_zero(four)
        assert not check_no_common_zero(normalize_cycle(P1, [([1, 0], 1)]))
        assert not check_no_common_zero(normalize_cycle(P2, []))
        three = normalize_cycle(P1, [([1, 0], 1), ([0, 1], 1), ([1, 1], 1)])
        assert check_no_common_zero(three)

    def test_rational_coordinates(self):
        from fractions import Fraction
        cyc = normalize_cycle(P1, [([Fraction(1, 2), Fraction(1, 3)], 1),
                                   ([1, 0], 1), ([0, 1], 1)])
        assert check_no_common_zero(cyc)

    def test_needs_projective_ambient(self):
        prod = normalize_cycle(Ambient.product(1, 1), [([1, 0, 1, 0], 1)])
        with pytest.raises(ValueError):
            check_no_common_zero(prod)
