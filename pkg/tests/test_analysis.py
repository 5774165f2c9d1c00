"""Distances, neighbor rankings, sign splits, Procrustes alignment."""

import numpy as np
import pytest

from oracles import naive_pairwise_distances
from trademap.analysis import (
    bipartition,
    nearest_neighbors,
    pairwise_distances,
    procrustes_align,
)
from trademap.embedding import Embedding, compose_map
from trademap.errors import RosterMismatchError, UnknownCountryError
from trademap.ingest import CountryRoster, FlowMatrix


def emb_of(coords, codes=None):
    coords = np.asarray(coords, dtype=float)
    codes = codes or tuple(f"C{i:02d}" for i in range(coords.shape[0]))
    return Embedding(CountryRoster(tuple(codes)), coords, None)


def random_embedding(rng, n, k=2):
    return emb_of(rng.normal(size=(n, k)))


def two_clique_flow(n1, n2, weak=1e-3):
    n = n1 + n2
    a = np.zeros((n, n))
    a[:n1, :n1] = 1.0
    a[n1:, n1:] = 1.0
    np.fill_diagonal(a, 0.0)
    a[0, n1] = a[n1, 0] = weak
    return FlowMatrix(CountryRoster(tuple(f"C{i:02d}" for i in range(n))), a / 2.0)


class TestPairwiseDistances:
    def test_identical_points(self):
        report = pairwise_distances(emb_of([[1.0, 2.0], [1.0, 2.0]], ("A", "B")))
        assert report.distances[0, 1] == 0.0

    def test_three_four_five(self):
        report = pairwise_distances(emb_of([[0.0, 0.0], [3.0, 4.0]], ("A", "B")))
        assert report.distances[0, 1] == 5.0

    def test_against_double_loop_oracle(self):
        rng = np.random.default_rng(30)
        emb = random_embedding(rng, 12, 3)
        report = pairwise_distances(emb)
        assert np.max(
            np.abs(report.distances - naive_pairwise_distances(emb.coordinates))
        ) <= 1e-12
        assert np.array_equal(report.distances, report.distances.T)
        assert np.all(np.diagonal(report.distances) == 0.0)

    def test_invariant_under_column_sign_flips(self):
        rng = np.random.default_rng(31)
        emb = random_embedding(rng, 9)
        flipped = emb_of(emb.coordinates * np.array([-1.0, 1.0]))
        assert np.allclose(
            pairwise_distances(emb).distances,
            pairwise_distances(flipped).distances,
            atol=1e-12,
        )


class TestNearestNeighbors:
    def test_full_ranking(self):
        rng = np.random.default_rng(32)
        emb = random_embedding(rng, 8)
        ranked = nearest_neighbors(emb, emb.roster.codes[0], 7)
        assert len(ranked) == 7
        distances = [d for _, d in ranked]
        assert distances == sorted(distances)

    def test_duplicate_point_ranks_first(self):
        emb = emb_of([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0]], ("A", "B", "C"))
        ranked = nearest_neighbors(emb, "A", 2)
        assert ranked[0] == ("B", 0.0)

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(33)
        emb = random_embedding(rng, 20)
        query = emb.roster.codes[7]
        ranked = nearest_neighbors(emb, query, 10)
        diffs = emb.coordinates - emb.coordinates[7]
        full = sorted(
            (float(np.hypot(*d)), code)
            for code, d in zip(emb.roster.codes, diffs)
            if code != query
        )
        assert [code for _, code in full[:10]] == [code for code, _ in ranked]

    def test_prefix_property(self):
        rng = np.random.default_rng(34)
        emb = random_embedding(rng, 15)
        shorter = nearest_neighbors(emb, "C03", 6)
        longer = nearest_neighbors(emb, "C03", 7)
        assert longer[:6] == shorter

    def test_tie_broken_by_roster_order(self):
        emb = emb_of([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]], ("A", "B", "C"))
        ranked = nearest_neighbors(emb, "A", 2)
        assert [code for code, _ in ranked] == ["B", "C"]

    def test_unknown_code(self):
        rng = np.random.default_rng(35)
        with pytest.raises(UnknownCountryError, match="ZZ"):
            nearest_neighbors(random_embedding(rng, 5), "ZZ", 2)

    def test_m_bounds(self):
        rng = np.random.default_rng(36)
        emb = random_embedding(rng, 5)
        with pytest.raises(ValueError):
            nearest_neighbors(emb, "C00", 5)


class TestBipartition:
    def test_weak_cliques_recover_planted_split(self):
        flow = two_clique_flow(4, 6)
        emb = compose_map(flow, k=1)
        split = bipartition(emb)
        sides = {frozenset(split.positive), frozenset(split.negative)}
        planted = {
            frozenset(flow.roster.codes[:4]),
            frozenset(flow.roster.codes[4:]),
        }
        assert sides == planted
        assert split.boundary == ()

    def test_one_sided_coordinates_signal_upstream_bug(self):
        emb = emb_of([[0.5, 0.0], [0.2, 0.0], [0.1, 0.0]], ("A", "B", "C"))
        with pytest.raises(AssertionError, match="sign"):
            bipartition(emb)

    def test_singleton_side_is_valid(self):
        emb = emb_of([[0.9, 0.0], [-0.1, 0.0], [-0.2, 0.0]], ("A", "B", "C"))
        split = bipartition(emb)
        assert split.positive == ("A",)
        assert split.negative == ("B", "C")

    def test_zero_band_assigns_and_flags(self):
        emb = emb_of(
            [[0.5, 0.0], [0.05, 0.0], [-0.05, 0.0], [-0.5, 0.0]],
            ("A", "B", "C", "D"),
        )
        split = bipartition(emb, zero_band=0.1)
        assert split.boundary == ("B", "C")
        assert split.positive == ("A", "B")
        assert split.negative == ("C", "D")
        assert split.boundary_tolerance == 0.1

    def test_exact_zero_goes_to_positive_side(self):
        emb = emb_of([[0.4, 0.0], [0.0, 0.0], [-0.4, 0.0]], ("A", "B", "C"))
        split = bipartition(emb)
        assert "B" in split.positive
        assert split.boundary == ("B",)

    def test_invariant_under_flow_scaling(self):
        flow = two_clique_flow(5, 5)
        base = bipartition(compose_map(flow, k=1))
        scaled_flow = FlowMatrix(flow.roster, flow.values * 1e6)
        scaled = bipartition(compose_map(scaled_flow, k=1))
        assert set(base.positive) == set(scaled.positive)
        assert set(base.negative) == set(scaled.negative)


class TestProcrustesAlign:
    def test_identity_target(self):
        rng = np.random.default_rng(40)
        emb = random_embedding(rng, 10)
        aligned, disparity = procrustes_align(emb, emb)
        assert disparity <= 1e-20
        assert np.allclose(aligned.coordinates, emb.coordinates, atol=1e-12)

    def test_rotation_is_undone(self):
        rng = np.random.default_rng(41)
        emb = random_embedding(rng, 12)
        theta = np.pi / 2.0
        rotation = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        rotated = emb_of(emb.coordinates @ rotation)
        aligned, disparity = procrustes_align(emb, rotated)
        assert disparity <= 1e-10
        assert np.max(np.abs(aligned.coordinates - emb.coordinates)) <= 1e-7

    def test_any_orthogonal_transform_gives_zero_disparity(self):
        rng = np.random.default_rng(42)
        emb = random_embedding(rng, 15)
        for _ in range(10):
            q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
            transformed = emb_of(emb.coordinates @ q)
            _, disparity = procrustes_align(emb, transformed)
            assert disparity <= 1e-10

    def test_noise_bound_monte_carlo(self):
        # Identity is a feasible transform, so the optimum never exceeds
        # the raw noise energy n * eps^2; allow 10% numerical slack.
        rng = np.random.default_rng(43)
        n, eps = 20, 1e-3
        for _ in range(100):
            emb = random_embedding(rng, n)
            direction = rng.normal(size=(n, 2))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            noisy = emb_of(emb.coordinates + eps * direction)
            _, disparity = procrustes_align(emb, noisy)
            assert disparity <= 1.1 * n * eps * eps

    def test_roster_mismatch_lists_difference(self):
        first = emb_of(np.zeros((3, 2)), ("A", "B", "C"))
        second = emb_of(np.zeros((3, 2)), ("A", "B", "D"))
        with pytest.raises(RosterMismatchError, match="C.*D"):
            procrustes_align(first, second)

    def test_scaling_option(self):
        rng = np.random.default_rng(44)
        emb = random_embedding(rng, 10)
        shrunk = emb_of(emb.coordinates * 0.25)
        _, without = procrustes_align(emb, shrunk)
        _, with_scale = procrustes_align(emb, shrunk, allow_scaling=True)
        assert with_scale <= 1e-20
        assert without > with_scale

    def test_reflection_can_be_forbidden(self):
        rng = np.random.default_rng(45)
        emb = random_embedding(rng, 10)
        reflected = emb_of(emb.coordinates * np.array([-1.0, 1.0]))
        aligned_free, disparity_free = procrustes_align(emb, reflected)
        assert disparity_free <= 1e-10
        _, disparity_rot = procrustes_align(
            emb, reflected, allow_reflection=False
        )
        assert disparity_rot > disparity_free
        assert aligned_free.k == 2
