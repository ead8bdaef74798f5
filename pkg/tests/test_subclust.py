import math

import numpy as np
import pytest

from contactlab import (
    EmptyData,
    GaussianMf,
    SubclustParams,
    TskModel,
    calibrate_radius,
    rules_from_clusters,
    subtractive_cluster,
)
from contactlab.anfis import infer


def chiu_reference(data, params):
    """Plain-loop replication of the potential-subtraction selection.

    Returns (selected row indices, list of potential arrays after each
    revision) so tests can check both the choices and the monotonicity of
    the revisions.
    """
    pts = np.atleast_2d(np.asarray(data, dtype=float))
    n_pts = pts.shape[0]
    alpha = 4.0 / params.radius**2
    beta = 4.0 / (params.squash * params.radius) ** 2

    def argmax_first(values):
        best, best_v = 0, values[0]
        for i in range(1, n_pts):
            if values[i] > best_v:
                best, best_v = i, values[i]
        return best

    p = np.array(
        [sum(math.exp(-alpha * float(np.sum((pts[i] - pts[j]) ** 2))) for j in range(n_pts))
         for i in range(n_pts)]
    )
    first = argmax_first(p)
    p1 = p[first]
    selected = [first]
    revisions = []
    last_v = p1
    while True:
        dist2 = np.sum((pts - pts[selected[-1]]) ** 2, axis=1)
        p = p - last_v * np.exp(-beta * dist2)
        revisions.append(p.copy())
        while True:
            cand = argmax_first(p)
            v = p[cand]
            if v >= params.accept_ratio * p1:
                break
            if v < params.reject_ratio * p1:
                return selected, revisions
            dmin = math.sqrt(
                min(float(np.sum((pts[cand] - pts[s]) ** 2)) for s in selected)
            )
            if dmin / params.radius + v / p1 >= 1.0:
                break
            p[cand] = 0.0
        selected.append(cand)
        last_v = v


def two_blobs(rng, n_each=50, jitter=0.1):
    a = rng.normal(0.0, jitter, size=(n_each, 2))
    b = np.array([10.0, 10.0]) + rng.normal(0.0, jitter, size=(n_each, 2))
    return np.vstack([a, b])


class TestSubclustParams:
    def test_radius_positive(self):
        with pytest.raises(ValueError):
            SubclustParams(radius=0.0)

    def test_squash_at_least_one(self):
        with pytest.raises(ValueError):
            SubclustParams(radius=1.0, squash=0.9)

    def test_ratio_ordering(self):
        with pytest.raises(ValueError):
            SubclustParams(radius=1.0, accept_ratio=0.2, reject_ratio=0.4)


class TestSubtractiveCluster:
    def test_repeated_point_gives_one_center(self):
        data = np.tile([1.5, -2.0], (10, 1))
        centers = subtractive_cluster(data, SubclustParams(radius=1.0))
        np.testing.assert_array_equal(centers, [[1.5, -2.0]])

    def test_empty_data(self):
        with pytest.raises(EmptyData):
            subtractive_cluster([], SubclustParams(radius=1.0))

    def test_two_blobs_two_centers(self):
        rng = np.random.default_rng(30)
        data = two_blobs(rng)
        centers = subtractive_cluster(data, SubclustParams(radius=2.0))
        assert centers.shape == (2, 2)
        means = np.array([data[:50].mean(axis=0), data[50:].mean(axis=0)])
        for mean in means:
            d = np.min(np.linalg.norm(centers - mean, axis=1))
            assert d < 0.5

    def test_centers_are_data_members(self):
        rng = np.random.default_rng(31)
        data = rng.uniform(-3, 3, size=(60, 3))
        centers = subtractive_cluster(data, SubclustParams(radius=1.5))
        for c in centers:
            assert np.any(np.all(data == c, axis=1))

    def test_matches_reference_selection(self):
        rng = np.random.default_rng(32)
        params = SubclustParams(radius=1.2)
        for _ in range(5):
            data = rng.uniform(-4, 4, size=(40, 2))
            got = subtractive_cluster(data, params)
            idx, _ = chiu_reference(data, params)
            np.testing.assert_allclose(got, data[idx], rtol=0, atol=0)

    def test_first_center_has_max_potential(self):
        rng = np.random.default_rng(33)
        data = rng.uniform(-2, 2, size=(50, 2))
        params = SubclustParams(radius=1.0)
        centers = subtractive_cluster(data, params)
        alpha = 4.0 / params.radius**2
        pots = [
            sum(math.exp(-alpha * float(np.sum((p - q) ** 2))) for q in data)
            for p in data
        ]
        np.testing.assert_array_equal(centers[0], data[int(np.argmax(pots))])

    def test_revisions_never_raise_potential(self):
        rng = np.random.default_rng(34)
        data = rng.uniform(-4, 4, size=(40, 2))
        params = SubclustParams(radius=1.2)
        _, revisions = chiu_reference(data, params)
        before = None
        for p in revisions:
            if before is not None:
                # zeroed compromise points may only drop further
                assert np.all(p <= before + 1e-12)
            before = p

    def test_count_non_increasing_in_radius(self):
        rng = np.random.default_rng(35)
        data = rng.uniform(-5, 5, size=(80, 2))
        radii = np.linspace(0.3, 4.0, 10)
        counts = [
            len(subtractive_cluster(data, SubclustParams(radius=float(r))))
            for r in radii
        ]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_one_dimensional_input(self):
        data = np.array([0.0, 0.1, 0.05, 5.0, 5.1])
        centers = subtractive_cluster(data, SubclustParams(radius=1.0))
        assert centers.shape[1] == 1
        assert centers.shape[0] == 2


class TestRulesFromClusters:
    def test_single_center_at_origin(self):
        data = np.array([[0.0, 0.0], [1.0, 1.0], [-1.0, 0.5]])
        targets = np.array([1.0, 2.0, 0.0])
        model = rules_from_clusters(np.zeros((1, 2)), data, targets, radius=2.0)
        assert model.m == 1
        mfs = model.rules[0].antecedents
        assert mfs[0].c == 0.0 and mfs[1].c == 0.0
        np.testing.assert_allclose(mfs[0].sigma, 2.0 / math.sqrt(8.0), rtol=1e-15)

    def test_infer_near_cluster_means(self):
        rng = np.random.default_rng(36)
        data = two_blobs(rng, n_each=40, jitter=0.15)
        targets = np.concatenate([np.full(40, 1.0), np.full(40, 3.0)])
        centers = subtractive_cluster(data, SubclustParams(radius=2.0))
        model = rules_from_clusters(centers, data, targets, radius=2.0)
        for center, want in ((data[:40].mean(axis=0), 1.0), (data[40:].mean(axis=0), 3.0)):
            got = infer(model, center)
            assert abs(got - want) <= 0.1 * want

    def test_standardized_space_round_trip(self):
        rng = np.random.default_rng(37)
        raw = np.column_stack([rng.uniform(0, 1000, 50), rng.uniform(-0.01, 0.01, 50)])
        targets = (raw[:, 0] > 500).astype(float) * 2.0
        means, stds = raw.mean(axis=0), raw.std(axis=0)
        z = (raw - means) / stds
        centers = subtractive_cluster(z, SubclustParams(radius=1.0))
        model = rules_from_clusters(
            centers, raw, targets, radius=1.0, standardization=(means, stds)
        )
        preds = np.array([infer(model, x) for x in raw])
        assert np.sqrt(np.mean((preds - targets) ** 2)) < 0.5


class TestCalibrateRadius:
    def test_hits_exact_count(self):
        rng = np.random.default_rng(38)
        data = rng.uniform(-5, 5, size=(70, 2))
        for target in (2, 4, 7):
            radius, centers = calibrate_radius(data, target)
            assert len(centers) == target
            rerun = subtractive_cluster(data, SubclustParams(radius=radius))
            assert len(rerun) >= target
            np.testing.assert_array_equal(rerun[:target], centers)

    def test_deterministic(self):
        rng = np.random.default_rng(39)
        data = rng.uniform(-5, 5, size=(60, 2))
        r1, c1 = calibrate_radius(data, 5)
        r2, c2 = calibrate_radius(data, 5)
        assert r1 == r2
        np.testing.assert_array_equal(c1, c2)

    def test_target_validation(self):
        with pytest.raises(ValueError):
            calibrate_radius(np.zeros((5, 2)), 0)
