from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwfcm.dataset import Dataset
from cwfcm.distance import METRICS, DistanceSpec
from cwfcm.engine import (EmptyClusterError, FcmConfig, NonFiniteObjectiveError, check_partition,
                          fit, init_random, init_sf, min_max_normalize, objective, preset,
                          update_centers, update_memberships)
from cwfcm.evaluation import accuracy


def two_clouds(seed=0, n=20):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.uniform(-0.1, 0.1, (n, 2)), 10 + rng.uniform(-0.1, 0.1, (n, 2))])
    return Dataset(X, np.repeat([0, 1], n))


@given(st.integers(2, 60), st.integers(2, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_init_random_rows_sum_to_one(n, c, seed):
    if c > n:
        c = n
    mu = init_random(n, c, seed)
    assert mu.shape == (n, c)
    np.testing.assert_allclose(mu.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(mu >= 0)


def test_init_random_seeded():
    np.testing.assert_array_equal(init_random(30, 3, 7), init_random(30, 3, 7))
    assert not np.array_equal(init_random(30, 3, 7), init_random(30, 3, 8))


def test_init_random_requires_enough_points():
    with pytest.raises(ValueError):
        init_random(2, 3)


def test_init_sf_extremes_land_in_first_and_last_cluster(iris):
    mu = init_sf(iris, 3)
    sf = np.abs(iris.points).sum(axis=1)
    assert mu[sf.argmin()].argmax() == 0
    assert mu[sf.argmax()].argmax() == 2
    np.testing.assert_allclose(mu.sum(axis=1), 1.0, atol=1e-12)


def test_init_sf_orders_points_along_sf():
    X = np.arange(1.0, 11.0)[:, None]
    labels = init_sf(X, 2).argmax(axis=1)
    assert labels.tolist() == [0] * 5 + [1] * 5


@given(st.integers(0, 10_000), st.integers(2, 5))
@settings(max_examples=50, deadline=None)
def test_init_sf_row_stochastic(seed, c):
    X = np.random.default_rng(seed).normal(size=(25, 3))
    mu = init_sf(X, c)
    np.testing.assert_allclose(mu.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(mu > 0)


def test_init_sf_degenerate():
    with pytest.raises(ValueError, match="SF"):
        init_sf(np.array([[1.0, -2.0], [-2.0, 1.0], [3.0, 0.0]]), 2)


def test_update_centers_crisp():
    X = np.array([[0.0, 0.0], [2.0, 0.0], [9.0, 9.0]])
    mu = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(update_centers(X, mu), [[1, 0], [9, 9]])


def test_update_centers_uniform_memberships():
    X = np.random.default_rng(1).normal(size=(10, 3))
    V = update_centers(X, np.full((10, 4), 0.25))
    np.testing.assert_allclose(V, np.tile(X.mean(axis=0), (4, 1)))


def test_update_centers_hand_case():
    X = np.array([[0.0], [1.0], [5.0]])
    mu = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    # (1*0 + 1*1 + 0*5) / (1 + 1 + 0)
    assert update_centers(X, mu, 2.0)[0, 0] == pytest.approx(float(Fraction(1, 2)))


def test_update_centers_empty_cluster():
    with pytest.raises(EmptyClusterError, match="cluster 1"):
        update_centers(np.ones((3, 1)), np.array([[1.0, 0.0]] * 3))


def membership_oracle(row):
    # fuzziness 2: memberships proportional to 1 / d
    inv = [1 / Fraction(d) for d in row]
    return [x / sum(inv) for x in inv]


def test_memberships_symmetric():
    np.testing.assert_allclose(update_memberships([[1.0, 1.0]]), [[0.5, 0.5]])


def test_memberships_hand_case():
    expected = [float(x) for x in membership_oracle([1, 3])]
    assert expected == [0.75, 0.25]
    np.testing.assert_allclose(update_memberships([[1.0, 3.0]], 2.0), [expected], rtol=1e-15)


def test_memberships_coincident_center():
    np.testing.assert_array_equal(update_memberships([[0.0, 4.0]]), [[1.0, 0.0]])
    np.testing.assert_array_equal(update_memberships([[0.0, 4.0, 0.0]]), [[0.5, 0.0, 0.5]])


def test_memberships_other_fuzziness():
    # z = 3: weights d**(-1/2) -> (1, 1/2) -> (2/3, 1/3)
    np.testing.assert_allclose(update_memberships([[1.0, 4.0]], 3.0), [[2 / 3, 1 / 3]])


def test_memberships_tiny_and_huge_distances():
    mu = update_memberships([[1e-300, 1e-280], [1e300, 2e300]], 1.1)
    assert np.all(np.isfinite(mu))
    np.testing.assert_allclose(mu.sum(axis=1), 1.0)
    assert mu[0, 0] == pytest.approx(1.0)


def test_objective_cases():
    assert objective(np.full((3, 2), 0.5), np.zeros((3, 2))) == 0.0
    assert objective([[1.0]], [[4.0]], 2.0) == 4.0
    assert objective([[0.5, 0.5]], [[1.0, 3.0]], 2.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        objective(np.ones((2, 2)), np.ones((2, 3)))


@pytest.mark.parametrize("kind", METRICS)
@pytest.mark.parametrize("init", ["random", "sf"])
def test_separable_clouds_any_metric(kind, init):
    d = two_clouds()
    # squared Canberra is excluded at the origin, see the next test
    square = kind != "canberra"
    res = fit(d, FcmConfig(c=2, distance=DistanceSpec(kind), init=init, square_distance=square))
    assert accuracy(res.crisp_labels, d.labels)[1] == 0.0


@pytest.mark.parametrize("init", ["random", "sf"])
def test_squared_canberra_near_origin(init):
    # A coordinate whose sign differs from the center's contributes the maximal
    # term 1, so points straddling the origin sit at distance ~2 from their own
    # cloud's center, just beyond the ~1.98 to the far cloud.
    d = two_clouds()
    res = fit(d, FcmConfig(c=2, distance=DistanceSpec("canberra"), init=init))
    assert accuracy(res.crisp_labels, d.labels)[2] == 2
    shifted = d.with_points(d.points + 1.0)
    res = fit(shifted, FcmConfig(c=2, distance=DistanceSpec("canberra"), init=init))
    assert accuracy(res.crisp_labels, d.labels)[1] == 0.0


def test_cwfcm_reproduces_iris_error_count(iris):
    res = fit(iris, preset("cwfcm", 3))
    ar, er, mc, _ = accuracy(res.crisp_labels, iris.labels)
    assert mc == 4
    assert er == pytest.approx(2.667, abs=5e-4)
    assert res.iterations <= 16
    np.testing.assert_allclose(res.weights, [0.0728, 0, 1, 0.5534], atol=5e-4)


def test_fcm_iris_error_count(iris):
    outcomes = [accuracy(fit(iris, preset("fcm", 3, seed=s)).crisp_labels, iris.labels)[2]
                for s in range(10)]
    assert max(set(outcomes), key=outcomes.count) == 16


def test_run_result_fields(iris):
    res = fit(iris, preset("fcm", 3, seed=1))
    assert res.iterations == len(res.objective_trace) <= 100
    assert res.centers.shape == (3, 4)
    assert res.partition.shape == (150, 3)
    np.testing.assert_array_equal(res.crisp_labels, res.partition.argmax(axis=1))
    assert res.wall_time > 0
    assert res.converged
    assert abs(res.objective_trace[-1] - res.objective_trace[-2]) < 1e-5


def test_max_iter_caps_iterations(iris):
    res = fit(iris, preset("fcm", 3, max_iter=3, epsilon=1e-300))
    assert res.iterations == 3
    assert not res.converged


def test_callback_sees_every_iteration(iris):
    seen = []
    res = fit(iris, preset("cwfcm", 3), callback=lambda t, mu, v, p: seen.append((t, p)))
    assert [t for t, _ in seen] == list(range(1, res.iterations + 1))
    np.testing.assert_array_equal([p for _, p in seen], res.objective_trace)


def test_sf_runs_are_bit_reproducible(iris):
    a = fit(iris, preset("cwfcm", 3))
    b = fit(iris, preset("cwfcm", 3))
    assert a.objective_trace.tobytes() == b.objective_trace.tobytes()
    assert a.partition.tobytes() == b.partition.tobytes()


def test_row_permutation_permutes_labels(iris):
    perm = np.random.default_rng(3).permutation(iris.n_points)
    shuffled = Dataset(iris.points[perm], iris.labels[perm])
    a = fit(iris, preset("cwfcm", 3)).crisp_labels
    b = fit(shuffled, preset("cwfcm", 3)).crisp_labels
    np.testing.assert_array_equal(a[perm], b)


def test_euclidean_objective_never_increases():
    for seed in range(10):
        X = np.random.default_rng(seed).normal(size=(40, 3))
        res = fit(X, FcmConfig(c=3, seed=seed))
        assert np.all(np.diff(res.objective_trace) <= 1e-9)


@pytest.mark.parametrize("name,kind", [("cwfcm", "canberra"), ("fcm", "cityblock"),
                                        ("fcm", "minkowski"), ("fcm", "mahalanobis")])
def test_non_euclidean_runs_terminate(iris, name, kind):
    cfg = preset(name, 3, distance=kind, max_iter=100)
    res = fit(iris, cfg)
    assert res.iterations <= 100
    if res.converged:
        assert abs(res.objective_trace[-1] - res.objective_trace[-2]) < cfg.epsilon


def test_weights_computed_from_normalized_data(iris):
    res = fit(iris, preset("cwfcm", 3, normalize=True))
    X = min_max_normalize(iris.points)
    assert X.min() == 0 and X.max() == 1
    v = X.var(axis=0, ddof=1) / X.mean(axis=0)
    np.testing.assert_allclose(res.weights, (v - v.min()) / np.ptp(v))


def test_vmr_on_zero_mean_feature_fails():
    X = np.array([[1.0, -1.0], [2.0, 1.0], [3.0, -1.0], [4.0, 1.0]])
    with pytest.raises(ValueError, match="zero mean"):
        fit(X, FcmConfig(c=2, weight_scheme="vmr"))


@pytest.mark.filterwarnings("ignore:overflow")
def test_non_finite_objective_reports_iteration():
    X = np.array([[1e200, 0.0], [-1e200, 0.0], [0.0, 1e200], [0.0, -1e200]])
    with pytest.raises(NonFiniteObjectiveError, match="iteration 1"):
        fit(X, FcmConfig(c=2))


@pytest.mark.parametrize("kwargs", [dict(c=1), dict(c=2, fuzziness=1.0), dict(c=2, epsilon=0),
                                    dict(c=2, max_iter=0), dict(c=2, init="kmeans++"),
                                    dict(c=2, weight_scheme="gini")])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        FcmConfig(**kwargs)


def test_more_clusters_than_points():
    with pytest.raises(ValueError, match="clusters"):
        fit(np.ones((3, 1)) * [[1], [2], [3]], FcmConfig(c=4))


def test_presets():
    cw = preset("cwfcm", 3)
    assert (cw.distance.kind, cw.weight_scheme, cw.init, cw.square_distance) == (
        "canberra", "vmr", "sf", False)
    fcm = preset("fcm", 3, distance="minkowski", minkowski_p=4)
    assert (fcm.distance.kind, fcm.distance.minkowski_p, fcm.init) == ("minkowski", 4, "random")
    with pytest.raises(ValueError, match="preset"):
        preset("kmeans", 3)


def test_check_partition():
    check_partition(init_random(5, 2))
    with pytest.raises(ValueError):
        check_partition([[0.5, 0.6]])
