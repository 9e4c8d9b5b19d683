import numpy as np
import pytest

from kmixup.errors import (
    EmptyDatasetError,
    NonNumericFeatureError,
    ParameterError,
    PreconditionError,
    RaggedRowError,
)
from kmixup.synthetic import (
    ClusterGeometry,
    ClusterSpec,
    GENERATORS,
    gen_clusters,
    gen_four_bars,
    gen_manifold,
    gen_one_ring,
    gen_swiss_roll,
    line_cluster_spec,
    load_csv,
    random_cluster_spec,
    save_csv,
    simplex_cluster_spec,
    swiss_roll_curve,
    train_test_split,
    two_cluster_spec,
)


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_toy_generators_shape_and_determinism(name):
    gen = GENERATORS[name]
    a, b = gen(1000, seed=3), gen(1000, seed=3)
    assert len(a) == 1000 and a.d == 2 and a.c == 2
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert set(np.unique(a.labels)) == {0.0, 1.0}
    np.testing.assert_array_equal(a.labels.sum(1), 1.0)
    assert not np.array_equal(a.features, gen(1000, seed=4).features)


@pytest.mark.parametrize("n", [0, -3, 1, 2.5])
@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_toy_generators_reject_bad_n(name, n):
    with pytest.raises(ParameterError):
        GENERATORS[name](n)


class TestOneRing:
    @pytest.mark.parametrize("n", [1000, 999])
    def test_balanced(self, n):
        counts = gen_one_ring(n, seed=1).class_counts()
        assert abs(counts[0] - counts[1]) <= 1

    def test_noise_free_radii(self):
        ds = gen_one_ring(2000, noise=0.0, seed=2)
        r = np.linalg.norm(ds.features, axis=1)
        ring = r[ds.classes == 1]
        disk = r[ds.classes == 0]
        assert ring.min() >= 1.6 - 1e-12 and ring.max() <= 2.2 + 1e-12
        assert disk.max() <= 1.0 + 1e-12

    def test_bad_geometry(self):
        with pytest.raises(ParameterError):
            gen_one_ring(10, ring_inner=3.0, ring_outer=2.0)
        with pytest.raises(ParameterError):
            gen_one_ring(10, noise=-1.0)


def test_four_bars_alternate():
    ds = gen_four_bars(1000, noise=0.0, seed=0)
    for bar in range(4):
        xs = ds.features[ds.cluster_id == bar, 0]
        assert xs.min() >= bar * 1.0 and xs.max() <= bar * 1.0 + 0.5
        assert np.all(ds.classes[ds.cluster_id == bar] == bar % 2)


def test_swiss_roll_noise_free_on_curves():
    ds = gen_swiss_roll(1000, noise=0.0, seed=6)
    t, arm = ds.intrinsic[:, 0], ds.intrinsic[:, 1]
    np.testing.assert_allclose(ds.features, swiss_roll_curve(t, arm), atol=1e-12)
    assert np.all(ds.classes == arm)


class TestClusters:
    def test_single_cluster_in_ball(self):
        spec = ClusterSpec([[1.0, -2.0, 0.5]], [0.7], [1.0])
        ds = gen_clusters(spec, 500, seed=0)
        assert np.all(np.linalg.norm(ds.features - spec.centers[0], axis=1) <= 0.7 + 1e-12)

    def test_balanced_counts(self):
        ds = gen_clusters(two_cluster_spec(10.0), 10_000, seed=1)
        n0 = np.sum(ds.cluster_id == 0)
        assert abs(n0 - 5000) <= 3 * np.sqrt(10_000 / 4)

    def test_every_point_in_its_ball(self):
        spec = random_cluster_spec()
        ds = gen_clusters(spec, 2000, seed=2)
        d = np.linalg.norm(ds.features - spec.centers[ds.cluster_id], axis=1)
        assert np.all(d <= spec.radii[ds.cluster_id] + 1e-12)
        np.testing.assert_array_equal(ds.classes, spec.labels[ds.cluster_id])

    def test_separation(self):
        spec = line_cluster_spec(2, separation=10.0, radius=1.0)
        assert spec.is_separated()
        spec.require_separated()
        close = line_cluster_spec(2, separation=3.0, radius=1.0)
        assert not close.is_separated()
        with pytest.raises(PreconditionError):
            close.require_separated()

    def test_no_ambiguous_points_when_separated(self):
        spec = line_cluster_spec(4, separation=5.0, radius=1.0)
        ds = gen_clusters(spec, 1000, seed=3)
        d = np.linalg.norm(ds.features[:, None, :] - spec.centers[None], axis=2)
        np.testing.assert_array_equal(np.argmin(d, axis=1), ds.cluster_id)

    @pytest.mark.parametrize("w", [[0.5, 0.6], [1.2, -0.2], [1.0]])
    def test_invalid_weights(self, w):
        with pytest.raises(ParameterError):
            ClusterSpec([[0.0], [5.0]], 1.0, w)

    def test_geometry_epsilon(self):
        g = ClusterGeometry.from_spec(two_cluster_spec(10.0, R_A=1.0, R_B=0.5))
        assert g.D == pytest.approx(10.0)
        assert g.epsilon == pytest.approx(0.01)
        assert ClusterGeometry(4.0, 1.0, 2.0).epsilon == 0.25
        with pytest.raises(ParameterError):
            ClusterGeometry.from_spec(line_cluster_spec(3, 10.0))


class TestManifold:
    def test_circle_radius(self):
        ds = gen_manifold(1, 2, 512, seed=0, radius=1.5)
        np.testing.assert_allclose(np.linalg.norm(ds.features, axis=1), 1.5, atol=1e-9)

    def test_square_in_r5(self):
        ds = gen_manifold(2, 5, 300, seed=0)
        assert ds.d == 5
        np.testing.assert_array_equal(ds.features[:, 2:], 0.0)
        assert ds.features[:, :2].min() >= 0 and ds.features[:, :2].max() <= 1
        np.testing.assert_array_equal(ds.features[:, :2], ds.intrinsic)

    def test_deterministic(self):
        np.testing.assert_array_equal(gen_manifold(1, 3, 50, seed=8).features,
                                      gen_manifold(1, 3, 50, seed=8).features)

    @pytest.mark.parametrize("d, amb", [(3, 5), (0, 2), (1, 1)])
    def test_unsupported(self, d, amb):
        with pytest.raises(ParameterError):
            gen_manifold(d, amb, 10)


def test_stratified_split():
    ds = gen_one_ring(1000, seed=0)
    train, test = train_test_split(ds, 0.2, seed=1)
    assert len(train) == 800 and len(test) == 200
    np.testing.assert_array_equal(test.class_counts(), [100, 100])
    both = np.vstack([train.features, test.features])
    assert len(np.unique(both, axis=0)) == 1000


class TestCsv:
    def test_iris(self, iris_path):
        ds = load_csv(iris_path)
        assert (len(ds), ds.d, ds.c) == (150, 4, 3)
        np.testing.assert_array_equal(ds.class_counts(), [50, 50, 50])

    def test_single_row(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("a,b,label\n1.0,2.0,cat\n")
        ds = load_csv(str(p))
        assert (len(ds), ds.d, ds.c) == (1, 2, 1)
        assert ds.class_names == ["cat"]

    def test_first_appearance_order(self, tmp_path):
        p = tmp_path / "o.csv"
        p.write_text("x,y\n1,b\n2,a\n3,b\n")
        ds = load_csv(str(p))
        assert ds.class_names == ["b", "a"]
        np.testing.assert_array_equal(ds.classes, [0, 1, 0])

    def test_non_numeric_names_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x,y,label\n1,2,a\n3,oops,b\n")
        with pytest.raises(NonNumericFeatureError, match="row 3"):
            load_csv(str(p))

    def test_ragged(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("x,y,label\n1,2,a\n3,b\n")
        with pytest.raises(RaggedRowError, match="row 3"):
            load_csv(str(p))

    def test_empty(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("x,label\n")
        with pytest.raises(EmptyDatasetError):
            load_csv(str(p))

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(str(tmp_path / "nope.csv"))

    def test_round_trip(self, tmp_path):
        ds = gen_clusters(line_cluster_spec(3, 6.0), 40, seed=1)
        p = str(tmp_path / "c.csv")
        save_csv(ds, p)
        back = load_csv(p)
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.cluster_id, ds.cluster_id)
        np.testing.assert_array_equal(np.array(back.class_names)[back.classes],
                                      np.array(ds.class_names)[ds.classes])


def test_simplex_spec_equidistant():
    spec = simplex_cluster_spec(4, separation=6.0, radius=1.0)
    d = spec.center_distances()
    np.testing.assert_allclose(d[~np.eye(4, dtype=bool)], 6.0)
    assert spec.is_separated()
