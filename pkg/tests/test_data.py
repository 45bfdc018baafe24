import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpadmm import data, network


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_two_points(tmp_path):
    p = write(tmp_path, "a.csv", "0.5,0.5,+1\n-0.5,0.0,-1\n")
    ds = data.load_dataset(p, "csv")
    assert len(ds) == 2 and ds.dim == 2
    np.testing.assert_array_equal(ds.y, [1, -1])
    np.testing.assert_allclose(ds.X, [[0.5, 0.5], [-0.5, 0.0]])


def test_empty_file_is_parse_error(tmp_path):
    with pytest.raises(data.ParseError):
        data.load_dataset(write(tmp_path, "e.csv", ""), "csv")


def test_column_mismatch(tmp_path):
    with pytest.raises(data.ParseError):
        data.load_dataset(write(tmp_path, "m.csv", "1,2,1\n1,0\n"), "csv")


def test_more_than_two_labels(tmp_path):
    with pytest.raises(data.LabelError):
        data.load_dataset(write(tmp_path, "l.csv", "1,a\n2,b\n3,c\n"), "csv")


def test_string_labels_smaller_maps_to_minus_one(tmp_path):
    ds = data.load_dataset(write(tmp_path, "s.csv", "1,>50K\n2,<=50K\n"), "csv")
    # "<" sorts before ">"
    np.testing.assert_array_equal(ds.y, [1, -1])


def test_libsvm_one_based(tmp_path):
    p = write(tmp_path, "a.svm", "+1 1:0.5 3:0.25\n-1 2:1.0\n")
    ds = data.load_dataset(p, "libsvm")
    np.testing.assert_allclose(ds.X, [[0.5, 0, 0.25], [0, 1.0, 0]])
    np.testing.assert_array_equal(ds.y, [1, -1])


def test_libsvm_zero_index_rejected(tmp_path):
    with pytest.raises(data.ParseError):
        data.load_dataset(write(tmp_path, "z.svm", "1 0:1.0\n"), "libsvm")


def test_normalize_single_vector():
    out = data.normalize(data.Dataset(np.array([[3.0, 4.0]]), np.array([1])))
    np.testing.assert_allclose(out.X, [[0.6, 0.8]])
    assert out.scale == 5.0


def test_normalize_identity_when_small():
    X = np.array([[0.1, 0.2], [0.0, -0.5]])
    out = data.normalize(data.Dataset(X, np.array([1, -1])))
    np.testing.assert_array_equal(out.X, X)
    assert out.scale == 1.0


def test_normalize_halves_max_norm_two():
    X = np.array([[2.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    out = data.normalize(data.Dataset(X, np.array([1, -1, 1])))
    np.testing.assert_allclose(out.X, X / 2)
    norms = np.linalg.norm(out.X, axis=1)
    assert norms.max() == pytest.approx(1.0)
    assert list(np.argsort(norms)) == list(np.argsort(np.linalg.norm(X, axis=1)))


@given(st.integers(1, 40), st.integers(1, 6), st.floats(0.1, 100), st.integers(0, 2**31))
def test_normalize_bound_property(n, d, scale, seed):
    X = np.random.default_rng(seed).standard_normal((n, d)) * scale
    out = data.normalize(data.Dataset(X, np.ones(n, dtype=int)))
    assert np.linalg.norm(out.X, axis=1).max() <= 1 + 1e-12


def test_partition_even_sizes():
    ds = data.Dataset(np.zeros((10, 2)), np.ones(10, dtype=int))
    parts = data.partition(ds, network.build_topology("ring", 4), seed=0)
    assert sorted(parts.sizes, reverse=True) == [3, 3, 2, 2]


def test_partition_single_node():
    ds = data.synthetic_dataset(7, 2, seed=0)
    parts = data.partition(ds, network.build_topology("complete", 1))
    assert parts.sizes == [7]


def test_partition_deterministic():
    ds = data.synthetic_dataset(30, 3, seed=2)
    g = network.build_topology("ring", 3)
    a, b = data.partition(ds, g, seed=5), data.partition(ds, g, seed=5)
    for x, y in zip(a, b):
        assert x.X.tobytes() == y.X.tobytes() and x.y.tobytes() == y.y.tobytes()


def test_partition_too_few_points():
    ds = data.synthetic_dataset(3, 2)
    with pytest.raises(data.DataError):
        data.partition(ds, network.build_topology("ring", 4))


@given(st.integers(1, 8), st.integers(0, 50), st.integers(0, 1000))
def test_partition_is_permutation(P, extra, seed):
    n = P + extra
    X = np.arange(n, dtype=float)[:, None] / n
    ds = data.Dataset(X, np.ones(n, dtype=int))
    parts = data.partition(ds, P, seed=seed)
    got = np.sort(np.concatenate([p.X[:, 0] for p in parts]))
    np.testing.assert_array_equal(got, np.sort(X[:, 0]))
    assert max(parts.sizes) - min(parts.sizes) <= 1


def test_partition_by_weights():
    ds = data.synthetic_dataset(100, 2, seed=0)
    parts = data.partition(ds, 3, strategy="by_weights", weights=[1, 2, 7])
    assert sum(parts.sizes) == 100 and parts.sizes[2] > parts.sizes[1] > parts.sizes[0] >= 1


def node(n=5, d=2, seed=0):
    ds = data.synthetic_dataset(n, d, seed=seed, separable=False)
    return data.NodeDataset(ds.X, ds.y)


def test_neighbor_with_itself_is_distance_zero():
    a = node()
    b = data.neighboring_dataset(a, 0, a.point(0))
    assert data.hamming_distance(a, b) == 0


def test_neighbor_distinct_is_distance_one():
    a = node()
    b = data.neighboring_dataset(a, 0, data.DataPoint(np.array([0.1, 0.1]), -a.y[0]))
    assert data.hamming_distance(a, b) == 1


def test_neighbor_every_index():
    a = node(8)
    rng = np.random.default_rng(1)
    for i in range(len(a)):
        x = rng.uniform(-0.5, 0.5, 2)
        b = data.neighboring_dataset(a, i, data.DataPoint(x, 1))
        diffs = [j for j in range(len(a)) if a.point(j) != b.point(j)]
        assert diffs == [i] and data.hamming_distance(a, b) == 1


def test_neighbor_errors():
    a = node()
    with pytest.raises(IndexError):
        data.neighboring_dataset(a, 5, a.point(0))
    with pytest.raises(data.DataError):
        data.neighboring_dataset(a, 0, data.DataPoint(np.array([2.0, 0.0]), 1))
    with pytest.raises(data.DataError):
        data.neighboring_dataset(a, 0, data.DataPoint(np.array([0.0, 0.0]), 0))


@given(st.integers(0, 10), st.integers(0, 2**31))
def test_hamming_counts_substitutions(k, seed):
    a = node(12, seed=3)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(a), size=k, replace=False)
    b = a
    for i in idx:
        b = data.neighboring_dataset(b, int(i), data.DataPoint(np.array([0.9, 0.0]) + 0.001 * i, 1))
    assert data.hamming_distance(a, b) == k


def test_hamming_size_mismatch():
    with pytest.raises(data.DataError):
        data.hamming_distance(node(4), node(5))


def test_node_dataset_invariants():
    with pytest.raises(data.DataError):
        data.NodeDataset(np.array([[2.0]]), np.array([1]))
    with pytest.raises(data.DataError):
        data.NodeDataset(np.array([[0.5]]), np.array([3]))
    with pytest.raises(data.DataError):
        data.NodeDataset(np.zeros((0, 2)), np.zeros(0))
