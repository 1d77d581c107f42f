import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actsearch.dataset import generate
from actsearch.errors import ConfigurationError, QueryError
from actsearch.oracle import OracleMode, Space, brute_classify, brute_knn
from actsearch.raster import (
    Metric,
    PixelCoord,
    collision_free,
    grid_config,
    neighbor_order_key,
    pixel_of,
    pixels_of,
    rasterize,
)
from actsearch.search import (
    SearchParams,
    Termination,
    active_knn,
    classify,
    classify_many,
    collect_in_circle,
    count_in_circle,
    update_radius,
)
from tests.conftest import pixel_grid

TRIANGLE = [(0, 0, 0), (3, 4, 0), (6, 8, 0)]


@pytest.mark.parametrize(
    "r, n, k, expected",
    [(100, 11, 11, 100), (100, 44, 11, 50), (100, 25, 11, 66), (1, 4, 9, 2), (1, 1000, 1, 1)],
)
def test_update_radius(r, n, k, expected):
    assert update_radius(r, n, k) == expected


def test_update_radius_rejects_empty_circle():
    with pytest.raises(ValueError):
        update_radius(10, 0, 3)


@given(
    st.integers(min_value=1, max_value=6000),
    st.integers(min_value=1, max_value=10_000),
    st.integers(min_value=1, max_value=100),
)
@settings(max_examples=2000)
def test_update_radius_properties(r, n, k):
    assert update_radius(r, k, k) == r
    updated = update_radius(r, n, k)
    assert updated >= 1
    if n < k:
        assert updated >= r
    if n > k:
        assert updated <= r


def test_update_radius_random_triples():
    rng = np.random.default_rng(2024)
    rs = rng.integers(1, 6001, size=10_000)
    ns = rng.integers(1, 10_001, size=10_000)
    ks = rng.integers(1, 101, size=10_000)
    for r, n, k in zip(rs.tolist(), ns.tolist(), ks.tolist()):
        assert update_radius(r, k, k) == r
        updated = update_radius(r, n, k)
        assert updated >= 1
        assert (n >= k or updated >= r) and (n <= k or updated <= r)


def test_search_params_validation():
    with pytest.raises(ConfigurationError):
        SearchParams(k=0)
    with pytest.raises(ConfigurationError):
        SearchParams(r0=0)
    with pytest.raises(ConfigurationError):
        SearchParams(max_iters=0)


def test_count_in_circle_empty_grid():
    grid = pixel_grid([], 20)
    assert count_in_circle(grid, PixelCoord(5, 5), 7).tolist() == [0]


def test_count_in_circle_l2_includes_boundary():
    grid = pixel_grid(TRIANGLE, 10)
    assert count_in_circle(grid, PixelCoord(0, 0), 5, Metric.L2).sum() == 2


def test_count_in_circle_l1():
    grid = pixel_grid(TRIANGLE, 10)
    assert count_in_circle(grid, PixelCoord(0, 0), 5, Metric.L1).sum() == 1


def test_count_in_circle_radius_zero():
    grid = pixel_grid([(2, 2, 0), (2, 2, 1), (2, 3, 0)], 6, num_classes=2)
    assert count_in_circle(grid, PixelCoord(2, 2), 0).tolist() == [1, 1]


def test_count_in_circle_rejects_outside_center():
    grid = pixel_grid(TRIANGLE, 10)
    with pytest.raises(QueryError):
        count_in_circle(grid, PixelCoord(10, 0), 3)


def test_collect_in_circle_mirrors_counts():
    grid = pixel_grid(TRIANGLE, 10)
    l2 = collect_in_circle(grid, PixelCoord(0, 0), 5, Metric.L2)
    assert [(h.pixel, h.count, h.distance) for h in l2] == [
        (PixelCoord(0, 0), 1, 0.0),
        (PixelCoord(3, 4), 1, 5.0),
    ]
    l1 = collect_in_circle(grid, PixelCoord(0, 0), 5, Metric.L1)
    assert [h.pixel for h in l1] == [PixelCoord(0, 0)]
    assert collect_in_circle(pixel_grid([], 10), PixelCoord(0, 0), 5) == []


def test_collect_in_circle_carries_ids():
    grid = pixel_grid([(4, 4, 1), (4, 4, 0), (5, 4, 1)], 10, num_classes=2, keep_buckets=True)
    hits = collect_in_circle(grid, PixelCoord(4, 4), 1)
    assert [(h.pixel, h.label, h.point_ids) for h in hits] == [
        (PixelCoord(4, 4), 0, (1,)),
        (PixelCoord(4, 4), 1, (0,)),
        (PixelCoord(5, 4), 1, (2,)),
    ]


def _random_grid(seed, metric=Metric.L2, resolution=64, n=150, classes=3):
    ds = generate(n, classes, seed)
    return rasterize(ds, grid_config(ds, resolution, metric))


def test_collect_is_sorted_and_consistent_with_count():
    rng = np.random.default_rng(0)
    for seed in range(30):
        metric = Metric.L1 if seed % 2 else Metric.L2
        grid = _random_grid(seed, metric)
        center = PixelCoord(int(rng.integers(64)), int(rng.integers(64)))
        r = int(rng.integers(0, 70))
        hits = collect_in_circle(grid, center, r)
        keys = [h.distance_key for h in hits]
        assert keys == sorted(keys)
        assert [h.distance for h in hits] == sorted(h.distance for h in hits)
        assert sum(h.count for h in hits) == count_in_circle(grid, center, r).sum()


def test_collect_order_matches_oracle_ordering_rule():
    # equidistant pixels on several rows, two classes sharing the centre pixel
    pixels = [(5, 8, 0), (8, 5, 1), (2, 5, 0), (5, 2, 1), (5, 5, 1), (5, 5, 0), (6, 6, 2)]
    grid = pixel_grid(pixels, 11, num_classes=3)
    hits = collect_in_circle(grid, PixelCoord(5, 5), 3)
    assert [(h.pixel, h.label) for h in hits] == [
        (PixelCoord(5, 5), 0),
        (PixelCoord(5, 5), 1),
        (PixelCoord(6, 6), 2),
        (PixelCoord(5, 2), 1),
        (PixelCoord(2, 5), 0),
        (PixelCoord(8, 5), 1),
        (PixelCoord(5, 8), 0),
    ]
    expected = sorted(
        hits, key=lambda h: neighbor_order_key(h.distance_key, h.pixel.row, h.pixel.col, h.label)
    )
    assert hits == expected


def _scan_all_pixels(grid, center, r, metric):
    """Reference count that visits every pixel of the grid."""
    cols, rows = np.meshgrid(np.arange(grid.resolution), np.arange(grid.resolution))
    dx, dy = cols - center.col, rows - center.row
    if metric == Metric.L1:
        inside = np.abs(dx) + np.abs(dy) <= r
    else:
        inside = dx * dx + dy * dy <= r * r
    return grid.counts[:, inside].sum(axis=1)


def test_row_span_count_matches_full_pixel_scan():
    rng = np.random.default_rng(1)
    for seed in range(40):
        metric = Metric.L1 if seed % 3 == 0 else Metric.L2
        grid = _random_grid(seed, metric, resolution=48, n=400)
        center = PixelCoord(int(rng.integers(48)), int(rng.integers(48)))
        r = int(rng.integers(0, 60))
        expected = _scan_all_pixels(grid, center, r, metric)
        assert count_in_circle(grid, center, r).tolist() == expected.tolist()


def test_count_is_monotone_in_radius_and_l1_within_l2():
    rng = np.random.default_rng(5)
    for seed in range(1000):
        grid = _random_grid(seed, resolution=24, n=int(rng.integers(1, 120)))
        center = PixelCoord(int(rng.integers(24)), int(rng.integers(24)))
        previous = -1
        for r in range(0, 34, 3):
            l2 = count_in_circle(grid, center, r, Metric.L2).sum()
            l1 = count_in_circle(grid, center, r, Metric.L1).sum()
            assert l2 >= previous
            assert l1 <= l2
            previous = l2


def test_exact_k_in_one_iteration():
    grid = pixel_grid([(50, 50, 0), (52, 50, 0), (50, 47, 0)], 100)
    cfg = grid.config
    result = active_knn(grid, (50.5, 49.5), SearchParams(k=3, r0=10))
    assert pixel_of(cfg, 50.5, 49.5) == PixelCoord(50, 50)
    assert result.trace.terminated_by == Termination.EXACT_K
    assert len(result.trace.steps) == 1
    assert result.multiplicity == 3


def test_sparse_style_query_returns_pixel_nearest(sparse_dataset):
    ds = sparse_dataset
    cfg = grid_config(ds, 300)
    grid = rasterize(ds, cfg, keep_buckets=True)
    cols, rows = pixels_of(cfg, ds.xs, ds.ys)
    for i in range(len(ds)):
        center = PixelCoord(int(cols[i]), int(rows[i]))
        expected = sorted(
            range(len(ds)),
            key=lambda j: (
                (cols[j] - center.col) ** 2 + (rows[j] - center.row) ** 2,
                rows[j],
                cols[j],
                j,
            ),
        )[:3]
        result = active_knn(grid, (ds.xs[i], ds.ys[i]), SearchParams(k=3, r0=100))
        assert result.point_ids[0] == i
        assert sorted(result.point_ids) == sorted(expected)


def test_bracketed_ring_tie_uses_row_major_order():
    ring = [(20, 15, 0), (15, 20, 0), (25, 20, 0), (20, 25, 0)]
    grid = pixel_grid(ring, 41, keep_buckets=True)
    result = active_knn(grid, (20.5, 20.5), SearchParams(k=2, r0=3))
    assert result.trace.terminated_by == Termination.BRACKETED
    assert result.trace.final_radius == 5
    assert [n.pixel for n in result.neighbors] == [PixelCoord(20, 15), PixelCoord(15, 20)]
    assert result.multiplicity == 2


def test_shared_pixel_is_split_in_id_order():
    grid = pixel_grid([(5, 5, 1), (5, 5, 0), (5, 5, 1)], 11, num_classes=2, keep_buckets=True)
    result = active_knn(grid, (5.5, 5.5), SearchParams(k=2, r0=1))
    assert result.multiplicity == 2
    assert sorted(result.point_ids) == [0, 1]
    assert result.votes == (1, 1)
    assert result.predicted_class == 0


def test_shared_pixel_without_buckets_splits_by_class():
    grid = pixel_grid([(5, 5, 1), (5, 5, 0), (5, 5, 1)], 11, num_classes=2)
    result = active_knn(grid, (5.5, 5.5), SearchParams(k=2, r0=4))
    assert result.votes == (1, 1)
    assert result.point_ids is None


def test_empty_circle_doubles_radius():
    grid = pixel_grid([(0, 0, 0)], 200)
    result = active_knn(grid, (150.5, 49.5), SearchParams(k=1, r0=1))
    radii = result.trace.radii
    assert radii[:4] == [1, 2, 4, 8]
    assert result.neighbors[0].pixel == PixelCoord(0, 0)


def test_iteration_cap_is_flagged_but_returns_k():
    ds = generate(500, 3, seed=8)
    grid = rasterize(ds, grid_config(ds, 400))
    result = active_knn(grid, (0.5, 0.5), SearchParams(k=11, r0=1, max_iters=1))
    assert result.trace.terminated_by == Termination.ITERATION_CAP
    assert result.multiplicity == 11


def test_trace_counts_are_reproducible():
    ds = generate(2000, 3, seed=10)
    grid = rasterize(ds, grid_config(ds, 1000))
    for x, y in [(0.1, 0.1), (0.5, 0.5), (0.93, 0.2)]:
        result = active_knn(grid, (x, y), SearchParams(k=11, r0=100))
        for step in result.trace.steps:
            assert count_in_circle(grid, result.query_pixel, step.radius).sum() == step.count
        assert result.multiplicity == 11
        distances = [n.distance for n in result.neighbors]
        assert distances == sorted(distances)


def test_k_larger_than_points():
    grid = pixel_grid(TRIANGLE, 10)
    with pytest.raises(QueryError, match="k=4"):
        active_knn(grid, (1.0, 1.0), SearchParams(k=4))


def test_non_finite_query():
    grid = pixel_grid(TRIANGLE, 10)
    with pytest.raises(QueryError):
        active_knn(grid, (float("nan"), 1.0), SearchParams(k=1))


def test_classify_unanimous():
    grid = pixel_grid([(3, 3, 2), (4, 3, 2), (3, 4, 2), (9, 9, 0)], 12, num_classes=3)
    label, result = classify(grid, (3.5, 8.5), SearchParams(k=3, r0=2))
    assert label == 2
    assert result.votes == (0, 0, 3)


def test_classify_tie_goes_to_lowest_class():
    grid = pixel_grid([(3, 3, 2), (5, 3, 0)], 12, num_classes=3)
    label, _ = classify(grid, (4.5, 8.5), SearchParams(k=2, r0=1))
    assert label == 0


def _collision_free_instance(rng, n, classes, metric):
    for resolution in (512, 1024, 2048, 4096):
        ds = generate(n, classes, int(rng.integers(2**32)))
        cfg = grid_config(ds, resolution, metric)
        cols, rows = pixels_of(cfg, ds.xs, ds.ys)
        if len(np.unique(rows * resolution + cols)) == n:
            return ds, cfg
    pytest.fail("no collision-free resolution found")


def test_matches_pixel_oracle_on_random_instances():
    rng = np.random.default_rng(99)
    for instance in range(200):
        k = (1, 3, 11)[instance % 3]
        metric = Metric.L1 if instance % 5 == 0 else Metric.L2
        ds, cfg = _collision_free_instance(rng, int(rng.integers(k, 501)), 3, metric)
        grid = rasterize(ds, cfg, keep_buckets=True)
        assert collision_free(grid)
        params = SearchParams(k=k, r0=int(rng.integers(1, 200)), metric=metric)
        mode = OracleMode(Space.PIXEL, metric)
        for _ in range(3):
            query = (rng.uniform(-0.05, 1.05), rng.uniform(-0.05, 1.05))
            result = active_knn(grid, query, params)
            expected = brute_knn(ds, query, k, mode, cfg)
            assert result.point_ids == [nb.index for nb in expected]
            assert result.predicted_class == brute_classify(ds, query, k, mode, cfg)


def test_classify_many_matches_single_queries():
    ds = generate(1000, 3, seed=12)
    grid = rasterize(ds, grid_config(ds, 600))
    queries = np.array([[0.2, 0.3], [0.7, 0.7], [0.5, 0.05]])
    params = SearchParams(k=5)
    expected = [classify(grid, tuple(q), params)[0] for q in queries]
    assert classify_many(grid, queries, params).tolist() == expected
