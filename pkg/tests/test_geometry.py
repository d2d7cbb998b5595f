import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffront.errors import FrontError
from diffront.geometry import (
    DegenerateCurve, box_counting_dimension, box_counts, classify_phase, connected_clusters,
    edge_midpoint_radius, edges_in_annulus, extract_front, front_statistics, geometric_scales,
    radial_crossings, two_arm_edges,
)
from diffront.lattice import NEIGHBOR_OFFSETS, Region, embed
from diffront.percolation import PercolationSample, sample_bernoulli

from conftest import disk_sample


def _boundary_pairs(sample):
    """Occupied/vacant neighbour pairs, counting sites off the region as vacant."""
    occ = {tuple(z) for z in sample.region.sites()[sample.occupied[sample.region.mask]]}
    return sum((a + da, b + db) not in occ for a, b in occ for da, db in NEIGHBOR_OFFSETS)


def test_disk_front_length_and_radii(disk10):
    front = extract_front(disk10, inner_r=2.0)
    assert front.closed
    assert front.length == _boundary_pairs(disk10)
    assert abs(front.winding_number()) == 1
    st_ = front_statistics(front, 10.0)
    assert st_.max_outward <= 1.0 and st_.max_inward <= 1.0
    assert st_.length == front.length


def test_front_edges_have_occupied_inside(disk10):
    front = extract_front(disk10, 2.0)
    assert disk10.occupied[disk10.region.mask].sum() > 0
    for z in front.occupied:
        assert disk10.status(tuple(z)) is True
    for z in front.vacant:
        assert disk10.status(tuple(z)) in (False, None)


def test_all_vacant_has_no_front():
    reg = Region.disk(10)
    with pytest.raises(FrontError):
        extract_front(PercolationSample(reg, np.zeros(reg.shape, bool)), 1.0)


def test_hole_inside_is_ignored():
    s = disk_sample(10, 20)
    occ = np.array(s.occupied)
    reg = s.region
    occ[-reg.a0 + 3, -reg.b0] = False          # an enclosed lake does not touch the front
    with_lake = extract_front(PercolationSample(reg, occ), 2.0)
    assert with_lake.edge_set() == extract_front(s, 2.0).edge_set()


def test_front_invariant_under_region_enlargement():
    small = sample_bernoulli(lambda A, B: (A * A + A * B + B * B <= 64).astype(float) * 0.8,
                             Region.disk(12), 9)
    # copy the configuration into a bigger region, with extra random junk outside radius 12
    big_reg = Region.disk(20)
    occ = sample_bernoulli(0.6, big_reg, 1).occupied.copy()
    A, B = big_reg.coords()
    inside = A * A + A * B + B * B <= 144
    occ[inside] = False
    ia = A[inside] - small.region.a0
    ib = B[inside] - small.region.b0
    occ[inside] = small.occupied[ia, ib]
    big = PercolationSample(big_reg, occ)
    try:
        f1 = extract_front(small, 1.0, outer_r=12)
    except FrontError:
        with pytest.raises(FrontError):
            extract_front(big, 1.0, outer_r=12)
        return
    f2 = extract_front(big, 1.0, outer_r=12)
    assert f1.edge_set() == f2.edge_set()


def test_two_arm_matches_front_on_disk(disk10):
    front = extract_front(disk10, 2.0)
    arms = two_arm_edges(disk10, (8.0, 12.0), 5.0, 15.0)
    assert arms == edges_in_annulus(front.edges, 8.0, 12.0)
    assert len(arms) == front.length


def test_two_arm_empty_when_full():
    reg = Region.disk(12)
    s = PercolationSample(reg, reg.mask.copy())
    # the only vacant sites are the padding beyond radius 12
    assert two_arm_edges(s, (4.0, 6.0), 2.0, 13.0) == set()


def test_two_arm_argument_order(disk10):
    with pytest.raises(ValueError):
        two_arm_edges(disk10, (8.0, 12.0), 9.0, 15.0)


def test_edge_midpoints():
    edges = np.array([[0, 0, k] for k in range(3)])
    r = edge_midpoint_radius(edges)
    assert np.allclose(r, [0.5, 0.5, math.sqrt(3) / 2])


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_two_arm_subset_of_front_when_localized(seed):
    # a noisy disk: the two-arm edges in the middle band always lie on the front
    s = sample_bernoulli(lambda A, B: np.where(A * A + A * B + B * B <= 100, 0.9, 0.1),
                         Region.disk(20), seed)
    try:
        front = extract_front(s, 3.0)
    except FrontError:
        return
    r = front.radii()
    if r.min() < 6.0 or r.max() > 16.0:
        return
    arms = two_arm_edges(s, (6.5, 15.5), 5.0, 17.0)
    assert arms <= front.edge_set()


def test_clusters_ring_and_singletons():
    reg = Region.disk(10)
    A, B = reg.coords()
    n2 = A * A + A * B + B * B
    ring = (n2 >= 16) & (n2 <= 25)
    rep = connected_clusters(PercolationSample(reg, ring))
    assert rep.count == 1 and rep.origin_id is None
    assert rep.sizes[0] == ring.sum()
    assert 8.0 * math.cos(math.pi / 12) <= rep.max_diameter <= 10.0
    single = np.zeros(reg.shape, bool)
    for a, b in [(0, 0), (3, 0), (0, 3), (-3, 0)]:
        single[a - reg.a0, b - reg.b0] = True
    rep = connected_clusters(PercolationSample(reg, single))
    assert rep.count == 4
    assert np.all(rep.sizes == 1)
    assert np.all(rep.diameters == 0)
    assert rep.origin_id == 1 + sorted([(0, 0), (3, 0), (0, 3), (-3, 0)]).index((0, 0))


def test_clusters_empty():
    reg = Region.disk(5)
    rep = connected_clusters(PercolationSample(reg, np.zeros(reg.shape, bool)))
    assert rep.count == 0 and rep.max_diameter == 0.0 and rep.origin_id is None


def test_cluster_diameter_of_row():
    reg = Region.parallelogram(0, 20, 0, 4)
    occ = np.zeros(reg.shape, bool)
    occ[0:11, 2] = True
    rep = connected_clusters(PercolationSample(reg, occ))
    assert rep.count == 1
    assert rep.max_diameter == pytest.approx(10.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), p=st.floats(0.05, 0.7))
def test_cluster_diameter_lower_bounds_true(seed, p):
    reg = Region.disk(7)
    s = sample_bernoulli(p, reg, seed)
    rep = connected_clusters(s)
    A, B = reg.coords()
    x, y = embed(A.astype(float), B.astype(float))
    for k in range(1, rep.count + 1):
        sel = rep.labels == k
        pts = np.stack([x[sel], y[sel]], axis=1)
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1)).max()
        assert d * math.cos(math.pi / 12) - 1e-9 <= rep.diameters[k - 1] <= d + 1e-9
    assert rep.sizes.sum() == s.occupied.sum()


def test_classify_phase(disk10):
    n = 100
    dense = classify_phase(n, 10, disk10, c=4.0)
    assert dense.verdict == "dense"
    assert dense.max_diameter >= 20
    # c large enough to swallow the disk
    assert classify_phase(n, 10, disk10, c=20.0).verdict == "dilute"
    with pytest.raises(ValueError):
        classify_phase(n, 10, disk10, c=0.0)


def test_radial_crossings(disk10):
    assert radial_crossings(disk10, 5, 4) == [True] * 4
    assert radial_crossings(disk10, 16, 4) == [False] * 4


def test_box_dimension_straight_line():
    line = np.array([[0.0, 0.0], [1000.0, 0.0]])
    fit = box_counting_dimension(line, geometric_scales(1, 100, 6))
    assert abs(fit.slope - 1.0) < 0.05


def test_box_dimension_space_filling():
    # rows at unit spacing filling the half-open square [0, 256)^2
    m, top = 256, 255.9
    rows = []
    for i in range(m):
        xs = (0.0, top) if i % 2 == 0 else (top, 0.0)
        rows += [[xs[0], float(i)], [xs[1], float(i)]]
    path = np.array(rows)
    fit = box_counting_dimension(path, geometric_scales(2, 64, 6), min_decades=1.5)
    assert abs(fit.slope - 2.0) < 0.1


def test_box_counts_monotone():
    rng = np.random.default_rng(0)
    walk = np.cumsum(rng.normal(size=(2000, 2)), axis=0)
    counts = box_counts(walk, [1, 2, 4, 8, 16])
    assert np.all(np.diff(counts) <= 0)


def test_box_dimension_errors():
    line = np.array([[0.0, 0.0], [10.0, 0.0]])
    with pytest.raises(ValueError):
        box_counting_dimension(line, [1, 2, 3])
    with pytest.raises(ValueError):
        box_counting_dimension(line, geometric_scales(1, 4, 5))
    with pytest.raises(DegenerateCurve):
        box_counting_dimension(line, geometric_scales(1, 100, 6))
