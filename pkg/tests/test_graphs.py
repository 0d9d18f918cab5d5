"""Generators, tree utilities, and split families."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import numpy as np

from peaklab.graphs import (
    bfs_distances,
    barbell_z,
    centroids,
    distance,
    grid_vertex,
    make_barbell_tree,
    make_grid,
    make_path,
    make_regular_tree,
    make_torus,
    read_edge_list,
    rooted_index,
    split_by_edge,
    splits_between,
    torus_vertex,
    tree_from_edges,
    tree_path,
    write_edge_list,
)
from peaklab.exact import regular_tree_deep_vertex_count, regular_tree_size

from conftest import make_star, random_tree


def _restricted_peaks(g, lab, side):
    """Peaks of the labeling restricted to the induced subgraph on side."""
    return {
        v
        for v in side
        if all(lab.labels[v] > lab.labels[w] for w in g.adj[v] if w in side)
    }


def adjacency_is_canonical(g):
    for u in range(g.n_vertices):
        nb = g.adj[u]
        assert list(nb) == sorted(set(nb))
        assert u not in nb
        for v in nb:
            assert u in g.adj[v]


class TestGenerators:
    def test_path_degenerate(self):
        g = make_path(1)
        assert g.n_vertices == 1 and g.n_edges == 0

    def test_path4_edges(self):
        g = make_path(4)
        assert set(g.edges()) == {(0, 1), (1, 2), (2, 3)}

    def test_path5_degrees(self):
        g = make_path(5)
        assert [g.degree(v) for v in range(5)] == [1, 2, 2, 2, 1]

    def test_grid_1xn_is_path(self):
        g = make_grid(1, 6)
        p = make_path(6)
        assert g.adj == p.adj

    def test_grid_2x2_is_cycle(self):
        g = make_grid(2, 2)
        assert g.n_vertices == 4 and all(g.degree(v) == 2 for v in range(4))

    def test_grid_3x5_counts(self):
        m, n = 3, 5
        g = make_grid(m, n)
        assert g.n_vertices == 15
        assert g.n_edges == m * (n - 1) + n * (m - 1) == 22

    def test_grid_coords_and_origin(self):
        g = make_grid(3, 5)
        assert g.coords[0] == (1, 1)
        assert grid_vertex(g, 1, 1) == 0
        # adjacency consistent with coordinates: neighbors differ by one step
        for u in range(g.n_vertices):
            for v in g.adj[u]:
                du = abs(g.coords[u][0] - g.coords[v][0])
                dv = abs(g.coords[u][1] - g.coords[v][1])
                assert sorted((du, dv)) == [0, 1]

    def test_torus_1d_cycle(self):
        g = make_torus(1, 5)
        assert g.n_vertices == 5 and all(g.degree(v) == 2 for v in range(5))

    def test_torus_2x3(self):
        g = make_torus(2, 3)
        assert g.n_vertices == 9 and all(g.degree(v) == 4 for v in range(9))

    def test_torus_large(self):
        g = make_torus(2, 200)
        assert g.n_vertices == 40000
        assert torus_vertex(g, 100, 100) == 100 * 200 + 100

    def test_torus_rejects_small_side(self):
        with pytest.raises(ValueError):
            make_torus(2, 2)

    def test_torus_coords_consistent(self):
        g = make_torus(2, 4)
        side = 4
        for u in range(g.n_vertices):
            for v in g.adj[u]:
                diffs = [
                    min((a - b) % side, (b - a) % side)
                    for a, b in zip(g.coords[u], g.coords[v])
                ]
                assert sorted(diffs) == [0, 1]

    def test_regular_tree_17(self):
        assert make_regular_tree(3, 2).n_vertices == 17

    def test_regular_tree_star(self):
        g = make_regular_tree(2, 1)
        assert g.n_vertices == 4
        assert g.adj[0] == (1, 2, 3)

    def test_regular_tree_13121(self):
        assert regular_tree_size(3, 8) == 13121
        assert make_regular_tree(3, 8).n_vertices == 13121

    def test_regular_tree_structure(self):
        g = make_regular_tree(3, 3)
        depth = bfs_distances(g, 0)
        for v in range(g.n_vertices):
            if g.degree(v) == 1:
                assert depth[v] == 3
            else:
                assert g.degree(v) == 4

    def test_barbell_basic(self):
        g = make_barbell_tree(2, 5)
        assert g.n_vertices == 9 and g.n_edges == 8 and g.is_tree
        assert g.degree(barbell_z(g, 1)) == 3
        assert g.degree(barbell_z(g, 4)) == 4

    def test_barbell_z1_z4_distance(self):
        g = make_barbell_tree(3, 6)
        assert distance(g, barbell_z(g, 1), barbell_z(g, 4)) == 3

    def test_barbell_rejects_short_path(self):
        with pytest.raises(ValueError):
            make_barbell_tree(2, 4)

    def test_tree_from_edges(self):
        g = tree_from_edges(2, [(0, 1)])
        assert g.n_edges == 1
        g4 = tree_from_edges(4, [(0, 1), (1, 2), (2, 3)])
        assert g4.adj == make_path(4).adj

    def test_tree_from_edges_rejects_cycle(self):
        with pytest.raises(ValueError):
            tree_from_edges(4, [(0, 1), (1, 2), (0, 2)])

    def test_tree_from_edges_rejects_disconnected(self):
        with pytest.raises(ValueError):
            tree_from_edges(4, [(0, 1), (2, 3), (0, 1)])

    def test_canonical_adjacency_everywhere(self):
        for g in [
            make_path(6),
            make_grid(3, 4),
            make_torus(2, 3),
            make_regular_tree(2, 3),
            make_barbell_tree(2, 5),
        ]:
            adjacency_is_canonical(g)


class TestDistance:
    def test_reflexive(self):
        g = make_path(4)
        assert distance(g, 2, 2) == 0

    def test_path_ends(self):
        assert distance(make_path(4), 0, 3) == 3

    def test_regular_tree_cross_subtree(self):
        g = make_regular_tree(3, 2)
        idx = rooted_index(g, 0)
        # two leaves under different root children: path through the root
        leaf_under_1 = next(v for v in range(5, 17) if idx.parent[v] == 1)
        leaf_under_2 = next(v for v in range(5, 17) if idx.parent[v] == 2)
        assert distance(g, leaf_under_1, leaf_under_2) == 4

    def test_unreachable_errors(self):
        from peaklab.graphs import Graph

        g = Graph(2, ((), ()))
        with pytest.raises(ValueError):
            distance(g, 0, 1)


class TestRootedIndex:
    def test_path4_rooted_at_b(self):
        g = make_path(4)
        idx = rooted_index(g, 1)
        assert idx.desc_count[1] == 4
        assert idx.desc_count[0] == 1
        assert idx.desc_count[2] == 2
        assert idx.desc_count[3] == 1

    def test_star_center(self):
        g = make_star(6)
        idx = rooted_index(g, 0)
        assert idx.desc_count[0] == 6
        assert all(idx.desc_count[v] == 1 for v in range(1, 6))

    def test_regular_tree_child(self):
        g = make_regular_tree(3, 2)
        idx = rooted_index(g, 0)
        assert idx.desc_count[1] == 4

    def test_children_sum_invariant(self, tree_suite):
        for g in tree_suite:
            idx = rooted_index(g, 0)
            child_sum = sum(
                idx.desc_count[v]
                for v in range(g.n_vertices)
                if idx.parent[v] == 0
            )
            assert child_sum == g.n_vertices - 1

    def test_parent_closer_to_root(self, tree_suite):
        for g in tree_suite[:10]:
            idx = rooted_index(g, 0)
            dist = bfs_distances(g, 0)
            for v in range(g.n_vertices):
                if v != 0:
                    assert dist[idx.parent[v]] == dist[v] - 1

    def test_depth_of_matches_bfs(self):
        g = make_regular_tree(2, 3)
        idx = rooted_index(g, 0)
        dist = bfs_distances(g, 0)
        for v in range(g.n_vertices):
            assert idx.depth_of(v) == dist[v]

    def test_rejects_non_tree(self):
        from conftest import make_cycle

        with pytest.raises(ValueError):
            rooted_index(make_cycle(4), 0)


class TestCentroids:
    def test_paths(self):
        assert centroids(make_path(4)) == [1, 2]
        assert centroids(make_path(5)) == [2]

    def test_star(self):
        assert centroids(make_star(6)) == [0]

    def test_count_and_adjacency(self, tree_suite):
        for g in tree_suite:
            cs = centroids(g)
            assert len(cs) in (1, 2)
            if len(cs) == 2:
                assert g.has_edge(cs[0], cs[1])

    def test_definition_directly(self, tree_suite):
        # brute-force the defining property on a few trees
        for g in tree_suite[:8]:
            n = g.n_vertices
            expected = []
            for x in range(n):
                sizes = [
                    len(split_by_edge(g, (x, w)).other_side(x)) for w in g.adj[x]
                ]
                if all(2 * s <= n for s in sizes):
                    expected.append(x)
            assert centroids(g) == expected


class TestSplits:
    def test_path4_middle(self):
        s = split_by_edge(make_path(4), (1, 2))
        assert s.side_u == frozenset({0, 1}) and s.side_v == frozenset({2, 3})

    def test_star_leaf(self):
        s = split_by_edge(make_star(5), (0, 3))
        assert s.side_v == frozenset({3})

    def test_barbell(self):
        g = make_barbell_tree(2, 5)
        s = split_by_edge(g, (barbell_z(g, 1), barbell_z(g, 2)))
        assert sorted((len(s.side_u), len(s.side_v))) == [3, 6]

    def test_not_an_edge(self):
        with pytest.raises(ValueError):
            split_by_edge(make_path(4), (0, 2))

    def test_partition_and_connectivity(self, tree_suite):
        from peaklab.labelings import is_connected_subset

        for g in tree_suite[:12]:
            for e in g.edges():
                s = split_by_edge(g, e)
                assert s.side_u | s.side_v == frozenset(range(g.n_vertices))
                assert not (s.side_u & s.side_v)
                assert is_connected_subset(g, s.side_u)
                assert is_connected_subset(g, s.side_v)

    def test_splits_between_all(self):
        g = make_path(6)
        splits = splits_between(g, 0, 5, "all")
        assert [s.removed_edge for s in splits] == [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
        ]

    def test_splits_between_all_matches_distance(self, tree_suite):
        rng = np.random.default_rng(7)
        for g in tree_suite[:12]:
            if g.n_vertices < 3:
                continue
            u, v = rng.choice(g.n_vertices, size=2, replace=False)
            assert len(splits_between(g, int(u), int(v), "all")) == distance(
                g, int(u), int(v)
            )

    def test_families_a_excludes_end_edges(self):
        g = make_path(6)
        fam = splits_between(g, 0, 5, "families_A")
        assert [s.removed_edge for s in fam] == [(1, 2), (2, 3), (3, 4)]

    def test_families_a_adjacent_empty(self):
        assert splits_between(make_path(6), 2, 3, "families_A") == []

    def test_families_a_distance_two_midpoint_root(self):
        # midpoint is vertex 0: no valid family
        g = make_star(5)
        assert splits_between(g, 1, 2, "families_A") == []

    def test_families_a_distance_two_away_from_root(self):
        # path 0-1-2-3-4: peaks 2 and 4 have midpoint 3; root direction
        # from 3 runs through 2, so the split removes (2, 3)
        g = make_path(5)
        fam = splits_between(g, 2, 4, "families_A")
        assert [s.removed_edge for s in fam] == [(2, 3)]
        split = fam[0]
        assert 3 in split.side_of(4)
        assert 0 not in split.side_of(4)

    def test_families_a_sibling_case_empty(self):
        # two children of vertex 1 in a star-of-stars: vertex 0 sits in a
        # third branch of the midpoint, so no separating split can put
        # the midpoint away from the root
        g = tree_from_edges(5, [(0, 1), (1, 2), (1, 3), (1, 4)])
        assert splits_between(g, 2, 3, "families_A") == []

    def test_two_peak_labelings_split_into_single_peak_sides(self):
        # for every labeling with exactly two peaks, exactly two geodesic
        # splits leave a single peak on each side
        import itertools

        from peaklab.labelings import Labeling, peaks as peaks_of

        for g in (make_path(6), tree_from_edges(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])):
            for perm in itertools.permutations(range(1, 7)):
                lab = Labeling(perm)
                pk = peaks_of(g, lab)
                if len(pk) != 2:
                    continue
                y1, y2 = pk
                good = 0
                for s in splits_between(g, y1, y2, "all"):
                    side_a, side_b = s.side_of(y1), s.side_of(y2)
                    pa = _restricted_peaks(g, lab, side_a)
                    pb = _restricted_peaks(g, lab, side_b)
                    if pa == {y1} and pb == {y2}:
                        good += 1
                assert good == 2

    def test_families_a_splits_preserve_single_peaks(self):
        # the restricted family exists to cover two-peak events: whenever
        # it is nonempty, at least one member split shows a single peak
        # on each side for every labeling with that peak pair
        import itertools

        from peaklab.labelings import Labeling, peaks as peaks_of

        g = make_path(6)
        for perm in itertools.permutations(range(1, 7)):
            lab = Labeling(perm)
            pk = peaks_of(g, lab)
            if len(pk) != 2:
                continue
            y1, y2 = pk
            fam = splits_between(g, y1, y2, "families_A")
            if not fam:
                continue
            assert any(
                _restricted_peaks(g, lab, s.side_of(y1)) == {y1}
                and _restricted_peaks(g, lab, s.side_of(y2)) == {y2}
                for s in fam
            )

    def test_tree_path_endpoints(self, tree_suite):
        for g in tree_suite[:6]:
            p = tree_path(g, 0, g.n_vertices - 1)
            assert p[0] == 0 and p[-1] == g.n_vertices - 1
            for a, b in zip(p, p[1:]):
                assert g.has_edge(a, b)


class TestFormulas:
    def test_size_formula_small_sweep(self):
        for d in range(2, 5):
            for k in range(1, 5):
                assert make_regular_tree(d, k).n_vertices == regular_tree_size(d, k)

    def test_deep_vertex_count(self):
        for d, k in [(2, 2), (3, 2), (2, 4), (4, 3)]:
            g = make_regular_tree(d, k)
            dist = bfs_distances(g, 0)
            assert sum(1 for x in dist if x >= 2) == regular_tree_deep_vertex_count(
                d, k
            )


class TestEdgeListFormat:
    def test_round_trip(self, tmp_path):
        g = make_barbell_tree(2, 5)
        path = tmp_path / "g.txt"
        write_edge_list(g, path, header_lines=["demo = 1"])
        h = read_edge_list(path)
        assert h.n_vertices == g.n_vertices and h.adj == g.adj

    def test_header_is_commented(self, tmp_path):
        path = tmp_path / "g.txt"
        write_edge_list(make_path(3), path, header_lines=["x = y"])
        first = path.read_text().splitlines()[0]
        assert first == "# x = y"


@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_random_trees_are_trees(n, seed):
    g = random_tree(n, np.random.default_rng(seed))
    assert g.is_tree
    cs = centroids(g)
    assert len(cs) in (1, 2)
    if len(cs) == 2:
        assert g.has_edge(cs[0], cs[1])
