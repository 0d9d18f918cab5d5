"""Shared fixtures: the small-tree suite and distribution helpers."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from peaklab.graphs import Graph, _graph_from_edges, make_path, tree_from_edges

TREE_SUITE_SEED = 20240801


def make_star(n: int) -> Graph:
    """Star on n vertices with center 0 (a path for n <= 2)."""
    return tree_from_edges(n, [(0, i) for i in range(1, n)])


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labeled tree on n vertices via a random parent sequence
    decoded Prufer-style."""
    if n <= 2:
        return make_path(n)
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return tree_from_edges(n, edges)


def small_tree_suite() -> list[Graph]:
    """Every path and star on 2..8 vertices plus 30 seeded random trees
    on 5..8 vertices."""
    suite = [make_path(n) for n in range(2, 9)]
    suite += [make_star(n) for n in range(2, 9)]
    rng = np.random.default_rng(TREE_SUITE_SEED)
    for i in range(30):
        suite.append(random_tree(5 + i % 4, rng))
    return suite


def make_cycle(n: int) -> Graph:
    return _graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)], family="custom")


def tv_distance(p: dict, q: dict) -> float:
    """Total-variation distance between two distributions given as
    key -> probability mappings (missing keys count as 0)."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)


def empirical(items) -> dict:
    counts: dict = {}
    for x in items:
        counts[x] = counts.get(x, 0) + 1
    total = sum(counts.values())
    return {k: Fraction(c, total) for k, c in counts.items()}


@pytest.fixture(scope="session")
def tree_suite():
    return small_tree_suite()
