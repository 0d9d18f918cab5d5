"""Exhaustive enumeration over all N! labelings of small graphs.

This is the ground-truth layer: every exact formula and every sampler in
the package is validated against tables produced here by brute force.
Nothing in this module uses the product formulas it is meant to check.

Enumeration is capped at N <= 12 (12! ~ 4.8e8 permutations, minutes with
the vectorized scan); N = 13 is reachable only through an explicit
override flag and takes hours.  Permutations are generated in the
systematic lexicographic order of ``itertools.permutations``, scanned in
chunks, and peak masks are evaluated with vectorized comparisons.
Multi-worker runs split the job into first-position cosets (the N blocks
of (N-1)! permutations fixing the label of vertex 0) and merge the exact
counts, so the result is independent of the worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .graphs import Graph, bfs_distances

HARD_CAP = 12
OVERRIDE_CAP = 13
_CHUNK_ELEMENTS = 2_000_000


class EnumerationCapError(ValueError):
    """Raised when a graph is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class PeakCountTable:
    """Exact labeling counts by number of peaks; total is always N!."""

    counts: dict
    total: int

    def probability(self, k: int) -> Fraction:
        return Fraction(self.counts.get(k, 0), self.total)


@dataclass(frozen=True)
class ConditionalDistribution:
    """Exact distribution of an outcome under a fixed peak-count condition.

    ``support`` maps outcome keys to exact weights: integer counts for
    enumeration tables (then ``total`` is the number of conditioned
    labelings), or Fractions for exactly computed sequential laws (then
    ``total`` is 1).
    """

    condition: int
    support: dict
    total: Union[int, Fraction]

    def probability(self, key) -> Fraction:
        if not self.total:
            # impossible condition (e.g. two peaks on a complete graph):
            # every outcome carries zero mass
            return Fraction(0)
        return Fraction(self.support.get(key, 0), self.total)

    def as_probabilities(self) -> dict:
        return {key: Fraction(w, self.total) for key, w in self.support.items()}


def _check_cap(g: Graph, allow_override: bool = False) -> None:
    cap = OVERRIDE_CAP if allow_override else HARD_CAP
    if g.n_vertices > cap:
        raise EnumerationCapError(
            f"graph has {g.n_vertices} vertices; exhaustive enumeration is "
            f"capped at N <= {HARD_CAP} "
            f"({'N = 13 takes hours even with the override' if allow_override else 'pass allow_override=True for N = 13'})"
        )


def _perm_chunks(values: Sequence[int], chunk_rows: int):
    """Yield (rows, len(values)) int8 arrays covering all permutations."""
    width = len(values)
    it = itertools.permutations(values)
    while True:
        batch = list(itertools.islice(it, chunk_rows))
        if not batch:
            return
        arr = np.fromiter(
            itertools.chain.from_iterable(batch),
            dtype=np.int8,
            count=len(batch) * width,
        )
        yield arr.reshape(-1, width)


def _labeling_chunks(g: Graph, vertex_order: Optional[Sequence[int]] = None):
    """Chunks of label matrices P with row = labeling, column = vertex.

    ``vertex_order`` changes only the generation order (generated value i
    goes to vertex vertex_order[i]); the set of rows covered is always
    all N! labelings.
    """
    n = g.n_vertices
    chunk_rows = max(1, _CHUNK_ELEMENTS // n)
    order = list(vertex_order) if vertex_order is not None else list(range(n))
    if sorted(order) != list(range(n)):
        raise ValueError("vertex_order must be a permutation of the vertices")
    for raw in _perm_chunks(range(1, n + 1), chunk_rows):
        if vertex_order is None:
            yield raw
        else:
            P = np.empty_like(raw)
            P[:, order] = raw
            yield P


def _peak_mask(P: np.ndarray, g: Graph) -> np.ndarray:
    """Boolean matrix: entry (r, v) says vertex v is a peak of row r."""
    rows = P.shape[0]
    mask = np.ones((rows, g.n_vertices), dtype=bool)
    for v in range(g.n_vertices):
        col = P[:, v]
        for w in g.adj[v]:
            mask[:, v] &= col > P[:, w]
    return mask


# -- peak-count tables ------------------------------------------------------


def _coset_peak_counts(args) -> np.ndarray:
    """Counts of peak numbers over one first-position coset."""
    adj, n, first = args
    g = Graph(n, adj)
    rest = [x for x in range(1, n + 1) if x != first]
    chunk_rows = max(1, _CHUNK_ELEMENTS // n)
    acc = np.zeros(n + 1, dtype=np.int64)
    for tail in _perm_chunks(rest, chunk_rows):
        P = np.empty((tail.shape[0], n), dtype=np.int8)
        P[:, 0] = first
        P[:, 1:] = tail
        counts = _peak_mask(P, g).sum(axis=1)
        acc += np.bincount(counts, minlength=n + 1)
    return acc


def enumerate_peak_counts(
    g: Graph,
    allow_override: bool = False,
    workers: int = 1,
    vertex_order: Optional[Sequence[int]] = None,
) -> PeakCountTable:
    """Exact table: number of labelings with exactly k peaks, for each k."""
    _check_cap(g, allow_override)
    n = g.n_vertices
    acc = np.zeros(n + 1, dtype=np.int64)
    if workers > 1 and n > 1:
        jobs = [(g.adj, n, first) for first in range(1, n + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_coset_peak_counts, jobs):
                acc += part
    else:
        for P in _labeling_chunks(g, vertex_order):
            counts = _peak_mask(P, g).sum(axis=1)
            acc += np.bincount(counts, minlength=n + 1)
    counts = {k: int(c) for k, c in enumerate(acc) if c}
    return PeakCountTable(counts=counts, total=factorial(n))


# -- conditional distributions ----------------------------------------------


def conditional_top_locations(
    g: Graph, k: int, vertex_order: Optional[Sequence[int]] = None
) -> ConditionalDistribution:
    """Exact law of peak locations under the exactly-k-peaks condition.

    k = 1: distribution of the unique peak (the vertex holding label N).
    k = 2: joint distribution of (K1, K2) = (higher-labeled peak,
    other peak), as ordered pairs.
    """
    _check_cap(g)
    if k not in (1, 2):
        raise ValueError("conditional_top_locations supports k = 1 or 2")
    n = g.n_vertices
    if k == 1:
        acc = np.zeros(n, dtype=np.int64)
    else:
        acc = np.zeros((n, n), dtype=np.int64)
    for P in _labeling_chunks(g, vertex_order):
        mask = _peak_mask(P, g)
        counts = mask.sum(axis=1)
        sel = counts == k
        if not sel.any():
            continue
        k1 = np.argmax(P[sel] == n, axis=1)
        if k == 1:
            np.add.at(acc, k1, 1)
        else:
            ksum = mask[sel] @ np.arange(n)
            k2 = ksum - k1
            np.add.at(acc, (k1, k2), 1)
    if k == 1:
        support = {int(v): int(c) for v, c in enumerate(acc) if c}
    else:
        support = {
            (int(a), int(b)): int(acc[a, b])
            for a in range(n)
            for b in range(n)
            if acc[a, b]
        }
    return ConditionalDistribution(condition=k, support=support, total=int(acc.sum()))


def conditional_statistic(
    g: Graph,
    k: int,
    statistic: Union[str, Callable],
    vertex_order: Optional[Sequence[int]] = None,
) -> ConditionalDistribution:
    """Exact pushforward law of a statistic under exactly k peaks.

    Named statistics: "peak_location" (vertex of the top label),
    "dist_K1_K2" (k = 2 only), "min_dist_to_root" (closest peak to
    vertex 0).  A callable receives (labels_tuple, peaks_tuple, graph)
    and must return a hashable key; it is evaluated row by row on the
    conditioned labelings only.
    """
    _check_cap(g)
    n = g.n_vertices
    if statistic == "dist_K1_K2" and k != 2:
        raise ValueError("dist_K1_K2 is only defined under the two-peak condition")
    dist0 = None
    distmat = None
    if statistic == "min_dist_to_root":
        dist0 = np.array(bfs_distances(g, 0))
    if statistic == "dist_K1_K2":
        distmat = np.array([bfs_distances(g, v) for v in range(n)])
    support: dict = {}
    for P in _labeling_chunks(g, vertex_order):
        mask = _peak_mask(P, g)
        sel = mask.sum(axis=1) == k
        if not sel.any():
            continue
        Psel = P[sel]
        msel = mask[sel]
        if statistic == "peak_location":
            keys = np.argmax(Psel == n, axis=1)
        elif statistic == "dist_K1_K2":
            k1 = np.argmax(Psel == n, axis=1)
            k2 = msel @ np.arange(n) - k1
            keys = distmat[k1, k2]
        elif statistic == "min_dist_to_root":
            keys = np.where(msel, dist0[None, :], n + 1).min(axis=1)
        elif callable(statistic):
            for row, mrow in zip(Psel, msel):
                labels = tuple(int(x) for x in row)
                pk = tuple(int(v) for v in np.flatnonzero(mrow))
                key = statistic(labels, pk, g)
                support[key] = support.get(key, 0) + 1
            continue
        else:
            raise ValueError(f"unknown statistic {statistic!r}")
        vals, cnts = np.unique(keys, return_counts=True)
        for val, cnt in zip(vals, cnts):
            key = int(val)
            support[key] = support.get(key, 0) + int(cnt)
    return ConditionalDistribution(
        condition=k, support=support, total=sum(support.values())
    )


# -- growth model vs conditioned-uniform comparison --------------------------


@dataclass(frozen=True)
class GrowthVsUniform:
    """Exact laws of the second cluster vertex under the two models."""

    uniform: ConditionalDistribution
    sequential: ConditionalDistribution


def growth_vs_uniform_discrepancy(g: Graph, pinned_peak: int) -> GrowthVsUniform:
    """Where does label N-1 sit, given a single peak pinned at a vertex?

    uniform: enumeration law of the vertex holding label N-1 among all
    labelings whose peak set is exactly {pinned_peak}.

    sequential: exact law of the first attachment when a cluster grows
    from pinned_peak by uniform boundary choice, obtained by recursing
    over all growth histories with memoized continuation mass.  The two
    laws differ in general: uniform boundary attachment does not
    reproduce the conditioned-uniform labeling.
    """
    if g.n_vertices > 10:
        raise EnumerationCapError(
            "growth_vs_uniform_discrepancy is capped at N <= 10"
        )
    n = g.n_vertices

    # enumeration side
    support: dict = {}
    total = 0
    for P in _labeling_chunks(g):
        mask = _peak_mask(P, g)
        sel = (mask.sum(axis=1) == 1) & mask[:, pinned_peak]
        if not sel.any():
            continue
        second = np.argmax(P[sel] == n - 1, axis=1)
        total += int(sel.sum())
        vals, cnts = np.unique(second, return_counts=True)
        for val, cnt in zip(vals, cnts):
            support[int(val)] = support.get(int(val), 0) + int(cnt)
    uniform = ConditionalDistribution(condition=1, support=support, total=total)

    # growth side: continuation mass of every reachable cluster is 1 as
    # long as the graph is connected, but we compute it rather than
    # assume it, so the recursion really walks the histories
    adj_sets = g.adj_sets
    cache: dict = {}

    def continuation_mass(cluster: frozenset) -> Fraction:
        if cluster in cache:
            return cache[cluster]
        boundary = set()
        for v in cluster:
            boundary.update(adj_sets[v] - cluster)
        if not boundary:
            out = Fraction(1)
        else:
            share = Fraction(1, len(boundary))
            out = sum(
                (share * continuation_mass(cluster | {w}) for w in boundary),
                Fraction(0),
            )
        cache[cluster] = out
        return out

    start = frozenset([pinned_peak])
    nbrs = sorted(adj_sets[pinned_peak])
    seq_support = {}
    if nbrs:
        share = Fraction(1, len(nbrs))
        for w in nbrs:
            seq_support[w] = share * continuation_mass(start | {w})
    sequential = ConditionalDistribution(
        condition=1, support=seq_support, total=Fraction(1)
    )
    return GrowthVsUniform(uniform=uniform, sequential=sequential)
