"""Random generation: uniform labelings, conditioned samplers, Eden growth.

Randomness discipline: every sampler draws from an RngStream, a
counter-based Philox generator keyed by (master_seed, stream_id).  The
same key always reproduces the same outputs bit for bit, and distinct
stream ids give independent streams, so parallel trials can each own a
stream and the merged results are independent of scheduling.

The conditioned MCMC is a Metropolis chain on the set of labelings with
exactly k peaks.  Proposals mix two symmetric moves: with probability
``proposal_mix`` swap the vertices holding consecutive labels (r, r+1)
for a uniform r, otherwise swap the labels of a uniform vertex pair.  A
proposal is accepted iff the constraint still holds, so the stationary
law is uniform on the constraint set whenever the chain is irreducible.
Irreducibility is not proven; the suite validates the chain against
exact enumeration tables on small graphs instead.

Consecutive-label swaps are cheap: if the two holders are not adjacent
in the graph, the peak set cannot change (their labels cross no
neighbor's label), so the move is always accepted without any
recomputation.  That is why they dominate the default mix.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log
from typing import Optional, Sequence

import numpy as np

from .graphs import Graph, EdgeSplit
from .labelings import ClusterTrace, Labeling, peaks

RNG_ALGORITHM = "philox4x64"
_MASK64 = (1 << 64) - 1
_CHUNK = 16384


class RngStream:
    """Deterministic Philox stream keyed by (master_seed, stream_id)."""

    __slots__ = ("master_seed", "stream_id", "gen")

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = master_seed
        self.stream_id = stream_id
        key = np.array([master_seed & _MASK64, stream_id & _MASK64], dtype=np.uint64)
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same master seed and a new stream id."""
        return RngStream(self.master_seed, stream_id)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


class RejectionExhausted(RuntimeError):
    """Rejection sampling hit its draw budget; use the MCMC sampler instead."""

    def __init__(self, draws: int):
        super().__init__(
            f"no labeling satisfied the condition within {draws} draws; "
            "the conditional event is too rare for rejection, use mcmc_conditioned"
        )
        self.draws = draws


@dataclass(frozen=True)
class McmcConfig:
    """Chain length parameters; None fields get graph-size defaults.

    Defaults: burn_in = ceil(10 N log N), thinning = N.  These are
    heuristics; the oracle total-variation tests are the actual gate.
    """

    steps: int
    burn_in: Optional[int] = None
    thinning: Optional[int] = None
    proposal_mix: float = 0.8

    def resolve(self, n: int) -> tuple[int, int, int]:
        burn = self.burn_in if self.burn_in is not None else default_burn_in(n)
        thin = self.thinning if self.thinning is not None else max(1, n)
        if not 0.0 <= self.proposal_mix <= 1.0:
            raise ValueError("proposal_mix must lie in [0, 1]")
        if not 0 <= burn < self.steps:
            raise ValueError(f"need 0 <= burn_in < steps, got {burn} / {self.steps}")
        if not 1 <= thin <= self.steps - burn:
            raise ValueError("need 1 <= thinning <= steps - burn_in")
        return self.steps, burn, thin

    @classmethod
    def one_sample_default(cls, n: int) -> "McmcConfig":
        """Default-burn-in chain emitting a single sample."""
        burn = default_burn_in(n)
        return cls(steps=burn + max(1, n), burn_in=burn, thinning=max(1, n))


def default_burn_in(n: int) -> int:
    return ceil(10 * n * log(n)) if n > 1 else 0


# ---------------------------------------------------------------------------
# unconditioned sampling


def uniform_labeling(g: Graph, rng: RngStream) -> Labeling:
    """Uniformly random bijection onto 1..N (Fisher-Yates shuffle)."""
    perm = rng.gen.permutation(g.n_vertices)
    return Labeling([int(x) + 1 for x in perm])


def batch_uniform_label_matrix(g: Graph, rng: RngStream, count: int) -> np.ndarray:
    """(count, N) matrix of independent uniform labelings.

    Same law as repeated uniform_labeling draws (each row is an
    independent uniform shuffle), vectorized for statistical tests that
    need millions of draws.
    """
    base = np.tile(np.arange(1, g.n_vertices + 1, dtype=np.int64), (count, 1))
    return rng.gen.permuted(base, axis=1)


# ---------------------------------------------------------------------------
# canonical conditioned states


def canonical_single_peak(g: Graph, x: int) -> Labeling:
    """Deterministic labeling with peak set exactly {x}.

    Labels decrease along the BFS order from x, so every other vertex has
    its BFS parent labeled higher.
    """
    n = g.n_vertices
    order = _bfs_order(g, x)
    if len(order) != n:
        raise ValueError("canonical_single_peak requires a connected graph")
    labels = [0] * n
    for i, v in enumerate(order):
        labels[v] = n - i
    return Labeling(labels)


def _bfs_order(g: Graph, start: int) -> list[int]:
    from collections import deque

    seen = bytearray(g.n_vertices)
    seen[start] = 1
    order = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if not seen[w]:
                seen[w] = 1
                order.append(w)
                queue.append(w)
    return order


def canonical_two_peaks(g: Graph, split: EdgeSplit, x1: int, x2: int) -> Labeling:
    """Deterministic labeling with peak set exactly {x1, x2}.

    x1's split side takes the top block of labels BFS-decreasing from x1
    (so x1 carries label N), the other side the remaining block
    BFS-decreasing from x2.  Preconditions: x1 and x2 on opposite sides,
    x2 not adjacent to x1's side (in particular not an endpoint of the
    removed edge), hence x1 and x2 non-adjacent.  x2 then beats all its
    neighbors because they all sit in its own, lower-labeled side.
    """
    if not g.is_tree:
        raise ValueError("canonical_two_peaks requires a tree")
    side1 = split.side_of(x1)
    side2 = split.side_of(x2)
    if side1 is side2:
        raise ValueError("x1 and x2 must lie on opposite sides of the split")
    if any(w in side1 for w in g.adj[x2]):
        raise ValueError("x2 must not be adjacent to the x1 side")
    if g.has_edge(x1, x2):
        raise ValueError("x1 and x2 must not be adjacent")

    n = g.n_vertices
    labels = [0] * n
    next_label = n
    for start, side in ((x1, side1), (x2, side2)):
        sub = _induced_bfs_order(g, start, side)
        if len(sub) != len(side):
            raise RuntimeError("split side is not connected")
        for v in sub:
            labels[v] = next_label
            next_label -= 1
    result = Labeling(labels)
    got = peaks(g, result)
    if got != tuple(sorted((x1, x2))):
        raise RuntimeError(f"construction produced peak set {got}, wanted {{{x1}, {x2}}}")
    return result


def _induced_bfs_order(g: Graph, start: int, allowed) -> list[int]:
    from collections import deque

    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if w in allowed and w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


# ---------------------------------------------------------------------------
# conditioned samplers


def rejection_conditioned(
    g: Graph, k: int, rng: RngStream, max_draws: int = 100_000
) -> Labeling:
    """Draw uniform labelings until one has exactly k peaks.

    Returns an exact sample from the conditional law; raises
    RejectionExhausted after max_draws misses (the conditional event can
    be astronomically rare on large graphs).
    """
    adj = g.adj
    n = g.n_vertices
    for _ in range(max_draws):
        perm = rng.gen.permutation(n)
        labels = [int(x) + 1 for x in perm]
        hits = 0
        for v in range(n):
            lv = labels[v]
            if all(lv > labels[w] for w in adj[v]):
                hits += 1
                if hits > k:
                    break
        if hits == k:
            return Labeling(labels)
    raise RejectionExhausted(max_draws)


def mcmc_conditioned(
    g: Graph,
    k: int,
    init: Labeling,
    cfg: McmcConfig,
    rng: RngStream,
    pin: Optional[Sequence[int]] = None,
) -> list[Labeling]:
    """Metropolis chain on {labelings with exactly k peaks}; thinned samples.

    ``pin`` optionally fixes the peak set itself: proposals that move any
    peak off the pinned vertices are rejected (requires len(pin) == k).
    The initial state must satisfy the constraint.
    """
    n = g.n_vertices
    steps, burn_in, thinning = cfg.resolve(n)
    pin_list = None
    if pin is not None:
        pin_list = sorted(pin)
        if len(pin_list) != k:
            raise ValueError("pin must list exactly k vertices")
    start_peaks = peaks(g, init)
    if len(start_peaks) != k:
        raise ValueError(f"initial state has {len(start_peaks)} peaks, need {k}")
    if pin_list is not None and list(start_peaks) != pin_list:
        raise ValueError("initial state peaks differ from the pinned set")

    adj = g.adj
    adj_sets = g.adj_sets
    label = list(init.labels)
    inverse = [0] * n
    for v, lab in enumerate(label):
        inverse[lab - 1] = v
    is_peak = [all(label[v] > label[w] for w in adj[v]) for v in range(n)]
    count = sum(is_peak)

    gen = rng.gen
    mix = cfg.proposal_mix
    samples: list[Labeling] = []
    done = 0
    while done < steps:
        block = min(_CHUNK, steps - done)
        coin = (gen.random(block) < mix).tolist()
        ranks = gen.integers(1, n, size=block).tolist() if n > 1 else [1] * block
        us = gen.integers(0, n, size=block).tolist()
        vs = gen.integers(0, n, size=block).tolist()
        for i in range(block):
            if coin[i] and n > 1:
                r = ranks[i]
                u = inverse[r - 1]
                v = inverse[r]
                if v not in adj_sets[u]:
                    # crossing labels of non-adjacent vertices never
                    # changes the peak set: always accepted
                    label[u] = r + 1
                    label[v] = r
                    inverse[r - 1] = v
                    inverse[r] = u
                    done += 1
                    rel = done - burn_in
                    if rel > 0 and rel % thinning == 0:
                        samples.append(Labeling(label))
                    continue
            else:
                u = us[i]
                v = vs[i]
                if u == v:
                    done += 1
                    rel = done - burn_in
                    if rel > 0 and rel % thinning == 0:
                        samples.append(Labeling(label))
                    continue
            a = label[u]
            b = label[v]
            label[u] = b
            label[v] = a
            inverse[a - 1] = v
            inverse[b - 1] = u
            region = {u, v}
            region.update(adj[u])
            region.update(adj[v])
            undo = []
            delta = 0
            for w in region:
                old = is_peak[w]
                lw = label[w]
                new = all(lw > label[x] for x in adj[w])
                if new != old:
                    undo.append((w, old))
                    is_peak[w] = new
                    delta += 1 if new else -1
            ok = count + delta == k
            if ok and pin_list is not None:
                for p in pin_list:
                    if not is_peak[p]:
                        ok = False
                        break
            if ok:
                count += delta
            else:
                label[u] = a
                label[v] = b
                inverse[a - 1] = u
                inverse[b - 1] = v
                for w, old in undo:
                    is_peak[w] = old
            done += 1
            rel = done - burn_in
            if rel > 0 and rel % thinning == 0:
                samples.append(Labeling(label))
    return samples


# ---------------------------------------------------------------------------
# growth models


def eden_growth(g: Graph, start: int, steps: int, rng: RngStream) -> ClusterTrace:
    """Grow a cluster from ``start`` by uniform boundary attachment.

    The trace records the attachment order and the boundary size after
    every addition (index 0 is the bare start vertex).  If the boundary
    empties before the requested number of steps the trace stops early
    and says so.  Clusters are connected by construction.
    """
    n = g.n_vertices
    if not 0 <= steps <= n - 1:
        raise ValueError(f"steps must lie in [0, {n - 1}]")
    gen = rng.gen
    adj = g.adj
    in_cluster = bytearray(n)
    in_cluster[start] = 1
    boundary = list(adj[start])
    pos = {w: i for i, w in enumerate(boundary)}
    order = [start]
    sizes = [len(boundary)]
    stopped_early = False
    for _ in range(steps):
        if not boundary:
            stopped_early = True
            break
        i = int(gen.integers(len(boundary)))
        v = boundary[i]
        last = boundary.pop()
        if i < len(boundary):
            boundary[i] = last
            pos[last] = i
        del pos[v]
        in_cluster[v] = 1
        order.append(v)
        for w in adj[v]:
            if not in_cluster[w] and w not in pos:
                pos[w] = len(boundary)
                boundary.append(w)
        sizes.append(len(boundary))
    return ClusterTrace(
        addition_order=tuple(order),
        boundary_size=tuple(sizes),
        connected_flags=tuple(True for _ in order),
        stopped_early=stopped_early,
        meta={"model": "eden", "start": start, "rng": RNG_ALGORITHM},
    )


def sequential_growth_labeling(g: Graph, start: int, rng: RngStream) -> Labeling:
    """Labeling induced by a full growth run: label N at start, then N-1,
    N-2, ... along the attachment order.  Single peak at start, since
    every later vertex joined with a higher-labeled neighbor already in
    the cluster."""
    trace = eden_growth(g, start, g.n_vertices - 1, rng)
    if trace.stopped_early:
        raise ValueError("sequential_growth_labeling requires a connected graph")
    n = g.n_vertices
    labels = [0] * n
    for i, v in enumerate(trace.addition_order):
        labels[v] = n - i
    return Labeling(labels)
