"""Labelings, peak detection, cluster traces, and gradient paths.

A labeling assigns the integers 1..N bijectively to the N vertices of a
graph.  A peak is a strict local maximum: a vertex whose label exceeds
every neighbor's label.  An isolated vertex counts as a peak (vacuous
maximum), which keeps "the vertex holding label N is a peak"
unconditional.

The cluster C_k is the set of vertices holding the top k+1 labels.  Its
boundary is the set of outside vertices adjacent to it.  When a labeling
has a single peak, every C_k is connected: the top-labeled vertex of any
component of a top set beats all its neighbors inside the component, and
beats the outside ones by membership, so it is a peak of the whole graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import Graph, grid_vertex


class Labeling:
    """Bijection vertices -> {1..N} plus its inverse.

    label_of(v) is the label at vertex v; vertex_of(r) the vertex holding
    label r.  Instances are immutable and hashable.
    """

    __slots__ = ("labels", "inverse")

    def __init__(self, labels: Sequence[int]):
        n = len(labels)
        labels = tuple(labels)
        inverse = [-1] * n
        for v, lab in enumerate(labels):
            if not (1 <= lab <= n) or inverse[lab - 1] >= 0:
                raise ValueError("labels must be a bijection onto 1..N")
            inverse[lab - 1] = v
        self.labels = labels
        self.inverse = tuple(inverse)

    @property
    def n(self) -> int:
        return len(self.labels)

    def label_of(self, v: int) -> int:
        return self.labels[v]

    def vertex_of(self, rank: int) -> int:
        """Vertex holding label ``rank`` (1-based)."""
        return self.inverse[rank - 1]

    def top_set(self, size: int) -> frozenset:
        """Vertices holding the ``size`` largest labels."""
        return frozenset(self.inverse[self.n - size :])

    def __eq__(self, other):
        return isinstance(other, Labeling) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Labeling({list(self.labels)!r})"


@dataclass(frozen=True)
class ClusterTrace:
    """Nested cluster sequence with per-step boundary sizes.

    addition_order[i] is the (i+1)-th vertex of the cluster; for a
    labeling it is the vertex with label N-i, for growth processes the
    i-th attachment.  boundary_size[i] and connected_flags[i] describe
    the cluster after that vertex joined.
    """

    addition_order: tuple[int, ...]
    boundary_size: tuple[int, ...]
    connected_flags: tuple[bool, ...]
    stopped_early: bool = False
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_steps(self) -> int:
        return len(self.addition_order)


def is_peak(g: Graph, labeling: Labeling, v: int) -> bool:
    lv = labeling.labels[v]
    return all(lv > labeling.labels[w] for w in g.adj[v])


def peaks(g: Graph, labeling: Labeling) -> tuple[int, ...]:
    """All strict local maxima, sorted ascending."""
    labels = labeling.labels
    return tuple(
        v
        for v in range(g.n_vertices)
        if all(labels[v] > labels[w] for w in g.adj[v])
    )


def peak_count(g: Graph, labeling: Labeling) -> int:
    return len(peaks(g, labeling))


def cluster_trace(g: Graph, labeling: Labeling) -> ClusterTrace:
    """Boundary sizes and connectivity of every top-label cluster.

    Runs in O(E alpha): vertices are added in decreasing label order with
    incremental boundary bookkeeping and union-find connectivity.
    """
    order = [labeling.inverse[r] for r in range(g.n_vertices - 1, -1, -1)]
    return _trace_addition_order(g, order)


def _trace_addition_order(
    g: Graph, order: Sequence[int], stopped_early: bool = False, meta=None
) -> ClusterTrace:
    n = g.n_vertices
    added = bytearray(n)
    in_boundary = bytearray(n)
    boundary_count = 0
    dsu = list(range(n))

    def find(x: int) -> int:
        root = x
        while dsu[root] != root:
            root = dsu[root]
        while dsu[x] != root:
            dsu[x], x = root, dsu[x]
        return root

    components = 0
    boundary_sizes = []
    connected = []
    for v in order:
        if in_boundary[v]:
            in_boundary[v] = 0
            boundary_count -= 1
        added[v] = 1
        components += 1
        for w in g.adj[v]:
            if added[w]:
                rv, rw = find(v), find(w)
                if rv != rw:
                    dsu[rv] = rw
                    components -= 1
            elif not in_boundary[w]:
                in_boundary[w] = 1
                boundary_count += 1
        boundary_sizes.append(boundary_count)
        connected.append(components == 1)
    return ClusterTrace(
        tuple(order),
        tuple(boundary_sizes),
        tuple(connected),
        stopped_early,
        meta or {},
    )


def is_connected_subset(g: Graph, vertices: Iterable[int]) -> bool:
    """Whether the induced subgraph on a nonempty vertex set is connected."""
    vs = set(vertices)
    if not vs:
        raise ValueError("connectivity of the empty set is undefined")
    start = next(iter(vs))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if w in vs and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(vs)


def gradient_path(g: Graph, labeling: Labeling) -> tuple[int, ...]:
    """Strictly decreasing path from the corner peak to the far grid edge.

    Requires a grid graph whose labeling has peak set exactly {(1,1)}
    (vertex 0).  A spanning tree is grown from (1,1): at every step the
    highest-id outside vertex with a larger-labeled tree neighbor joins,
    attached to the highest-id such neighbor.  Growth stops as soon as a
    vertex in the last column (first coordinate n) joins; the in-tree
    path from (1,1) to it is returned.  Labels strictly decrease along
    every tree path by construction, so the result is a simple grid path
    with decreasing labels.  The id ordering determinizes the growth
    completely, so no tie-break among alternative qualifying paths is
    ever needed.
    """
    if g.family != "grid":
        raise ValueError("gradient_path requires a grid graph")
    n_cols = g.meta["n"]
    if peaks(g, labeling) != (grid_vertex(g, 1, 1),):
        raise ValueError("labeling must have a single peak at (1, 1)")
    labels = labeling.labels
    coords = g.coords
    assert coords is not None

    n = g.n_vertices
    in_tree = bytearray(n)
    tree_parent = [-1] * n
    in_tree[0] = 1
    if coords[0][0] == n_cols:  # 1 x ... degenerate: n = 1 column
        return (0,)
    eligible: set = set()
    for w in g.adj[0]:
        if labels[w] < labels[0]:
            eligible.add(w)
    target = -1
    while True:
        if not eligible:
            # impossible for single-peak inputs: the maximum of the
            # untouched region would be a second peak
            raise RuntimeError("gradient path construction stalled")
        w = max(eligible)
        eligible.discard(w)
        attach = max(
            v for v in g.adj[w] if in_tree[v] and labels[v] > labels[w]
        )
        in_tree[w] = 1
        tree_parent[w] = attach
        if coords[w][0] == n_cols:
            target = w
            break
        for u in g.adj[w]:
            if not in_tree[u] and labels[u] < labels[w]:
                eligible.add(u)
    path = [target]
    while path[-1] != 0:
        path.append(tree_parent[path[-1]])
    path.reverse()
    return tuple(path)


# ---------------------------------------------------------------------------
# labeling text format


def write_labeling_text(labeling: Labeling, path, header_lines: Iterable[str] = ()) -> None:
    """N lines, line v holding label_of(v); '#' header lines optional."""
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for lab in labeling.labels:
            fh.write(f"{lab}\n")


def read_labeling_text(path) -> Labeling:
    labels = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            labels.append(int(line))
    return Labeling(labels)
