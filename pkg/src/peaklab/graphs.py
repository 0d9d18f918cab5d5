"""Immutable graphs, generators, and tree-structure utilities.

Vertices are dense integer ids 0..N-1.  Vertex 0 is the root for rooted
families (regular trees) and the designated origin otherwise.  Adjacency
lists are kept sorted so that every traversal in the package is
deterministic.

Generator numbering conventions (fixed, relied on by fixtures and goldens):

* path:     vertex i is the i-th vertex along the line.
* grid:     vertex (j, k) with 1 <= j <= n, 1 <= k <= m has id
            (j-1)*m + (k-1); coords are stored 1-based as (j, k).
* torus:    d-dimensional coordinates (c_0, ..., c_{d-1}), 0-based, with
            the last axis varying fastest.
* regular tree:  breadth-first from the root; the root has d+1 children,
            every internal vertex d children, all leaves at depth k.
* barbell:  x_1..x_n get ids 0..n-1, y_1..y_n get n..2n-1, z_1..z_m get
            2n..2n+m-1; edges (z_i, z_{i+1}), (z_1, x_j), (z_4, y_j).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph with sorted neighbor lists."""

    n_vertices: int
    adj: tuple[tuple[int, ...], ...]
    coords: Optional[tuple[tuple[int, ...], ...]] = None
    family: str = "custom"
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def adj_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(nb) for nb in self.adj)

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v."""
        for u in range(self.n_vertices):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    @cached_property
    def is_tree(self) -> bool:
        return (
            self.n_edges == self.n_vertices - 1
            and _connected_from(self, 0) == self.n_vertices
        )


@dataclass(frozen=True)
class TreeIndex:
    """Rooted view of a tree: parent links, subtree sizes, BFS order.

    desc_count[v] is the number of descendants of v (including v itself)
    when the tree is rooted at ``root``.
    """

    root: int
    parent: tuple[Optional[int], ...]
    desc_count: tuple[int, ...]
    bfs_order: tuple[int, ...]

    def depth_of(self, v: int) -> int:
        d = 0
        while v != self.root:
            v = self.parent[v]  # type: ignore[assignment]
            d += 1
        return d


@dataclass(frozen=True)
class EdgeSplit:
    """The two connected vertex sets obtained by removing one tree edge."""

    removed_edge: tuple[int, int]
    side_u: frozenset
    side_v: frozenset

    def side_of(self, v: int) -> frozenset:
        return self.side_u if v in self.side_u else self.side_v

    def other_side(self, v: int) -> frozenset:
        return self.side_v if v in self.side_u else self.side_u


# ---------------------------------------------------------------------------
# construction helpers


def _graph_from_edges(
    n: int,
    edges: Iterable[tuple[int, int]],
    coords=None,
    family: str = "custom",
    meta: Optional[dict] = None,
) -> Graph:
    nbrs: list[set] = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adj = tuple(tuple(sorted(s)) for s in nbrs)
    return Graph(n, adj, coords, family, meta or {})


def _connected_from(g: Graph, start: int) -> int:
    seen = bytearray(g.n_vertices)
    seen[start] = 1
    queue = deque([start])
    count = 1
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if not seen[w]:
                seen[w] = 1
                count += 1
                queue.append(w)
    return count


# ---------------------------------------------------------------------------
# generators


def make_path(n: int) -> Graph:
    """Path graph on n >= 1 vertices, vertex i adjacent to i+1."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return _graph_from_edges(
        n, ((i, i + 1) for i in range(n - 1)), family="path", meta={"n": n}
    )


def make_grid(m: int, n: int) -> Graph:
    """Cartesian product of paths: n columns of height m.

    Vertex (j, k), 1 <= j <= n, 1 <= k <= m, has id (j-1)*m + (k-1).
    Vertex 0 is the corner (1, 1).
    """
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be positive")

    def vid(j: int, k: int) -> int:
        return (j - 1) * m + (k - 1)

    edges = []
    coords = []
    for j in range(1, n + 1):
        for k in range(1, m + 1):
            coords.append((j, k))
            if j < n:
                edges.append((vid(j, k), vid(j + 1, k)))
            if k < m:
                edges.append((vid(j, k), vid(j, k + 1)))
    return _graph_from_edges(
        m * n, edges, coords=tuple(coords), family="grid", meta={"m": m, "n": n}
    )


def grid_vertex(g: Graph, j: int, k: int) -> int:
    """Id of grid vertex (j, k) (1-based coordinates)."""
    if g.family != "grid":
        raise ValueError("grid_vertex needs a grid graph")
    m = g.meta["m"]
    return (j - 1) * m + (k - 1)


def make_torus(d: int, side: int) -> Graph:
    """d-dimensional discrete torus with the given side length (>= 3).

    Side lengths below 3 would create parallel edges and are rejected.
    Coordinates are 0-based d-tuples, last axis fastest.
    """
    if d < 1:
        raise ValueError("torus dimension must be positive")
    if side < 3:
        raise ValueError("torus side must be at least 3")
    n = side**d
    coords = []
    edges = []
    c = [0] * d

    def vid(cs) -> int:
        out = 0
        for x in cs:
            out = out * side + x
        return out

    for i in range(n):
        coords.append(tuple(c))
        for axis in range(d):
            nc = list(c)
            nc[axis] = (nc[axis] + 1) % side
            edges.append((i, vid(nc)))
        # increment mixed-radix counter, last axis fastest
        for axis in range(d - 1, -1, -1):
            c[axis] += 1
            if c[axis] < side:
                break
            c[axis] = 0
    return _graph_from_edges(
        n, edges, coords=tuple(coords), family="torus", meta={"dim": d, "side": side}
    )


def torus_vertex(g: Graph, *cs: int) -> int:
    """Id of torus vertex with the given 0-based coordinates."""
    if g.family != "torus":
        raise ValueError("torus_vertex needs a torus graph")
    side = g.meta["side"]
    out = 0
    for x in cs:
        out = out * side + x % side
    return out


def make_regular_tree(d: int, k: int) -> Graph:
    """Rooted tree: root 0 has d+1 children, internal vertices d children,
    all leaves at depth exactly k.  Vertices are numbered breadth-first."""
    if d < 2:
        raise ValueError("branching number d must be at least 2")
    if k < 1:
        raise ValueError("depth k must be at least 1")
    # adjacency built directly: BFS ids make parent < self < children,
    # so each list is born sorted (matters for trees with ~1e6 vertices)
    adj: list[tuple[int, ...]] = []
    next_id = 1
    frontier = []
    adj.append(tuple(range(1, d + 2)))
    for _ in range(d + 1):
        frontier.append(next_id)
        next_id += 1
    parent_of = {v: 0 for v in frontier}
    for depth in range(1, k + 1):
        last_level = depth == k
        new_frontier = []
        for p in frontier:
            if last_level:
                adj.append((parent_of[p],))
            else:
                children = tuple(range(next_id, next_id + d))
                adj.append((parent_of[p],) + children)
                for c in children:
                    parent_of[c] = p
                    new_frontier.append(c)
                next_id += d
        parent_of = {v: parent_of[v] for v in new_frontier}
        frontier = new_frontier
    return Graph(
        len(adj), tuple(adj), None, "regular_tree", {"branching": d, "depth": k}
    )


def make_barbell_tree(n: int, m: int) -> Graph:
    """Two n-leaf stars hung on an m-vertex path, at z_1 and z_4.

    Vertex numbering: x_1..x_n -> 0..n-1, y_1..y_n -> n..2n-1,
    z_1..z_m -> 2n..2n+m-1.  Requires m >= 5.
    """
    if n < 1:
        raise ValueError("star size n must be positive")
    if m < 5:
        raise ValueError("path length m must be at least 5")
    z = [2 * n + j for j in range(m)]
    edges = [(z[j], z[j + 1]) for j in range(m - 1)]
    edges += [(z[0], x) for x in range(n)]
    edges += [(z[3], n + y) for y in range(n)]
    meta = {
        "n_leaves": n,
        "path_len": m,
        "x_ids": (0, n),
        "y_ids": (n, 2 * n),
        "z_ids": (2 * n, 2 * n + m),
    }
    return _graph_from_edges(2 * n + m, edges, family="barbell", meta=meta)


def barbell_z(g: Graph, j: int) -> int:
    """Id of path vertex z_j (1-based) in a barbell tree."""
    if g.family != "barbell":
        raise ValueError("barbell_z needs a barbell tree")
    lo, hi = g.meta["z_ids"]
    v = lo + (j - 1)
    if not (lo <= v < hi):
        raise ValueError(f"z_{j} out of range")
    return v


def tree_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validated custom tree: must be connected and acyclic."""
    edges = list(edges)
    if len(edges) != n - 1:
        raise ValueError(f"a tree on {n} vertices needs {n - 1} edges, got {len(edges)}")
    seen = set()
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
    g = _graph_from_edges(n, edges, family="custom", meta={})
    if _connected_from(g, 0) != n:
        raise ValueError("edge list does not describe a connected tree")
    return g


# ---------------------------------------------------------------------------
# traversal and tree structure


def distance(g: Graph, u: int, v: int) -> int:
    """Shortest-path edge count between u and v (BFS)."""
    if u == v:
        return 0
    dist = [-1] * g.n_vertices
    dist[u] = 0
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for w in g.adj[x]:
            if dist[w] < 0:
                dist[w] = dist[x] + 1
                if w == v:
                    return dist[w]
                queue.append(w)
    raise ValueError(f"vertices {u} and {v} are not connected")


def bfs_distances(g: Graph, source: int) -> list[int]:
    """BFS distances from source; -1 for unreachable vertices."""
    dist = [-1] * g.n_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for w in g.adj[x]:
            if dist[w] < 0:
                dist[w] = dist[x] + 1
                queue.append(w)
    return dist


def rooted_index(g: Graph, root: int) -> TreeIndex:
    """Parent links, descendant counts and BFS order for a tree root.

    Neighbors are visited in ascending id order, so the BFS order is
    deterministic.
    """
    if not g.is_tree:
        raise ValueError("rooted_index requires a tree")
    n = g.n_vertices
    parent: list[Optional[int]] = [None] * n
    order = [root]
    seen = bytearray(n)
    seen[root] = 1
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if not seen[w]:
                seen[w] = 1
                parent[w] = u
                order.append(w)
                queue.append(w)
    desc = [1] * n
    for v in reversed(order[1:]):
        desc[parent[v]] += desc[v]  # type: ignore[index]
    return TreeIndex(root, tuple(parent), tuple(desc), tuple(order))


def centroids(g: Graph) -> list[int]:
    """All tree vertices x whose every x-avoiding subtree has <= N/2 vertices."""
    if not g.is_tree:
        raise ValueError("centroids requires a tree")
    n = g.n_vertices
    idx = rooted_index(g, 0)
    out = []
    for x in range(n):
        worst = 0
        for w in g.adj[x]:
            if idx.parent[w] == x:
                comp = idx.desc_count[w]
            else:
                comp = n - idx.desc_count[x]
            worst = max(worst, comp)
        if 2 * worst <= n:
            out.append(x)
    return out


def split_by_edge(g: Graph, edge: tuple[int, int]) -> EdgeSplit:
    """Partition a tree into the two components left by removing one edge."""
    if not g.is_tree:
        raise ValueError("split_by_edge requires a tree")
    u, v = edge
    if not g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge")
    side_u = set([u])
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for w in g.adj[x]:
            if w == v and x == u:
                continue
            if w not in side_u:
                side_u.add(w)
                queue.append(w)
    side_v = frozenset(range(g.n_vertices)) - side_u
    return EdgeSplit((u, v), frozenset(side_u), side_v)


def tree_path(g: Graph, u: int, v: int) -> list[int]:
    """The unique u-v path in a tree, endpoints included."""
    if not g.is_tree:
        raise ValueError("tree_path requires a tree")
    idx = rooted_index(g, u)
    path = [v]
    while path[-1] != u:
        path.append(idx.parent[path[-1]])  # type: ignore[arg-type]
    path.reverse()
    return path


def splits_between(g: Graph, y1: int, y2: int, mode: str = "all") -> list[EdgeSplit]:
    """Edge splits separating two tree vertices.

    mode="all": one split per geodesic edge, in path order from y1.

    mode="families_A": the restricted split family used when comparing
    two-peak location probabilities.  At distance > 2 it keeps only the
    geodesic splits whose removed edge touches neither y1 nor y2 (so
    neither vertex is adjacent to the opposite side).  At distance
    exactly 2 with midpoint w != vertex 0 it is the single split that
    puts the midpoint on the side away from vertex 0; this requires the
    root direction from the midpoint to run through y1 or y2, otherwise
    no such separating split exists and the family is empty.  Distance 2
    with midpoint 0, or distance < 2, gives the empty family.
    """
    if y1 == y2:
        raise ValueError("need two distinct vertices")
    if mode not in ("all", "families_A"):
        raise ValueError(f"unknown mode {mode!r}")
    path = tree_path(g, y1, y2)
    geodesic_edges = list(zip(path, path[1:]))
    if mode == "all":
        return [split_by_edge(g, e) for e in geodesic_edges]

    dist = len(geodesic_edges)
    if dist < 2:
        return []
    if dist == 2:
        mid = path[1]
        if mid == 0:
            return []
        # neighbor of mid in the direction of vertex 0
        toward_root = tree_path(g, mid, 0)[1]
        if toward_root == y1:
            return [split_by_edge(g, (y1, mid))]
        if toward_root == y2:
            return [split_by_edge(g, (mid, y2))]
        # vertex 0 hangs off a third branch of the midpoint: no split can
        # both separate y1 from y2 and keep the midpoint away from 0
        return []
    return [split_by_edge(g, e) for e in geodesic_edges[1:-1]]


# ---------------------------------------------------------------------------
# edge-list text format


def write_edge_list(g: Graph, path, header_lines: Iterable[str] = ()) -> None:
    """Write "n_vertices" then one "u v" line per edge, LF-terminated.

    Optional header lines are emitted first, prefixed with '# '.
    """
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"{g.n_vertices}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    """Read the edge-list text format (lines starting with '#' are skipped)."""
    n = None
    edges = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if n is None:
                n = int(line)
            else:
                u, v = line.split()
                edges.append((int(u), int(v)))
    if n is None:
        raise ValueError(f"{path}: empty edge-list file")
    return _graph_from_edges(n, edges, family="custom", meta={})
