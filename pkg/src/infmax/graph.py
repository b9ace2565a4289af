"""Compressed adjacency graphs, edge-list I/O and structural preprocessing."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for malformed edge lists and invalid graph operations."""


@dataclass(frozen=True)
class LoadStats:
    lines: int
    self_loops: int
    duplicates: int


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable graph stored as sorted CSR out-adjacency.

    Undirected graphs keep every edge in both directions, so ``out_degree``
    and ``in_degree`` coincide. ``labels[i]`` is the id node ``i`` carried
    in the source file.
    """

    indptr: np.ndarray
    indices: np.ndarray
    directed: bool
    labels: np.ndarray
    out_degree: np.ndarray = field(init=False, repr=False)
    in_degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.indptr) - 1
        out_deg = np.diff(self.indptr).astype(np.int64)
        in_deg = np.bincount(self.indices, minlength=n).astype(np.int64)
        for arr in (self.indptr, self.indices, self.labels, out_deg, in_deg):
            arr.setflags(write=False)
        object.__setattr__(self, "out_degree", out_deg)
        object.__setattr__(self, "in_degree", in_deg)

    @classmethod
    def from_edges(cls, n, src, dst, directed=True, labels=None):
        """Build a graph from arc arrays; drops self-loops and duplicates."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphError("source and target arrays differ in length")
        if n <= 0:
            raise GraphError("graph must have at least one node")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise GraphError("edge endpoint outside [0, n)")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if not directed:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        key = np.unique(src * n + dst)
        src, dst = key // n, key % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (n,):
            raise GraphError("labels must have one entry per node")
        return cls(indptr, dst.astype(np.int64), bool(directed), labels.copy())

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def arc_count(self) -> int:
        """Number of stored directed arcs (twice the edge count if undirected)."""
        return int(self.indptr[-1])

    @property
    def edge_count(self) -> int:
        return self.arc_count if self.directed else self.arc_count // 2

    def successors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.successors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degree)
        return src, self.indices.copy()

    def edges(self) -> list[tuple[int, int]]:
        """Distinct edges; undirected edges reported once as ``(u, v)`` with ``u < v``."""
        src, dst = self.arcs()
        if not self.directed:
            keep = src < dst
            src, dst = src[keep], dst[keep]
        return list(zip(src.tolist(), dst.tolist()))

    def reverse(self) -> Graph:
        """Graph with every arc flipped (in-adjacency view)."""
        if not self.directed:
            return self
        src, dst = self.arcs()
        return Graph.from_edges(self.node_count, dst, src, True, self.labels)

    def to_csr(self, symmetric: bool = False) -> csr_matrix:
        n = self.node_count
        m = csr_matrix(
            (np.ones(self.arc_count), self.indices, self.indptr), shape=(n, n)
        )
        if symmetric and self.directed:
            m = ((m + m.T) > 0).astype(np.float64).tocsr()
        return m

    def subgraph(self, keep) -> Graph:
        """Induced subgraph on the nodes where ``keep`` is true, ids re-compacted."""
        keep = np.asarray(keep, dtype=bool)
        if not keep.any():
            raise GraphError("subgraph would be empty")
        new_id = np.full(self.node_count, -1, dtype=np.int64)
        new_id[keep] = np.arange(int(keep.sum()))
        src, dst = self.arcs()
        ok = keep[src] & keep[dst]
        return Graph.from_edges(
            int(keep.sum()), new_id[src[ok]], new_id[dst[ok]], self.directed, self.labels[keep]
        )

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, nodes={self.node_count}, edges={self.edge_count})"


@dataclass(frozen=True)
class DegreeStats:
    avg_out: float
    std_out: float
    max_out: int
    min_out: int


def degree_summary(g: Graph) -> DegreeStats:
    d = g.out_degree
    return DegreeStats(float(d.mean()), float(d.std()), int(d.max()), int(d.min()))


def parse_edge_list(lines, directed: bool = True) -> tuple[Graph, LoadStats]:
    """Parse whitespace-separated integer pairs; ``#``/``%`` lines are comments."""
    ids: dict[int, int] = {}
    src: list[int] = []
    dst: list[int] = []
    n_lines = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise GraphError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer node id in {line!r}") from None
        n_lines += 1
        src.append(ids.setdefault(a, len(ids)))
        dst.append(ids.setdefault(b, len(ids)))
    if not ids:
        raise GraphError("edge list contains no edges")

    s = np.asarray(src, dtype=np.int64)
    t = np.asarray(dst, dtype=np.int64)
    loops = int((s == t).sum())
    g = Graph.from_edges(len(ids), s, t, directed, np.fromiter(ids, dtype=np.int64))
    stats = LoadStats(n_lines, loops, n_lines - loops - g.edge_count)
    if stats.self_loops or stats.duplicates:
        logger.info(
            "dropped %d self-loops and %d duplicate edges", stats.self_loops, stats.duplicates
        )
    return g, stats


def load_edge_list(path, directed: bool = True, *, with_stats: bool = False):
    """Read an edge-list file into a :class:`Graph`.

    Node ids are compacted to ``0..n-1`` in first-seen order and the original
    ids are kept in ``Graph.labels``. With ``with_stats=True`` a
    ``(graph, LoadStats)`` pair is returned.
    """
    with open(path, encoding="utf-8", newline=None) as fh:
        g, stats = parse_edge_list(fh, directed)
    return (g, stats) if with_stats else g


def write_edge_list(g: Graph, path) -> None:
    """Write labelled edges; isolated nodes are kept as ``u u`` lines.

    The loader drops those self-loops but still registers the node, so a
    reload yields the same node set.
    """
    labels = g.labels
    with open(path, "w", encoding="utf-8") as fh:
        kind = "directed" if g.directed else "undirected"
        fh.write(f"# {kind} nodes={g.node_count} edges={g.edge_count}\n")
        for u, v in g.edges():
            fh.write(f"{labels[u]} {labels[v]}\n")
        for u in np.flatnonzero((g.out_degree == 0) & (g.in_degree == 0)):
            fh.write(f"{labels[u]} {labels[u]}\n")


def weak_components(g: Graph) -> np.ndarray:
    _, comp = connected_components(g.to_csr(), directed=True, connection="weak")
    return comp


def largest_weakly_connected_component(g: Graph) -> Graph:
    comp = weak_components(g)
    sizes = np.bincount(comp)
    best = sizes.max()
    candidates = np.flatnonzero(sizes == best)
    if candidates.size > 1:
        min_label = [g.labels[comp == c].min() for c in candidates]
        chosen = candidates[int(np.argmin(min_label))]
    else:
        chosen = candidates[0]
    if best == g.node_count:
        return g
    return g.subgraph(comp == chosen)


def remove_nodes(g: Graph, nodes) -> Graph:
    nodes = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    if nodes.size == 0:
        return g
    if nodes.min() < 0 or nodes.max() >= g.node_count:
        raise GraphError("node id outside the graph")
    keep = np.ones(g.node_count, dtype=bool)
    keep[nodes] = False
    if not keep.any():
        raise GraphError("cannot remove every node of the graph")
    return g.subgraph(keep)


def is_isomorphic_by_label(a: Graph, b: Graph) -> bool:
    """True when both graphs hold the same edge set over their original labels."""
    if a.directed != b.directed or a.node_count != b.node_count:
        return False
    if set(a.labels.tolist()) != set(b.labels.tolist()):
        return False

    def labelled(g):
        out = set()
        for u, v in g.edges():
            lu, lv = int(g.labels[u]), int(g.labels[v])
            out.add((lu, lv) if g.directed else (min(lu, lv), max(lu, lv)))
        return out

    return labelled(a) == labelled(b)
