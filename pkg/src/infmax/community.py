"""Community partitions: modularity-based detection, scoring and file I/O."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from .graph import Graph


class AssignmentError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CommunityAssignment:
    """Dense node -> community labelling.

    Community ids are re-indexed to ``0..c-1`` in order of the sorted input
    ids, so no community is empty.
    """

    labels: np.ndarray
    community_count: int = field(init=False)
    sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        raw = np.asarray(self.labels)
        if raw.ndim != 1 or raw.size == 0:
            raise AssignmentError("labels must be a non-empty 1-D array")
        _, dense = np.unique(raw, return_inverse=True)
        dense = dense.astype(np.int64)
        sizes = np.bincount(dense)
        dense.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "labels", dense)
        object.__setattr__(self, "community_count", int(sizes.size))
        object.__setattr__(self, "sizes", sizes)

    @property
    def node_count(self) -> int:
        return int(self.labels.size)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def restrict(self, keep) -> CommunityAssignment:
        """Assignment for the induced subgraph on ``keep`` (re-densified)."""
        return CommunityAssignment(self.labels[np.asarray(keep, dtype=bool)])


def _symmetric_adjacency(g: Graph) -> csr_matrix:
    return g.to_csr(symmetric=True)


def modularity(g: Graph, a: CommunityAssignment, resolution: float = 1.0) -> float:
    """Newman-Girvan modularity of ``a`` on the symmetrized, unweighted graph."""
    if a.node_count != g.node_count:
        raise AssignmentError("assignment does not cover the graph")
    adj = _symmetric_adjacency(g)
    return _modularity(adj, a.labels, resolution)


def _modularity(adj: csr_matrix, labels: np.ndarray, resolution: float = 1.0) -> float:
    two_m = adj.sum()
    if two_m == 0:
        return 0.0
    coo = adj.tocoo()
    inside = coo.data[labels[coo.row] == labels[coo.col]].sum()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    tot = np.bincount(labels, weights=deg)
    return float(inside / two_m - resolution * np.sum((tot / two_m) ** 2))


def _local_moving(adj: csr_matrix, labels: np.ndarray, rng, resolution: float):
    """Greedy single-node moves until no move raises modularity.

    ``adj`` may carry self-loops (aggregated graphs); they do not depend on the
    chosen community and are skipped when counting links to communities.
    """
    n = adj.shape[0]
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    k = np.asarray(adj.sum(axis=1)).ravel()
    two_m = k.sum()
    labels = labels.copy()
    tot = np.bincount(labels, weights=k, minlength=n).astype(np.float64)
    scale = resolution / two_m
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in rng.permutation(n):
            ci = labels[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j in range(indptr[i], indptr[i + 1]):
                nb = indices[j]
                if nb == i:
                    continue
                c = labels[nb]
                links[c] = links.get(c, 0.0) + data[j]
            tot[ci] -= ki
            best_c = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki * scale
            for c in sorted(links):
                gain = links[c] - tot[c] * ki * scale
                if gain > best_gain + 1e-12:
                    best_gain, best_c = gain, c
            tot[best_c] += ki
            if best_c != ci:
                labels[i] = best_c
                improved = moved_any = True
    return labels, moved_any


def _aggregate(adj: csr_matrix, labels: np.ndarray) -> csr_matrix:
    c = int(labels.max()) + 1
    coo = adj.tocoo()
    agg = coo_matrix(
        (coo.data, (labels[coo.row], labels[coo.col])), shape=(c, c)
    ).tocsr()
    agg.sum_duplicates()
    return agg


def _densify(labels: np.ndarray) -> np.ndarray:
    return np.unique(labels, return_inverse=True)[1].astype(np.int64)


def _louvain(adj: csr_matrix, rng, resolution: float) -> np.ndarray:
    membership = np.arange(adj.shape[0], dtype=np.int64)
    level = adj
    while True:
        comm, moved = _local_moving(level, np.arange(level.shape[0]), rng, resolution)
        if not moved:
            return membership
        comm = _densify(comm)
        membership = comm[membership]
        level = _aggregate(level, comm)


def detect_communities(g: Graph, rng_seed: int = 0, resolution: float = 1.0) -> CommunityAssignment:
    """Partition ``g`` by greedy modularity optimization.

    Louvain-style local moves and aggregation are repeated to a fixed point,
    followed by node-level polishing so that no single node can raise
    modularity by joining a neighbouring community. Directed graphs are
    symmetrized for detection only. Deterministic for a given ``rng_seed``.
    """
    adj = _symmetric_adjacency(g)
    if adj.nnz == 0:
        return CommunityAssignment(np.arange(g.node_count))
    rng = np.random.default_rng(rng_seed)
    labels = _louvain(adj, rng, resolution)
    while True:
        labels, moved = _local_moving(adj, labels, rng, resolution)
        labels = _densify(labels)
        if not moved:
            break
        coarse = _louvain(_aggregate(adj, labels), rng, resolution)
        labels = _densify(coarse[labels])
    return CommunityAssignment(labels)


def load_assignment(path, g: Graph, ignore=()) -> CommunityAssignment:
    """Read ``node_label community_id`` lines and align them with ``g``.

    Labels listed in ``ignore`` (e.g. nodes dropped by preprocessing) may
    appear in the file without being part of ``g``.
    """
    index = {int(lab): i for i, lab in enumerate(g.labels)}
    ignore = set(int(v) for v in ignore)
    labels = np.full(g.node_count, -1, dtype=np.int64)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise AssignmentError(f"line {lineno}: expected 'node community'")
            try:
                node, comm = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise AssignmentError(f"line {lineno}: non-integer token") from None
            if node not in index:
                if node in ignore:
                    continue
                raise AssignmentError(f"node {node} is not in the graph")
            i = index[node]
            if labels[i] != -1:
                raise AssignmentError(f"node {node} assigned more than once")
            labels[i] = comm
    missing = np.flatnonzero(labels == -1)
    if missing.size:
        raise AssignmentError(f"node {int(g.labels[missing[0]])} unassigned")
    return CommunityAssignment(labels)


def save_assignment(a: CommunityAssignment, path, g: Graph | None = None) -> None:
    names = g.labels if g is not None else np.arange(a.node_count)
    with open(path, "w", encoding="utf-8") as fh:
        for name, c in zip(names.tolist(), a.labels.tolist()):
            fh.write(f"{name} {c}\n")
