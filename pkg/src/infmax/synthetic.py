"""Small deterministic graph generators for tests and demos."""
from __future__ import annotations

import numpy as np

from .community import CommunityAssignment
from .graph import Graph


def planted_partition(sizes, p_in: float, p_out: float, directed: bool = True,
                      seed: int = 0) -> tuple[Graph, CommunityAssignment]:
    """Stochastic block graph with dense blocks and sparse links between them.

    Returns the graph and its planted partition.
    """
    sizes = [int(s) for s in sizes]
    n = sum(sizes)
    block = np.repeat(np.arange(len(sizes)), sizes)
    rng = np.random.default_rng(seed)
    prob = np.where(block[:, None] == block[None, :], p_in, p_out)
    hit = rng.random((n, n)) < prob
    np.fill_diagonal(hit, False)
    if not directed:
        hit = np.triu(hit, 1)
    src, dst = np.nonzero(hit)
    return Graph.from_edges(n, src, dst, directed), CommunityAssignment(block)


def star(leaves: int, directed: bool = True) -> Graph:
    """Node 0 points at nodes ``1..leaves``."""
    leaf = np.arange(1, leaves + 1)
    return Graph.from_edges(leaves + 1, np.zeros(leaves, dtype=np.int64), leaf, directed)


def path(n: int, directed: bool = True) -> Graph:
    return Graph.from_edges(n, np.arange(n - 1), np.arange(1, n), directed)


def random_digraph(n: int, m: int, seed: int = 0) -> Graph:
    """Up to ``m`` distinct random arcs (self-loops and repeats are discarded)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(n, size=m)
    dst = rng.integers(n, size=m)
    return Graph.from_edges(n, src, dst, True)
