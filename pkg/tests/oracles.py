"""Slow, obviously-correct reference implementations used by the tests.

Nothing here imports from the package under test, so agreement between the
two is real evidence.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np


# ---------------------------------------------------------------- spread


def edge_probabilities(n, edges, model, p=None):
    """Per-arc live probability for IC (constant p) or WC (1 / in-degree of target)."""
    indeg = [0] * n
    for _, v in edges:
        indeg[v] += 1
    if model == "ic":
        return [p] * len(edges)
    return [1.0 / indeg[v] for _, v in edges]


def _reach(n, live, seeds, tau):
    adj = [[] for _ in range(n)]
    for u, v in live:
        adj[u].append(v)
    dist = {s: 0 for s in seeds}
    q = deque(seeds)
    while q:
        u = q.popleft()
        if tau is not None and dist[u] >= tau:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return len(dist), max(dist.values()) if dist else 0


def exact_spread(n, edges, probs, seeds, tau=None):
    """Mean/variance of activations and mean hops by enumerating live-edge worlds.

    In a cascade, a node activates at its shortest live-path distance from the
    seeds, so hops equal the largest such distance.
    """
    uncertain = [i for i, q in enumerate(probs) if 0.0 < q < 1.0]
    sure = [edges[i] for i, q in enumerate(probs) if q >= 1.0]
    m1 = m2 = hops = 0.0
    for bits in itertools.product((0, 1), repeat=len(uncertain)):
        w = 1.0
        live = list(sure)
        for b, i in zip(bits, uncertain):
            w *= probs[i] if b else 1.0 - probs[i]
            if b:
                live.append(edges[i])
        size, h = _reach(n, live, list(seeds), tau)
        m1 += w * size
        m2 += w * size * size
        hops += w * h
    return m1, max(m2 - m1 * m1, 0.0), hops


# ------------------------------------------------------------ divergence


def kl2(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            total += a * math.log2(a / b)
    return total


def jsd_direct(p, q):
    m = [(a + b) / 2 for a, b in zip(p, q)]
    return 0.5 * kl2(p, m) + 0.5 * kl2(q, m)


def jsd_normalized_direct(p):
    c = len(p)
    u = [1.0 / c] * c
    one_hot = [1.0] + [0.0] * (c - 1)
    return jsd_direct(p, u) / jsd_direct(one_hot, u)


# ----------------------------------------------------------- dominance


def dominates(a, b):
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def brute_fronts(points):
    """Peel non-dominated layers with plain pairwise checks."""
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        layer = [i for i in remaining
                 if not any(dominates(points[j], points[i]) for j in remaining if j != i)]
        fronts.append(sorted(layer))
        remaining = [i for i in remaining if i not in layer]
    return fronts


# ---------------------------------------------------------- hypervolume


def hv_inclusion_exclusion(points):
    """Union volume of origin-anchored boxes via inclusion-exclusion."""
    total = 0.0
    n = len(points)
    for r in range(1, n + 1):
        for combo in itertools.combinations(points, r):
            corner = np.min(np.array(combo), axis=0)
            total += (-1) ** (r + 1) * float(np.prod(corner))
    return total


def hv_monte_carlo(points, samples, seed=0):
    """Fraction of uniform samples dominated by some point, with its standard error."""
    P = np.asarray(points, dtype=float)
    rng = np.random.default_rng(seed)
    hit = 0
    batch = 100_000
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        X = rng.random((b, P.shape[1]))
        covered = np.zeros(b, dtype=bool)
        for p in P:
            covered |= np.all(X <= p, axis=1)
        hit += int(covered.sum())
        done += b
    est = hit / samples
    return est, math.sqrt(max(est * (1 - est), 1e-300) / samples)


# ---------------------------------------------------------- modularity


def modularity_direct(n, edges, labels):
    """Newman-Girvan modularity of an undirected simple graph from the definition."""
    m = len(edges)
    deg = [0] * n
    adj = set()
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
        adj.add((u, v))
        adj.add((v, u))
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += (1.0 if (i, j) in adj else 0.0) - deg[i] * deg[j] / (2 * m)
    return q / (2 * m)


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


# --------------------------------------------------------------- pearson


def pearson_direct(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)
