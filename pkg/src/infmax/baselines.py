"""Greedy reference heuristics and the prefix sweep that turns them into fronts."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .analysis import ParetoFront
from .graph import Graph
from .objectives import NormalizationContext, evaluate_many
from .propagation import PropagationModel, monte_carlo_batch

GDD_LABEL = "degree-discount variant"


@dataclass
class GreedyTrace:
    ordered_seeds: list[int]
    marginal_gain: list[float] = field(default_factory=list)
    evaluations_used: int = 0
    method: str = ""


def gdd(g: Graph, k: int) -> GreedyTrace:
    """Degree-discount ordering of ``k`` seeds.

    A node's score is its out-degree discounted by how many of its
    in-neighbours were already picked, using ``1 / average in-degree`` as the
    stand-in activation probability. Ties go to the lower id.
    """
    n = g.node_count
    if not 1 <= k <= n:
        raise ValueError("k must lie in [1, node_count]")
    avg_in = g.arc_count / n
    p = 1.0 / avg_in if avg_in > 0 else 0.0
    d = g.out_degree.astype(np.float64)
    t = np.zeros(n)
    score = d.copy()
    picked = np.zeros(n, dtype=bool)
    order = []
    for _ in range(k):
        u = int(np.argmax(np.where(picked, -np.inf, score)))
        order.append(u)
        picked[u] = True
        for v in g.successors(u):
            t[v] += 1
            score[v] = d[v] - 2 * t[v] - (d[v] - t[v]) * t[v] * p
    return GreedyTrace(order, method=GDD_LABEL)


SpreadFn = Callable[[Sequence[int]], float]


def spread_oracle(g: Graph, model: PropagationModel, tau, n_sims: int, rng_seed: int) -> SpreadFn:
    """Integer total activations over ``n_sims`` coupled simulations.

    Every seed set sees the same simulated worlds, so differences between
    sets are exact rather than noisy.
    """
    def spread(seed):
        return monte_carlo_batch(g, model, [list(seed)], tau, n_sims, rng_seed)[0].influence_total
    return spread


def greedy(g: Graph, k: int, spread_fn: SpreadFn) -> GreedyTrace:
    """Plain hill climbing: re-evaluate every candidate at every step."""
    seeds: list[int] = []
    gains = []
    current = 0
    evals = 0
    for _ in range(k):
        best, best_v = None, -1
        for v in range(g.node_count):
            if v in seeds:
                continue
            gain = spread_fn(seeds + [v]) - current
            evals += 1
            if best is None or gain > best:
                best, best_v = gain, v
        seeds.append(best_v)
        current += best
        gains.append(best)
    return GreedyTrace(seeds, gains, evals, "greedy")


def celf(g: Graph, model: PropagationModel | None, k: int, tau=None, n_sims: int = 100,
         rng_seed: int = 0, spread_fn: SpreadFn | None = None) -> GreedyTrace:
    """Lazy-forward greedy selection.

    Stale gains serve as upper bounds and are refreshed only when they reach
    the top of the queue. Under coupled simulations the selected order equals
    :func:`greedy`'s. ``marginal_gain`` is reported per simulation.
    """
    n = g.node_count
    if not 1 <= k <= n:
        raise ValueError("k must lie in [1, node_count]")
    if spread_fn is None:
        spread_fn = spread_oracle(g, model, tau, n_sims, rng_seed)
        scale = 1.0 / n_sims
    else:
        scale = 1.0
    evals = 0
    heap = []
    for v in range(n):
        heap.append((-spread_fn([v]), v, 0))
        evals += 1
    heapq.heapify(heap)
    seeds: list[int] = []
    gains: list[float] = []
    current = 0
    while len(seeds) < k:
        neg, v, stamp = heapq.heappop(heap)
        if stamp == len(seeds):
            seeds.append(v)
            gains.append(-neg * scale)
            current += -neg
            continue
        gain = spread_fn(seeds + [v]) - current
        evals += 1
        heapq.heappush(heap, (-gain, v, len(seeds)))
    return GreedyTrace(seeds, gains, evals, "celf")


def prefix_sweep(g: Graph, assignment, model: PropagationModel, trace: GreedyTrace, tau,
                 n_sims: int, rng_seed: int, k: int | None = None,
                 active="I-S") -> ParetoFront:
    """Evaluate every prefix of a greedy order and keep the non-dominated ones."""
    order = trace.ordered_seeds
    k = len(order) if k is None else k
    if not 1 <= len(order) <= k:
        raise ValueError("trace must hold between 1 and k seeds")
    ctx = NormalizationContext.for_graph(g, k, tau, active)
    prefixes = [order[:i] for i in range(1, len(order) + 1)]
    vectors = evaluate_many(g, assignment, model, prefixes, tau, n_sims, rng_seed)
    return ParetoFront.from_evaluations(prefixes, vectors, ctx)
