"""The six seed-set objectives and their normalized maximize-space view."""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from .community import CommunityAssignment
from .graph import Graph
from .propagation import PropagationModel, SpreadEstimate, monte_carlo_batch

# Canonical order of the objectives. Short keys are used in masks ("I-S-C").
OBJECTIVES = ("influence", "seed_size", "communities", "fairness", "budget", "time")
SHORT = ("I", "S", "C", "F", "B", "T")
ALL = OBJECTIVES


def parse_mask(mask) -> tuple[str, ...]:
    """Normalize an objective subset to canonical order.

    Accepts ``"all"``, dash/comma separated short keys (``"I-S-T"``) or an
    iterable of short or long names.
    """
    if isinstance(mask, str):
        if mask.strip().lower() == "all":
            return ALL
        parts = [p for p in mask.replace(",", "-").split("-") if p.strip()]
    else:
        parts = list(mask)
    chosen = set()
    for p in parts:
        p = p.strip()
        if p.upper() in SHORT:
            chosen.add(OBJECTIVES[SHORT.index(p.upper())])
        elif p.lower() in OBJECTIVES:
            chosen.add(p.lower())
        else:
            raise ValueError(f"unknown objective {p!r}")
    if not chosen:
        raise ValueError("empty objective mask")
    return tuple(o for o in OBJECTIVES if o in chosen)


def mask_name(mask) -> str:
    mask = parse_mask(mask)
    if mask == ALL:
        return "all"
    return "-".join(SHORT[OBJECTIVES.index(o)] for o in mask)


@dataclass(frozen=True)
class ObjectiveVector:
    influence: float
    seed_size: int
    communities: float
    fairness: float
    budget: int
    time: float

    def as_tuple(self) -> tuple:
        return astuple(self)


@dataclass(frozen=True)
class NormalizationContext:
    """Ranges used to map raw objectives into ``[0, 1]`` (bigger is better)."""

    node_count: int
    k: int
    budget_cap: int
    tau: int | None
    active: tuple[str, ...] = ALL

    def __post_init__(self):
        object.__setattr__(self, "active", parse_mask(self.active))
        if self.node_count <= 0 or self.k <= 0:
            raise ValueError("node_count and k must be positive")
        if self.budget_cap <= 0:
            raise ValueError("budget cap must be positive")
        if "time" in self.active and self.tau is None:
            raise ValueError("time objective needs a finite tau")

    @classmethod
    def for_graph(cls, g: Graph, k: int, tau, active=ALL) -> NormalizationContext:
        return cls(g.node_count, int(k), budget_cap(g, k), tau, active)

    def with_active(self, active) -> NormalizationContext:
        return NormalizationContext(self.node_count, self.k, self.budget_cap, self.tau, active)


def kl_divergence(p, q) -> float:
    """Base-2 KL divergence with the convention 0 * log(0 / x) = 0."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def _as_distribution(p, name):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D distribution")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must be non-negative and sum to 1")
    return p


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in bits, in ``[0, 1]``."""
    p = _as_distribution(p, "p")
    q = _as_distribution(q, "q")
    if p.shape != q.shape:
        raise ValueError("distributions differ in length")
    m = 0.5 * (p + q)
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m)


def jsd_normalized(p, c: int | None = None) -> float:
    """Divergence from the uniform distribution, scaled so a one-hot ``p`` gives 1."""
    p = _as_distribution(p, "p")
    c = p.size if c is None else int(c)
    if c < 2:
        raise ValueError("normalized JSD needs at least two communities")
    if p.size != c:
        raise ValueError("distribution length differs from community count")
    uniform = np.full(c, 1.0 / c)
    delta = np.zeros(c)
    delta[0] = 1.0
    return jsd(p, uniform) / jsd(delta, uniform)


def _balance(counts, c: int) -> float:
    if c < 2:
        raise ValueError("balance scores need at least two communities")
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0
    score = 1.0 - jsd_normalized(counts / total, c)
    return float(min(1.0, max(0.0, score)))


def communities_objective(estimate: SpreadEstimate, assignment: CommunityAssignment,
                          per_run: bool = False) -> float:
    """Evenness of non-seed activations across communities (1 = uniform).

    By default one divergence is taken on the Monte Carlo mean hit counts;
    ``per_run=True`` averages the per-simulation scores instead, which needs an
    estimate produced with ``keep_runs=True``.
    """
    c = assignment.community_count
    if per_run:
        if estimate.community_hits is None:
            raise ValueError("per-run communities score needs per-run hit counts")
        return float(np.mean([_balance(h, c) for h in estimate.community_hits]))
    if estimate.mean_community_hits is None:
        raise ValueError("estimate carries no community hit counts")
    return _balance(estimate.mean_community_hits, c)


def fairness_objective(seed, assignment: CommunityAssignment) -> float:
    seed = np.asarray(list(seed), dtype=np.int64)
    if seed.size == 0:
        return 0.0
    counts = np.bincount(assignment.labels[seed], minlength=assignment.community_count)
    return _balance(counts, assignment.community_count)


def budget(g: Graph, seed) -> int:
    seed = np.asarray(list(seed), dtype=np.int64)
    return int(g.out_degree[seed].sum()) if seed.size else 0


def budget_cap(g: Graph, k: int) -> int:
    if not 1 <= k <= g.node_count:
        raise ValueError("k must lie in [1, node_count]")
    d = np.sort(g.out_degree)[::-1]
    return int(d[:k].sum())


def vector_from_estimate(g: Graph, seed, est: SpreadEstimate,
                         assignment: CommunityAssignment | None,
                         per_run: bool = False) -> ObjectiveVector:
    seed = sorted(set(int(v) for v in seed))
    if assignment is not None:
        comm = communities_objective(est, assignment, per_run)
        fair = fairness_objective(seed, assignment)
    else:
        comm = fair = math.nan
    return ObjectiveVector(
        influence=est.mean_influence,
        seed_size=len(seed),
        communities=comm,
        fairness=fair,
        budget=budget(g, seed),
        time=est.mean_hops,
    )


def evaluate_many(g: Graph, assignment, model: PropagationModel, seeds, tau, n_sims: int,
                  rng_seed: int, per_run: bool = False) -> list[ObjectiveVector]:
    seeds = [sorted(set(int(v) for v in s)) for s in seeds]
    if any(len(s) == 0 for s in seeds):
        raise ValueError("seed sets must be non-empty")
    ests = monte_carlo_batch(
        g, model, seeds, tau, n_sims, rng_seed, assignment, keep_runs=per_run
    )
    return [vector_from_estimate(g, s, e, assignment, per_run) for s, e in zip(seeds, ests)]


def evaluate(g: Graph, assignment, model: PropagationModel, seed, tau, n_sims: int = 100,
             rng_seed: int = 0, per_run: bool = False) -> ObjectiveVector:
    """All six objectives of one seed set.

    The same ``(seed, rng_seed)`` always yields the same vector.
    """
    return evaluate_many(g, assignment, model, [seed], tau, n_sims, rng_seed, per_run)[0]


def normalize_all(v: ObjectiveVector, ctx: NormalizationContext) -> np.ndarray:
    """Six-coordinate maximize-space vector; ``time`` is NaN when tau is unbounded."""
    b = ctx.budget_cap
    return np.array([
        v.influence / ctx.node_count,
        1.0 - v.seed_size / ctx.k,
        v.communities,
        v.fairness,
        1.0 - min(v.budget, b) / b,
        1.0 - v.time / ctx.tau if ctx.tau is not None else math.nan,
    ])


def to_maximize_space(v: ObjectiveVector, ctx: NormalizationContext) -> np.ndarray:
    idx = [OBJECTIVES.index(o) for o in ctx.active]
    return normalize_all(v, ctx)[idx]
