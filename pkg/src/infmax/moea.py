"""NSGA-II over variable-length seed sets with graph-aware variation."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import ParetoFront
from .community import CommunityAssignment
from .graph import Graph
from .objectives import (
    ALL,
    NormalizationContext,
    ObjectiveVector,
    evaluate_many,
    parse_mask,
    to_maximize_space,
)
from .propagation import PropagationModel, solo_spread_ranking

logger = logging.getLogger(__name__)

SMART_INIT_TAU = 3


class ConfigError(ValueError):
    """Inconsistent optimizer or experiment settings."""


@dataclass
class Individual:
    nodes: tuple[int, ...]
    objectives: ObjectiveVector | None = None
    point: np.ndarray | None = field(default=None, repr=False)
    rank: int = -1
    crowding: float = 0.0


@dataclass(frozen=True)
class MoeaConfig:
    """Optimizer settings. ``theta=None`` means the graph's average out-degree."""

    k: int
    population_size: int = 100
    offspring_size: int = 100
    elites: int = 2
    tournament_size: int = 5
    generations: int = 100
    lam: float = 0.33
    theta: float | None = None
    active: tuple[str, ...] = ALL
    crossover_rate: float = 1.0
    mutation_rate: float = 0.1
    tau: int | None = 5
    n_sims: int = 100
    per_run_communities: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "active", parse_mask(self.active))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.validate()

    def validate(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.population_size < 1 or self.offspring_size < 1:
            raise ConfigError("population and offspring sizes must be positive")
        if not 0 <= self.elites < self.population_size:
            raise ConfigError("elites must lie in [0, population_size)")
        if self.tournament_size < 1:
            raise ConfigError("tournament size must be positive")
        if self.generations < 0:
            raise ConfigError("generations must be non-negative")
        if len(self.active) < 2:
            raise ConfigError("at least two objectives must be active")
        for name in ("lam", "crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.theta is not None and self.theta < 0:
            raise ConfigError("theta must be non-negative")
        if self.tau is not None and self.tau < 0:
            raise ConfigError("tau must be non-negative")
        if "time" in self.active and self.tau is None:
            raise ConfigError("time objective needs a finite tau")
        if self.n_sims < 1:
            raise ConfigError("n_sims must be at least 1")


# ---------------------------------------------------------------- ranking


def _domination_matrix(P: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is true when point ``i`` dominates point ``j`` (maximization)."""
    ge = np.all(P[:, None, :] >= P[None, :, :], axis=2)
    gt = np.any(P[:, None, :] > P[None, :, :], axis=2)
    return ge & gt


def fast_nondominated_sort(points) -> list[list[int]]:
    """Partition point indices into successive non-dominated fronts."""
    P = np.asarray(points, dtype=np.float64)
    n = len(P)
    if n == 0:
        return []
    dom = _domination_matrix(P)
    count = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(count == 0)
    while current.size:
        fronts.append(current.tolist())
        count = count - dom[current].sum(axis=0)
        count[current] = -1
        current = np.flatnonzero(count == 0)
    return fronts


def crowding_distance(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    n = len(P)
    if n == 0:
        raise ValueError("empty front")
    if n <= 2:
        return np.full(n, math.inf)
    dist = np.zeros(n)
    for d in range(P.shape[1]):
        order = np.argsort(P[:, d], kind="mergesort")
        col = P[order, d]
        span = col[-1] - col[0]
        if span == 0:
            continue
        dist[order[0]] = dist[order[-1]] = math.inf
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def assign_rank_and_crowding(pop: list[Individual]) -> list[list[int]]:
    fronts = fast_nondominated_sort([ind.point for ind in pop])
    for r, front in enumerate(fronts):
        cd = crowding_distance([pop[i].point for i in front])
        for i, c in zip(front, cd):
            pop[i].rank = r
            pop[i].crowding = float(c)
    return fronts


def _crowded_key(ind: Individual):
    return (ind.rank, -ind.crowding)


def tournament(pop: list[Individual], size: int, rng) -> Individual:
    """Crowded-comparison tournament; equal contestants are picked at random."""
    idx = rng.choice(len(pop), size=min(size, len(pop)), replace=False)
    best = min(_crowded_key(pop[i]) for i in idx)
    tied = [i for i in idx if _crowded_key(pop[i]) == best]
    return pop[tied[int(rng.integers(len(tied)))]]


def environmental_selection(pool: list[Individual], size: int) -> list[Individual]:
    fronts = assign_rank_and_crowding(pool)
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= size:
            chosen.extend(front)
            continue
        rest = sorted(front, key=lambda i: -pool[i].crowding)
        chosen.extend(rest[:size - len(chosen)])
        break
    return [pool[i] for i in chosen]


# -------------------------------------------------------------- variation


def _random_set(n: int, k: int, rng) -> tuple[int, ...]:
    size = int(rng.integers(1, min(k, n) + 1))
    return tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))


def _roulette_without_replacement(pool: np.ndarray, weights: np.ndarray, size: int, rng):
    w = weights.astype(np.float64).copy()
    picked = []
    alive = np.ones(pool.size, dtype=bool)
    for _ in range(min(size, pool.size)):
        total = w[alive].sum()
        if total > 0:
            probs = np.where(alive, w, 0.0) / total
        else:
            probs = alive / alive.sum()
        i = int(rng.choice(pool.size, p=probs))
        picked.append(int(pool[i]))
        alive[i] = False
    return picked


def smart_pool(g: Graph, model: PropagationModel, cfg: MoeaConfig, rng_seed: int) -> np.ndarray:
    """Top-k nodes by stand-alone spread whose out-degree reaches theta."""
    ranking = solo_spread_ranking(g, model, SMART_INIT_TAU, cfg.n_sims, rng_seed)
    top = np.array([v for v, _ in ranking[:cfg.k]], dtype=np.int64)
    theta = float(g.out_degree.mean()) if cfg.theta is None else cfg.theta
    pool = top[g.out_degree[top] >= theta]
    if pool.size == 0:
        logger.warning("no top-%d node has out-degree >= %.3g; using the unfiltered pool",
                       cfg.k, theta)
        pool = top
    return pool


def smart_initialize(g: Graph, model: PropagationModel, cfg: MoeaConfig, rng,
                     pool: np.ndarray | None = None) -> list[Individual]:
    """Initial population: a ``lam`` share seeded from high-spread hubs, the rest random."""
    n = g.node_count
    n_smart = math.ceil(cfg.lam * cfg.population_size - 1e-9)
    if n_smart and pool is None:
        pool = smart_pool(g, model, cfg, int(rng.integers(2**62)))
    pop = []
    for _ in range(n_smart):
        size = int(rng.integers(1, min(cfg.k, n) + 1))
        chosen = _roulette_without_replacement(pool, g.out_degree[pool], size, rng)
        if len(chosen) < size:
            rest = np.setdiff1d(np.arange(n), chosen)
            chosen += rng.choice(rest, size=size - len(chosen), replace=False).tolist()
        pop.append(Individual(tuple(sorted(chosen))))
    for _ in range(cfg.population_size - n_smart):
        pop.append(Individual(_random_set(n, cfg.k, rng)))
    return pop


def _finish_child(genes: list[int], parents: tuple, k: int, rng) -> tuple[int, ...]:
    seen = list(dict.fromkeys(genes))
    if len(seen) > k:
        keep = rng.choice(len(seen), size=k, replace=False)
        seen = [seen[i] for i in keep]
    if not seen:
        donors = [v for p in parents for v in p]
        seen = [donors[int(rng.integers(len(donors)))]]
    return tuple(sorted(seen))


def one_point_crossover(a, b, k: int, rng, cuts: tuple[int, int] | None = None):
    """Swap tails at independent cut points; children are deduplicated and capped at ``k``."""
    a = list(a.nodes if isinstance(a, Individual) else a)
    b = list(b.nodes if isinstance(b, Individual) else b)
    if a == b:
        # a set recombined with itself stays itself
        return tuple(a), tuple(b)
    if cuts is None:
        cuts = (int(rng.integers(len(a) + 1)), int(rng.integers(len(b) + 1)))
    ca, cb = cuts
    c1 = _finish_child(a[:ca] + b[cb:], (a, b), k, rng)
    c2 = _finish_child(b[:cb] + a[ca:], (a, b), k, rng)
    return c1, c2


def _replace(nodes, old: int, new: int) -> tuple[int, ...]:
    return tuple(sorted([v for v in nodes if v != old] + [new]))


def global_random_insert(nodes, g: Graph, k: int, rng):
    if len(nodes) >= k or len(nodes) >= g.node_count:
        return tuple(nodes)
    free = np.setdiff1d(np.arange(g.node_count), nodes)
    return tuple(sorted(list(nodes) + [int(rng.choice(free))]))


def global_random_removal(nodes, g: Graph, k: int, rng):
    if len(nodes) <= 1:
        return tuple(nodes)
    drop = nodes[int(rng.integers(len(nodes)))]
    return tuple(v for v in nodes if v != drop)


def local_neighbor(nodes, g: Graph, k: int, rng):
    u = nodes[int(rng.integers(len(nodes)))]
    cand = np.setdiff1d(g.successors(u), nodes)
    if cand.size == 0:
        return tuple(nodes)
    return _replace(nodes, u, int(rng.choice(cand)))


def local_neighbor_second_degree(nodes, g: Graph, k: int, rng):
    u = nodes[int(rng.integers(len(nodes)))]
    first = g.successors(u)
    if first.size == 0:
        return tuple(nodes)
    second = np.unique(np.concatenate([g.successors(w) for w in first]))
    cand = np.setdiff1d(second, nodes)
    if cand.size == 0:
        return tuple(nodes)
    w = g.out_degree[cand].astype(np.float64)
    p = w / w.sum() if w.sum() > 0 else None
    return _replace(nodes, u, int(rng.choice(cand, p=p)))


def global_low_degree(nodes, g: Graph, k: int, rng):
    cand = np.setdiff1d(np.arange(g.node_count), nodes)
    if cand.size == 0:
        return tuple(nodes)
    u = nodes[int(rng.integers(len(nodes)))]
    w = 1.0 / (g.out_degree[cand] + 1.0)
    return _replace(nodes, u, int(rng.choice(cand, p=w / w.sum())))


MUTATIONS = (
    global_random_insert,
    global_random_removal,
    local_neighbor,
    local_neighbor_second_degree,
    global_low_degree,
)


def mutate(nodes, g: Graph, k: int, rng) -> tuple[int, ...]:
    """Apply one of the five mutation operators, chosen uniformly."""
    nodes = tuple(nodes.nodes if isinstance(nodes, Individual) else nodes)
    op = MUTATIONS[int(rng.integers(len(MUTATIONS)))]
    return op(nodes, g, k, rng)


# ------------------------------------------------------------------ loop


@dataclass
class Snapshot:
    generation: int
    front: list[tuple[int, ...]]
    archive_points: np.ndarray = field(repr=False)
    evaluations: int
    seconds: float


@dataclass
class RunHistory:
    rng_seed: int
    config: MoeaConfig
    snapshots: list[Snapshot]
    archive: ParetoFront
    evaluations: int = 0


class Evaluator:
    """Memoized objective evaluation; one Monte Carlo stream seed per run."""

    def __init__(self, g, assignment, model, cfg: MoeaConfig, ctx: NormalizationContext,
                 rng_seed: int):
        self.g, self.assignment, self.model = g, assignment, model
        self.cfg, self.ctx, self.rng_seed = cfg, ctx, rng_seed
        self.cache: dict[tuple[int, ...], ObjectiveVector] = {}

    def __call__(self, pop: list[Individual]) -> None:
        missing = list(dict.fromkeys(ind.nodes for ind in pop if ind.nodes not in self.cache))
        if missing:
            vecs = evaluate_many(self.g, self.assignment, self.model, missing, self.cfg.tau,
                                 self.cfg.n_sims, self.rng_seed, self.cfg.per_run_communities)
            self.cache.update(zip(missing, vecs))
        for ind in pop:
            ind.objectives = self.cache[ind.nodes]
            ind.point = to_maximize_space(ind.objectives, self.ctx)


class Archive:
    """Cumulative set of non-dominated individuals, unique by node set."""

    def __init__(self):
        self.members: list[Individual] = []
        self._seen: set[tuple[int, ...]] = set()

    def points(self, m: int) -> np.ndarray:
        if not self.members:
            return np.zeros((0, m))
        return np.array([ind.point for ind in self.members])

    def update(self, pop: list[Individual]) -> None:
        for ind in pop:
            if ind.nodes in self._seen:
                continue
            P = self.points(len(ind.point))
            if len(P):
                if np.any(np.all(P >= ind.point, axis=1) & np.any(P > ind.point, axis=1)):
                    continue
                beaten = np.all(ind.point >= P, axis=1) & np.any(ind.point > P, axis=1)
                for j in np.flatnonzero(beaten):
                    self._seen.discard(self.members[j].nodes)
                self.members = [m for m, b in zip(self.members, beaten) if not b]
            self.members.append(ind)
            self._seen.add(ind.nodes)


def check_inputs(g: Graph, assignment, cfg: MoeaConfig) -> None:
    if cfg.k > g.node_count:
        raise ConfigError("k exceeds the number of nodes")
    needs = {"communities", "fairness"} & set(cfg.active)
    if needs and assignment is None:
        raise ConfigError(f"{' and '.join(sorted(needs))} need a community assignment")
    if assignment is not None:
        if assignment.node_count != g.node_count:
            raise ConfigError("community assignment does not cover the graph")
        if assignment.community_count < 2:
            raise ConfigError("community objectives need at least two communities")


def run_nsga2(g: Graph, assignment: CommunityAssignment | None, model: PropagationModel,
              cfg: MoeaConfig, rng_seed: int = 0, on_generation=None) -> RunHistory:
    """Evolve seed sets on ``cfg.active`` and return the cumulative non-dominated archive.

    The same ``rng_seed`` drives variation and Monte Carlo evaluation, so
    repeated runs are identical. ``on_generation(gen, population)`` is called
    after every selection step, including the initial population as gen 0.
    """
    check_inputs(g, assignment, cfg)
    rng = np.random.default_rng(rng_seed)
    ctx = NormalizationContext.for_graph(g, cfg.k, cfg.tau, cfg.active)
    evaluate = Evaluator(g, assignment, model, cfg, ctx, rng_seed)
    m = len(cfg.active)

    t0 = time.perf_counter()
    pop = smart_initialize(g, model, cfg, rng)
    evaluate(pop)
    assign_rank_and_crowding(pop)
    archive = Archive()
    archive.update(pop)
    snapshots = [_snapshot(0, pop, archive, m, len(evaluate.cache), t0)]
    if on_generation:
        on_generation(0, pop)

    for gen in range(1, cfg.generations + 1):
        t0 = time.perf_counter()
        children: list[Individual] = []
        while len(children) < cfg.offspring_size:
            a = tournament(pop, cfg.tournament_size, rng)
            b = tournament(pop, cfg.tournament_size, rng)
            if rng.random() < cfg.crossover_rate:
                pair = one_point_crossover(a, b, cfg.k, rng)
            else:
                pair = (a.nodes, b.nodes)
            for nodes in pair:
                if rng.random() < cfg.mutation_rate:
                    nodes = mutate(nodes, g, cfg.k, rng)
                children.append(Individual(nodes))
        children = children[:cfg.offspring_size]
        evaluate(children)
        elite = sorted(range(len(pop)), key=lambda i: _crowded_key(pop[i]))[:cfg.elites]
        children += [Individual(pop[i].nodes, pop[i].objectives, pop[i].point)
                     for i in elite]
        pop = environmental_selection(pop + children, cfg.population_size)
        archive.update(children)
        snapshots.append(_snapshot(gen, pop, archive, m, len(evaluate.cache), t0))
        if on_generation:
            on_generation(gen, pop)

    members = sorted(archive.members, key=lambda ind: ind.nodes)
    front = ParetoFront.from_evaluations(
        [ind.nodes for ind in members], [ind.objectives for ind in members], ctx,
        filter_dominated=False,
    )
    return RunHistory(rng_seed, cfg, snapshots, front, len(evaluate.cache))


def _snapshot(gen, pop, archive, m, evals, t0) -> Snapshot:
    front = sorted(ind.nodes for ind in pop if ind.rank == 0)
    return Snapshot(gen, front, archive.points(m), evals, time.perf_counter() - t0)
