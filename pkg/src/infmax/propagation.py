"""Breadth-synchronous IC / WC / LT propagation with Monte Carlo aggregation.

Every random draw is a counter-based hash of ``(simulation key, edge id)``
(or ``(simulation key, node id)`` for LT thresholds). Two seed sets simulated
under the same simulation key therefore see the same live-edge world, which
makes spread estimates coupled across seed sets: for ``S`` a subset of ``S'``
the activated set of ``S`` is a subset of that of ``S'`` in every run.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba as nb

if nb.config.THREADING_LAYER == "default":
    nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
import numpy as np

from .graph import Graph

UNBOUNDED = -1

_IC, _WC, _LT = 0, 1, 2
_KINDS = {"IC": _IC, "WC": _WC, "LT": _LT}


@dataclass(frozen=True)
class PropagationModel:
    kind: str
    ic_probability: float | None = None
    lt_threshold_low: float | None = None
    lt_threshold_high: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in _KINDS:
            raise ValueError(f"unknown propagation model {self.kind!r}")
        has_p = self.ic_probability is not None
        has_lt = self.lt_threshold_low is not None or self.lt_threshold_high is not None
        if kind == "IC":
            if not has_p or has_lt:
                raise ValueError("IC needs ic_probability and nothing else")
            if not 0.0 <= self.ic_probability <= 1.0:
                raise ValueError("ic_probability must lie in [0, 1]")
        elif kind == "WC":
            if has_p or has_lt:
                raise ValueError("WC takes no parameters")
        else:
            if has_p or self.lt_threshold_low is None or self.lt_threshold_high is None:
                raise ValueError("LT needs both threshold bounds")
            if not 0.0 <= self.lt_threshold_low <= self.lt_threshold_high <= 1.0:
                raise ValueError("LT thresholds must satisfy 0 <= low <= high <= 1")

    @classmethod
    def ic(cls, p: float) -> PropagationModel:
        return cls("IC", ic_probability=float(p))

    @classmethod
    def wc(cls) -> PropagationModel:
        return cls("WC")

    @classmethod
    def lt(cls, low: float = 0.0, high: float = 1.0) -> PropagationModel:
        return cls("LT", lt_threshold_low=float(low), lt_threshold_high=float(high))

    @classmethod
    def parse(cls, text: str) -> PropagationModel:
        """Parse ``"ic:0.05"``, ``"wc"`` or ``"lt:0.3,0.6"``."""
        name, _, arg = text.strip().partition(":")
        name = name.lower()
        if name == "ic":
            return cls.ic(float(arg))
        if name == "wc" and not arg:
            return cls.wc()
        if name == "lt":
            low, high = (float(x) for x in arg.split(","))
            return cls.lt(low, high)
        raise ValueError(f"cannot parse propagation model {text!r}")

    def spec(self) -> str:
        if self.kind == "IC":
            return f"ic:{self.ic_probability!r}"
        if self.kind == "LT":
            return f"lt:{self.lt_threshold_low!r},{self.lt_threshold_high!r}"
        return "wc"

    def _params(self):
        return (
            _KINDS[self.kind],
            float(self.ic_probability or 0.0),
            float(self.lt_threshold_low or 0.0),
            float(self.lt_threshold_high or 0.0),
        )


@dataclass(frozen=True)
class SpreadSample:
    activated: np.ndarray
    hops: int


@dataclass(frozen=True)
class SpreadEstimate:
    """Monte Carlo averages for one seed set.

    ``influence_total`` and ``hops_total`` are the exact integer sums the means
    are derived from; ``influence_sq_total`` allows standard errors.
    """

    mean_influence: float
    mean_hops: float
    mean_community_hits: np.ndarray | None
    samples: int
    influence_total: int
    hops_total: int
    influence_sq_total: int
    community_hits: np.ndarray | None = None

    @property
    def std_error(self) -> float:
        n = self.samples
        var = self.influence_sq_total / n - self.mean_influence ** 2
        return float(np.sqrt(max(var, 0.0) / n))


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@nb.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True, inline="always")
def _uniform(key, counter):
    z = _mix(key + (np.uint64(counter) + np.uint64(1)) * _GOLDEN)
    return np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@nb.njit(cache=True)
def _sim_key(rng_seed, sim):
    return _mix(np.uint64(rng_seed ^ sim) + _GOLDEN)


@nb.njit(cache=True)
def _simulate(indptr, indices, in_deg, kind, p, low, high, seeds, tau, key,
              state, acc, theta, touched, out):
    """One run of the frontier loop over distinct ``seeds``.

    ``state`` and ``acc`` must be zero on entry and are restored on exit.
    Activated nodes are written to ``out`` (seeds first); returns the
    activated count and the number of steps that activated something.
    """
    n_act = 0
    for s in seeds:
        state[s] = 1
        out[n_act] = s
        n_act += 1
    nnz = indptr[-1]
    span = high - low
    frontier_start = 0
    frontier_end = n_act
    hops = 0
    t = 0
    n_touched = 0
    while frontier_end > frontier_start and (tau < 0 or t < tau):
        new_end = frontier_end
        for f in range(frontier_start, frontier_end):
            u = out[f]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if state[v] != 0:
                    continue
                if kind == 2:
                    if acc[v] == 0.0:
                        # threshold drawn on first contact; untouched nodes never need one
                        theta[v] = low + span * _uniform(key, nnz + v)
                        touched[n_touched] = v
                        n_touched += 1
                    acc[v] += 1.0 / in_deg[v]
                    if acc[v] + 1e-12 >= theta[v]:
                        state[v] = 2
                        out[new_end] = v
                        new_end += 1
                else:
                    prob = p if kind == 0 else 1.0 / in_deg[v]
                    if _uniform(key, e) < prob:
                        state[v] = 2
                        out[new_end] = v
                        new_end += 1
        for f in range(frontier_end, new_end):
            state[out[f]] = 1
        t += 1
        if new_end > frontier_end:
            hops += 1
        frontier_start = frontier_end
        frontier_end = new_end
    for f in range(frontier_end):
        state[out[f]] = 0
    for i in range(n_touched):
        acc[touched[i]] = 0.0
    return frontier_end, hops


@nb.njit(cache=True, parallel=True)
def _mc_batch(indptr, indices, in_deg, kind, p, low, high, seed_ptr, seed_nodes,
              tau, n_sims, rng_seed, comm, n_comm):
    n = in_deg.size
    n_lt = n if kind == 2 else 0
    n_sets = seed_ptr.size - 1
    total = n_sets * n_sims
    infl = np.zeros(total, np.int64)
    hops = np.zeros(total, np.int64)
    hits = np.zeros((total, max(n_comm, 1)), np.int64)
    for job in nb.prange(total):
        si = job // n_sims
        sim = job % n_sims
        seeds = seed_nodes[seed_ptr[si]:seed_ptr[si + 1]]
        state = np.zeros(n, np.int8)
        acc = np.zeros(n_lt, np.float64)
        theta = np.empty(n_lt, np.float64)
        touched = np.empty(n_lt, np.int64)
        out = np.empty(n, np.int64)
        cnt, h = _simulate(indptr, indices, in_deg, kind, p, low, high, seeds,
                           tau, _sim_key(rng_seed, sim), state, acc, theta,
                           touched, out)
        infl[job] = cnt
        hops[job] = h
        if n_comm > 0:
            for f in range(seeds.size, cnt):
                hits[job, comm[out[f]]] += 1
    return infl, hops, hits


@nb.njit(cache=True)
def _simulate_one(indptr, indices, in_deg, kind, p, low, high, seeds, tau, key):
    n = in_deg.size
    n_lt = n if kind == 2 else 0
    out = np.empty(n, np.int64)
    cnt, h = _simulate(indptr, indices, in_deg, kind, p, low, high, seeds, tau,
                       key, np.zeros(n, np.int8), np.zeros(n_lt, np.float64),
                       np.empty(n_lt, np.float64), np.empty(n_lt, np.int64), out)
    return out[:cnt].copy(), h


def _tau_arg(tau) -> int:
    if tau is None or tau == UNBOUNDED or (isinstance(tau, float) and np.isinf(tau)):
        return UNBOUNDED
    tau = int(tau)
    if tau < 0:
        raise ValueError("tau must be non-negative or unbounded")
    return tau


def _check_seeds(g: Graph, seed) -> np.ndarray:
    arr = np.unique(np.asarray(list(seed), dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= g.node_count):
        raise ValueError("seed node outside the graph")
    return arr


def simulation_key(rng_seed: int, sim: int) -> int:
    """Random-stream key of simulation ``sim`` within a run seeded ``rng_seed``."""
    return int(_sim_key(np.int64(rng_seed), np.int64(sim)))


def simulate_once(g: Graph, model: PropagationModel, seed, tau=None, rng=0) -> SpreadSample:
    """Run the propagation loop once.

    ``rng`` is either an integer stream key (see :func:`simulation_key`) or a
    ``numpy.random.Generator`` from which a key is drawn.
    """
    seeds = _check_seeds(g, seed)
    if isinstance(rng, np.random.Generator):
        key = int(rng.integers(0, 2**63))
    else:
        key = int(rng)
    kind, p, low, high = model._params()
    act, hops = _simulate_one(
        g.indptr, g.indices, g.in_degree, kind, p, low, high, seeds,
        _tau_arg(tau), np.uint64(key % 2**64),
    )
    return SpreadSample(np.sort(act), int(hops))


def monte_carlo_batch(g: Graph, model: PropagationModel, seed_sets, tau=None,
                      n_sims: int = 100, rng_seed: int = 0, communities=None,
                      keep_runs: bool = False) -> list[SpreadEstimate]:
    """Estimate spread for several seed sets in one compiled call.

    Simulation ``i`` of every seed set uses the stream ``rng_seed ^ i``, so the
    result does not depend on batching or thread scheduling.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    seed_sets = [_check_seeds(g, s) for s in seed_sets]
    if not seed_sets:
        return []
    ptr = np.zeros(len(seed_sets) + 1, dtype=np.int64)
    np.cumsum([s.size for s in seed_sets], out=ptr[1:])
    flat = np.concatenate(seed_sets) if ptr[-1] else np.zeros(0, dtype=np.int64)
    if communities is not None:
        comm = communities.labels
        n_comm = communities.community_count
    else:
        comm = np.zeros(g.node_count, dtype=np.int64)
        n_comm = 0
    kind, p, low, high = model._params()
    infl, hops, hits = _mc_batch(
        g.indptr, g.indices, g.in_degree, kind, p, low, high, ptr, flat,
        _tau_arg(tau), int(n_sims), np.int64(rng_seed), comm, int(n_comm),
    )
    infl = infl.reshape(len(seed_sets), n_sims)
    hops = hops.reshape(len(seed_sets), n_sims)
    hits = hits.reshape(len(seed_sets), n_sims, -1)
    out = []
    for i in range(len(seed_sets)):
        it = int(infl[i].sum())
        ht = int(hops[i].sum())
        per_comm = hits[i].sum(axis=0) / n_sims if n_comm else None
        out.append(SpreadEstimate(
            mean_influence=it / n_sims,
            mean_hops=ht / n_sims,
            mean_community_hits=per_comm,
            samples=n_sims,
            influence_total=it,
            hops_total=ht,
            influence_sq_total=int((infl[i] ** 2).sum()),
            community_hits=hits[i].copy() if (keep_runs and n_comm) else None,
        ))
    return out


def monte_carlo(g: Graph, model: PropagationModel, seed, tau=None, n_sims: int = 100,
                rng_seed: int = 0, communities=None, keep_runs: bool = False) -> SpreadEstimate:
    return monte_carlo_batch(
        g, model, [seed], tau, n_sims, rng_seed, communities, keep_runs
    )[0]


def solo_spread_ranking(g: Graph, model: PropagationModel, tau=3, n_sims: int = 100,
                        rng_seed: int = 0) -> list[tuple[int, float]]:
    """Every node's stand-alone spread, best first.

    Ties go to the higher out-degree, then to the lower node id.
    """
    est = monte_carlo_batch(
        g, model, [[v] for v in range(g.node_count)], tau, n_sims, rng_seed
    )
    spread = np.array([e.mean_influence for e in est])
    order = np.lexsort((np.arange(g.node_count), -g.out_degree, -spread))
    return [(int(v), float(spread[v])) for v in order]
