"""Front containers, hypervolume, objective correlation and Holm's step-down test."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numba as nb
import numpy as np

from .objectives import (
    ALL,
    OBJECTIVES,
    NormalizationContext,
    ObjectiveVector,
    normalize_all,
    parse_mask,
)


def dominates(a, b) -> bool:
    """Maximization dominance: ``a`` at least as good everywhere, better somewhere."""
    a = np.asarray(a)
    b = np.asarray(b)
    return bool(np.all(a >= b) and np.any(a > b))


def nondominated_mask(points) -> np.ndarray:
    """Boolean mask of points not dominated by any other point (maximization).

    Identical points do not dominate each other, so duplicates all survive.
    """
    P = np.asarray(points, dtype=np.float64)
    n = len(P)
    if n == 0:
        return np.zeros(0, dtype=bool)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        ge = np.all(P >= P[i], axis=1)
        gt = np.any(P > P[i], axis=1)
        if np.any(ge & gt):
            keep[i] = False
    return keep


@nb.njit(cache=True)
def _filter_front(P):
    """Drop dominated rows and repeated rows (maximization)."""
    n, m = P.shape
    keep = np.ones(n, np.bool_)
    for i in range(n):
        if not keep[i]:
            continue
        for j in range(n):
            if i == j or not keep[j]:
                continue
            ge = True
            gt = False
            for d in range(m):
                if P[j, d] < P[i, d]:
                    ge = False
                    break
                if P[j, d] > P[i, d]:
                    gt = True
            # j dominates i, or j repeats i and comes first
            if ge and (gt or j < i):
                keep[i] = False
                break
    return P[keep]


@nb.njit(cache=True)
def _hv2d(P):
    order = np.argsort(-P[:, 0], kind="mergesort")
    area = 0.0
    ymax = 0.0
    for k in range(order.size):
        x = P[order[k], 0]
        y = P[order[k], 1]
        if y > ymax:
            area += x * (y - ymax)
            ymax = y
    return area


@nb.njit(cache=True)
def _wfg(P):
    """Exclusive-volume recursion on a non-dominated set.

    Points are processed in ascending order of their last coordinate, so
    every limit set built against later points shares that coordinate and the
    recursion continues one dimension lower.
    """
    n, m = P.shape
    if n == 0:
        return 0.0
    if n == 1:
        v = 1.0
        for d in range(m):
            v *= P[0, d]
        return v
    if m == 2:
        return _hv2d(P)
    P = P[np.argsort(P[:, m - 1], kind="mergesort")]
    total = 0.0
    for i in range(n):
        box = 1.0
        for d in range(m - 1):
            box *= P[i, d]
        if i + 1 < n:
            limit = np.empty((n - i - 1, m - 1))
            for j in range(i + 1, n):
                for d in range(m - 1):
                    limit[j - i - 1, d] = min(P[i, d], P[j, d])
            box -= _wfg(_filter_front(limit))
        total += P[i, m - 1] * box
    return total


def hypervolume(points, m: int | None = None) -> float:
    """Volume dominated by ``points`` inside the unit box, reference at the origin."""
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[None, :] if P.size else P.reshape(0, m or 0)
    if P.size == 0:
        if m is not None and not 2 <= m <= 6:
            raise ValueError("hypervolume supports 2 to 6 objectives")
        return 0.0
    dim = P.shape[1]
    if m is not None and m != dim:
        raise ValueError("point dimension does not match m")
    if not 2 <= dim <= 6:
        raise ValueError("hypervolume supports 2 to 6 objectives")
    if not np.all(np.isfinite(P)):
        raise ValueError("coordinates must be finite")
    if P.min() < -1e-12 or P.max() > 1 + 1e-12:
        raise ValueError("coordinates must lie in [0, 1]")
    P = np.clip(P, 0.0, 1.0)
    P = P[np.all(P > 0, axis=1)]
    if len(P) == 0:
        return 0.0
    return float(_wfg(_filter_front(np.ascontiguousarray(P))))


@dataclass(frozen=True)
class FrontEntry:
    nodes: tuple[int, ...]
    objectives: ObjectiveVector
    point: np.ndarray = field(repr=False)


@dataclass
class ParetoFront:
    """Mutually non-dominated seed sets on ``ctx.active``.

    ``entry.point`` always holds all six normalized coordinates, so any
    objective subset can be projected without re-evaluation.
    """

    entries: list[FrontEntry]
    ctx: NormalizationContext

    @classmethod
    def from_evaluations(cls, seeds, vectors, ctx: NormalizationContext,
                         filter_dominated: bool = True) -> ParetoFront:
        entries = [
            FrontEntry(tuple(sorted(int(v) for v in s)), vec, normalize_all(vec, ctx))
            for s, vec in zip(seeds, vectors)
        ]
        front = cls(entries, ctx)
        return front.nondominated() if filter_dominated else front

    def __len__(self):
        return len(self.entries)

    def points(self, dims=None) -> np.ndarray:
        dims = self.ctx.active if dims is None else parse_mask(dims)
        idx = [OBJECTIVES.index(d) for d in dims]
        if not self.entries:
            return np.zeros((0, len(idx)))
        return np.array([e.point[idx] for e in self.entries])

    def nondominated(self) -> ParetoFront:
        if not self.entries:
            return self
        keep = nondominated_mask(self.points())
        return ParetoFront([e for e, k in zip(self.entries, keep) if k], self.ctx)


def subset_hypervolume(front: ParetoFront, dims) -> float:
    """Hypervolume of ``front`` projected onto the objective subset ``dims``."""
    dims = parse_mask(dims)
    P = front.points(dims)
    if len(P) and not np.all(np.isfinite(P)):
        missing = [d for d, ok in zip(dims, np.all(np.isfinite(P), axis=0)) if not ok]
        raise ValueError(f"front has no values for {', '.join(missing)}")
    return hypervolume(P, len(dims))


def pearson(x, y) -> float:
    """Sample Pearson coefficient; NaN when either input has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D and of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    syy = float(np.dot(ym, ym))
    if sxx == 0.0 or syy == 0.0:
        return math.nan
    r = float(np.dot(xm, ym)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def pooled_points(fronts: Iterable[ParetoFront]) -> np.ndarray:
    rows = [f.points(ALL) for f in fronts if len(f)]
    return np.vstack(rows) if rows else np.zeros((0, len(ALL)))


def correlation_matrix(fronts: Sequence[ParetoFront]) -> np.ndarray:
    """Pearson matrix of the six normalized objectives over all pooled entries."""
    fronts = list(fronts)
    for f in fronts:
        if f.ctx.active != ALL:
            raise ValueError("correlation needs fronts optimized on all six objectives")
    P = pooled_points(fronts)
    if len(P) < 2:
        raise ValueError("need at least two pooled front entries")
    m = P.shape[1]
    out = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = pearson(P[:, i], P[:, j])
    return out


class HolmDecision(NamedTuple):
    label: str
    p_value: float
    threshold: float
    rejected: bool


def holm_bonferroni(p_values, alpha: float = 0.05) -> list[HolmDecision]:
    """Holm's step-down procedure, returned in ascending p-value order."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    items = list(p_values.items()) if isinstance(p_values, Mapping) else list(p_values)
    for _, p in items:
        if not 0.0 <= p <= 1.0:
            raise ValueError("p-values must lie in [0, 1]")
    items.sort(key=lambda kv: kv[1])
    n = len(items)
    out = []
    still_rejecting = True
    for i, (label, p) in enumerate(items):
        thr = alpha / (n - i)
        still_rejecting = still_rejecting and p <= thr
        out.append(HolmDecision(str(label), float(p), thr, still_rejecting))
    return out
