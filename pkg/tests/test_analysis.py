import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from infmax.analysis import (
    ParetoFront,
    correlation_matrix,
    holm_bonferroni,
    hypervolume,
    nondominated_mask,
    pearson,
    subset_hypervolume,
)
from infmax.objectives import NormalizationContext, ObjectiveVector

from oracles import hv_inclusion_exclusion, hv_monte_carlo, pearson_direct

CTX = NormalizationContext(node_count=10, k=5, budget_cap=20, tau=4)


def _front(vectors, ctx=CTX):
    seeds = [tuple(range(v.seed_size)) for v in vectors]
    return ParetoFront.from_evaluations(seeds, vectors, ctx, filter_dominated=False)


def test_hypervolume_hand_values():
    assert hypervolume([[0.5, 0.5], [0.75, 0.25]]) == pytest.approx(0.3125, abs=1e-15)
    assert hypervolume([[1.0] * 4]) == 1.0
    assert hypervolume([[0.0] * 3]) == 0.0
    assert hypervolume(np.zeros((0, 3)), 3) == 0.0


def test_hypervolume_validation():
    with pytest.raises(ValueError):
        hypervolume([[0.5]])
    with pytest.raises(ValueError):
        hypervolume([[0.5] * 7])
    with pytest.raises(ValueError):
        hypervolume([[0.5, 1.1]])
    with pytest.raises(ValueError):
        hypervolume([[0.5, 0.5]], m=3)
    assert hypervolume([[1 + 1e-13, 0.5]]) == pytest.approx(0.5)


@given(st.integers(2, 6), st.integers(1, 4), st.integers(0, 10_000))
def test_matches_inclusion_exclusion(m, n, seed):
    P = np.random.default_rng(seed).random((n, m))
    assert hypervolume(P) == pytest.approx(hv_inclusion_exclusion(P), abs=1e-12)


@pytest.mark.parametrize("m", range(2, 7))
def test_matches_monte_carlo_volume(m):
    rng = np.random.default_rng(m)
    P = rng.random((15, m)) ** 0.5
    est, se = hv_monte_carlo(P, 1_000_000, seed=m)
    assert abs(hypervolume(P) - est) <= 3 * se


@given(st.integers(2, 6), st.integers(1, 12), st.integers(0, 10_000))
def test_monotone_and_dominated_points_are_free(m, n, seed):
    rng = np.random.default_rng(seed)
    P = rng.random((n, m))
    base = hypervolume(P)
    extra = rng.random(m)
    assert hypervolume(np.vstack([P, extra])) >= base - 1e-12
    dominated = P[0] * rng.random(m)
    assert hypervolume(np.vstack([P, dominated])) == pytest.approx(base, abs=1e-12)
    assert hypervolume(P[:1]) == pytest.approx(float(np.prod(P[0])), abs=1e-15)


def test_subset_hypervolume():
    a = ObjectiveVector(8.0, 1, 0.2, 0.5, 4, 1.0)
    b = ObjectiveVector(6.0, 2, 0.9, 0.1, 2, 2.0)
    c = ObjectiveVector(5.0, 3, 0.4, 0.2, 6, 0.0)
    front = _front([a, b, c], CTX.with_active("I-S-C"))
    assert subset_hypervolume(front, "I-S-C") == pytest.approx(hypervolume(front.points()))
    # on I-S, vector a dominates b and c: only its box counts
    assert subset_hypervolume(front, "I-S") == pytest.approx(0.8 * 0.8)
    single = _front([a])
    assert subset_hypervolume(single, "all") == pytest.approx(float(np.prod(single.points("all"))))
    nan_front = ParetoFront.from_evaluations(
        [(0,)], [ObjectiveVector(1.0, 1, math.nan, math.nan, 1, 1.0)], CTX.with_active("I-S"))
    with pytest.raises(ValueError, match="communities"):
        subset_hypervolume(nan_front, "I-S-C")


def test_front_filters_dominated_entries():
    a = ObjectiveVector(8.0, 1, 0.2, 0.5, 4, 1.0)
    worse = ObjectiveVector(7.0, 2, 0.2, 0.5, 4, 1.0)
    front = ParetoFront.from_evaluations([(1,), (2, 3)], [a, worse], CTX)
    assert [e.nodes for e in front.entries] == [(1,)]


def test_nondominated_mask_keeps_duplicates():
    P = [[1, 1], [1, 1], [0, 0.5]]
    assert nondominated_mask(P).tolist() == [True, True, False]


def test_pearson():
    x = np.arange(10.0)
    assert pearson(x, 2 * x + 1) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5)
    assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))
    with pytest.raises(ValueError):
        pearson([1], [1])


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=20), st.integers(0, 1000),
       st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine_invariance(x, seed, scale, shift):
    x = np.array(x)
    y = np.random.default_rng(seed).random(x.size)
    if np.ptp(x) < 1e-6:
        return
    assert pearson(scale * x + shift, y) == pytest.approx(pearson(x, y), abs=1e-9)


def test_correlation_matrix():
    vecs = [
        ObjectiveVector(8.0, 1, 0.2, 0.5, 4, 1.0),
        ObjectiveVector(6.0, 2, 0.9, 0.1, 2, 2.0),
        ObjectiveVector(5.0, 3, 0.4, 0.2, 6, 0.0),
        ObjectiveVector(9.0, 5, 0.6, 0.8, 9, 3.0),
    ]
    f = _front(vecs)
    corr = correlation_matrix([f])
    P = f.points("all")
    for i in range(6):
        assert corr[i, i] == 1.0
        for j in range(6):
            assert corr[i, j] == pytest.approx(pearson_direct(P[:, i].tolist(), P[:, j].tolist()))
    assert np.allclose(corr, corr.T)
    assert np.allclose(correlation_matrix([f, f]), corr)
    with pytest.raises(ValueError):
        correlation_matrix([_front(vecs[:1])])
    with pytest.raises(ValueError):
        correlation_matrix([_front(vecs, CTX.with_active("I-S"))])


def test_holm():
    assert not any(d.rejected for d in holm_bonferroni([("a", 1.0), ("b", 1.0)]))
    out = holm_bonferroni({"x": 0.04, "y": 0.001, "z": 0.02})
    assert [d.label for d in out] == ["y", "z", "x"]
    assert [round(d.threshold, 4) for d in out] == [0.0167, 0.025, 0.05]
    assert all(d.rejected for d in out)
    assert not any(d.rejected for d in holm_bonferroni([("a", 0.03), ("b", 0.04)]))
    with pytest.raises(ValueError):
        holm_bonferroni([("a", 0.1)], alpha=0)
