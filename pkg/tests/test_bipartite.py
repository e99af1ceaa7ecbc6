import itertools
from collections import Counter, deque
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

import randgroups.bipartite as bp
from randgroups.bipartite import (
    BipartiteGraph,
    ExperimentSpec,
    ceil_power,
    connectivity_report,
    frequency_experiment,
    projection_connected,
    sample_er,
    sample_uniform_edges,
    shared_neighbour_projection,
)


def bfs_report(a, b, edges):
    adj = {("L", i): [] for i in range(a)} | {("R", j): [] for j in range(b)}
    for i, j in edges:
        adj[("L", i)].append(("R", j))
        adj[("R", j)].append(("L", i))

    def reach(s):
        seen, q = {s}, deque([s])
        while q:
            for y in adj[q.popleft()]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return seen

    everything = set(adj)
    comp = reach(("L", 0)) if a else set()
    connected = bool(everything) and reach(next(iter(sorted(everything)))) == everything
    v1_one = a == 0 or all(("L", i) in comp for i in range(a))
    deg = Counter(i for i, _ in edges)
    return connected, v1_one, min((deg[i] for i in range(a)), default=0)


def brute_projection(a, edges):
    nb = {}
    for i, j in edges:
        nb.setdefault(j, set()).add(i)
    return sorted({(x, y) for s in nb.values() for x in s for y in s if x < y})


def test_fixed_edge_examples():
    g = sample_uniform_edges(2, 2, 4, 1)
    assert g.num_edges == 4 and connectivity_report(g).connected
    assert sample_uniform_edges(2, 2, 0, 1).num_edges == 0
    with pytest.raises(ValueError):
        sample_uniform_edges(2, 2, 5, 1)


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_too_few_edges_never_connected(a, b, data):
    E = data.draw(st.integers(0, max(0, a + b - 2)))
    if E > a * b:
        return
    g = sample_uniform_edges(a, b, E, data.draw(st.integers(0, 2**32)))
    assert not connectivity_report(g).connected


def test_er_examples():
    assert sample_er(5, 7, 0.0, 1).num_edges == 0
    assert sample_er(5, 7, 1.0, 1).num_edges == 35


def test_er_mean():
    counts = np.array([sample_er(50, 50, 0.1, s).num_edges for s in range(10**4)])
    sigma = np.sqrt(2500 * 0.1 * 0.9 / len(counts))
    assert abs(counts.mean() - 250) <= 3 * sigma


def test_er_large_grid_path(monkeypatch):
    monkeypatch.setattr(bp, "ER_DIRECT_CELLS", 0)
    counts = np.array([sample_er(30, 40, 0.2, s).num_edges for s in range(4000)])
    sigma = np.sqrt(1200 * 0.2 * 0.8 / len(counts))
    assert abs(counts.mean() - 240) <= 3 * sigma


def test_connectivity_examples():
    assert connectivity_report(BipartiteGraph.from_edges(2, 3, itertools.product(range(2), range(3)))) \
        == bp.ConnectivityReport(True, True, 3)
    assert connectivity_report(BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])) \
        == bp.ConnectivityReport(False, False, 1)
    assert connectivity_report(BipartiteGraph.from_edges(1, 1, [])) == bp.ConnectivityReport(False, True, 0)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 4), (2, 2), (2, 3), (3, 3), (2, 5), (3, 4)])
def test_exhaustive_against_bfs(a, b):
    cells = list(itertools.product(range(a), range(b)))
    for mask in range(1 << len(cells)):
        edges = [c for t, c in enumerate(cells) if mask >> t & 1]
        g = BipartiteGraph.from_edges(a, b, edges)
        rep = connectivity_report(g)
        assert (rep.connected, rep.v1_one_component, rep.min_degree_v1) == bfs_report(a, b, edges)
        assert projection_connected(g) == rep.v1_one_component
        assert shared_neighbour_projection(g).tolist() == [list(p) for p in brute_projection(a, edges)]


def test_projection_examples():
    g = BipartiteGraph.from_edges(2, 1, [(0, 0), (1, 0)])
    assert shared_neighbour_projection(g).tolist() == [[0, 1]] and projection_connected(g)
    g = BipartiteGraph.from_edges(2, 2, [(0, 0), (1, 1)])
    assert len(shared_neighbour_projection(g)) == 0 and not projection_connected(g)
    g = BipartiteGraph.from_edges(4, 2, itertools.product(range(4), range(2)))
    assert len(shared_neighbour_projection(g)) == comb(4, 2)


def test_fixed_edge_sampler_uniform():
    counts = Counter(tuple(map(tuple, sample_uniform_edges(2, 2, 2, s).edges.tolist())) for s in range(6000))
    assert len(counts) == comb(4, 2)
    assert chisquare(list(counts.values())).pvalue >= 1e-3


def test_er_conditioned_on_edge_count_is_uniform():
    """Given |E| = 2, the per-edge model on K_(2,2) is uniform over 2-subsets."""
    counts = Counter()
    for s in range(12000):
        g = sample_er(2, 2, 0.5, s)
        if g.num_edges == 2:
            counts[tuple(map(tuple, g.edges.tolist()))] += 1
    assert len(counts) == 6
    assert chisquare(list(counts.values())).pvalue >= 1e-3


def test_ceil_power():
    assert ceil_power(100, Fraction(9, 5)) == 3982
    assert ceil_power(10**4, Fraction(3, 2)) == 10**6
    assert ceil_power(7, Fraction(1, 2)) == 3


def test_frequency_experiment_small():
    spec = ExperimentSpec("square", [5, 8], trials=6, seed=2)
    res = frequency_experiment(spec)
    assert len(res.rows) == 12
    assert res.rows_csv() == frequency_experiment(spec).rows_csv()
    assert res.rows_csv().splitlines()[0] == ",".join(bp.ROW_COLUMNS)
    assert "degree_ok" not in res.summary[0]
    er = frequency_experiment(ExperimentSpec("er", [4], trials=3, seed=1))
    assert {"degree_ok", "concentrated"} <= set(er.summary[0])


def test_square_sparse_never_connected():
    res = frequency_experiment(ExperimentSpec("square", [10, 30], trials=5, eps=Fraction(0)))
    assert all(not r["connected"] for r in res.rows)
