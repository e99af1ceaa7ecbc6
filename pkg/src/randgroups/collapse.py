"""Collapse certificates for dense presentations.

Every positive relator ``r = x y`` with ``|x| = floor(k/2)`` gives an edge
``x -- y`` of a bipartite "split graph", and ``x = y^-1`` holds in G.  So
two prefixes joined by a path (necessarily of even length) are equal in G.
If those equalities force all generators to coincide, every positive
relator reads ``a^k = 1`` and G is cyclic of order dividing k; an extra
relator with exactly one inverse letter adds ``a^(k-2) = 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .analysis import AbelianInvariants, abelianization, almost_positive_exists
from .presentation import Presentation
from .unionfind import UnionFind
from .words import Word


class CertificateError(AssertionError):
    """A certificate contradicted its consistency oracle (an implementation bug)."""


@dataclass(frozen=True, eq=False)
class SplitGraph:
    n: int
    k: int
    v1: np.ndarray          # (m1, floor(k/2)) distinct prefixes
    v2: np.ndarray          # (m2, ceil(k/2)) distinct suffixes
    edges: np.ndarray       # (E, 3): v1 index, v2 index, relator index

    @property
    def prefix_length(self) -> int:
        return self.k // 2

    @property
    def v1_universe(self) -> int:
        return self.n ** (self.k // 2)

    @property
    def v2_universe(self) -> int:
        return self.n ** (self.k - self.k // 2)

    def v1_word(self, i: int) -> Word:
        return tuple(int(x) for x in self.v1[i])

    def v2_word(self, j: int) -> Word:
        return tuple(int(x) for x in self.v2[j])

    def edge_words(self) -> list[tuple[Word, Word, int]]:
        return [(self.v1_word(a), self.v2_word(b), int(r)) for a, b, r in self.edges]

    def component_labels(self) -> tuple[int, np.ndarray]:
        """Component count and labels over V1 (first m1) then V2 vertices."""
        m1, m2 = len(self.v1), len(self.v2)
        if not len(self.edges):
            return 0, np.zeros(0, dtype=np.int32)
        e = self.edges
        adj = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1] + m1)),
                         shape=(m1 + m2, m1 + m2))
        return connected_components(adj, directed=False)


def build_split_graph(P: Presentation) -> SplitGraph:
    k, h = P.k, P.k // 2
    if k < 2:
        raise ValueError("split graphs need k >= 2")
    R = P.relators
    ids = np.flatnonzero(np.all(R > 0, axis=1)) if len(R) else np.zeros(0, dtype=np.int64)
    if not len(ids):
        empty = np.zeros((0, 3), dtype=np.int64)
        return SplitGraph(P.n, k, np.zeros((0, h), np.int32), np.zeros((0, k - h), np.int32), empty)
    pos = R[ids]
    v1, inv1 = np.unique(pos[:, :h], axis=0, return_inverse=True)
    v2, inv2 = np.unique(pos[:, h:], axis=0, return_inverse=True)
    edges = np.stack([inv1.ravel(), inv2.ravel(), ids], axis=1).astype(np.int64)
    return SplitGraph(P.n, k, v1, v2, edges)


def spanning_connected(g: SplitGraph) -> tuple[bool, bool, int]:
    """(every possible prefix is incident, incident vertices form one component, #components)."""
    count, _ = g.component_labels()
    spanning = len(g.v1) == g.v1_universe
    return spanning, count == 1, int(count)


def generator_equalities(g: SplitGraph, labels: Optional[np.ndarray] = None):
    """Generator equalities forced by the split graph.

    Two prefixes in one component that differ in a single position give
    ``a_i = a_j`` for the letters at that position.  Returns the union-find
    over generators (0-based) and, per successful merge, the witnessing pair
    ``(i, j, prefix_index_x, prefix_index_y)``.
    """
    uf = UnionFind(g.n)
    merges = []
    if not len(g.edges):
        return uf, merges
    if labels is None:
        _, labels = g.component_labels()
    m1, h = len(g.v1), g.prefix_length
    comp = labels[:m1].astype(np.int64)
    for p in range(h):
        rest = np.delete(g.v1, p, axis=1)
        key = np.concatenate([comp[:, None], rest], axis=1)
        _, grp = np.unique(key, axis=0, return_inverse=True)
        grp = grp.ravel()
        order = np.lexsort((g.v1[:, p], grp))
        same = grp[order[1:]] == grp[order[:-1]]
        for a, b in zip(order[:-1][same], order[1:][same]):
            gi, gj = int(g.v1[a, p]), int(g.v1[b, p])
            if uf.union(gi - 1, gj - 1):
                merges.append((gi, gj, int(a), int(b)))
        if uf.components == 1:
            break
    return uf, merges


def equality_witness(g: SplitGraph, x, y) -> list[tuple[Word, Word, int]]:
    """An even-length path from prefix x to prefix y, as (prefix, suffix, relator) edges.

    Each edge ``(p, s, r)`` records the relator ``r = p s``, i.e. ``p = s^-1`` in G,
    so consecutive edges chain ``x = s1^-1 = p2 = s2^-1 = ... = y``.
    """
    index = {g.v1_word(i): i for i in range(len(g.v1))}
    x, y = tuple(x), tuple(y)
    if x not in index or y not in index:
        raise ValueError("both words must be prefixes incident to some edge")
    src, dst = index[x], index[y]
    if src == dst:
        return []
    m1 = len(g.v1)
    adj: dict[int, list[tuple[int, int]]] = {}
    for e, (a, b, _) in enumerate(g.edges):
        adj.setdefault(int(a), []).append((int(b) + m1, e))
        adj.setdefault(int(b) + m1, []).append((int(a), e))
    prev = {src: None}
    queue = deque([src])
    while queue and dst not in prev:
        u = queue.popleft()
        for v, e in adj.get(u, ()):
            if v not in prev:
                prev[v] = (u, e)
                queue.append(v)
    if dst not in prev:
        raise ValueError(f"{x} and {y} lie in different components")
    path = []
    v = dst
    while prev[v] is not None:
        u, e = prev[v]
        path.append(e)
        v = u
    path.reverse()
    return [(g.v1_word(int(g.edges[e, 0])), g.v2_word(int(g.edges[e, 1])), int(g.edges[e, 2]))
            for e in path]


@dataclass(frozen=True)
class CollapseCertificate:
    spanning: bool
    single_component: bool
    components: int
    cyclic_order_upper: int
    exact_type: AbelianInvariants
    route: str
    witness: Optional[list] = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return self.exact_type.order

    def to_json(self) -> dict:
        out = {
            "theorem": "split-graph-collapse",
            "route": self.route,
            "spanning": self.spanning,
            "single_component": self.single_component,
            "components": self.components,
            "cyclic_order_upper": self.cyclic_order_upper,
            "exact_type": self.exact_type.to_json(),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def collapse_certificate(P: Presentation, witnesses: bool = False,
                         require_spanning: bool = False,
                         ab: Optional[AbelianInvariants] = None) -> Optional[CollapseCertificate]:
    """Certify that G is cyclic, or return None (no claim).

    By default the certificate is issued whenever the split graph forces all
    generators equal.  ``require_spanning=True`` demands instead that every
    possible prefix be present and the graph be connected, which implies the
    default condition.  ``ab`` may pass in a precomputed abelianization.
    """
    g = build_split_graph(P)
    if not len(g.edges):
        return None
    count, labels = g.component_labels()
    spanning = len(g.v1) == g.v1_universe
    single = count == 1
    uf, merges = generator_equalities(g, labels)
    if require_spanning:
        if not (spanning and single):
            return None
        route = "spanning"
    else:
        route = "generator-classes"
    if uf.components != 1:
        if require_spanning:
            raise CertificateError("spanning connected split graph left generators unmerged")
        return None
    m = gcd(P.k, 2) if almost_positive_exists(P) else P.k
    if ab is None:
        ab = abelianization(P)
    if not ab.is_cyclic or m % ab.order:
        raise CertificateError(f"collapse certificate Z_{m} contradicts abelianization {ab}")
    witness = None
    if witnesses:
        witness = []
        for gi, gj, a, b in merges:
            x, y = g.v1_word(a), g.v1_word(b)
            witness.append({
                "equal": [gi, gj],
                "from": list(x),
                "to": list(y),
                "path": [{"prefix": list(p), "suffix": list(s), "relator": r}
                         for p, s, r in equality_witness(g, x, y)],
            })
    return CollapseCertificate(spanning, single, int(count), m, ab, route, witness)
