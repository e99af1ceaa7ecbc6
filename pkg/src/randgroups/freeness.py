"""Freeness certificates for sparse presentations.

Each relator is a k-gon of the presentation complex.  Joining antipodal
boundary edges of every face gives the antipodal graph on the 1-cells (for
odd k every 1-cell is first cut into two halves).  When every component of
that graph is a tree, some generator occurs exactly once among the
relators; deleting it together with its relator is a Tietze move, and
repeating empties the relator set, so G is free of rank n - |R|.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .analysis import AbelianInvariants, abelianization, repeated_letter_mask
from .collapse import CertificateError
from .presentation import Presentation
from .unionfind import UnionFind


@dataclass(frozen=True, eq=False)
class AntipodalGraph:
    """Vertices 0..V-1; even k: vertex g-1 is the 1-cell of a_g; odd k:
    vertices 2(g-1) and 2(g-1)+1 are its first and second halves.

    ``edges`` rows are ``(u, v, relator, chord)``.
    """

    n: int
    k: int
    edges: np.ndarray

    @property
    def halved(self) -> bool:
        return self.k % 2 == 1

    @property
    def num_vertices(self) -> int:
        return 2 * self.n if self.halved else self.n

    def vertex_label(self, v: int) -> str:
        if self.halved:
            return f"{v // 2 + 1}.{v % 2 + 1}"
        return str(v + 1)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, :2].ravel(), minlength=self.num_vertices)

    def component_stats(self) -> tuple[int, int]:
        """(#components, #components containing an edge)."""
        uf = UnionFind(self.num_vertices)
        for u, v in self.edges[:, :2].tolist():
            uf.union(u, v)
        touched = {uf.find(int(v)) for v in np.unique(self.edges[:, :2])} if len(self.edges) else set()
        return uf.components, len(touched)


def _positions(P: Presentation) -> np.ndarray:
    """Per-relator boundary positions as vertex ids (halved for odd k)."""
    R = P.relators.astype(np.int64)
    g0 = np.abs(R) - 1
    if P.k % 2 == 0:
        return g0
    neg = (R < 0).astype(np.int64)
    first = 2 * g0 + neg          # position 2j: half 1 for a_g, half 2 for a_g^-1
    second = 2 * g0 + (1 - neg)   # position 2j+1: the other half
    out = np.empty((R.shape[0], 2 * P.k), dtype=np.int64)
    out[:, 0::2] = first
    out[:, 1::2] = second
    return out


def antipodal_graph(P: Presentation) -> AntipodalGraph:
    k = P.k
    if len(P) and P.relators.shape[1] != k:
        raise ValueError(f"relators must have length k={k}")
    pos = _positions(P)
    L = pos.shape[1] if len(P) else (2 * k if k % 2 else k)
    half = L // 2
    N = len(P)
    u = pos[:, :half]
    v = pos[:, half:]
    rel = np.repeat(np.arange(N, dtype=np.int64), half)
    chord = np.tile(np.arange(half, dtype=np.int64), N)
    edges = np.stack([u.ravel(), v.ravel(), rel, chord], axis=1) if N else np.zeros((0, 4), np.int64)
    g = AntipodalGraph(P.n, k, edges)
    expected = (k if k % 2 else k // 2) * N
    assert len(edges) == expected, "antipodal edge count identity failed"
    return g


@dataclass(frozen=True)
class DaggerWitness:
    """A closed walk in the antipodal graph: ``(u, v, relator, chord)`` steps."""

    cycle: tuple[tuple[int, int, int, int], ...]

    @property
    def length(self) -> int:
        return len(self.cycle)

    @property
    def faces(self) -> list[int]:
        return [c[2] for c in self.cycle]

    def to_json(self, g: Optional[AntipodalGraph] = None) -> dict:
        lab = g.vertex_label if g else str
        return {
            "length": self.length,
            "cycle": [{"from": lab(u), "to": lab(v), "relator": r, "chord": c}
                      for u, v, r, c in self.cycle],
        }


class AllTrees:
    """Marker result: every hypergraph is a tree."""

    def __repr__(self):
        return "AllTrees"

    def __bool__(self):
        return True


ALL_TREES = AllTrees()


def _forest_path(adj: dict, src: int, dst: int) -> list:
    prev = {src: None}
    q = deque([src])
    while q:
        x = q.popleft()
        if x == dst:
            break
        for y, e in adj.get(x, ()):
            if y not in prev:
                prev[y] = (x, e)
                q.append(y)
    steps = []
    while prev[dst] is not None:
        x, e = prev[dst]
        steps.append(e)
        dst = x
    steps.reverse()
    return steps


def hypergraphs_all_trees(g: AntipodalGraph) -> Union[AllTrees, DaggerWitness]:
    """AllTrees, or the cycle closed by the first edge that joins one component.

    Loops and parallel edges count as cycles.
    """
    uf = UnionFind(g.num_vertices)
    adj: dict[int, list] = {}
    for row in g.edges.tolist():
        u, v = row[0], row[1]
        if uf.union(u, v):
            adj.setdefault(u, []).append((v, tuple(row)))
            adj.setdefault(v, []).append((u, tuple(row)))
            continue
        if u == v:
            return DaggerWitness((tuple(row),))
        # orient the tree path so the walk closes through the new edge
        path = []
        x = v
        for e in _forest_path(adj, v, u):
            a, b = e[0], e[1]
            path.append(e if a == x else (b, a, e[2], e[3]))
            x = path[-1][1]
        return DaggerWitness(tuple([(u, v, row[2], row[3])] + path))
    # cross-check against the edge/vertex count characterization
    labels = {}
    for v in range(g.num_vertices):
        labels.setdefault(uf.find(v), [0, 0])[0] += 1
    for u, _ in g.edges[:, :2].tolist():
        labels[uf.find(u)][1] += 1
    assert all(e == nv - 1 for nv, e in labels.values()), "forest check disagrees with edge counts"
    return ALL_TREES


@dataclass(frozen=True)
class FreenessCertificate:
    eliminations: tuple[tuple[int, int], ...]   # (generator, relator index)
    final_rank: int
    route: str = "hypergraph-trees"

    def to_json(self) -> dict:
        return {
            "theorem": self.route,
            "eliminations": [{"generator": g, "relator": r} for g, r in self.eliminations],
            "rank": self.final_rank,
        }


@dataclass(frozen=True)
class Stuck:
    remaining: tuple[int, ...]


def tietze_eliminate(P: Presentation) -> Union[FreenessCertificate, Stuck]:
    """Repeatedly drop the lowest generator occurring exactly once, with its relator."""
    R = P.relators
    N = len(P)
    counts = np.bincount(np.abs(R).ravel(), minlength=P.n + 1).tolist() if N else [0] * (P.n + 1)
    if N and (N > P.n or 1 not in counts):
        # each step removes a distinct generator, and the first needs a singleton
        return Stuck(tuple(range(N)))
    where: dict[int, set] = {}
    for i, row in enumerate(np.abs(R).tolist()):
        for g in row:
            where.setdefault(g, set()).add(i)
    alive = set(range(N))
    elim = []
    while alive:
        g = next((g for g in range(1, P.n + 1) if counts[g] == 1), None)
        if g is None:
            return Stuck(tuple(sorted(alive)))
        (i,) = where[g]
        elim.append((g, i))
        alive.discard(i)
        for h in np.abs(R[i]).tolist():
            counts[h] -= 1
            where[h].discard(i)
    return FreenessCertificate(tuple(elim), P.n - N)


def freeness_certificate(P: Presentation, require_no_repeats: bool = True,
                         fallback_tietze: bool = True,
                         ab: Optional[AbelianInvariants] = None) -> Optional[FreenessCertificate]:
    """Certify that G is free, or return None (no claim).

    The hypergraph route needs all hypergraphs to be trees (and, unless
    ``require_no_repeats`` is off, no relator using a generator twice); it
    then guarantees Tietze elimination succeeds.  With ``fallback_tietze``
    a presentation outside that route is still certified if greedy Tietze
    elimination happens to empty it, which is sound on its own.
    """
    repeats = bool(repeated_letter_mask(P).any())
    trees = hypergraphs_all_trees(antipodal_graph(P))
    cert = None
    if isinstance(trees, AllTrees) and not (require_no_repeats and repeats):
        cert = tietze_eliminate(P)
        if isinstance(cert, Stuck):
            raise CertificateError("hypergraphs are trees but Tietze elimination got stuck")
    elif fallback_tietze:
        got = tietze_eliminate(P)
        if isinstance(got, FreenessCertificate):
            cert = FreenessCertificate(got.eliminations, got.final_rank, route="tietze")
    if cert is None:
        return None
    if cert.final_rank < 0 or len(cert.eliminations) != len(P):
        raise CertificateError("malformed elimination sequence")
    if ab is None:
        ab = abelianization(P)
    if not ab.is_free_abelian(cert.final_rank):
        raise CertificateError(f"free rank {cert.final_rank} contradicts abelianization {ab}")
    return cert
