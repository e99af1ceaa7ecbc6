"""Random bipartite graph experiments.

Graphs have parts V1 = {0..a-1} and V2 = {0..b-1}; edges are distinct
(i, j) pairs stored as an ``(E, 2)`` array sorted by cell index i*b + j.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components

from .sampler import iroot
from .seeding import trial_seed

# below this many cells ER graphs are drawn cell by cell
ER_DIRECT_CELLS = 1 << 24


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    a: int
    b: int
    edges: np.ndarray

    @classmethod
    def from_cells(cls, a: int, b: int, cells) -> "BipartiteGraph":
        cells = np.unique(np.asarray(cells, dtype=np.int64))
        if len(cells) and (cells[0] < 0 or cells[-1] >= a * b):
            raise ValueError("cell index out of range")
        return cls(a, b, np.stack([cells // b, cells % b], axis=1) if len(cells)
                   else np.zeros((0, 2), dtype=np.int64))

    @classmethod
    def from_edges(cls, a: int, b: int, edges) -> "BipartiteGraph":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls.from_cells(a, b, e[:, 0] * b + e[:, 1])

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees_v1(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.a)

    def biadjacency(self) -> csr_matrix:
        e = self.edges
        return csr_matrix((np.ones(len(e), dtype=np.int32), (e[:, 0], e[:, 1])), shape=(self.a, self.b))


def sample_uniform_edges(a: int, b: int, E: int, seed: int) -> BipartiteGraph:
    """Uniform over bipartite graphs with exactly E edges."""
    if not 0 <= E <= a * b:
        raise ValueError(f"need 0 <= E <= a*b = {a * b}, got {E}")
    rng = np.random.default_rng(seed)
    return BipartiteGraph.from_cells(a, b, rng.choice(a * b, size=E, replace=False))


def sample_er(a: int, b: int, p: float, seed: int) -> BipartiteGraph:
    """Each of the a*b possible edges independently with probability p.

    Large grids draw the binomial edge count first and then a uniform set
    of that size, which has the same distribution.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    cells = a * b
    if cells <= ER_DIRECT_CELLS:
        return BipartiteGraph.from_cells(a, b, np.flatnonzero(rng.random(cells) < p))
    E = int(rng.binomial(cells, p))
    return BipartiteGraph.from_cells(a, b, rng.choice(cells, size=E, replace=False))


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    v1_one_component: bool
    min_degree_v1: int


def connectivity_report(g: BipartiteGraph) -> ConnectivityReport:
    a, b = g.a, g.b
    e = g.edges
    adj = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1] + a)), shape=(a + b, a + b))
    count, labels = connected_components(adj, directed=False)
    v1 = labels[:a]
    return ConnectivityReport(
        connected=bool(count == 1),
        v1_one_component=bool(a == 0 or (v1 == v1[0]).all()),
        min_degree_v1=int(g.degrees_v1().min()) if a else 0,
    )


def shared_neighbour_projection(g: BipartiteGraph) -> np.ndarray:
    """Edges {s1, s2} (s1 < s2, sorted) of V1 vertices with a common neighbour."""
    A = g.biadjacency()
    C = (A @ A.T).tocoo()
    keep = C.row < C.col
    out = np.stack([C.row[keep], C.col[keep]], axis=1).astype(np.int64)
    return out[np.lexsort((out[:, 1], out[:, 0]))]


def projection_connected(g: BipartiteGraph) -> bool:
    """Whether the shared-neighbour projection on V1 is connected.

    Uses, for each V2 vertex, a path through its neighbours instead of the
    full clique: every path edge is a projection edge and each clique stays
    connected, so components are unchanged without the quadratic blow-up.
    """
    if g.a <= 1:
        return True
    e = g.edges[np.lexsort((g.edges[:, 0], g.edges[:, 1]))]
    same = e[1:, 1] == e[:-1, 1]
    u, v = e[:-1, 0][same], e[1:, 0][same]
    adj = coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(g.a, g.a))
    count, _ = connected_components(adj, directed=False)
    return bool(count == 1)


# -- frequency experiments ---------------------------------------------------

def ceil_power(base: int, exponent: Fraction) -> int:
    """ceil(base ** exponent) for a nonnegative rational exponent, exactly."""
    exponent = Fraction(exponent)
    x = base**exponent.numerator
    r = iroot(x, exponent.denominator)
    return r if r**exponent.denominator == x else r + 1


@dataclass
class ExperimentSpec:
    """``family`` is one of

    * ``square``: Gamma(a, a, ceil(a^(1+eps))) for a in ``sizes``;
    * ``split``: Gamma(n^m, n^(m+1), ceil(n^((2m+1)d))) for n in ``sizes``;
    * ``er``: per-edge Gamma(n^m, n^(m+1), p) with p = n^((2m+1)(d-1)).

    For ``split`` and ``er`` the summary also reports how often every V1
    degree reaches n^(1/2 + eps(2m+1)); for ``er`` how often the edge count
    lies in [tp/2, 3tp/2] with t = n^(2m+1).
    """

    family: str
    sizes: list
    trials: int
    seed: int = 0
    eps: Fraction = Fraction(1, 2)
    m: int = 1
    d: Fraction = Fraction(3, 5)

    def __post_init__(self):
        if self.family not in ("square", "split", "er"):
            raise ValueError(f"unknown family {self.family!r}")
        self.eps = Fraction(self.eps)
        self.d = Fraction(self.d)


ROW_COLUMNS = ["family", "a", "b", "E_or_p", "trial", "connected", "v1_one_component", "min_degree_v1"]


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ROW_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in ROW_COLUMNS])
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        if self.summary:
            cols = list(self.summary[0])
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in self.summary:
                w.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def _graph_for(spec: ExperimentSpec, size: int, seed: int):
    if spec.family == "square":
        a = size
        E = ceil_power(a, 1 + spec.eps)
        return a, a, E, sample_uniform_edges(a, a, E, seed)
    a, b = size**spec.m, size ** (spec.m + 1)
    if spec.family == "split":
        E = ceil_power(size, (2 * spec.m + 1) * spec.d)
        return a, b, E, sample_uniform_edges(a, b, E, seed)
    p = float(size) ** float((2 * spec.m + 1) * (spec.d - 1))
    return a, b, p, sample_er(a, b, p, seed)


def frequency_experiment(spec: ExperimentSpec) -> ExperimentResult:
    out = ExperimentResult()
    for cell, size in enumerate(spec.sizes):
        tallies = {"connected": 0, "v1_one_component": 0}
        if spec.family != "square":
            tallies["degree_ok"] = 0
        if spec.family == "er":
            tallies["concentrated"] = 0
        a = b = None
        param = None
        for t in range(spec.trials):
            a, b, param, g = _graph_for(spec, size, trial_seed(spec.seed, cell, t))
            rep = connectivity_report(g)
            proj = projection_connected(g)
            if proj != rep.v1_one_component:
                raise AssertionError("shared-neighbour projection disagrees with V1 connectivity")
            out.rows.append({"family": spec.family, "a": a, "b": b, "E_or_p": param, "trial": t,
                             "connected": rep.connected, "v1_one_component": rep.v1_one_component,
                             "min_degree_v1": rep.min_degree_v1})
            tallies["connected"] += rep.connected
            tallies["v1_one_component"] += rep.v1_one_component
            if spec.family != "square":
                threshold = float(size) ** (0.5 + float(spec.eps) * (2 * spec.m + 1))
                tallies["degree_ok"] += rep.min_degree_v1 >= threshold
            if spec.family == "er":
                tp = a * b * param
                tallies["concentrated"] += 0.5 * tp <= g.num_edges <= 1.5 * tp
        row = {"family": spec.family, "size": size, "a": a, "b": b, "E_or_p": param,
               "trials": spec.trials}
        for key, v in tallies.items():
            row[key] = v / spec.trials if spec.trials else math.nan
        out.summary.append(row)
    return out
