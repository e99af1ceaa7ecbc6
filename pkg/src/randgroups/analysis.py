"""Whole-presentation statistics and exact abelian invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Optional

import numpy as np

from .presentation import Presentation
from .sampler import iroot


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        t = tuple(int(x) for x in self.torsion)
        if any(x < 2 for x in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"not an invariant-factor chain: {t}")
        object.__setattr__(self, "torsion", t)

    @property
    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1

    @property
    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        return None if self.free_rank else prod(self.torsion)

    def is_free_abelian(self, rank: int) -> bool:
        return not self.torsion and self.free_rank == rank

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank, "name": str(self)}


def exponent_matrix(P: Presentation) -> np.ndarray:
    """Rows = relators, columns = generators, entries = exponent sums."""
    R = P.relators
    M = np.zeros((R.shape[0], P.n), dtype=np.int64)
    if R.size:
        rows = np.repeat(np.arange(R.shape[0]), R.shape[1])
        np.add.at(M, (rows, np.abs(R).ravel() - 1), np.sign(R).ravel())
    return M


# -- Smith normal form over Python integers ---------------------------------

def _snf(rows: list[list[int]], ncols: int):
    """Diagonalize by unimodular row and column operations.

    Returns ``(diag, V, Vinv)`` with ``U A V = diag(...)`` for some
    unimodular U, diag a nonnegative divisibility chain of nonzero entries.
    Only column operations are recorded.
    """
    A = [list(map(int, r)) for r in rows]
    m, n = len(A), ncols
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vinv = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(a, b):
        if a == b:
            return
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]
        Vinv[a], Vinv[b] = Vinv[b], Vinv[a]

    def col_sub(j, t, q):
        # column j -= q * column t
        for row in A:
            row[j] -= q * row[t]
        for row in V:
            row[j] -= q * row[t]
        Vinv[t] = [x + q * y for x, y in zip(Vinv[t], Vinv[j])]

    def min_pivot(t, rows_from, cols_from):
        best = None
        for i in range(rows_from, m):
            Ai = A[i]
            for j in range(cols_from, n):
                x = Ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best
        return best

    diag = []
    t = 0
    while t < min(m, n):
        piv = min_pivot(t, t, t)
        if piv is None:
            break
        _, i, j = piv
        A[t], A[i] = A[i], A[t]
        swap_cols(t, j)
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        col_sub(j, t, q)
                    if A[t][j]:
                        clean = False
            if not clean:
                # smallest remaining entry in row t / column t becomes the pivot
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                A[t], A[i] = A[i], A[t]
                swap_cols(t, j)
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(x % p for x in A[i][t + 1:])), None)
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
        diag.append(A[t][t])
        t += 1
    return diag, V, Vinv


def _nonzero_rows(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if M.size == 0:
        return M.reshape(0, M.shape[1] if M.ndim == 2 else 0)
    return M[np.any(M != 0, axis=1)]


def _lattice_snf(M: np.ndarray, ncols: int) -> list[int]:
    """Nonzero invariant factors of the row lattice of M, including 1s.

    Works on a small working basis: rows already in its lattice are
    discarded after an exact membership test through the column transform
    of the basis's SNF, the rest are added and the basis is re-diagonalized.
    Every round strictly enlarges the lattice, so the loop terminates.
    """
    rows = _nonzero_rows(M)
    chunk = 2 * ncols + 4
    basis = [list(map(int, r)) for r in rows[:chunk]]
    rest = rows[chunk:]
    while True:
        diag, V, Vinv = _snf(basis, ncols)
        if not len(rest):
            return diag
        r = len(diag)
        idx = [i for i in range(ncols) if i >= r or diag[i] != 1]
        if not idx:
            return diag
        Vsub = [[V[a][i] for i in idx] for a in range(ncols)]
        vmax = max((abs(x) for row in Vsub for x in row), default=0)
        rmax = int(np.abs(rest).max())
        if rmax * vmax * ncols < 2**62:
            img = rest.astype(np.int64) @ np.array(Vsub, dtype=np.int64)
        else:
            img = rest.astype(object) @ np.array(Vsub, dtype=object)
        mods = [diag[i] if i < r else 0 for i in idx]
        bad = np.zeros(len(rest), dtype=bool)
        for c, s in enumerate(mods):
            col = img[:, c]
            bad |= (col != 0) if s == 0 else (col % s != 0)
        if not bad.any():
            return diag
        out = rest[bad]
        basis = [[diag[i] * x for x in Vinv[i]] for i in range(r)]
        basis += [list(map(int, row)) for row in out[:chunk]]
        rest = out[chunk:]


def invariant_factors(M) -> list[int]:
    """All nonzero Smith diagonal entries of M (1s included), in chain order."""
    M = np.asarray(M, dtype=object if _is_big(M) else np.int64)
    if M.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    return _lattice_snf(M, M.shape[1])


def _is_big(M) -> bool:
    if isinstance(M, np.ndarray) and M.dtype != object:
        return bool(M.size) and int(np.abs(M).max()) >= 2**31
    return any(abs(int(x)) >= 2**31 for row in M for x in row)


def smith_normal_form(M, ncols: Optional[int] = None) -> AbelianInvariants:
    """Invariants of the cokernel Z^ncols / rowspace(M)."""
    M = np.asarray(M, dtype=object if _is_big(M) else np.int64)
    if M.ndim != 2:
        M = M.reshape(0, ncols or 0)
    ncols = M.shape[1] if ncols is None else ncols
    diag = _lattice_snf(M, ncols) if M.size else []
    return AbelianInvariants(tuple(d for d in diag if d != 1), ncols - len(diag))


def abelianization(P: Presentation) -> AbelianInvariants:
    return smith_normal_form(exponent_matrix(P), ncols=P.n)


def euler_characteristic(P: Presentation) -> int:
    return 1 - P.n + len(P)


def not_free_advisory(P: Presentation) -> Optional[bool]:
    """chi > 1 rules out freeness when the presentation complex is aspherical.

    Only meaningful for sampled presentations with density below 1/2;
    returns None without such metadata.
    """
    if P.params is None or not P.params.d < Fraction(1, 2):
        return None
    return euler_characteristic(P) > 1


def positive_count(P: Presentation) -> int:
    if not len(P):
        return 0
    return int(np.all(P.relators > 0, axis=1).sum())


def positive_relator_stats(P: Presentation, d_prime) -> tuple[int, bool]:
    """(number of positive relators, count >= floor(n^(k d')))."""
    d_prime = Fraction(d_prime)
    if not 0 < d_prime < 1:
        raise ValueError("d' must lie in (0, 1)")
    threshold = iroot(P.n ** (P.k * d_prime.numerator), d_prime.denominator)
    c = positive_count(P)
    return c, c >= threshold


def almost_positive_exists(P: Presentation) -> bool:
    """Some relator has exactly one inverse letter."""
    if not len(P):
        return False
    return bool(np.any((P.relators < 0).sum(axis=1) == 1))


def repeated_letter_mask(P: Presentation) -> np.ndarray:
    if not len(P):
        return np.zeros(0, dtype=bool)
    s = np.sort(np.abs(P.relators), axis=1)
    return np.any(s[:, 1:] == s[:, :-1], axis=1)


def has_repeated_letter(P: Presentation) -> bool:
    """Some relator uses a generator twice (either sign)."""
    return bool(repeated_letter_mask(P).any())
