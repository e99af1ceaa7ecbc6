"""Piece statistics and two-face diagram probes for sparse presentations.

A slot is (relator, start offset, orientation); a piece is a word read from
two distinct slots of the relator family.  Two identical slots would be the
mirror gluing of a face with itself, which is an unreduced diagram, and two
slots of one relator over the same edges in opposite orientations read
mutually inverse (hence distinct) words, so "distinct slots" is the whole
reducedness rule at the two-face level.

None of this decides hyperbolicity; it is partial evidence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .presentation import Presentation
from .sampler import letters_to_codes


@dataclass(frozen=True)
class PieceSpectrum:
    max_piece: int
    histogram: dict = field(default_factory=dict)   # length -> number of distinct piece words
    k: int = 0

    @property
    def degenerate(self) -> bool:
        """A full-length piece: two relators equal up to rotation/inversion, or a proper power."""
        return self.k > 0 and self.max_piece >= self.k


def _relator_array(R) -> tuple[np.ndarray, int]:
    if isinstance(R, Presentation):
        return R.relators.astype(np.int64), R.n
    arr = np.array([tuple(w) for w in R], dtype=np.int64)
    if arr.ndim != 2:
        arr = arr.reshape(len(arr), -1)
    n = int(np.abs(arr).max()) if arr.size else 1
    return arr, n


def piece_spectrum(R) -> PieceSpectrum:
    """Piece lengths over all rotations and both orientations of the relators."""
    rel, n = _relator_array(R)
    if not rel.size:
        return PieceSpectrum(0, {}, rel.shape[1] if rel.ndim == 2 else 0)
    k = rel.shape[1]
    rows = np.concatenate([rel, -rel[:, ::-1]])
    codes = letters_to_codes(rows)
    S = len(rows)
    slot_row = np.repeat(np.arange(S), k)
    slot_start = np.tile(np.arange(k), S)
    ids = codes[slot_row, slot_start]
    hist = {}
    ell = 1
    while True:
        _, inv, counts = np.unique(ids, return_inverse=True, return_counts=True)
        inv = inv.ravel()
        shared = counts >= 2
        if not shared.any():
            break
        hist[ell] = int(shared.sum())
        if ell == k:
            break
        live = shared[inv]
        slot_row, slot_start = slot_row[live], slot_start[live]
        nxt = codes[slot_row, (slot_start + ell) % k]
        ids = inv[live].astype(np.int64) * (2 * n) + nxt
        ell += 1
    return PieceSpectrum(max(hist, default=0), hist, k)


def cprime_certificate(R, lam) -> bool:
    """C'(lam): every piece is shorter than lam * k."""
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    spec = piece_spectrum(R)
    return spec.max_piece < lam * spec.k


def two_face_min_ratio(R) -> Optional[Fraction]:
    """Least |boundary| / (k * faces) over reduced two-face diagrams, or None if there are none.

    Two faces glued along a maximal common arc of length s have boundary
    2k - 2s, so the minimum comes from the longest piece.
    """
    spec = piece_spectrum(R)
    if spec.max_piece == 0:
        return None
    s = min(spec.max_piece, spec.k)
    return Fraction(2 * spec.k - 2 * s, 2 * spec.k)


def isoperimetric_target(k: int, d, eps) -> Fraction:
    """k (1 - 2d - 2 eps) per face."""
    return k * (1 - 2 * Fraction(d) - 2 * Fraction(eps))


def default_epsilon(d) -> Fraction:
    return (1 - 2 * Fraction(d)) / 8


def two_face_passes(R, d, eps=None) -> bool:
    """Do all reduced two-face diagrams meet |boundary| >= k(1-2d-2eps)|A|?

    Vacuously true when no two faces can be glued.
    """
    eps = default_epsilon(d) if eps is None else Fraction(eps)
    ratio = two_face_min_ratio(R)
    if ratio is None:
        return True
    spec_k = _relator_array(R)[0].shape[1]
    boundary = ratio * 2 * spec_k
    return boundary >= 2 * isoperimetric_target(spec_k, d, eps)


def shared_subword_union_bound(num_relators: int, k: int, n: int, ell: int) -> Fraction:
    """|R|^2 k^2 (2n-1)^-ell: expected number of slot pairs sharing an ell-letter subword (bound)."""
    return Fraction(num_relators**2 * k**2, (2 * n - 1) ** ell)
