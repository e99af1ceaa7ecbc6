"""Presentations and model parameters shared by every analyzer."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .words import Word, is_cyclically_reduced, is_freely_reduced

MODELS = ("standard", "positive")
U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ModelParams:
    model: str
    n: int
    k: int
    d: Fraction
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        d = Fraction(self.d)
        object.__setattr__(self, "d", d)
        if self.n < 2 or self.k < 2:
            raise ValueError("need n >= 2 and k >= 2")
        if not 0 < d < 1:
            raise ValueError(f"density must lie in (0, 1), got {d}")
        if not 0 <= self.seed <= U64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def parse_density(text) -> Fraction:
    """Exact density from ``"3/5"``, ``"0.6"`` or a Fraction/int."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        raise TypeError("pass densities as strings or Fractions, not floats")
    return Fraction(str(text).strip())


def _as_array(relators, k: Optional[int]) -> np.ndarray:
    if isinstance(relators, np.ndarray):
        arr = np.array(relators, dtype=np.int32, copy=True)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, k or 0)
    else:
        rows = [tuple(r) for r in relators]
        if not rows:
            arr = np.zeros((0, k or 0), dtype=np.int32)
        else:
            lengths = {len(r) for r in rows}
            if len(lengths) != 1:
                raise ValueError(f"relators have mixed lengths {sorted(lengths)}")
            arr = np.array(rows, dtype=np.int32)
    if arr.ndim != 2:
        raise ValueError("relators must form a 2-d array (one row per relator)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Presentation:
    """``<a_1..a_n | R>`` with all relators of a common length ``k``.

    ``relators`` is an immutable ``(|R|, k)`` int32 array of signed letters.
    """

    n: int
    relators: np.ndarray
    k: int = 0
    params: Optional[ModelParams] = field(default=None)

    def __post_init__(self):
        k = self.k or (self.params.k if self.params else None)
        arr = _as_array(self.relators, k)
        if arr.shape[0] and k and arr.shape[1] != k:
            raise ValueError(f"relator length {arr.shape[1]} != k={k}")
        k = k or arr.shape[1]
        if arr.shape[0] == 0:
            arr = np.zeros((0, k), dtype=np.int32)
            arr.setflags(write=False)
        object.__setattr__(self, "relators", arr)
        object.__setattr__(self, "k", int(k))
        if arr.size and (np.any(arr == 0) or np.abs(arr).max() > self.n):
            raise ValueError(f"relator letters must be nonzero with |letter| <= n={self.n}")

    @classmethod
    def from_words(cls, n: int, words: Iterable[Sequence[int]], k: int = 0,
                   params: Optional[ModelParams] = None) -> "Presentation":
        return cls(n=n, relators=[tuple(w) for w in words], k=k, params=params)

    def __len__(self):
        return self.relators.shape[0]

    def words(self) -> list[Word]:
        return [tuple(int(x) for x in row) for row in self.relators]

    def __eq__(self, other):
        if not isinstance(other, Presentation):
            return NotImplemented
        return (self.n == other.n and self.k == other.k and self.params == other.params
                and np.array_equal(self.relators, other.relators))

    def __hash__(self):
        return hash((self.n, self.k, self.params, self.relators.tobytes()))

    def __repr__(self):
        from .words import format_word
        shown = ", ".join(format_word(w) for w in self.words()[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"<Presentation n={self.n} k={self.k} |R|={len(self)}: {shown}{more}>"

    def validate(self) -> None:
        """Raise ValueError if the relators break the model invariants.

        Without model metadata (a hand-written presentation) relators only
        need to be freely reduced.
        """
        if self.params is None:
            for i, w in enumerate(self.words()):
                if not is_freely_reduced(w):
                    raise ValueError(f"relator {i} is not freely reduced")
            return
        seen = set()
        for i, w in enumerate(self.words()):
            if self.params.model == "positive" and min(w) < 0:
                raise ValueError(f"relator {i} has a negative letter in a positive-model presentation")
            if not is_cyclically_reduced(w):
                raise ValueError(f"relator {i} is not cyclically reduced")
            if w in seen:
                raise ValueError(f"relator {i} duplicates an earlier relator")
            seen.add(w)
        if self.params.n != self.n or self.params.k != self.k:
            raise ValueError("model metadata disagrees with n or k")
