"""Exact samplers for the standard and positive (n, k, d) models.

The relator count is ``floor(base ** (k*d))`` with ``base = 2n-1`` (standard)
or ``n`` (positive), evaluated as an integer root of an integer power so no
floating point ever touches it.  Random streams are numpy ``PCG64``
generators seeded with the 64-bit model seed.

Internally letters are drawn as codes ``c`` in ``0..2n-1``: generator
``c//2 + 1``, inverse iff ``c`` is odd, so ``c ^ 1`` is the inverse letter.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .presentation import ModelParams, Presentation
from .words import Word, count_cyclically_reduced, count_positive


class SamplerError(ValueError):
    pass


def iroot(x: int, q: int) -> int:
    """floor(x ** (1/q)) for integers x >= 0, q >= 1 (Newton iteration)."""
    if x < 0 or q < 1:
        raise ValueError("iroot needs x >= 0 and q >= 1")
    if x < 2 or q == 1:
        return x
    r = 1 << -(-x.bit_length() // q)  # r**q >= x
    while True:
        nxt = ((q - 1) * r + x // r ** (q - 1)) // q
        if nxt >= r:
            break
        r = nxt
    while r**q > x:
        r -= 1
    while (r + 1) ** q <= x:
        r += 1
    return r


def model_base(params: ModelParams, positive_base: str = "n") -> int:
    if params.model == "standard" or positive_base == "2n-1":
        return 2 * params.n - 1
    if positive_base != "n":
        raise ValueError("positive_base must be 'n' or '2n-1'")
    return params.n


def ambient_size(params: ModelParams) -> int:
    if params.model == "positive":
        return count_positive(params.n, params.k)
    return count_cyclically_reduced(params.n, params.k)


def target_size(params: ModelParams, positive_base: str = "n") -> int:
    """N = floor(base^(k*d)), exactly.

    ``positive_base="2n-1"`` sizes the positive model like the standard one,
    for sensitivity checks.
    """
    d = Fraction(params.d)
    base = model_base(params, positive_base)
    N = iroot(base ** (params.k * d.numerator), d.denominator)
    ambient = ambient_size(params)
    if N > ambient:
        raise SamplerError(
            f"N={N} exceeds the {ambient} available {params.model} words of length {params.k}"
        )
    return N


def codes_to_letters(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes)
    return ((codes >> 1) + 1) * (1 - 2 * (codes & 1))


def letters_to_codes(letters: np.ndarray) -> np.ndarray:
    letters = np.asarray(letters)
    return 2 * (np.abs(letters) - 1) + (letters < 0)


def draw_cyclically_reduced(n: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Up to ``size`` uniform draws from C_{k,n} as letter codes.

    Draws ``size`` uniform freely reduced words (2n choices for the first
    letter, 2n-1 for each later one) and drops the ones whose last letter
    cancels the first; the survivors are i.i.d. uniform on C_{k,n}.
    """
    out = np.empty((size, k), dtype=np.int64)
    out[:, 0] = rng.integers(0, 2 * n, size=size)
    for j in range(1, k):
        t = rng.integers(0, 2 * n - 1, size=size)
        forbidden = out[:, j - 1] ^ 1
        out[:, j] = t + (t >= forbidden)
    keep = out[:, k - 1] != (out[:, 0] ^ 1)
    return out[keep]


def draw_positive(n: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    return 2 * rng.integers(0, n, size=(size, k))


def uniform_cyclically_reduced(n: int, k: int, rng: np.random.Generator,
                               positive: bool = False) -> Word:
    """A single uniform word of C_{k,n} (or C'_{k,n} when ``positive``)."""
    if positive:
        return tuple(int(x) for x in codes_to_letters(draw_positive(n, k, 1, rng)[0]))
    while True:
        got = draw_cyclically_reduced(n, k, 1, rng)
        if len(got):
            return tuple(int(x) for x in codes_to_letters(got[0]))


def _keys(codes: np.ndarray, n: int):
    k = codes.shape[1]
    if (2 * n) ** k < 2**62:
        weights = (2 * n) ** np.arange(k, dtype=np.int64)
        return codes @ weights
    return None


def sample_distinct(n: int, k: int, N: int, rng: np.random.Generator,
                    positive: bool = False) -> np.ndarray:
    """N distinct uniform words of length k, in first-draw order, as letters.

    Repeated uniform draws, discarding words already chosen.  This is
    sampling without replacement, so the resulting set is uniform over all
    N-subsets of the ambient set.
    """
    ambient = count_positive(n, k) if positive else count_cyclically_reduced(n, k)
    if N > ambient:
        raise SamplerError(f"cannot choose {N} distinct words out of {ambient}")
    accept = 1.0 if positive else (2 * n - 2) / (2 * n - 1)
    chunks: list[np.ndarray] = []
    have = 0
    seen_keys = np.zeros(0, dtype=np.int64)
    seen_tuples: set = set()
    while have < N:
        remaining = N - have
        fresh = (ambient - have) / ambient
        batch = int(remaining / (accept * fresh) * 1.1) + 32
        batch = min(batch, 1 << 21)
        codes = draw_positive(n, k, batch, rng) if positive else draw_cyclically_reduced(n, k, batch, rng)
        keys = _keys(codes, n)
        if keys is not None:
            _, first = np.unique(keys, return_index=True)
            first.sort()
            new = first[~np.isin(keys[first], seen_keys)][:remaining]
            seen_keys = np.concatenate([seen_keys, keys[new]])
            chunks.append(codes[new])
            have += len(new)
        else:
            picked = []
            for i, row in enumerate(map(tuple, codes.tolist())):
                if row not in seen_tuples:
                    seen_tuples.add(row)
                    picked.append(i)
                    if len(picked) == remaining:
                        break
            chunks.append(codes[picked])
            have += len(picked)
    codes = np.concatenate(chunks) if chunks else np.zeros((0, k), dtype=np.int64)
    return codes_to_letters(codes).astype(np.int32)


def sample(params: ModelParams, positive_base: str = "n") -> Presentation:
    """A random presentation of the (n, k, d) model; deterministic in ``params.seed``."""
    N = target_size(params, positive_base)
    rng = np.random.default_rng(params.seed)
    rel = sample_distinct(params.n, params.k, N, rng, positive=params.model == "positive")
    return Presentation(n=params.n, relators=rel, k=params.k, params=params)
