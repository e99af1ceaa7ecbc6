"""Free-group word arithmetic.

Letters are nonzero signed integers: ``+g`` is the generator ``a_g`` and
``-g`` its inverse, with ``g`` 1-based.  Words are tuples of letters.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

Word = Tuple[int, ...]


def generator(letter: int) -> int:
    return abs(letter)


def sign(letter: int) -> int:
    return 1 if letter > 0 else -1


def letter_key(letter: int) -> int:
    """Sort key for the order a1 < a1^-1 < a2 < a2^-1 < ..."""
    return 2 * abs(letter) - (1 if letter > 0 else 0)


def word(letters: Iterable[int]) -> Word:
    w = tuple(int(x) for x in letters)
    if any(x == 0 for x in w):
        raise ValueError("0 is not a letter; generators are 1-based")
    return w


def parse_word(text: str, n: int | None = None) -> Word:
    """Parse ``"ab^-1c"``-style shorthand (``a`` = generator 1, ...).

    ``A`` (upper case) also denotes the inverse of ``a``.  Only meant for
    tests and interactive use; files use signed integers.
    """
    out = []
    i = 0
    s = text.replace(" ", "")
    while i < len(s):
        ch = s[i]
        if not ch.isalpha():
            raise ValueError(f"unexpected {ch!r} in {text!r}")
        g = ord(ch.lower()) - ord("a") + 1
        e = -1 if ch.isupper() else 1
        i += 1
        if s.startswith("^-1", i):
            e = -e
            i += 3
        if n is not None and g > n:
            raise ValueError(f"generator {ch!r} out of range for n={n}")
        out.append(e * g)
    return tuple(out)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    parts = []
    for x in w:
        name = chr(ord("a") + abs(x) - 1) if abs(x) <= 26 else f"x{abs(x)}"
        parts.append(name if x > 0 else name + "^-1")
    return "".join(parts) if all(abs(x) <= 26 for x in w) else "*".join(parts)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def rotate(w: Sequence[int], i: int) -> Word:
    if not w:
        return ()
    i %= len(w)
    return tuple(w[i:]) + tuple(w[:i])


def is_freely_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    if not is_freely_reduced(w):
        return False
    return len(w) <= 1 or w[0] != -w[-1]


def is_positive(w: Sequence[int]) -> bool:
    return all(x > 0 for x in w)


def free_reduce(w: Sequence[int]) -> Word:
    stack: list[int] = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclic_reduce(w: Sequence[int]) -> Word:
    r = free_reduce(w)
    i, j = 0, len(r)
    while j - i >= 2 and r[i] == -r[j - 1]:
        i += 1
        j -= 1
    return r[i:j]


def canonical_rotation(w: Sequence[int]) -> Word:
    """Least rotation of ``w`` under :func:`letter_key` order."""
    if not w:
        return ()
    keys = [letter_key(x) for x in w]
    best = min(range(len(w)), key=lambda i: keys[i:] + keys[:i])
    return rotate(w, best)


def count_cyclically_reduced(n: int, k: int) -> int:
    """|C_{k,n}|: number of cyclically reduced words of length k on n generators.

    Trace of the k-th power of the (2n x 2n) "no immediate cancellation"
    transfer matrix, whose eigenvalues are 2n-1 (once), 1 (n times) and
    -1 (n-1 times).
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return (2 * n - 1) ** k + n + (n - 1) * (-1) ** k


def count_positive(n: int, k: int) -> int:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return n**k
