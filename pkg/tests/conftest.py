import itertools

import pytest

from randgroups.presentation import Presentation
from randgroups.words import is_cyclically_reduced, parse_word


def pres(n, *words, params=None):
    """Presentation from letter shorthand, e.g. pres(2, "aa", "ab")."""
    return Presentation.from_words(n, [parse_word(w) for w in words], params=params)


def all_words(n, k):
    letters = [g for i in range(1, n + 1) for g in (i, -i)]
    return itertools.product(letters, repeat=k)


def brute_cyclically_reduced(n, k):
    return [w for w in all_words(n, k) if is_cyclically_reduced(w)]


@pytest.fixture
def make_pres():
    return pres
