import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from randgroups.analysis import (
    AbelianInvariants,
    _snf,
    abelianization,
    almost_positive_exists,
    euler_characteristic,
    exponent_matrix,
    has_repeated_letter,
    invariant_factors,
    not_free_advisory,
    positive_relator_stats,
    smith_normal_form,
)
from randgroups.presentation import ModelParams, Presentation
from randgroups.sampler import sample, target_size
from randgroups.seeding import trial_seed
from randgroups.words import count_cyclically_reduced

from conftest import pres


def det(rows):
    """Exact determinant by fraction-valued elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(out)


def determinant_divisor_invariants(M, ncols):
    """Invariants from gcds of i x i minors (d_i), s_i = d_i / d_(i-1)."""
    M = [list(r) for r in M]
    prev, facs = 1, []
    for i in range(1, min(len(M), ncols) + 1):
        g = 0
        for rs in itertools.combinations(range(len(M)), i):
            for cs in itertools.combinations(range(ncols), i):
                g = math.gcd(g, det([[M[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        facs.append(g // prev)
        prev = g
    return AbelianInvariants(tuple(f for f in facs if f != 1), ncols - len(facs))


def test_exponent_matrix_examples():
    assert exponent_matrix(pres(2, "abab")).tolist() == [[2, 2]]
    assert exponent_matrix(pres(2, "aB")).tolist() == [[1, -1]]
    assert exponent_matrix(pres(2, "aa", "ab", "bb")).tolist() == [[2, 0], [1, 1], [0, 2]]


def test_snf_examples():
    assert smith_normal_form([[2, 0], [1, 1], [0, 2]]) == AbelianInvariants((2,), 0)
    assert smith_normal_form([[1, 0], [0, 1]]) == AbelianInvariants((), 0)
    assert smith_normal_form(np.zeros((2, 3), dtype=int)) == AbelianInvariants((), 3)
    assert smith_normal_form(np.zeros((0, 3), dtype=int), ncols=3) == AbelianInvariants((), 3)


def test_abelianization_examples():
    assert abelianization(pres(2, "aa", "ab", "bb")) == AbelianInvariants((2,), 0)
    assert abelianization(pres(3, "abc")) == AbelianInvariants((), 2)
    ab = abelianization(pres(2, "abab"))
    assert ab == AbelianInvariants((2,), 1)
    assert str(ab) == "Z + Z2"


def test_invariants_validation():
    with pytest.raises(ValueError):
        AbelianInvariants((2, 3), 0)
    assert AbelianInvariants((3,), 0).is_cyclic
    assert not AbelianInvariants((2, 2), 0).is_cyclic
    assert AbelianInvariants((), 1).order is None
    assert str(AbelianInvariants((), 2)) == "Z^2" and str(AbelianInvariants((), 0)) == "1"


small_matrix = st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), max_size=5)
    .map(lambda rows: (rows, c)))


@settings(max_examples=150, deadline=None)
@given(small_matrix)
def test_snf_matches_determinant_divisors(mc):
    rows, c = mc
    M = np.array(rows, dtype=np.int64).reshape(len(rows), c)
    assert smith_normal_form(M, ncols=c) == determinant_divisor_invariants(rows, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32), st.integers(12, 40))
def test_tall_matrices_lattice_route(c, seed, m):
    """More rows than one working chunk forces the membership loop."""
    rng = np.random.default_rng(seed)
    M = rng.integers(-3, 4, size=(m, c)) * rng.integers(1, 4, size=(m, 1))
    direct, _, _ = _snf([list(map(int, r)) for r in M], c)
    assert invariant_factors(M) == direct
    if c <= 2:
        assert smith_normal_form(M) == determinant_divisor_invariants(M.tolist(), c)


def test_big_entries_use_exact_integers():
    big = 2**40
    M = [[big, 0], [0, 3 * big]]
    assert smith_normal_form(M) == AbelianInvariants((big, 3 * big), 0)


def test_euler_characteristic():
    p = ModelParams("standard", 2, 3, Fraction(3, 5))
    P = sample(p)
    assert len(P) == 7 and euler_characteristic(P) == 6
    assert euler_characteristic(pres(3, "abc")) == -1
    assert euler_characteristic(Presentation(n=2, relators=np.zeros((0, 3), dtype=int))) == -1


def test_not_free_advisory():
    assert not_free_advisory(pres(3, "abc")) is None
    P = sample(ModelParams("standard", 5, 4, Fraction(3, 10), 1))
    assert not_free_advisory(P) is True
    assert not_free_advisory(sample(ModelParams("standard", 5, 4, Fraction(7, 10), 1))) is None


def test_positive_relator_stats():
    assert positive_relator_stats(pres(2, "aa", "aB"), Fraction(1, 2)) == (1, False)
    assert positive_relator_stats(pres(2, "aa", "ab", "ba", "bb"), Fraction(1, 2)) == (4, True)


def test_positive_relator_stats_sampled():
    passes = 0
    for t in range(200):
        P = sample(ModelParams("standard", 40, 3, Fraction(7, 10), trial_seed(11, 0, t)))
        passes += positive_relator_stats(P, Fraction(11, 20))[1]
    assert passes >= 190


def test_almost_positive():
    assert almost_positive_exists(pres(3, "abC"))
    assert not almost_positive_exists(pres(3, "aBC"))
    assert not almost_positive_exists(pres(3, "abc", "cab"))


def test_repeated_letter():
    assert has_repeated_letter(pres(2, "abA"))
    assert not has_repeated_letter(pres(3, "abc"))


def test_repeated_letter_frequency_matches_exact_probability():
    """n=100, k=4, d=1/5: P(some relator repeats a generator) from exact counts.

    A cyclically reduced length-4 word with four distinct generators has
    2^4 sign choices, none of them creating a cancellation.
    """
    n, k, d = 100, 4, Fraction(1, 5)
    N = target_size(ModelParams("standard", n, k, d))
    total = count_cyclically_reduced(n, k)
    distinct = 16 * n * (n - 1) * (n - 2) * (n - 3)
    # hypergeometric: N distinct words, none from the repeating class
    p_none = math.prod(Fraction(distinct - i, total - i) for i in range(N))
    p_rep = 1 - float(p_none)
    trials = 200
    hits = sum(has_repeated_letter(sample(ModelParams("standard", n, k, d, trial_seed(3, 0, t))))
               for t in range(trials))
    lo, hi = binom.ppf(0.0005, trials, p_rep), binom.ppf(0.9995, trials, p_rep)
    assert lo <= hits <= hi
