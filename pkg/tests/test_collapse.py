from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randgroups.analysis import AbelianInvariants, exponent_matrix
from randgroups.collapse import (
    build_split_graph,
    collapse_certificate,
    equality_witness,
    spanning_connected,
)
from randgroups.presentation import ModelParams, Presentation
from randgroups.sampler import sample
from randgroups.words import parse_word

from conftest import pres
from test_analysis import determinant_divisor_invariants


def edge_set(g):
    return {(p, s) for p, s, _ in g.edge_words()}


def w(text):
    return parse_word(text)


def test_split_graph_examples():
    assert edge_set(build_split_graph(pres(2, "aa", "ab", "bb"))) == {
        (w("a"), w("a")), (w("a"), w("b")), (w("b"), w("b"))}
    assert edge_set(build_split_graph(pres(2, "aab", "aba", "bba"))) == {
        (w("a"), w("ab")), (w("a"), w("ba")), (w("b"), w("ba"))}
    assert len(build_split_graph(pres(2, "aB", "Ab")).edges) == 0


def test_split_graph_ignores_non_positive():
    g = build_split_graph(pres(2, "aa", "aB", "bb"))
    assert edge_set(g) == {(w("a"), w("a")), (w("b"), w("b"))}
    assert sorted(r for _, _, r in g.edge_words()) == [0, 2]


def test_spanning_connected_examples():
    assert spanning_connected(build_split_graph(pres(2, "aa", "ab", "bb"))) == (True, True, 1)
    assert spanning_connected(build_split_graph(pres(2, "aab", "bba"))) == (True, False, 2)
    assert spanning_connected(build_split_graph(pres(2, "aa"))) == (False, True, 1)


def test_certificate_examples():
    c = collapse_certificate(pres(2, "aa", "ab", "bb"))
    assert c.cyclic_order_upper == 2 and c.exact_type == AbelianInvariants((2,), 0)
    c = collapse_certificate(pres(2, "aab", "aba", "bba"))
    assert c.cyclic_order_upper == 3 and c.exact_type == AbelianInvariants((3,), 0)
    assert collapse_certificate(pres(2, "aa", "ab")) is None
    assert collapse_certificate(pres(2, "aB")) is None


def test_almost_positive_refinement():
    # b = a from the positive part, then a a a^-1 gives a = 1
    c = collapse_certificate(pres(2, "aab", "aba", "bba", "aaB"))
    assert c.cyclic_order_upper == 1 and c.order == 1


def test_strict_mode():
    P = pres(2, "aa", "ab", "bb")
    assert collapse_certificate(P, require_spanning=True).route == "spanning"
    # all generators merge without every prefix being present
    P = pres(2, "aaaa", "abaa")   # prefixes ba, bb never occur
    assert collapse_certificate(P, require_spanning=True) is None
    c = collapse_certificate(P)
    assert c.route == "generator-classes" and not c.spanning
    assert c.exact_type == AbelianInvariants((4,), 0)


def test_witness_examples():
    g = build_split_graph(pres(2, "aa", "ab", "bb"))
    path = equality_witness(g, w("a"), w("b"))
    assert len(path) == 2
    assert path[0][0] == w("a") and path[-1][0] == w("b")
    assert equality_witness(g, w("a"), w("a")) == []
    g2 = build_split_graph(pres(2, "aab", "bba"))
    with pytest.raises(ValueError):
        equality_witness(g2, w("a"), w("b"))


def check_path(P, path, x, y):
    assert len(path) % 2 == 0
    words = P.words()
    for p, s, r in path:
        assert words[r] == p + s
    assert path[0][0] == x and path[-1][0] == y
    for i, (e, f) in enumerate(zip(path, path[1:])):
        # V1 -> V2 -> V1: shared suffix after even steps, shared prefix after odd ones
        assert (e[1] == f[1]) if i % 2 == 0 else (e[0] == f[0])


positive_sets = st.integers(2, 3).flatmap(lambda n: st.integers(2, 4).flatmap(
    lambda k: st.lists(st.lists(st.integers(1, n), min_size=k, max_size=k).map(tuple),
                       min_size=1, max_size=12, unique=True).map(lambda ws: (n, ws))))


@settings(max_examples=200, deadline=None)
@given(positive_sets)
def test_certificate_soundness_and_witnesses(nws):
    n, ws = nws
    P = Presentation.from_words(n, ws)
    c = collapse_certificate(P, witnesses=True)
    strict = collapse_certificate(P, require_spanning=True)
    if strict is not None:
        assert c is not None
    if c is None:
        return
    ab = determinant_divisor_invariants(exponent_matrix(P).tolist(), n) if len(P) <= 5 else c.exact_type
    assert ab == c.exact_type and ab.is_cyclic and c.cyclic_order_upper % ab.order == 0
    merged = set()
    for item in c.witness:
        check_path(P, [(tuple(p["prefix"]), tuple(p["suffix"]), p["relator"]) for p in item["path"]],
                   tuple(item["from"]), tuple(item["to"]))
        merged.add(tuple(item["equal"]))
    assert len(merged) == n - 1


@pytest.mark.parametrize("n", [5, 10])
def test_dense_positive_samples_collapse_to_z3(n):
    for seed in range(10):
        c = collapse_certificate(sample(ModelParams("positive", n, 3, Fraction(7, 10), seed)))
        if c is not None:
            assert c.exact_type == AbelianInvariants((3,), 0)
