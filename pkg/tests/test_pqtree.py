from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.generators import random_pq_tree
from syncplan.graph import canonical_cyclic
from syncplan.pqtree import (LEAF, P, Q, PQTree, PQTreeError, admits, enumerate_orders,
                             fixed_order_tree, format_tree, parse_tree, trivial_tree,
                             tree_to_graph_fragment)


def all_cyclic(labels):
    first, rest = labels[0], labels[1:]
    for p in itertools.permutations(rest):
        yield [first, *p]


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def test_trivial_tree_admits_everything():
    t = trivial_tree("abcd")
    assert t.is_trivial()
    assert len(enumerate_orders(t)) == 6
    assert admits(t, "abcd") and admits(t, "acbd")


def test_fixed_order_tree():
    t = fixed_order_tree("abcd")
    assert not t.is_trivial()
    assert admits(t, "abcd") and admits(t, "dcba") and admits(t, "bcda")
    assert not admits(t, "acbd")
    assert len(enumerate_orders(t)) == 2


@pytest.mark.parametrize("labels", [[], ["a"], ["a", "b"]])
def test_too_few_leaves(labels):
    with pytest.raises(PQTreeError):
        trivial_tree(labels)


def test_grouping_tree():
    t = parse_tree("P(P(a,b),P(c,d),e)")
    assert admits(t, "abcde")
    assert not admits(t, "acbde")


def test_p_root_with_q_child():
    t = parse_tree("P(Q(a,b,c),d,e)")
    want = {canonical_cyclic(o) for o in all_cyclic(list("abcde")) if admits(t, o)}
    assert enumerate_orders(t) == want


def test_admits_rejects_non_permutation():
    with pytest.raises(PQTreeError):
        admits(trivial_tree("abc"), "abd")


# ---------------------------------------------------------------------------
# semantics: admits against enumeration, exhaustively
# ---------------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 7))
def test_admits_iff_enumerated(seed, n):
    rng = random.Random(seed)
    t = random_pq_tree(rng, list(range(n)))
    t.check()
    orders = enumerate_orders(t)
    for o in all_cyclic(list(range(n))):
        assert admits(t, o) == (canonical_cyclic(o) in orders)
    # closed under reversal
    assert {canonical_cyclic(list(reversed(o))) for o in orders} == orders


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 7))
def test_order_count_formula(seed, n):
    t = random_pq_tree(random.Random(seed), list(range(n)))
    # tree embeddings correspond one to one to cyclic leaf orders
    want = 1
    for x in t.inner_nodes():
        d = len(t.adj[x])
        want *= 2 if t.kind[x] == Q else math.factorial(d - 1)
    assert len(enumerate_orders(t)) == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_degree_two_suppression_keeps_orders(seed):
    rng = random.Random(seed)
    t = random_pq_tree(rng, list(range(6)))
    before = enumerate_orders(t)
    # subdivide a random inner edge with a degree-2 P-node, then normalize
    inner = t.inner_nodes()
    pairs = [(x, y) for x in inner for y in t.adj[x] if t.kind[y] != LEAF]
    if not pairs:
        return
    x, y = rng.choice(pairs)
    s = t.add_inner(P)
    t.adj[x][t.adj[x].index(y)] = s
    t.adj[y][t.adj[y].index(x)] = s
    t.adj[s] = [x, y]
    t.normalize()
    t.check()
    assert enumerate_orders(t) == before


# ---------------------------------------------------------------------------
# text form and graph fragment
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 7))
def test_format_parse_round_trip(seed, n):
    t = random_pq_tree(random.Random(seed), list(range(n)))
    back = parse_tree(format_tree(t))
    assert enumerate_orders(back) == enumerate_orders(t)


@pytest.mark.parametrize("text", ["P(a,b)", "Q(a,b,c", "P(a,,b,c)", "P(a,b,c))", "P(a,a,b)"])
def test_parse_errors(text):
    with pytest.raises(PQTreeError):
        parse_tree(text)


def test_fragment_of_q_node():
    t = fixed_order_tree("abcd")
    frag = tree_to_graph_fragment(t)
    (x,) = frag.kinds
    assert frag.kinds[x] == Q
    assert [y[1] for y in frag.order[x]] == list("abcd")
    assert frag.tree_edges == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 8))
def test_fragment_is_a_tree(seed, n):
    t = random_pq_tree(random.Random(seed), list(range(n)))
    frag = tree_to_graph_fragment(t)
    assert len(frag.tree_edges) == len(frag.kinds) - 1
    assert set(frag.leaf_parent) == set(range(n))
    for x, kind in frag.kinds.items():
        assert kind in (P, Q)
        if kind == Q:
            assert len(frag.order[x]) >= 4


def test_copy_is_independent():
    t = trivial_tree("abc")
    u = t.copy()
    u.add_leaf("z")
    assert "z" not in t.leaves()
    assert isinstance(u, PQTree)
