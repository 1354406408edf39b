from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.generators import random_graph, random_small_instance
from syncplan.graph import Multigraph, canonical_cyclic, genus
from syncplan.instance import is_valid_embedding
from syncplan.oracle import (OracleBudgetExceeded, brute_solve_syncplan, count_planar_embeddings,
                             cyclic_orders, default_budget, enumerate_planar_embeddings,
                             vertex_rotation_set, vertex_rotation_set_exhaustive)

seeds = st.integers(min_value=0, max_value=10**6)


def complete(n):
    g = Multigraph()
    vs = [g.add_vertex() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(vs[i], vs[j])
    return g


def bond(k):
    g = Multigraph()
    a, b = g.add_vertex(), g.add_vertex()
    for _ in range(k):
        g.add_edge(a, b)
    return g


def random_tree(rng, n):
    g = Multigraph()
    vs = [g.add_vertex()]
    for _ in range(n - 1):
        vs.append(g.add_vertex())
        g.add_edge(rng.choice(vs[:-1]), vs[-1])
    return g


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", range(0, 7))
def test_cyclic_orders_count(n):
    orders = list(cyclic_orders(list(range(n))))
    assert len(orders) == math.factorial(max(n - 1, 0))
    assert len({canonical_cyclic(o) for o in orders}) == len(orders)


@pytest.mark.parametrize("make,count", [
    (lambda: complete(4), 2),
    (lambda: bond(4), 6),
    (lambda: bond(5), 24),
    (lambda: complete(5), 0),
])
def test_embedding_counts(make, count):
    assert count_planar_embeddings(make()) == count


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_tree_embedding_count_is_product(seed):
    rng = random.Random(seed)
    g = random_tree(rng, rng.randint(1, 7))
    want = math.prod(math.factorial(max(g.degree(v) - 1, 0)) for v in g.vertices())
    assert count_planar_embeddings(g) == want


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_enumerated_embeddings_are_planar_and_distinct(seed):
    rng = random.Random(seed)
    g, _ = random_graph(rng, rng.randint(2, 5), rng.randint(0, 4), 4)
    seen = set()
    for rs in enumerate_planar_embeddings(g):
        assert genus(g, rs) == 0
        key = tuple(canonical_cyclic(rs[v]) for v in g.vertices())
        assert key not in seen
        seen.add(key)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_rotation_set_routes_agree(seed):
    rng = random.Random(seed)
    g, vs = random_graph(rng, rng.randint(2, 6), rng.randint(0, 6), 5)
    v = max(g.vertices(), key=g.degree)
    assert vertex_rotation_set(g, v) == vertex_rotation_set_exhaustive(g, v)


# ---------------------------------------------------------------------------
# synchronized planarity
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_brute_witness_is_valid(seed):
    inst = random_small_instance(random.Random(seed))
    v = brute_solve_syncplan(inst)
    if v.satisfiable:
        assert is_valid_embedding(inst, v.witness)


# ---------------------------------------------------------------------------
# budget
# ---------------------------------------------------------------------------


def test_budget_exceeded():
    with pytest.raises(OracleBudgetExceeded):
        count_planar_embeddings(bond(6), budget=10)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("SYNCPLAN_ORACLE_BUDGET", "5")
    assert default_budget() == 5
    with pytest.raises(OracleBudgetExceeded):
        count_planar_embeddings(bond(6))
    monkeypatch.setenv("SYNCPLAN_ORACLE_BUDGET", "junk")
    assert default_budget() > 5
