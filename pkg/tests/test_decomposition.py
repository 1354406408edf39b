from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.decomposition import (BOND, POLYGON, RIGID, NonPlanarError, block_cut_tree,
                                    bond_pole_bijections, cut_vertices, embedding_tree,
                                    is_wheel_element, planar_rotation_of_block, separation_classes,
                                    spqr_tree, wheel_replace)
from syncplan.generators import random_graph
from syncplan.graph import Multigraph, is_planar_rotation, planar_embed
from syncplan.oracle import vertex_rotation_set, vertex_rotation_set_exhaustive
from syncplan.pqtree import enumerate_orders

seeds = st.integers(min_value=0, max_value=10**6)


def to_nx(g):
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices())
    for e in g.edges():
        h.add_edge(*g.endpoints(e))
    return h


def octahedron():
    g = Multigraph()
    vs = [g.add_vertex(i) for i in range(6)]
    for i in range(6):
        for j in range(i + 1, 6):
            if j != i + 3:
                g.add_edge(vs[i], vs[j])
    return g


def star(k):
    g = Multigraph()
    c = g.add_vertex("c")
    for i in range(k):
        g.add_edge(c, g.add_vertex(i))
    return g, c


def bond(k):
    g = Multigraph()
    a, b = g.add_vertex("a"), g.add_vertex("b")
    for _ in range(k):
        g.add_edge(a, b)
    return g, a


def random_block(seed, n=7):
    """A random planar biconnected multigraph on at most ``n`` vertices."""
    rng = random.Random(seed)
    while True:
        g, vs = random_graph(rng, rng.randint(3, n), rng.randint(n // 2, 2 * n), 6)
        if planar_embed(g) is None or cut_vertices(g):
            continue
        return g, rng


# ---------------------------------------------------------------------------
# blocks and cut vertices
# ---------------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_cut_vertices_match_networkx(seed):
    rng = random.Random(seed)
    g, _ = random_graph(rng, rng.randint(2, 10), rng.randint(0, 8), 5)
    assert cut_vertices(g) == set(nx.articulation_points(nx.Graph(to_nx(g))))
    bct = block_cut_tree(g)
    assert sorted(e for blk in bct.blocks for e in blk) == sorted(g.edges())
    # block-cut tree is a tree
    t = nx.Graph(bct.tree_edges())
    if t.number_of_nodes():
        assert nx.is_tree(t)


def test_separation_classes_of_bond():
    g, a = bond(4)
    classes = separation_classes(g, g.edges(), "a", "b")
    assert len(classes) == 4


# ---------------------------------------------------------------------------
# SPQR trees
# ---------------------------------------------------------------------------


def check_spqr(g, t):
    real = [e for n in t.nodes for e in n.edges if not t.is_virtual(e)]
    assert sorted(real) == sorted(g.edges())
    for i, n in enumerate(t.nodes):
        sk = n.skeleton
        if n.kind == BOND:
            assert sk.num_vertices() == 2 and len(n.edges) >= 3
        elif n.kind == POLYGON:
            assert sk.num_vertices() == len(n.edges) >= 3
            assert all(sk.degree(v) == 2 for v in sk.vertices())
        else:
            assert n.kind == RIGID
            simple = nx.Graph(to_nx(sk))
            assert simple.number_of_edges() == len(n.edges)
            assert nx.node_connectivity(simple) >= 3
        for j in t.neighbours(i):
            # adjacent nodes never share a kind for bonds and polygons
            if n.kind in (BOND, POLYGON):
                assert t.nodes[j].kind != n.kind
    tree = nx.Graph()
    tree.add_nodes_from(range(len(t.nodes)))
    for i in range(len(t.nodes)):
        tree.add_edges_from((i, j) for j in t.neighbours(i))
    assert nx.is_tree(tree)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_spqr_tree_is_well_formed(seed):
    g, _ = random_block(seed)
    if g.num_edges() < 3:
        return
    check_spqr(g, spqr_tree(g))


@pytest.mark.parametrize("make,kinds", [
    (octahedron, {RIGID}),
    (lambda: bond(4)[0], {BOND}),
])
def test_spqr_fixtures(make, kinds):
    g = make()
    t = spqr_tree(g)
    check_spqr(g, t)
    assert {n.kind for n in t.nodes} == kinds


def test_cycle_is_one_polygon():
    g = Multigraph()
    vs = [g.add_vertex() for _ in range(5)]
    for i in range(5):
        g.add_edge(vs[i], vs[(i + 1) % 5])
    t = spqr_tree(g)
    assert [n.kind for n in t.nodes] == [POLYGON]


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 2**16))
def test_block_rotation_is_planar_for_any_flips(seed, flips):
    g, _ = random_block(seed)
    if g.num_edges() < 3:
        return
    t = spqr_tree(g)
    flip = {i: bool(flips >> (i % 16) & 1) for i in range(len(t.nodes))}
    rs = planar_rotation_of_block(t, flip)
    assert is_planar_rotation(g, rs)


def test_non_planar_block_raises():
    g = Multigraph()
    vs = [g.add_vertex() for _ in range(5)]
    for i in range(5):
        for j in range(i + 1, 5):
            g.add_edge(vs[i], vs[j])
    with pytest.raises(NonPlanarError):
        spqr_tree(g)


# ---------------------------------------------------------------------------
# embedding trees
# ---------------------------------------------------------------------------


def test_octahedron_tree_is_one_q_node():
    g = octahedron()
    t = embedding_tree(g, 0)
    assert len(t.inner_nodes()) == 1 and not t.is_trivial()
    assert len(enumerate_orders(t)) == 2


def test_bond_pole_tree_is_trivial():
    g, a = bond(4)
    t = embedding_tree(g, a)
    assert t.is_trivial()
    assert enumerate_orders(t) == vertex_rotation_set(g, a)


def test_star_centre_is_trivial():
    # the centre is a cut vertex whose blocks are single edges: every rotation occurs
    g, c = star(4)
    assert c in cut_vertices(g)
    t = embedding_tree(g, c)
    assert t.is_trivial()
    assert enumerate_orders(t) == vertex_rotation_set(g, c)
    assert len(enumerate_orders(t)) == 6


def test_general_cut_vertex_rejected():
    # two triangles sharing a vertex: the rotation set is not a PQ-tree set
    g = Multigraph()
    c = g.add_vertex("c")
    for k in range(2):
        a, b = g.add_vertex((k, 0)), g.add_vertex((k, 1))
        g.add_edge(c, a)
        g.add_edge(a, b)
        g.add_edge(b, c)
    with pytest.raises(ValueError):
        embedding_tree(g, c)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_embedding_tree_matches_rotation_set(seed):
    g, rng = random_block(seed)
    cands = [v for v in g.vertices() if g.degree(v) >= 3]
    if not cands:
        return
    v = rng.choice(cands)
    assert enumerate_orders(embedding_tree(g, v)) == vertex_rotation_set(g, v)


def test_rotation_set_routes_agree():
    g = octahedron()
    assert vertex_rotation_set(g, 0) == vertex_rotation_set_exhaustive(g, 0)


# ---------------------------------------------------------------------------
# wheels and bond poles
# ---------------------------------------------------------------------------


def test_wheel_replace_shape():
    g = octahedron()
    rs = planar_embed(g)
    w = wheel_replace(g, {0: rs[0]})
    assert w.num_vertices() == g.num_vertices() + 4
    assert w.num_edges() == g.num_edges() + 2 * 4
    rims = [v for v in w.vertices() if is_wheel_element(v)]
    assert len(rims) == 4 and all(w.degree(r) == 4 for r in rims)
    assert planar_embed(w) is not None


def test_wheel_replace_skips_small_q_vertices():
    g, c = star(2)
    w = wheel_replace(g, {c: g.half_edges(c)})
    assert w.num_vertices() == g.num_vertices()


def test_bond_pole_bijections():
    g, a = bond(4)
    t = spqr_tree(g)
    partner, du, dv = bond_pole_bijections(g, t, a)
    assert partner == "b"
    assert sorted(du.values()) == sorted(dv.values()) == [0, 1, 2, 3]
    for e in g.edges():
        hu, hv = g.ends(e)
        assert du[hu] == dv[hv]
