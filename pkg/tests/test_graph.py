from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.generators import random_graph
from syncplan.graph import (Cut, GraphError, Multigraph, bipartition, boundary_rotation,
                            canonical_cyclic, contract_connected_in_embedding, contract_tree_rotation,
                            cyclic_equal, genus, is_planar_rotation, join_at_vertices, join_embeddings,
                            planar_embed, reverse_rotation_system, reversed_cyclic, split_at_cut,
                            split_bipartite_embedding, trace_faces)

seeds = st.integers(min_value=0, max_value=10**6)


def complete(n):
    g = Multigraph()
    vs = [g.add_vertex() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(vs[i], vs[j])
    return g


def k33():
    g = Multigraph()
    a = [g.add_vertex() for _ in range(3)]
    b = [g.add_vertex() for _ in range(3)]
    for x in a:
        for y in b:
            g.add_edge(x, y)
    return g


def planar_sample(seed, n=7):
    rng = random.Random(seed)
    while True:
        g, vs = random_graph(rng, rng.randint(3, n), rng.randint(0, 2 * n), 5)
        rs = planar_embed(g)
        if rs is not None:
            return g, rs, rng


# ---------------------------------------------------------------------------
# multigraph basics
# ---------------------------------------------------------------------------


def test_half_edge_bookkeeping():
    g = Multigraph()
    a, b = g.add_vertex(), g.add_vertex()
    e1 = g.add_edge(a, b)
    e2 = g.add_edge(a, b)
    assert g.degree(a) == 2 and g.num_edges() == 2
    hu, hv = g.ends(e1)
    assert g.twin(hu) == hv and g.vertex_of(hv) == b and g.opposite(hu) == b
    g.remove_edge(e2)
    assert g.degree(b) == 1
    with pytest.raises(GraphError):
        g.add_edge(a, a)
    with pytest.raises(GraphError):
        g.add_vertex(a)


def test_json_round_trip_keeps_ids():
    g = Multigraph()
    a, b = g.add_vertex(("t", 1)), g.add_vertex("b")
    g.add_edge(a, b, ("e", 0), ("h", 0), ("h", 1))
    g2 = Multigraph.from_json(json.loads(json.dumps(g.to_json())))
    assert g2.vertices() == g.vertices()
    assert g2.ends(("e", 0)) == (("h", 0), ("h", 1))


def test_components():
    g = Multigraph()
    a, b, c = g.add_vertex(), g.add_vertex(), g.add_vertex()
    g.add_edge(a, b)
    assert sorted(map(len, g.components())) == [1, 2]
    assert set(g.component_of(a)) == {a, b}


# ---------------------------------------------------------------------------
# cyclic sequences
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("a,b,eq", [
    ([1, 2, 3], [2, 3, 1], True),
    ([1, 2, 3], [1, 3, 2], False),
    ([], [], True),
    ([1, 2], [1, 2, 3], False),
])
def test_cyclic_equal(a, b, eq):
    assert cyclic_equal(a, b) is eq


@given(st.lists(st.integers(), min_size=1, max_size=8, unique=True), st.integers(0, 7))
def test_canonical_cyclic_ignores_rotation(seq, k):
    k %= len(seq)
    assert canonical_cyclic(seq) == canonical_cyclic(seq[k:] + seq[:k])
    assert cyclic_equal(reversed_cyclic(reversed_cyclic(seq)), seq)


# ---------------------------------------------------------------------------
# planarity and faces
# ---------------------------------------------------------------------------


def test_k4_planar_k5_k33_not():
    g = complete(4)
    rs = planar_embed(g)
    assert rs is not None and genus(g, rs) == 0
    faces, _ = trace_faces(g, rs)
    assert len(faces) == 4
    assert planar_embed(complete(5)) is None
    assert planar_embed(k33()) is None


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_euler_formula_on_random_planar(seed):
    g, rs, _ = planar_sample(seed)
    faces, gen = trace_faces(g, rs)
    assert gen == 0
    assert g.num_vertices() - g.num_edges() + len(faces) == 2
    assert is_planar_rotation(g, reverse_rotation_system(rs))


def test_bad_rotation_detected():
    g = complete(4)
    rs = planar_embed(g)
    v = g.vertices()[0]
    rs[v] = [rs[v][0], rs[v][2], rs[v][1]]
    assert not is_planar_rotation(g, rs)


# ---------------------------------------------------------------------------
# cuts, joins and contraction
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_split_then_join_restores_edges(seed):
    g, rs, rng = planar_sample(seed)
    vs = g.vertices()
    k = rng.randint(1, len(vs) - 1)
    side_x = set(rng.sample(vs, k))
    side_y = set(vs) - side_x
    cut = Cut(frozenset(side_x), frozenset(side_y))
    if not cut.cut_edges(g):
        return
    g1, g2, x, y, phi = split_at_cut(g, cut)
    joined = join_at_vertices(g1, x, g2, y, {h: _x_to_y(g1, g2, y, h) for h in g1.half_edges(x)})
    assert joined.num_edges() == g.num_edges()
    assert sorted(map(sorted, (map(str, joined.endpoints(e)) for e in joined.edges()))) == \
        sorted(map(sorted, (map(str, g.endpoints(e)) for e in g.edges())))


def _x_to_y(g1, g2, y, h):
    # the half of x and the half of y that stand for the same cut edge share an edge id
    e = g1.edge_of(h)
    return next(k for k in g2.half_edges(y) if g2.edge_of(k) == e)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_contraction_keeps_planarity(seed):
    g, rs, rng = planar_sample(seed)
    start = rng.choice(g.vertices())
    s = {start}
    for _ in range(rng.randint(0, 3)):
        nb = [y for x in s for y in g.neighbors(x) if y not in s]
        if nb:
            s.add(rng.choice(nb))
    h, rs2, v = contract_connected_in_embedding(g, rs, s)
    for x in h.vertices():
        rs2.setdefault(x, [])
    assert is_planar_rotation(h, rs2)
    assert sorted(map(str, rs2[v])) == sorted(map(str, boundary_rotation(g, rs, s)))


def test_tree_rotation_matches_boundary_rotation():
    g, rs, _ = planar_sample(11)
    vs = g.vertices()
    a = vs[0]
    b = g.neighbors(a)[0]
    e = next(g.edge_of(h) for h in g.half_edges(a) if g.opposite(h) == b)
    hu, hv = g.ends(e)
    twin = {hu: hv, hv: hu}
    got = contract_tree_rotation(rs, [a, b], twin)
    # parallel a-b edges become loops in the boundary walk; compare the leaving ones
    leaving = [h for h in got if g.opposite(h) not in (a, b)]
    assert cyclic_equal(leaving, boundary_rotation(g, rs, {a, b}))


def test_join_embeddings_of_split_star():
    # two triangles joined through a degree-3 cut
    g = Multigraph()
    xs = [g.add_vertex() for _ in range(3)]
    ys = [g.add_vertex() for _ in range(3)]
    for i in range(3):
        g.add_edge(xs[i], xs[(i + 1) % 3])
        g.add_edge(ys[i], ys[(i + 1) % 3])
        g.add_edge(xs[i], ys[i])
    rs = planar_embed(g)
    cut = Cut(frozenset(xs), frozenset(ys))
    g1, g2, x, y, phi = split_at_cut(g, cut)
    _, r1, _ = contract_connected_in_embedding(g, rs, ys, x)
    _, r2, _ = contract_connected_in_embedding(g, rs, xs, y)
    r1 = {v: r1[v] for v in g1.vertices()}
    r2 = {v: r2[v] for v in g2.vertices()}
    assert is_planar_rotation(g1, r1) and is_planar_rotation(g2, r2)
    back = join_embeddings(r1, x, r2, y)
    assert back == {v: rs[v] for v in g.vertices()}


# ---------------------------------------------------------------------------
# bipartite split
# ---------------------------------------------------------------------------


def test_bipartition_rejects_odd_cycle():
    with pytest.raises(GraphError):
        bipartition(complete(3))


@pytest.mark.parametrize("a,b", [(2, 3), (2, 4), (1, 5)])
def test_split_bipartite_embedding_compatible(a, b):
    g = Multigraph()
    xs = [g.add_vertex() for _ in range(a)]
    ys = [g.add_vertex() for _ in range(b)]
    for x in xs:
        for y in ys:
            g.add_edge(x, y)
    rs = planar_embed(g)
    rs1, rs2, side_a, _ = split_bipartite_embedding(g, rs, side_a=xs)
    assert set(side_a) == set(xs)
    e1 = [g.edge_of(h) for h in rs1["x"]]
    e2 = [g.edge_of(h) for h in rs2["y"]]
    assert cyclic_equal(e1, list(reversed(e2)))
