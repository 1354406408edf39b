from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncplan.generators import (cluster_cycle_classic, pqc_cut_gadget, random_clustered, random_pqc,
                                 random_sefe, sefe_star_conflict)
from syncplan.graph import Multigraph, cyclic_equal, is_planar_rotation
from syncplan.instance import check_wellformed, is_valid_embedding
from syncplan.oracle import (OracleBudgetExceeded, brute_cplanar, brute_pqc, brute_sefe,
                             is_cplanar_embedding, sefe_pair_ok)
from syncplan.reductions import (AtomicInstance, ClusteredGraph, PQConstrainedInstance,
                                 ReductionError, SefeInstance, atomic_to_syncplan,
                                 clustered_to_syncplan, make_clustered, pqconstrained_to_syncplan,
                                 satisfies_constraints, sefe_to_syncplan)
from syncplan.solver import solve

seeds = st.integers(min_value=0, max_value=10**6)


def round_trip(obj):
    return type(obj).from_json(json.loads(json.dumps(obj.to_json())))


# ---------------------------------------------------------------------------
# clustered planarity
# ---------------------------------------------------------------------------


def test_classic_cluster_cycle_is_negative():
    cg = cluster_cycle_classic()
    inst, lift, cd = clustered_to_syncplan(cg)
    assert check_wellformed(inst) == []
    assert not solve(inst).satisfiable
    assert not brute_cplanar(cg)


def test_flat_clustering_of_planar_graph_is_positive():
    g = Multigraph()
    vs = [g.add_vertex(i) for i in range(4)]
    for i in range(4):
        g.add_edge(vs[i], vs[(i + 1) % 4])
    cg = make_clustered(g, {"a": (None, [0, 1])})
    inst, lift, _ = clustered_to_syncplan(cg)
    v = solve(inst)
    assert v.satisfiable
    assert is_cplanar_embedding(cg, lift.embedding(v.witness))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_clustered_matches_oracle(seed):
    cg = random_clustered(random.Random(seed))
    want = brute_cplanar(cg, method="augmentation")
    inst, lift, _ = clustered_to_syncplan(cg)
    v = solve(inst)
    assert v.satisfiable == want
    if want:
        assert is_cplanar_embedding(cg, lift.embedding(v.witness))
    try:
        assert brute_cplanar(cg, budget=20000, method="reduction") == want
    except OracleBudgetExceeded:
        pass


def test_clustered_json_round_trip():
    cg = random_clustered(random.Random(5))
    back = round_trip(cg)
    assert back.parent == cg.parent and back.cluster_of == cg.cluster_of


@pytest.mark.parametrize("data", [
    {"graph": {"vertices": [0], "edges": []}, "clusters": {"id": "r", "vertices": [], "children": []}},
    {"graph": {"vertices": [0], "edges": []},
     "clusters": {"id": "r", "vertices": [0], "children": [{"id": "r", "vertices": []}]}},
])
def test_clustered_rejects_bad_trees(data):
    with pytest.raises(ReductionError):
        ClusteredGraph.from_json(data)


# ---------------------------------------------------------------------------
# SEFE
# ---------------------------------------------------------------------------


def test_sefe_star_conflict():
    s = sefe_star_conflict()
    inst, _ = sefe_to_syncplan(s)
    assert not solve(inst).satisfiable
    assert brute_sefe(s) is None


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_sefe_matches_oracle(seed):
    s = random_sefe(random.Random(seed))
    try:
        s.check()
    except ReductionError:
        return
    inst, lift = sefe_to_syncplan(s)
    v = solve(inst)
    assert v.satisfiable == (brute_sefe(s) is not None)
    if v.satisfiable:
        e1, e2 = lift.embeddings(v.witness)
        assert sefe_pair_ok(s, e1, e2)


def test_sefe_requires_connected_shared_graph():
    g1, g2 = Multigraph(), Multigraph()
    for g in (g1, g2):
        g.add_vertex("a")
        g.add_vertex("b")
    with pytest.raises(ReductionError):
        sefe_to_syncplan(SefeInstance(g1, g2))


def test_sefe_json_round_trip():
    s = sefe_star_conflict()
    back = round_trip(s)
    assert back.shared_edges() == s.shared_edges()


# ---------------------------------------------------------------------------
# PQ-constrained planarity
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("sat", [False, True])
def test_pqc_gadgets(sat):
    p = pqc_cut_gadget(sat)
    inst, lift = pqconstrained_to_syncplan(p)
    v = solve(inst)
    assert v.satisfiable is sat
    assert (brute_pqc(p) is not None) is sat
    if sat:
        e = lift.embedding(v.witness)
        assert is_planar_rotation(p.graph, e) and satisfies_constraints(p, e)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_pqc_matches_oracle(seed):
    p = random_pqc(random.Random(seed))
    inst, lift = pqconstrained_to_syncplan(p)
    v = solve(inst)
    assert v.satisfiable == (brute_pqc(p) is not None)
    if v.satisfiable:
        e = lift.embedding(v.witness)
        assert is_planar_rotation(p.graph, e) and satisfies_constraints(p, e)


def test_pqc_json_round_trip():
    p = pqc_cut_gadget()
    back = round_trip(p)
    assert {str(v) for v in back.constraints} == {str(v) for v in p.constraints}
    assert (brute_pqc(back) is None) and (brute_pqc(p) is None)


def test_pqc_rejects_foreign_leaves():
    p = pqc_cut_gadget()
    data = p.to_json()
    data["constraints"] = {"nope": next(iter(data["constraints"].values()))}
    with pytest.raises(ReductionError):
        PQConstrainedInstance.from_json(data)


# ---------------------------------------------------------------------------
# atomic embeddability
# ---------------------------------------------------------------------------


def wheel_atom(tag, k):
    """A wheel with hub ``(tag, "x")`` as the virtual vertex."""
    g = Multigraph()
    x = g.add_vertex((tag, "x"))
    rim = [g.add_vertex((tag, i)) for i in range(k)]
    for i in range(k):
        g.add_edge(rim[i], rim[(i + 1) % k], (tag, "r", i), (tag, "ra", i), (tag, "rb", i))
        g.add_edge(x, rim[i], (tag, "s", i), (tag, "h", i), (tag, "t", i))
    return g, x


@pytest.mark.parametrize("shift,sat", [(0, True), (1, True), ("swap", False)])
def test_atomic_wheels(shift, sat):
    # a wheel hub has two rotations; the pairing must be compatible with them
    ga, xa = wheel_atom("a", 4)
    gb, xb = wheel_atom("b", 4)
    if shift == "swap":
        perm = [1, 0, 2, 3]
    else:
        perm = [(3 - i + shift) % 4 for i in range(4)]
    phi = {("a", "h", i): ("b", "h", perm[i]) for i in range(4)}
    a = AtomicInstance([ga, gb], [(xa, xb, phi)])
    inst, lift = atomic_to_syncplan(a)
    v = solve(inst)
    assert v.satisfiable is sat
    if sat:
        rs = lift.embedding(v.witness)
        assert is_planar_rotation(ga, {x: rs[x] for x in ga.vertices()})
        assert cyclic_equal(list(reversed([phi[h] for h in rs[xa]])), rs[xb])
        assert is_valid_embedding(inst, v.witness)


def test_atomic_json_round_trip_and_errors():
    ga, xa = wheel_atom("a", 3)
    gb, xb = wheel_atom("b", 3)
    phi = {("a", "h", i): ("b", "h", i) for i in range(3)}
    a = AtomicInstance([ga, gb], [(xa, xb, phi)])
    back = round_trip(a)
    assert len(back.pairs) == 1 and back.pairs[0][2] == phi
    with pytest.raises(ReductionError):
        AtomicInstance([ga, gb], [(xa, xb, {})]).check()
    with pytest.raises(ReductionError):
        AtomicInstance([ga, ga], []).check()
