"""Exhaustive ground truth for small inputs.

Every search enumerates rotation systems vertex by vertex and prunes as soon
as the embedding induced on the already assigned vertices has positive genus.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from typing import Iterable, Iterator, Mapping

import networkx as nx

from .graph import Multigraph, canonical_cyclic, cyclic_equal, genus, sort_key
from .instance import Q, SyncPlanInstance, Verdict, cell_orientation, is_valid_embedding

DEFAULT_BUDGET = 10**7


class OracleBudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    try:
        return int(os.environ.get("SYNCPLAN_ORACLE_BUDGET", DEFAULT_BUDGET))
    except ValueError:
        return DEFAULT_BUDGET


class _Budget:
    def __init__(self, limit: int | None) -> None:
        self.limit = default_budget() if limit is None else limit
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise OracleBudgetExceeded(f"oracle budget of {self.limit} candidates exhausted")


def cyclic_orders(items: list) -> Iterator[list]:
    """All cyclic orders of ``items``, each once, first element fixed."""
    if len(items) <= 2:
        yield list(items)
        return
    first, rest = items[0], items[1:]
    for perm in itertools.permutations(rest):
        yield [first, *perm]


def _bfs_order(g: Multigraph, comp: list) -> list:
    start = min(comp, key=sort_key)
    seen = {start}
    out = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def _partial_genus_ok(g: Multigraph, rs: Mapping, assigned: set, x) -> bool:
    """Genus of the embedding induced on the assigned part of ``x``'s component."""
    sub_v = set()
    stack = [x]
    sub_v.add(x)
    while stack:
        a = stack.pop()
        for h in g.half_edges(a):
            b = g.opposite(h)
            if b in assigned and b not in sub_v:
                sub_v.add(b)
                stack.append(b)
    if len(sub_v) < 2:
        return True
    succ = {}
    darts = 0
    for v in sub_v:
        rot = [h for h in rs[v] if g.opposite(h) in sub_v]
        darts += len(rot)
        for i, h in enumerate(rot):
            succ[h] = rot[(i + 1) % len(rot)]
    seen = set()
    faces = 0
    for h in succ:
        if h in seen:
            continue
        faces += 1
        while h not in seen:
            seen.add(h)
            h = succ[g.twin(h)]
    return 2 - len(sub_v) + darts // 2 - faces == 0


def enumerate_planar_embeddings(g: Multigraph, budget: int | None = None) -> Iterator[dict]:
    """Yield every planar rotation system of ``g`` exactly once."""
    b = _Budget(budget)
    order = []
    for comp in g.components():
        order.extend(_bfs_order(g, comp))
    rs: dict = {}
    assigned: set = set()

    def rec(k):
        if k == len(order):
            yield {v: list(r) for v, r in rs.items()}
            return
        x = order[k]
        for rot in cyclic_orders(g.half_edges(x)):
            b.tick()
            rs[x] = rot
            assigned.add(x)
            if _partial_genus_ok(g, rs, assigned, x):
                yield from rec(k + 1)
            assigned.discard(x)
            del rs[x]

    yield from rec(0)


def count_planar_embeddings(g: Multigraph, budget: int | None = None) -> int:
    return sum(1 for _ in enumerate_planar_embeddings(g, budget))


def _wheel_planar(g: Multigraph, fixed: Mapping) -> bool:
    """Planarity of ``g`` after replacing each vertex in ``fixed`` by a wheel
    whose rim follows the given rotation.  Such a graph is planar iff ``g`` has
    a planar embedding in which every listed vertex has its given rotation or
    the reversal (each vertex flipping independently)."""
    h = nx.Graph()
    for v in g.vertices():
        h.add_node(("v", v))
    for e in g.edges():
        a, b = g.endpoints(e)
        h.add_edge(("v", a), ("e", e))
        h.add_edge(("e", e), ("v", b))
    for v, rot in fixed.items():
        if len(rot) < 3:
            continue
        rim = []
        for x in rot:
            e = g.edge_of(x)
            r = ("r", v, x)
            h.remove_edge(("v", v), ("e", e))
            h.add_edge(("v", v), r)
            h.add_edge(r, ("e", e))
            rim.append(r)
        for i in range(len(rim)):
            h.add_edge(rim[i], rim[(i + 1) % len(rim)])
    return nx.check_planarity(h)[0]


def vertex_rotation_set(g: Multigraph, v, budget: int | None = None) -> set:
    """Canonical cyclic rotations of ``v`` over all planar embeddings of its component.

    Each candidate rotation is tested by a planarity test of the graph with
    ``v`` replaced by a wheel whose rim follows the candidate.
    """
    comp = g.subgraph(g.component_of(v))
    b = _Budget(budget)
    out = set()
    for rot in cyclic_orders(comp.half_edges(v)):
        b.tick()
        if _wheel_planar(comp, {v: rot}):
            out.add(canonical_cyclic(rot))
    return out


def vertex_rotation_set_exhaustive(g: Multigraph, v, budget: int | None = None) -> set:
    """Same as :func:`vertex_rotation_set` by enumerating every planar embedding."""
    comp = g.subgraph(g.component_of(v))
    return {canonical_cyclic(rs[v]) for rs in enumerate_planar_embeddings(comp, budget)}


# ---------------------------------------------------------------------------
# Synchronized Planarity by exhaustive search
# ---------------------------------------------------------------------------


def _coupled_groups(inst: SyncPlanInstance) -> list[list]:
    """Connected components of the graph, merged when joined by pipes or cells."""
    g = inst.graph
    comps = g.components()
    idx = {}
    for i, c in enumerate(comps):
        for v in c:
            idx[v] = i
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for p in inst.pipes.values():
        union(idx[p.u], idx[p.v])
    for members in inst.cells.values():
        for a, b in zip(members, members[1:]):
            union(idx[a], idx[b])
    groups: dict = {}
    for i in range(len(comps)):
        groups.setdefault(find(i), []).append(comps[i])
    return list(groups.values())


def _candidates(inst: SyncPlanInstance, x, rs: Mapping, cell_sign: Mapping) -> Iterable[list]:
    g = inst.graph
    if x in inst.pipe_of:
        p = inst.pipes[inst.pipe_of[x]]
        y = p.other(x)
        if y in rs:
            phi = p.phi_from(y)
            yield list(reversed([phi[h] for h in rs[y]]))
            return
    if inst.kind[x] == Q:
        ref = inst.psi[x]
        sign = cell_sign.get(inst.cell_of.get(x))
        if len(ref) <= 2:
            yield list(ref)
            return
        if sign != -1:
            yield list(ref)
        if sign != 1:
            yield list(reversed(ref))
        return
    yield from cyclic_orders(g.half_edges(x))


def _solve_group(inst: SyncPlanInstance, comps: list, b: _Budget) -> dict | None:
    g = inst.graph
    order = []
    for comp in sorted(comps, key=lambda c: sort_key(min(c, key=sort_key))):
        order.extend(_bfs_order(g, comp))
    rs: dict = {}
    assigned: set = set()
    cell_sign: dict = {}

    def consistent(x) -> bool:
        if x in inst.pipe_of:
            p = inst.pipes[inst.pipe_of[x]]
            y = p.other(x)
            if y in rs:
                phi = p.phi_from(x)
                mapped = list(reversed([phi[h] for h in rs[x]]))
                if not cyclic_equal(mapped, rs[y]):
                    return False
        return True

    def rec(k):
        if k == len(order):
            return True
        x = order[k]
        for rot in _candidates(inst, x, rs, cell_sign):
            b.tick()
            rs[x] = rot
            assigned.add(x)
            pushed = None
            ok = consistent(x)
            if ok and inst.kind[x] == Q:
                o = cell_orientation(inst, x, rs)
                c = inst.cell_of.get(x)
                if o is None:
                    ok = False
                elif o and c is not None:
                    cur = cell_sign.get(c)
                    if cur is None:
                        cell_sign[c] = o
                        pushed = c
                    elif cur != o:
                        ok = False
            if ok and _partial_genus_ok(g, rs, assigned, x):
                if rec(k + 1):
                    return True
            if pushed is not None:
                del cell_sign[pushed]
            assigned.discard(x)
            del rs[x]
        return False

    if rec(0):
        return dict(rs)
    return None


def brute_solve_syncplan(inst: SyncPlanInstance, budget: int | None = None) -> Verdict:
    """Decide ``inst`` by exhaustive search; the witness is the first valid
    rotation system in enumeration order."""
    b = _Budget(budget)
    witness: dict = {}
    for comps in _coupled_groups(inst):
        part = _solve_group(inst, comps, b)
        if part is None:
            return Verdict(False)
        witness.update(part)
    assert is_valid_embedding(inst, witness)
    return Verdict(True, witness)


# ---------------------------------------------------------------------------
# Clustered Planarity
# ---------------------------------------------------------------------------


class OracleDisagreement(AssertionError):
    """The two independent c-planarity routes gave different answers."""


def _faces(g: Multigraph, rs: Mapping) -> tuple[list, dict]:
    succ = {}
    for v, rot in rs.items():
        for i, h in enumerate(rot):
            succ[h] = rot[(i + 1) % len(rot)]
    face_of = {}
    faces = []
    for h in succ:
        if h in face_of:
            continue
        walk = []
        while h not in face_of:
            face_of[h] = len(faces)
            walk.append(h)
            h = succ[g.twin(h)]
        faces.append(walk)
    return faces, face_of


def _regions_ok(g: Multigraph, rs: Mapping, members: Mapping, vertices: set) -> bool:
    """Some face lies, for every cluster, in the face of the cluster's induced
    embedding that also holds everything outside the cluster (the cluster
    graphs are connected)."""
    faces, face_of = _faces(g, rs)
    common = set(range(len(faces)))
    for c, mem in members.items():
        if not mem or mem >= vertices:
            continue
        parent = list(range(len(faces)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in g.edges():
            a, b = g.ends(e)
            if g.vertex_of(a) in mem and g.vertex_of(b) in mem:
                continue
            ra, rb = find(face_of[a]), find(face_of[b])
            if ra != rb:
                parent[ra] = rb
        outside = {find(face_of[h]) for v in vertices - mem for h in rs[v]}
        if len(outside) != 1:
            return False
        (root,) = outside
        common &= {f for f in range(len(faces)) if find(f) == root}
        if not common:
            return False
    return True


def _cluster_components(g: Multigraph, mem: set) -> list[set]:
    out = []
    seen = set()
    for v in sorted(mem, key=sort_key):
        if v in seen:
            continue
        comp = {v}
        seen.add(v)
        stack = [v]
        while stack:
            x = stack.pop()
            for h in g.half_edges(x):
                y = g.opposite(h)
                if y in mem and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        out.append(comp)
    return out


def _augment(g: Multigraph, rs: dict, members: Mapping, vertices: set, b: _Budget) -> bool:
    b.tick()
    for c, mem in members.items():
        comps = _cluster_components(g, mem)
        if len(comps) > 1:
            break
    else:
        return _regions_ok(g, rs, members, vertices)
    first, rest = comps[0], set().union(*comps[1:])
    faces, _ = _faces(g, rs)
    for walk in faces:
        corners_a = [h for h in walk if g.vertex_of(h) in first]
        corners_b = [h for h in walk if g.vertex_of(h) in rest]
        for ha in corners_a:
            for hb in corners_b:
                a, bb = g.vertex_of(ha), g.vertex_of(hb)
                e = g.add_edge(a, bb)
                x, y = g.ends(e)
                saved = (list(rs[a]), list(rs[bb]))
                rs[a].insert(rs[a].index(ha), x)
                rs[bb].insert(rs[bb].index(hb), y)
                ok = _augment(g, rs, members, vertices, b)
                rs[a], rs[bb] = saved
                g.remove_edge(e)
                if ok:
                    return True
    return False


def cplanar_by_augmentation(cg, budget: int | None = None) -> bool:
    """Direct search: some planar embedding of the graph admits edges, each
    drawn inside a face, that connect every cluster such that each cluster's
    remaining graph lies in one face of the cluster's embedding."""
    g = cg.graph.copy()
    if len(g.components()) > 1:
        raise ValueError("the augmentation oracle needs a connected graph")
    b = _Budget(budget)
    members = {c: m for c, m in cg.members().items() if c != cg.root}
    vertices = set(g.vertices())
    for rs in enumerate_planar_embeddings(cg.graph, budget):
        if _augment(g, {v: list(r) for v, r in rs.items()}, members, vertices, b):
            return True
    return False


def cplanar_by_reduction(cg, budget: int | None = None) -> bool:
    from .reductions import clustered_to_syncplan

    inst, _, _ = clustered_to_syncplan(cg)
    return brute_solve_syncplan(inst, budget).satisfiable


def brute_cplanar(cg, budget: int | None = None, method: str = "both") -> bool:
    """c-planarity of a small clustered graph with connected underlying graph.
    ``method`` is ``"augmentation"``, ``"reduction"`` or ``"both"`` (cross-checked)."""
    if method == "augmentation":
        return cplanar_by_augmentation(cg, budget)
    if method == "reduction":
        return cplanar_by_reduction(cg, budget)
    a = cplanar_by_augmentation(cg, budget)
    r = cplanar_by_reduction(cg, budget)
    if a != r:
        raise OracleDisagreement(f"augmentation says {a}, reduction says {r}")
    return a


def is_cplanar_embedding(cg, rs: Mapping, budget: int | None = None) -> bool:
    """True iff the planar embedding ``rs`` of the graph extends to a c-planar drawing."""
    g = cg.graph.copy()
    if genus(g, rs) != 0:
        return False
    members = {c: m for c, m in cg.members().items() if c != cg.root}
    return _augment(g, {v: list(r) for v, r in rs.items()}, members, set(g.vertices()), _Budget(budget))


# ---------------------------------------------------------------------------
# Connected SEFE and PQ-constrained planarity
# ---------------------------------------------------------------------------


def _shared_signature(g: Multigraph, rs: Mapping, verts: list, shared: set) -> tuple:
    return tuple(canonical_cyclic([g.edge_of(h) for h in rs[v] if g.edge_of(h) in shared]) for v in verts)


def brute_sefe(s, budget: int | None = None) -> tuple | None:
    """A pair of planar embeddings inducing the same rotations on the shared
    graph, found by enumerating the embeddings of both graphs; None if there
    is no such pair."""
    shared = set(s.shared_edges())
    verts = sorted(s.shared_vertices(), key=sort_key)
    first = {}
    for rs in enumerate_planar_embeddings(s.g1, budget):
        first.setdefault(_shared_signature(s.g1, rs, verts, shared), rs)
    for rs in enumerate_planar_embeddings(s.g2, budget):
        sig = _shared_signature(s.g2, rs, verts, shared)
        if sig in first:
            return first[sig], rs
    return None


def sefe_pair_ok(s, e1: Mapping, e2: Mapping) -> bool:
    shared = set(s.shared_edges())
    verts = sorted(s.shared_vertices(), key=sort_key)
    return (genus(s.g1, e1) == 0 and genus(s.g2, e2) == 0
            and _shared_signature(s.g1, e1, verts, shared) == _shared_signature(s.g2, e2, verts, shared))


def brute_pqc(p, budget: int | None = None) -> dict | None:
    """A planar embedding respecting every annotation tree, or None."""
    from .reductions import satisfies_constraints

    for rs in enumerate_planar_embeddings(p.graph, budget):
        if satisfies_constraints(p, rs):
            return rs
    return None
