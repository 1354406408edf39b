"""Loop-free multigraphs with stable half-edge identities, rotation systems,
face tracing and the split/join/contract primitives used throughout the solver.

Every edge owns exactly two half-edges.  A half-edge is attached to one vertex
and identifies the edge "as seen from" that vertex; rotations, pipe bijections
and bond maps are all expressed over half-edge identifiers so they survive
graph surgery.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import networkx as nx

Vertex = Hashable
Edge = Hashable
HalfEdge = Hashable
RotationSystem = dict  # vertex -> list of half-edges (cyclic)


class GraphError(ValueError):
    """Raised on malformed graph input or an invalid graph operation."""


class Multigraph:
    def __init__(self) -> None:
        self._inc: dict[Vertex, dict[HalfEdge, None]] = {}
        self._ends: dict[Edge, tuple[HalfEdge, HalfEdge]] = {}
        self._hv: dict[HalfEdge, Vertex] = {}
        self._he: dict[HalfEdge, Edge] = {}
        self._counter = 0

    # -- identifiers -------------------------------------------------------

    def _bump(self, ident) -> None:
        if isinstance(ident, int) and not isinstance(ident, bool) and ident >= self._counter:
            self._counter = ident + 1

    def fresh(self) -> int:
        """Return an integer id unused by any vertex, edge or half-edge."""
        ident = self._counter
        self._counter += 1
        return ident

    # -- construction ------------------------------------------------------

    def add_vertex(self, v: Vertex | None = None) -> Vertex:
        if v is None:
            v = self.fresh()
        elif v in self._inc:
            raise GraphError(f"duplicate vertex {v!r}")
        self._bump(v)
        self._inc[v] = {}
        return v

    def add_edge(
        self,
        u: Vertex,
        v: Vertex,
        e: Edge | None = None,
        hu: HalfEdge | None = None,
        hv: HalfEdge | None = None,
    ) -> Edge:
        if u == v:
            raise GraphError(f"loop at {u!r}")
        if u not in self._inc or v not in self._inc:
            raise GraphError(f"unknown endpoint in edge {u!r}-{v!r}")
        e = self.fresh() if e is None else e
        hu = self.fresh() if hu is None else hu
        hv = self.fresh() if hv is None else hv
        if e in self._ends:
            raise GraphError(f"duplicate edge {e!r}")
        if hu == hv or hu in self._hv or hv in self._hv:
            raise GraphError(f"duplicate half-edge on edge {e!r}")
        for ident in (e, hu, hv):
            self._bump(ident)
        self._ends[e] = (hu, hv)
        self._hv[hu], self._hv[hv] = u, v
        self._he[hu] = self._he[hv] = e
        self._inc[u][hu] = None
        self._inc[v][hv] = None
        return e

    def remove_edge(self, e: Edge) -> None:
        for h in self._ends.pop(e):
            del self._inc[self._hv.pop(h)][h]
            del self._he[h]

    def remove_vertex(self, v: Vertex) -> None:
        for h in list(self._inc[v]):
            self.remove_edge(self._he[h])
        del self._inc[v]

    def move_half_edge(self, h: HalfEdge, w: Vertex) -> None:
        """Reattach half-edge ``h`` (and thus its edge end) to vertex ``w``."""
        if self.opposite(h) == w:
            raise GraphError(f"moving {h!r} to {w!r} would create a loop")
        del self._inc[self._hv[h]][h]
        self._hv[h] = w
        self._inc[w][h] = None

    # -- queries -----------------------------------------------------------

    def vertices(self) -> list[Vertex]:
        return list(self._inc)

    def edges(self) -> list[Edge]:
        return list(self._ends)

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._inc

    def has_edge(self, e: Edge) -> bool:
        return e in self._ends

    def has_half_edge(self, h: HalfEdge) -> bool:
        return h in self._hv

    def num_vertices(self) -> int:
        return len(self._inc)

    def num_edges(self) -> int:
        return len(self._ends)

    def half_edges(self, v: Vertex) -> list[HalfEdge]:
        return list(self._inc[v])

    def degree(self, v: Vertex) -> int:
        return len(self._inc[v])

    def ends(self, e: Edge) -> tuple[HalfEdge, HalfEdge]:
        return self._ends[e]

    def endpoints(self, e: Edge) -> tuple[Vertex, Vertex]:
        hu, hv = self._ends[e]
        return self._hv[hu], self._hv[hv]

    def vertex_of(self, h: HalfEdge) -> Vertex:
        return self._hv[h]

    def edge_of(self, h: HalfEdge) -> Edge:
        return self._he[h]

    def twin(self, h: HalfEdge) -> HalfEdge:
        a, b = self._ends[self._he[h]]
        return b if h == a else a

    def opposite(self, h: HalfEdge) -> Vertex:
        return self._hv[self.twin(h)]

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return [self.opposite(h) for h in self._inc[v]]

    def copy(self) -> "Multigraph":
        g = Multigraph()
        g._inc = {v: dict(hs) for v, hs in self._inc.items()}
        g._ends = dict(self._ends)
        g._hv = dict(self._hv)
        g._he = dict(self._he)
        g._counter = self._counter
        return g

    def subgraph(self, vertices: Iterable[Vertex]) -> "Multigraph":
        """Induced subgraph; identifiers are kept."""
        vs = set(vertices)
        g = Multigraph()
        g._counter = self._counter
        for v in self._inc:
            if v in vs:
                g._inc[v] = {}
        for v in g._inc:
            for h in self._inc[v]:
                e = self._he[h]
                if e in g._ends:
                    continue
                t = self.twin(h)
                if self._hv[t] in vs:
                    hu, hv = self._ends[e]
                    g._ends[e] = (hu, hv)
                    for x in (hu, hv):
                        g._hv[x] = self._hv[x]
                        g._he[x] = e
        # keep incidence order of the parent graph
        for v in g._inc:
            g._inc[v] = {h: None for h in self._inc[v] if h in g._hv}
        return g

    def components(self) -> list[list[Vertex]]:
        seen: set = set()
        out = []
        for s in self._inc:
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for h in self._inc[x]:
                    y = self.opposite(h)
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        queue.append(y)
            out.append(comp)
        return out

    def component_of(self, v: Vertex) -> list[Vertex]:
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for h in self._inc[x]:
                y = self.opposite(h)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return list(seen)

    def __repr__(self) -> str:
        return f"Multigraph(|V|={len(self._inc)}, |E|={len(self._ends)})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        edges = []
        for e, (hu, hv) in self._ends.items():
            edges.append({"id": e, "u": self._hv[hu], "v": self._hv[hv], "hu": hu, "hv": hv})
        return {"vertices": list(self._inc), "edges": edges}

    @classmethod
    def from_json(cls, data: Mapping) -> "Multigraph":
        g = cls()
        try:
            for v in data["vertices"]:
                g.add_vertex(_ident(v))
            for rec in data["edges"]:
                g.add_edge(_ident(rec["u"]), _ident(rec["v"]), _ident(rec.get("id")),
                           _ident(rec.get("hu")), _ident(rec.get("hv")))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        return g


def _ident(x):
    """JSON turns tuple ids into lists; turn them back."""
    if isinstance(x, list):
        return tuple(_ident(y) for y in x)
    return x


# ---------------------------------------------------------------------------
# cyclic sequences
# ---------------------------------------------------------------------------


def cyclic_equal(a: Sequence, b: Sequence) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        i = list(b).index(a[0])
    except ValueError:
        return False
    n = len(a)
    return all(a[k] == b[(i + k) % n] for k in range(n))


def reversed_cyclic(seq: Sequence) -> list:
    return list(reversed(seq))


def sort_key(x) -> tuple:
    return (type(x).__name__, x) if not isinstance(x, tuple) else ("tuple", tuple(map(sort_key, x)))


def canonical_cyclic(seq: Sequence) -> tuple:
    """Rotate ``seq`` so that its smallest element comes first."""
    if not seq:
        return ()
    seq = list(seq)
    i = min(range(len(seq)), key=lambda k: sort_key(seq[k]))
    return tuple(seq[i:] + seq[:i])


def check_rotation_system(g: Multigraph, rs: Mapping) -> None:
    for v in g.vertices():
        rot = rs.get(v)
        if rot is None:
            raise GraphError(f"rotation missing for vertex {v!r}")
        if len(rot) != g.degree(v) or set(rot) != set(g.half_edges(v)):
            raise GraphError(f"rotation of {v!r} is not a permutation of its half-edges")


def default_rotation(g: Multigraph) -> RotationSystem:
    return {v: g.half_edges(v) for v in g.vertices()}


def successor_map(rs: Mapping) -> dict:
    succ = {}
    for rot in rs.values():
        k = len(rot)
        for i, h in enumerate(rot):
            succ[h] = rot[(i + 1) % k]
    return succ


def trace_faces(g: Multigraph, rs: Mapping) -> tuple[list[list[HalfEdge]], int]:
    """Trace the faces of ``rs`` and return ``(faces, genus)``.

    A face is a closed walk of darts; the dart following ``h`` is the successor
    of ``twin(h)`` in the rotation at the far endpoint.  Isolated vertices
    contribute one face each.
    """
    succ = successor_map({v: rs[v] for v in g.vertices()})
    seen: set = set()
    faces = []
    for v in g.vertices():
        for h in rs[v]:
            if h in seen:
                continue
            face = []
            x = h
            while x not in seen:
                seen.add(x)
                face.append(x)
                x = succ[g.twin(x)]
            faces.append(face)
    isolated = sum(1 for v in g.vertices() if g.degree(v) == 0)
    comps = len(g.components())
    euler = 2 * comps - g.num_vertices() + g.num_edges() - (len(faces) + isolated)
    return faces, euler // 2


def genus(g: Multigraph, rs: Mapping) -> int:
    return trace_faces(g, rs)[1]


def is_planar_rotation(g: Multigraph, rs: Mapping) -> bool:
    return genus(g, rs) == 0


def planar_embed(g: Multigraph) -> RotationSystem | None:
    """Return a planar rotation system of ``g`` or ``None`` if ``g`` is not planar.

    Multi-edges are handled by subdividing every edge before running the
    left-right planarity test of networkx.
    """
    h = nx.Graph()
    for v in g.vertices():
        h.add_node(("v", v))
    for e in g.edges():
        a, b = g.endpoints(e)
        h.add_edge(("v", a), ("e", e))
        h.add_edge(("e", e), ("v", b))
    ok, emb = nx.check_planarity(h)
    if not ok:
        return None
    rs = {}
    for v in g.vertices():
        if g.degree(v) == 0:
            rs[v] = []
            continue
        by_edge = {g.edge_of(x): x for x in g.half_edges(v)}
        rs[v] = [by_edge[node[1]] for node in emb.neighbors_cw_order(("v", v))]
    return rs


def reverse_rotation_system(rs: Mapping) -> RotationSystem:
    return {v: list(reversed(rot)) for v, rot in rs.items()}


# ---------------------------------------------------------------------------
# cuts, splits and joins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cut:
    side_x: frozenset
    side_y: frozenset

    def cut_edges(self, g: Multigraph) -> list[Edge]:
        out = []
        for e in g.edges():
            a, b = g.endpoints(e)
            if (a in self.side_x) != (b in self.side_x):
                out.append(e)
        return out


def _check_cut(g: Multigraph, cut: Cut) -> None:
    if not cut.side_x or not cut.side_y:
        raise GraphError("cut sides must be non-empty")
    if cut.side_x & cut.side_y:
        raise GraphError("cut sides overlap")
    comp = set(g.component_of(next(iter(cut.side_x))))
    if comp != cut.side_x | cut.side_y:
        raise GraphError("cut sides do not cover exactly one connected component")


def split_at_cut(g: Multigraph, cut: Cut, x: Vertex = None, y: Vertex = None):
    """Split ``g`` at ``cut``.

    Returns ``(g1, g2, x, y, phi)``: ``g1`` holds side X plus the vertex ``x``
    that represents contracted side Y, ``g2`` holds side Y plus ``y``.  The
    half-edges of ``x`` reuse the Y-side ids of the cut edges and those of
    ``y`` reuse the X-side ids, so ``phi`` maps each Y-side id to the X-side id
    of the same edge.  Vertices of other components are dropped.
    """
    _check_cut(g, cut)
    g1 = g.subgraph(cut.side_x)
    g2 = g.subgraph(cut.side_y)
    fresh_base = max(g._counter, g1._counter, g2._counter)
    g1._counter = g2._counter = fresh_base
    if x is None:
        x = g1.fresh()
    if y is None:
        y = g2.fresh()
        g1._counter = max(g1._counter, g2._counter)
    g1.add_vertex(x)
    g2.add_vertex(y)
    phi = {}
    for v in cut.side_x:
        for h in g.half_edges(v):
            t = g.twin(h)
            if g.vertex_of(t) in cut.side_y:
                e = g.edge_of(h)
                g1.add_edge(v, x, e, h, t)
                g2.add_edge(y, g.vertex_of(t), e, h, t)
                phi[t] = h
    return g1, g2, x, y, phi


def join_at_vertices(g1: Multigraph, x: Vertex, g2: Multigraph, y: Vertex, phi: Mapping) -> Multigraph:
    """Join ``g1`` and ``g2`` at ``x`` and ``y`` along the half-edge bijection ``phi``.

    Each pair of edges ``ux`` and ``vy`` matched by ``phi`` fuses into one edge
    ``uv`` that keeps the id of the ``g1`` edge and the far half-edge ids of
    both edges.
    """
    if g1.degree(x) != g2.degree(y):
        raise GraphError("join requires deg(x) == deg(y)")
    if set(phi) != set(g1.half_edges(x)) or set(phi.values()) != set(g2.half_edges(y)) or len(set(phi.values())) != len(phi):
        raise GraphError("phi is not a bijection between the half-edges of x and y")
    shared = (set(g1.vertices()) - {x}) & (set(g2.vertices()) - {y})
    if shared:
        raise GraphError(f"graphs are not disjoint: {sorted(map(repr, shared))[:3]}")
    g = Multigraph()
    g._counter = max(g1._counter, g2._counter)
    for v in g1.vertices():
        if v != x:
            g.add_vertex(v)
    for v in g2.vertices():
        if v != y:
            g.add_vertex(v)
    joined_1 = {g1.edge_of(h) for h in g1.half_edges(x)}
    joined_2 = {g2.edge_of(h) for h in g2.half_edges(y)}
    for src, skip in ((g1, joined_1), (g2, joined_2)):
        for e in src.edges():
            if e in skip:
                continue
            hu, hv = src.ends(e)
            g.add_edge(src.vertex_of(hu), src.vertex_of(hv), e, hu, hv)
    for a, b in phi.items():
        p = g1.twin(a)
        q = g2.twin(b)
        g.add_edge(g1.vertex_of(p), g2.vertex_of(q), g1.edge_of(a), p, q)
    return g


def join_embeddings(rs1: Mapping, x: Vertex, rs2: Mapping, y: Vertex) -> RotationSystem:
    """Rotations of the joined graph; all surviving vertices keep their rotation."""
    rs = {v: list(r) for v, r in rs1.items() if v != x}
    rs.update({v: list(r) for v, r in rs2.items() if v != y})
    return rs


# ---------------------------------------------------------------------------
# contraction in an embedding
# ---------------------------------------------------------------------------


def boundary_rotation(g: Multigraph, rs: Mapping, s: Iterable[Vertex]) -> list[HalfEdge]:
    """Cyclic order in which the edges leaving the connected set ``s`` appear
    around it in ``rs``; the result lists the half-edges on the ``s`` side.

    The walk follows an Euler tour around a BFS spanning tree of ``g[s]``; this
    is the rotation obtained by contracting the tree edges one by one and
    dropping the loops left by the remaining internal edges.
    """
    s = set(s)
    if not s:
        raise GraphError("empty vertex set")
    root = next(iter(v for v in g.vertices() if v in s))
    tree: set = set()
    seen = {root}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for h in rs[a]:
            b = g.opposite(h)
            if b in s and b not in seen:
                seen.add(b)
                tree.add(g.edge_of(h))
                queue.append(b)
    if seen != s:
        raise GraphError("vertex set is not connected")
    succ = successor_map({v: rs[v] for v in s})
    boundary = [h for v in s for h in rs[v] if g.opposite(h) not in s]
    internal_total = sum(len(rs[v]) for v in s)
    if not boundary:
        return []

    def step(h):
        nxt = succ[h]
        while g.edge_of(nxt) in tree:
            nxt = succ[g.twin(nxt)]
        return nxt

    # a full tour visits every non-tree half-edge once
    start = boundary[0]
    order = []
    h = start
    for _ in range(internal_total + 1):
        if g.opposite(h) not in s:
            order.append(h)
        h = step(h)
        if h == start:
            break
    if len(order) != len(boundary) or set(order) != set(boundary):
        raise GraphError("boundary walk did not visit every leaving edge")
    return order


def contract_tree_rotation(rs: Mapping, vertices: Iterable[Vertex], tree_twin: Mapping) -> list[HalfEdge]:
    """Rotation of the vertex obtained by contracting a tree in an embedding.

    ``tree_twin`` pairs the two half-edges of every tree edge; all other
    half-edges at ``vertices`` leave the tree.  Used when the graph at the
    time of the contraction is no longer available.
    """
    succ = successor_map({v: rs[v] for v in vertices})
    boundary = [h for v in vertices for h in rs[v] if h not in tree_twin]
    if not boundary:
        return []
    order = []
    h = boundary[0]
    for _ in range(len(succ) + 1):
        order.append(h)
        nxt = succ[h]
        while nxt in tree_twin:
            nxt = succ[tree_twin[nxt]]
        h = nxt
        if h == boundary[0]:
            break
    if len(order) != len(boundary):
        raise GraphError("tree contraction walk did not visit every leaving edge")
    return order


def contract_connected_in_embedding(g: Multigraph, rs: Mapping, s: Iterable[Vertex], v: Vertex = None):
    """Contract the connected set ``s`` to a new vertex ``v``.

    Returns ``(g', rs', v)``.  Boundary edges keep their ids (the ``s``-side
    half-edges move to ``v``); edges inside ``s`` vanish; rotations outside
    ``s`` are untouched.
    """
    s = set(s)
    order = boundary_rotation(g, rs, s)
    if len(s) == 1 and v is None:
        (only,) = s
        return g.copy(), {x: list(r) for x, r in rs.items()}, only
    h = g.copy()
    if v is None:
        v = h.fresh()
    h.add_vertex(v)
    for x in s:
        for he in list(h.half_edges(x)):
            if g.opposite(he) not in s:
                h.move_half_edge(he, v)
        h.remove_vertex(x)
    out = {x: list(r) for x, r in rs.items() if x not in s}
    out[v] = order
    return h, out, v


# ---------------------------------------------------------------------------
# bipartite embedding split
# ---------------------------------------------------------------------------


def bipartition(g: Multigraph) -> tuple[list[Vertex], list[Vertex]]:
    """Two colour classes of a connected bipartite graph; raises if not bipartite."""
    verts = g.vertices()
    if not verts:
        return [], []
    colour = {verts[0]: 0}
    queue = deque([verts[0]])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if y not in colour:
                colour[y] = 1 - colour[x]
                queue.append(y)
            elif colour[y] == colour[x]:
                raise GraphError("graph is not bipartite")
    if len(colour) != len(verts):
        raise GraphError("graph is not connected")
    a = [v for v in verts if colour[v] == 0]
    b = [v for v in verts if colour[v] == 1]
    return a, b


def _connect_class(g: Multigraph, rs: Mapping, cls: list[Vertex]) -> tuple[Multigraph, dict]:
    """Augment a planar embedding with edges inside faces until ``cls`` is
    connected through the added edges (which form a spanning tree of ``cls``)."""
    h = g.copy()
    rot = {v: list(r) for v, r in rs.items()}
    members = set(cls)
    parent = {v: v for v in cls}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups = len(cls)
    while groups > 1:
        faces, _ = trace_faces(h, rot)
        placed = False
        for face in faces:
            # corner at vertex w after arriving through dart d: insert after twin(d)
            corners = []
            for d in face:
                t = h.twin(d)
                w = h.vertex_of(t)
                if w in members:
                    corners.append((w, t))
            for i in range(len(corners)):
                for j in range(i + 1, len(corners)):
                    (w1, t1), (w2, t2) = corners[i], corners[j]
                    if find(w1) == find(w2):
                        continue
                    e = h.add_edge(w1, w2)
                    n1, n2 = h.ends(e)
                    rot[w1].insert(rot[w1].index(t1) + 1, n1)
                    rot[w2].insert(rot[w2].index(t2) + 1, n2)
                    parent[find(w1)] = find(w2)
                    groups -= 1
                    placed = True
                    break
                if placed:
                    break
            if placed:
                break
        if not placed:
            raise GraphError("no face joins two classes; embedding is not planar")
    return h, rot


def split_bipartite_embedding(g: Multigraph, rs: Mapping, x: Vertex = "x", y: Vertex = "y", side_a=None):
    """Split a planar embedding of a connected bipartite graph at its colour classes.

    Returns ``(rs1, rs2, side_a, side_b)`` where ``rs1`` embeds ``A + x`` (``x``
    is contracted ``B``; its rotation lists B-side half-edges) and ``rs2``
    embeds ``B + y`` (``y`` is contracted ``A``).  ``side_a`` selects which
    colour class plays the role of ``A``.  The two are compatible:
    mapping ``rs1[x]`` through the edge identity gives ``reversed(rs2[y])``.
    """
    side_a_, side_b_ = bipartition(g)
    if side_a is not None and not set(side_a) <= set(side_a_):
        side_a_, side_b_ = side_b_, side_a_
    if side_a is not None and set(side_a) != set(side_a_):
        raise GraphError("side_a is not a colour class")
    side_a, side_b = side_a_, side_b_
    rs1 = {v: list(rs[v]) for v in side_a}
    rs2 = {v: list(rs[v]) for v in side_b}
    # both classes are connected inside one augmented embedding, so that
    # contracting them leaves a bond whose two rotations mirror each other
    aug, rot = _connect_class(g, rs, side_b)
    aug, rot = _connect_class(aug, rot, side_a)
    rs1[x] = [h for h in boundary_rotation(aug, rot, side_b) if g.has_half_edge(h)]
    rs2[y] = [h for h in boundary_rotation(aug, rot, side_a) if g.has_half_edge(h)]
    return rs1, rs2, side_a, side_b
