"""Frontends turning Clustered Planarity, Connected SEFE, Partially
PQ-constrained Planarity and Atomic Embeddability into SyncPlan instances,
with maps lifting witnesses back to the source problem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .graph import Multigraph, _ident
from .instance import P, Q, InstanceError, SyncPlanInstance
from .pqtree import LEAF, PQTree, format_tree, parse_tree


class ReductionError(InstanceError):
    pass


def _copy_into(inst: SyncPlanInstance, g: Multigraph) -> tuple[dict, dict]:
    """Copy ``g`` into ``inst`` with fresh ids; returns vertex and half-edge maps."""
    vmap, hmap = {}, {}
    for v in g.vertices():
        vmap[v] = inst.add_vertex()
    for e in g.edges():
        hu, hv = g.ends(e)
        a, b = g.vertex_of(hu), g.vertex_of(hv)
        ne = inst.graph.add_edge(vmap[a], vmap[b])
        nu, nv = inst.graph.ends(ne)
        hmap[hu], hmap[hv] = nu, nv
    return vmap, hmap


def _pull_back(rs: Mapping, vmap: Mapping, hmap: Mapping) -> dict:
    inv = {n: h for h, n in hmap.items()}
    return {v: [inv[h] for h in rs[nv]] for v, nv in vmap.items()}


# ---------------------------------------------------------------------------
# Clustered Planarity via the CD-tree
# ---------------------------------------------------------------------------


@dataclass
class ClusteredGraph:
    """``parent`` maps every cluster to its parent (the root to None);
    ``cluster_of`` maps every vertex to its innermost cluster."""

    graph: Multigraph
    parent: dict
    cluster_of: dict
    root: Any = "root"

    def children(self) -> dict:
        out: dict = {c: [] for c in self.parent}
        for c, p in self.parent.items():
            if p is not None:
                out[p].append(c)
        return out

    def ancestors(self, c) -> list:
        """``c`` and its ancestors, innermost first."""
        out = []
        while c is not None:
            out.append(c)
            c = self.parent[c]
        return out

    def members(self) -> dict:
        """Vertices of every cluster, including those of sub-clusters."""
        out: dict = {c: set() for c in self.parent}
        for v, c in self.cluster_of.items():
            for a in self.ancestors(c):
                out[a].add(v)
        return out

    def check(self) -> None:
        roots = [c for c, p in self.parent.items() if p is None]
        if roots != [self.root]:
            raise ReductionError("cluster tree needs exactly one root")
        for c in self.parent:
            seen = set()
            x = c
            while x is not None:
                if x in seen:
                    raise ReductionError("cluster tree has a cycle")
                if x not in self.parent:
                    raise ReductionError(f"unknown parent cluster {x!r}")
                seen.add(x)
                x = self.parent[x]
        if set(self.cluster_of) != set(self.graph.vertices()):
            raise ReductionError("every vertex needs exactly one innermost cluster")
        for v, c in self.cluster_of.items():
            if c not in self.parent:
                raise ReductionError(f"vertex {v!r} assigned to unknown cluster {c!r}")

    # -- JSON: {"graph": ..., "clusters": {"id":, "vertices": [...], "children": [...]}}

    def to_json(self) -> dict:
        kids = self.children()
        direct: dict = {c: [] for c in self.parent}
        for v, c in self.cluster_of.items():
            direct[c].append(v)

        def node(c):
            return {"id": c, "vertices": direct[c], "children": [node(k) for k in kids[c]]}

        return {"graph": self.graph.to_json(), "clusters": node(self.root)}

    @classmethod
    def from_json(cls, data: Mapping) -> "ClusteredGraph":
        g = Multigraph.from_json(data["graph"])
        parent, cluster_of = {}, {}
        stack = [(data["clusters"], None)]
        root = _ident(data["clusters"].get("id", "root"))
        while stack:
            node, par = stack.pop()
            cid = _ident(node.get("id"))
            if cid is None or cid in parent:
                raise ReductionError(f"missing or duplicate cluster id {cid!r}")
            parent[cid] = par
            for v in map(_ident, node.get("vertices", [])):
                if v in cluster_of:
                    raise ReductionError(f"vertex {v!r} listed in two clusters")
                cluster_of[v] = cid
            for k in node.get("children", []):
                stack.append((k, cid))
        cg = cls(g, parent, cluster_of, root)
        cg.check()
        return cg


def make_clustered(g: Multigraph, clusters: Mapping, root="root") -> ClusteredGraph:
    """Clustered graph from ``{cluster: (parent, [direct vertices])}``; vertices
    not listed belong to the root."""
    parent = {root: None}
    cluster_of = {}
    for c, (par, vs) in clusters.items():
        parent[c] = root if par is None else par
        for v in vs:
            cluster_of[v] = c
    for v in g.vertices():
        cluster_of.setdefault(v, root)
    cg = ClusteredGraph(g, parent, cluster_of, root)
    cg.check()
    return cg


@dataclass
class CDTree:
    """Skeleton vertex sets per cluster.  ``vertex[c][r]`` is the skeleton
    vertex of representative ``r`` in the skeleton of ``c``: an original
    vertex, ``("child", k)`` for child cluster ``k`` or ``("parent",)``."""

    vertex: dict = field(default_factory=dict)
    twins: list = field(default_factory=list)  # (vertex in parent skeleton, vertex in child skeleton)
    edges: dict = field(default_factory=dict)  # cluster -> list of original edge ids

    def skeleton_sizes(self) -> dict:
        return {c: (len(vs), len(self.edges[c])) for c, vs in self.vertex.items()}


@dataclass
class ClusteredLift:
    vmap: dict
    hmap: dict

    def embedding(self, rs: Mapping) -> dict:
        return _pull_back(rs, self.vmap, self.hmap)


def clustered_to_syncplan(cg: ClusteredGraph):
    """Disjoint union of the CD-tree skeletons, each virtual vertex piped to its
    twin.  Returns ``(instance, lift, cdtree)``."""
    cg.check()
    g = cg.graph
    inst = SyncPlanInstance()
    ng = inst.graph
    kids = cg.children()
    cd = CDTree()
    for c in cg.parent:
        reps = {}
        for k in kids[c]:
            reps[("child", k)] = inst.add_vertex()
        if cg.parent[c] is not None:
            reps[("parent",)] = inst.add_vertex()
        cd.vertex[c] = reps
        cd.edges[c] = []
    vmap, hmap = {}, {}
    for v, c in cg.cluster_of.items():
        cd.vertex[c][v] = vmap[v] = inst.add_vertex()
    depth = {c: len(cg.ancestors(c)) for c in cg.parent}
    # (cluster, edge) -> {original half: skeleton half}
    skel_half: dict = {}
    for e in g.edges():
        ha, hb = g.ends(e)
        a, b = g.vertex_of(ha), g.vertex_of(hb)
        ca, cb = cg.cluster_of[a], cg.cluster_of[b]
        # clusters on the tree path between ca and cb, each with the child on the path
        path_a, path_b = [], []
        x, y = ca, cb
        below_a, below_b = a, b
        while x != y:
            if depth[x] >= depth[y]:
                path_a.append((x, below_a))
                below_a, x = ("child", x), cg.parent[x]
            else:
                path_b.append((y, below_b))
                below_b, y = ("child", y), cg.parent[y]
        for c, ra in path_a:
            _skeleton_edge(inst, cd, skel_half, c, e, (ha, ra), (hb, ("parent",)))
        for c, rb in path_b:
            _skeleton_edge(inst, cd, skel_half, c, e, (ha, ("parent",)), (hb, rb))
        _skeleton_edge(inst, cd, skel_half, x, e, (ha, below_a), (hb, below_b))
    for (c, e), halves in skel_half.items():
        for h, nh in halves.items():
            x = g.vertex_of(h)
            if cg.cluster_of[x] == c:
                hmap[h] = nh
    for c in cg.parent:
        for k in kids[c]:
            up = cd.vertex[c][("child", k)]
            down = cd.vertex[k][("parent",)]
            cd.twins.append((up, down))
            if ng.degree(up) != ng.degree(down):
                raise ReductionError("twin degrees differ")
            if ng.degree(up) == 0:
                continue
            # an edge leaving cluster k ends at the twin in both skeletons
            phi = {}
            for e in cd.edges[k]:
                b = [nh for nh in skel_half[(k, e)].values() if ng.vertex_of(nh) == down]
                if b:
                    (a,) = [nh for nh in skel_half[(c, e)].values() if ng.vertex_of(nh) == up]
                    phi[a] = b[0]
            inst.add_pipe(up, down, phi)
    for v in ng.vertices():
        inst.kind.setdefault(v, P)
    return inst, ClusteredLift(vmap, hmap), cd


def _skeleton_edge(inst, cd, skel_half, c, e, end_a, end_b) -> None:
    (ha, ra), (hb, rb) = end_a, end_b
    if ra == rb:
        return
    va, vb = cd.vertex[c][ra], cd.vertex[c][rb]
    ne = inst.graph.add_edge(va, vb)
    na, nb = inst.graph.ends(ne)
    skel_half[(c, e)] = {ha: na, hb: nb}
    cd.edges[c].append(e)


# ---------------------------------------------------------------------------
# Connected SEFE
# ---------------------------------------------------------------------------


@dataclass
class SefeInstance:
    """Two graphs over shared vertex ids; an edge is shared when both graphs
    contain an edge with the same id (and the same endpoints)."""

    g1: Multigraph
    g2: Multigraph

    def shared_edges(self) -> list:
        out = []
        for e in self.g1.edges():
            if self.g2.has_edge(e):
                if set(self.g1.endpoints(e)) != set(self.g2.endpoints(e)):
                    raise ReductionError(f"shared edge {e!r} has different endpoints")
                out.append(e)
        return out

    def shared_vertices(self) -> list:
        return [v for v in self.g1.vertices() if self.g2.has_vertex(v)]

    def shared_graph(self) -> Multigraph:
        g = Multigraph()
        for v in self.shared_vertices():
            g.add_vertex(v)
        for e in self.shared_edges():
            hu, hv = self.g1.ends(e)
            g.add_edge(self.g1.vertex_of(hu), self.g1.vertex_of(hv), e, hu, hv)
        return g

    def check(self) -> None:
        shared = self.shared_graph()
        if shared.num_vertices() == 0 or len(shared.components()) != 1:
            raise ReductionError("the shared graph must be connected and non-empty")

    def to_json(self) -> dict:
        return {"graph1": self.g1.to_json(), "graph2": self.g2.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "SefeInstance":
        s = cls(Multigraph.from_json(data["graph1"]), Multigraph.from_json(data["graph2"]))
        s.check()
        return s


def shared_rotation(g: Multigraph, rs: Mapping, v, shared: set) -> list:
    """Rotation of ``v`` restricted to shared edges, as edge ids."""
    return [g.edge_of(h) for h in rs[v] if g.edge_of(h) in shared]


@dataclass
class SefeLift:
    maps: tuple  # ((vmap1, hmap1), (vmap2, hmap2))

    def embeddings(self, rs: Mapping) -> tuple[dict, dict]:
        """``(E1, E2)`` with E2 un-mirrored so that both induce the same
        rotations on the shared graph."""
        (v1, h1), (v2, h2) = self.maps
        e1 = _pull_back(rs, v1, h1)
        e2 = _pull_back(rs, v2, h2)
        return e1, {v: list(reversed(r)) for v, r in e2.items()}


def sefe_to_syncplan(s: SefeInstance):
    """Both graphs plus, per shared vertex of shared degree >= 3, a bond whose
    parallel edges stand for the shared edges at that vertex; each copy of
    the vertex is piped to its pole of the bond (padded with degree-1 vertices).
    Returns ``(instance, lift)``."""
    s.check()
    shared = set(s.shared_edges())
    inst = SyncPlanInstance()
    g = inst.graph
    maps = []
    for src in (s.g1, s.g2):
        maps.append(_copy_into(inst, src))
    for x in s.shared_vertices():
        sh = [e for e in (s.g1.edge_of(h) for h in s.g1.half_edges(x)) if e in shared]
        if len(sh) < 3:
            # a rotation of at most two edges is unique
            continue
        b = [inst.add_vertex(), inst.add_vertex()]
        bond_half = [{}, {}]
        for e in sh:
            ne = g.add_edge(b[0], b[1])
            h0, h1 = g.ends(ne)
            bond_half[0][e], bond_half[1][e] = h0, h1
        for side, (src, (vmap, hmap)) in enumerate(zip((s.g1, s.g2), maps)):
            xv = vmap[x]
            phi = {}
            for h in src.half_edges(x):
                e = src.edge_of(h)
                if e in shared:
                    phi[hmap[h]] = bond_half[side][e]
                else:
                    pad = inst.add_vertex()
                    pe = g.add_edge(b[side], pad)
                    phi[hmap[h]] = g.ends(pe)[0]
            inst.add_pipe(xv, b[side], phi)
    for v in g.vertices():
        inst.kind.setdefault(v, P)
    return inst, SefeLift(tuple(maps))


# ---------------------------------------------------------------------------
# Partially PQ-constrained Planarity
# ---------------------------------------------------------------------------


@dataclass
class PQConstrainedInstance:
    """``constraints[v]`` is a PQ-tree whose leaves are half-edges at ``v``."""

    graph: Multigraph
    constraints: dict = field(default_factory=dict)

    def check(self) -> None:
        for v, t in self.constraints.items():
            if not self.graph.has_vertex(v):
                raise ReductionError(f"constraint on unknown vertex {v!r}")
            leaves = t.leaves()
            if not set(leaves) <= set(self.graph.half_edges(v)):
                raise ReductionError(f"tree leaves at {v!r} are not half-edges of {v!r}")

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(),
                "constraints": {str(v): format_tree(t) for v, t in self.constraints.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "PQConstrainedInstance":
        g = Multigraph.from_json(data["graph"])
        lookup = {str(v): v for v in g.vertices()}
        cons = {}
        for key, text in data.get("constraints", {}).items():
            if key not in lookup:
                raise ReductionError(f"constraint on unknown vertex {key!r}")
            cons[lookup[key]] = parse_tree(text)
        p = cls(g, cons)
        p.check()
        return p


@dataclass
class PQCLift:
    vmap: dict
    hmap: dict

    def embedding(self, rs: Mapping) -> dict:
        return _pull_back(rs, self.vmap, self.hmap)


def pqconstrained_to_syncplan(p: PQConstrainedInstance):
    """Each annotation tree becomes a gadget (P-nodes as P-vertices, Q-nodes as
    Q-vertices) whose leaves are joined to a cap-vertex; the cap is padded
    with degree-1 vertices and piped to the constrained vertex.
    Returns ``(instance, lift)``."""
    p.check()
    inst = SyncPlanInstance()
    g = inst.graph
    vmap, hmap = _copy_into(inst, p.graph)
    for v in vmap.values():
        inst.kind[v] = P
    for v, t in p.constraints.items():
        cap = inst.add_vertex()
        node = {}
        for x in t.inner_nodes():
            node[x] = inst.add_vertex()
        half_to: dict = {}
        cap_half = {}
        done = set()
        for x in t.inner_nodes():
            for y in t.adj[x]:
                if t.kind[y] == LEAF:
                    e = g.add_edge(node[x], cap)
                    a, c = g.ends(e)
                    half_to[(x, y)] = a
                    cap_half[y[1]] = c
                elif (y, x) not in done:
                    e = g.add_edge(node[x], node[y])
                    a, b = g.ends(e)
                    half_to[(x, y)], half_to[(y, x)] = a, b
                    done.add((x, y))
        for x in t.inner_nodes():
            if t.kind[x] == Q:
                inst.set_q(node[x], [half_to[(x, y)] for y in t.adj[x]])
            else:
                inst.kind[node[x]] = P
        phi = {}
        for h in p.graph.half_edges(v):
            if h in cap_half:
                phi[hmap[h]] = cap_half[h]
            else:
                pad = inst.add_vertex()
                e = g.add_edge(cap, pad)
                phi[hmap[h]] = g.ends(e)[0]
        inst.add_pipe(vmap[v], cap, phi)
    for x in g.vertices():
        inst.kind.setdefault(x, P)
    return inst, PQCLift(vmap, hmap)


def satisfies_constraints(p: PQConstrainedInstance, rs: Mapping) -> bool:
    from .pqtree import admits

    for v, t in p.constraints.items():
        labels = set(t.leaves())
        if not admits(t, [h for h in rs[v] if h in labels]):
            return False
    return True


# ---------------------------------------------------------------------------
# Atomic Embeddability
# ---------------------------------------------------------------------------


@dataclass
class AtomicInstance:
    """Atom graphs with disjoint ids; ``pairs`` lists ``(x, y, phi)`` for
    paired virtual vertices, ``phi`` mapping half-edges of ``x`` to ``y``."""

    atoms: list
    pairs: list

    def check(self) -> None:
        owner = {}
        for i, a in enumerate(self.atoms):
            for v in a.vertices():
                if v in owner:
                    raise ReductionError(f"vertex {v!r} occurs in two atoms")
                owner[v] = i
        seen = set()
        for x, y, phi in self.pairs:
            for z in (x, y):
                if z not in owner:
                    raise ReductionError(f"unknown virtual vertex {z!r}")
                if z in seen:
                    raise ReductionError(f"virtual vertex {z!r} paired twice")
                seen.add(z)
            gx, gy = self.atoms[owner[x]], self.atoms[owner[y]]
            if gx.degree(x) != gy.degree(y):
                raise ReductionError(f"degree mismatch between {x!r} and {y!r}")
            if set(phi) != set(gx.half_edges(x)) or set(phi.values()) != set(gy.half_edges(y)):
                raise ReductionError(f"pairing of {x!r} and {y!r} is not a bijection")

    def to_json(self) -> dict:
        return {"atoms": [a.to_json() for a in self.atoms],
                "pairs": [{"u": x, "v": y, "phi": {str(h): k for h, k in phi.items()}}
                          for x, y, phi in self.pairs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "AtomicInstance":
        atoms = [Multigraph.from_json(a) for a in data["atoms"]]
        halves = {}
        verts = {}
        for a in atoms:
            for v in a.vertices():
                verts[str(v)] = v
                for h in a.half_edges(v):
                    halves[str(h)] = h
        pairs = []
        for p in data.get("pairs", []):
            try:
                x, y = verts[str(_ident(p["u"]))], verts[str(_ident(p["v"]))]
                phi = {halves[str(h)]: halves[str(_ident(k))] for h, k in p["phi"].items()}
            except KeyError as exc:
                raise ReductionError(f"unknown id {exc}") from exc
            pairs.append((x, y, phi))
        a = cls(atoms, pairs)
        a.check()
        return a


def atomic_to_syncplan(a: AtomicInstance):
    """Disjoint union of the atoms with one pipe per pair.  Returns
    ``(instance, lift)``; the lift maps rotations back per atom vertex."""
    a.check()
    inst = SyncPlanInstance()
    vmap, hmap = {}, {}
    for atom in a.atoms:
        vm, hm = _copy_into(inst, atom)
        vmap.update(vm)
        hmap.update(hm)
    for x, y, phi in a.pairs:
        inst.add_pipe(vmap[x], vmap[y], {hmap[h]: hmap[k] for h, k in phi.items()})
    for v in inst.graph.vertices():
        inst.kind.setdefault(v, P)
    return inst, ClusteredLift(vmap, hmap)
