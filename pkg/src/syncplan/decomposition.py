"""Block-cut trees, SPQR trees, Q-vertex wheel replacement and embedding trees.

The SPQR tree is built by repeatedly splitting pieces at separation pairs
(split components in the Hopcroft-Tarjan sense) and merging adjacent bonds and
adjacent polygons afterwards.  This is quadratic in the block size rather than
linear, which is fine for the component sizes the solver works with.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .graph import GraphError, Multigraph, cyclic_equal, planar_embed
from .pqtree import LEAF, P, Q, PQTree, PQTreeError, trivial_tree

BOND, POLYGON, RIGID = "bond", "polygon", "rigid"


class NonPlanarError(GraphError):
    """A component has no planar embedding."""


# ---------------------------------------------------------------------------
# wheel replacement
# ---------------------------------------------------------------------------


def wheel_vertex(h) -> tuple:
    return ("~w", h)


def wheel_replace(g: Multigraph, psi: Mapping) -> Multigraph:
    """Replace every Q-vertex ``q`` of degree >= 3 by a wheel with centre ``q``.

    Each incident edge ``e = (h at q, t at w)`` is subdivided by a rim vertex
    ``("~w", h)``: ``e`` keeps ``h`` and now ends at the rim vertex, while a
    new edge carries ``t`` to ``w``.  Rim edges connect rim vertices that are
    consecutive in ``psi[q]``.  Every original vertex keeps its half-edge ids,
    so restricting an embedding of the result to the original vertices gives
    an embedding of ``g``.
    """
    w = g.copy()
    for q, order in psi.items():
        if len(order) < 3:
            continue
        rims = []
        for h in order:
            e = w.edge_of(h)
            t = w.twin(h)
            far = w.vertex_of(t)
            s = w.add_vertex(wheel_vertex(h))
            w.remove_edge(e)
            w.add_edge(q, s, e, h, ("~wa", h))
            w.add_edge(s, far, ("~we", h), ("~wb", h), t)
            rims.append(s)
        k = len(order)
        for i, h in enumerate(order):
            a, b = rims[i], rims[(i + 1) % k]
            w.add_edge(a, b, ("~wr", h), ("~wr0", h), ("~wr1", h))
    return w


def is_wheel_element(x) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) and x[0].startswith("~w")


# ---------------------------------------------------------------------------
# biconnected components
# ---------------------------------------------------------------------------


def _biconnected(adj: Mapping, skip=None):
    """Blocks (as edge lists) and articulation points of the graph given by
    ``adj: vertex -> list of (edge, neighbour)``, ignoring vertex ``skip``."""
    disc: dict = {}
    low: dict = {}
    blocks = []
    arts = set()
    counter = 0
    for root in adj:
        if root == skip or root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        estack: list = []
        stack = [(root, None, iter(adj[root]))]
        while stack:
            x, pe, it = stack[-1]
            advanced = False
            for e, y in it:
                if y == skip or e == pe:
                    continue
                if y not in disc:
                    disc[y] = low[y] = counter
                    counter += 1
                    estack.append(e)
                    stack.append((y, e, iter(adj[y])))
                    advanced = True
                    break
                if disc[y] < disc[x]:
                    estack.append(e)
                    if disc[y] < low[x]:
                        low[x] = disc[y]
            if advanced:
                continue
            stack.pop()
            if not stack:
                break
            p = stack[-1][0]
            if low[x] < low[p]:
                low[p] = low[x]
            if low[x] >= disc[p]:
                block = []
                while True:
                    f = estack.pop()
                    block.append(f)
                    if f == pe:
                        break
                blocks.append(block)
                if p == root:
                    root_children += 1
                else:
                    arts.add(p)
        if root_children >= 2:
            arts.add(root)
    return blocks, arts


def _adjacency(g: Multigraph, vertices=None, edges=None) -> dict:
    if edges is not None:
        adj: dict = defaultdict(list)
        for e in edges:
            a, b = g.endpoints(e)
            adj[a].append((e, b))
            adj[b].append((e, a))
        return dict(adj)
    vs = g.vertices() if vertices is None else vertices
    return {v: [(g.edge_of(h), g.opposite(h)) for h in g.half_edges(v)] for v in vs}


@dataclass
class BlockCutTree:
    blocks: list  # list of edge lists
    cut_vertices: set
    vertex_blocks: dict  # vertex -> list of block indices

    def block_vertices(self, g: Multigraph, i: int) -> set:
        out = set()
        for e in self.blocks[i]:
            out.update(g.endpoints(e))
        return out

    def tree_edges(self) -> list:
        return [(("C", v), ("B", i)) for v in sorted(self.cut_vertices, key=repr) for i in self.vertex_blocks[v]]

    def is_block_vertex(self, v) -> bool:
        return v not in self.cut_vertices


def block_cut_tree(g: Multigraph, vertices: Iterable | None = None) -> BlockCutTree:
    adj = _adjacency(g, None if vertices is None else list(vertices))
    blocks, arts = _biconnected(adj)
    vb: dict = defaultdict(list)
    for i, blk in enumerate(blocks):
        seen = set()
        for e in blk:
            for x in g.endpoints(e):
                if x not in seen:
                    seen.add(x)
                    vb[x].append(i)
    return BlockCutTree(blocks, arts, dict(vb))


def cut_vertices(g: Multigraph, vertices: Iterable | None = None) -> set:
    return _biconnected(_adjacency(g, None if vertices is None else list(vertices)))[1]


# ---------------------------------------------------------------------------
# separation classes
# ---------------------------------------------------------------------------


def separation_classes(g: Multigraph, edges: Iterable, a, b) -> list[list]:
    """Partition ``edges`` into the separation classes of ``{a, b}``: two edges
    are equivalent if a path joins them without passing through ``a`` or
    ``b`` internally."""
    return _classes(list(edges), {e: g.endpoints(e) for e in edges}, a, b)


def _classes(edges: list, ends: Mapping, a, b) -> list[list]:
    parent = {e: e for e in edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first: dict = {}
    for e in edges:
        for x in ends[e]:
            if x == a or x == b:
                continue
            if x in first:
                ra, rb = find(first[x]), find(e)
                if ra != rb:
                    parent[ra] = rb
            else:
                first[x] = e
    groups: dict = {}
    for e in edges:
        groups.setdefault(find(e), []).append(e)
    return list(groups.values())


# ---------------------------------------------------------------------------
# SPQR trees
# ---------------------------------------------------------------------------


def virtual_half(ve, i: int) -> tuple:
    return (ve, i)


@dataclass
class SPQRNode:
    kind: str
    edges: list  # skeleton edge ids (real edge ids or virtual ids)
    skeleton: Multigraph | None = None
    rotation: dict | None = None  # rigid: one of its two planar embeddings

    def vertices(self) -> list:
        return self.skeleton.vertices()


@dataclass
class SPQRTree:
    graph: Multigraph
    nodes: list = field(default_factory=list)
    twin: dict = field(default_factory=dict)  # virtual id -> twin virtual id
    node_of: dict = field(default_factory=dict)  # skeleton edge id -> node index
    ends: dict = field(default_factory=dict)  # virtual id -> (a, b)

    def is_virtual(self, e) -> bool:
        return e in self.twin

    def nodes_containing(self, v) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.skeleton.has_vertex(v)]

    def neighbours(self, i: int) -> list[int]:
        return [self.node_of[self.twin[e]] for e in self.nodes[i].edges if e in self.twin]

    def expansion(self, i: int, e) -> list:
        """Real edges represented by skeleton edge ``e`` of node ``i``."""
        if e not in self.twin:
            return [e]
        out = []
        stack = [self.twin[e]]
        while stack:
            f = stack.pop()
            j = self.node_of[f]
            for x in self.nodes[j].edges:
                if x == f:
                    continue
                if x in self.twin:
                    stack.append(self.twin[x])
                else:
                    out.append(x)
        return out


class _VirtualIds:
    def __init__(self) -> None:
        self.k = 0

    def pair(self):
        a, b = ("~v", self.k), ("~v", self.k + 1)
        self.k += 2
        return a, b


def _candidate_pairs(adj: Mapping, ends: Mapping) -> list:
    pairs = set()
    order = {v: i for i, v in enumerate(adj)}
    for a in adj:
        for b in _biconnected(adj, skip=a)[1]:
            pairs.add((a, b) if order[a] < order[b] else (b, a))
    count: dict = defaultdict(int)
    for e, (a, b) in ends.items():
        key = (a, b) if order[a] < order[b] else (b, a)
        count[key] += 1
    for key, c in count.items():
        if c >= 2:
            pairs.add(key)
    return sorted(pairs, key=lambda p: (order[p[0]], order[p[1]]))


def _is_cycle(piece: list, ends: Mapping) -> bool:
    deg: dict = defaultdict(int)
    for e in piece:
        a, b = ends[e]
        deg[a] += 1
        deg[b] += 1
    return len(deg) >= 3 and all(d == 2 for d in deg.values())


def spqr_tree(g: Multigraph, edges: Iterable | None = None) -> SPQRTree:
    """SPQR tree of the biconnected subgraph formed by ``edges`` (default: all of ``g``).

    Raises ``GraphError`` if the subgraph is not biconnected and
    ``NonPlanarError`` if a rigid skeleton is not planar.
    """
    edges = list(g.edges() if edges is None else edges)
    if len(edges) < 2:
        raise GraphError("SPQR trees need at least two edges")
    ends = {e: g.endpoints(e) for e in edges}
    adj = _adjacency(g, edges=edges)
    blocks, arts = _biconnected(adj)
    if len(blocks) != 1 or arts:
        raise GraphError("input is not biconnected")
    cands = _candidate_pairs(adj, ends)
    ids = _VirtualIds()
    twin: dict = {}
    pieces = []  # (kind or None, edge list)
    work = [edges]
    dead: set = set()

    while work:
        piece = work.pop()
        verts = {x for e in piece for x in ends[e]}
        if len(verts) == 2:
            pieces.append((BOND, piece))
            continue
        if _is_cycle(piece, ends):
            pieces.append((POLYGON, piece))
            continue
        split = None
        for pair in cands:
            if pair in dead or pair[0] not in verts or pair[1] not in verts:
                continue
            groups = _classes(piece, ends, *pair)
            if len(groups) >= 3 or (len(groups) == 2 and min(map(len, groups)) >= 2):
                split = (pair, groups)
                break
            dead.add(pair)
        if split is None:
            pieces.append((RIGID, piece))
            continue
        (a, b), groups = split
        if len(groups) >= 3:
            bond = []
            for grp in groups:
                if len(grp) == 1:
                    bond.append(grp[0])
                    continue
                v1, v2 = ids.pair()
                twin[v1], twin[v2] = v2, v1
                ends[v1] = ends[v2] = (a, b)
                bond.append(v1)
                work.append(grp + [v2])
            pieces.append((BOND, bond))
        else:
            v1, v2 = ids.pair()
            twin[v1], twin[v2] = v2, v1
            ends[v1] = ends[v2] = (a, b)
            work.append(groups[0] + [v1])
            work.append(groups[1] + [v2])

    # merge adjacent bonds and adjacent polygons
    kinds = [k for k, _ in pieces]
    sets = [list(p) for _, p in pieces]
    owner = {}
    for i, p in enumerate(sets):
        for e in p:
            owner[e] = i
    alive = [True] * len(sets)
    changed = True
    while changed:
        changed = False
        for v1 in list(twin):
            if v1 not in twin:
                continue
            v2 = twin[v1]
            i, j = owner[v1], owner[v2]
            if i == j or kinds[i] != kinds[j] or kinds[i] == RIGID:
                continue
            merged = [e for e in sets[i] if e != v1] + [e for e in sets[j] if e != v2]
            sets[i] = merged
            alive[j] = False
            sets[j] = []
            for e in merged:
                owner[e] = i
            del twin[v1], twin[v2]
            changed = True

    t = SPQRTree(graph=g, twin=twin)
    for i, p in enumerate(sets):
        if not alive[i]:
            continue
        node = SPQRNode(kind=kinds[i], edges=p)
        sk = Multigraph()
        for e in p:
            for x in ends[e]:
                if not sk.has_vertex(x):
                    sk.add_vertex(x)
        for e in p:
            if e in twin:
                a, b = ends[e]
                sk.add_edge(a, b, e, virtual_half(e, 0), virtual_half(e, 1))
                t.ends[e] = (a, b)
            else:
                hu, hv = g.ends(e)
                sk.add_edge(g.vertex_of(hu), g.vertex_of(hv), e, hu, hv)
        node.skeleton = sk
        if node.kind == RIGID:
            rot = planar_embed(sk)
            if rot is None:
                raise NonPlanarError("rigid skeleton is not planar")
            node.rotation = rot
        idx = len(t.nodes)
        t.nodes.append(node)
        for e in p:
            t.node_of[e] = idx
    return t


def skeleton_half(t: SPQRTree, i: int, e, v):
    """The half-edge of skeleton edge ``e`` of node ``i`` that is attached to ``v``."""
    sk = t.nodes[i].skeleton
    hu, hv = sk.ends(e)
    return hu if sk.vertex_of(hu) == v else hv


# ---------------------------------------------------------------------------
# embedding trees
# ---------------------------------------------------------------------------


def embedding_tree_from_spqr(t: SPQRTree, v) -> PQTree:
    """PQ-tree of the rotations of ``v`` over all planar embeddings of the block."""
    tree = PQTree()
    inner = {}
    containing = t.nodes_containing(v)
    if not containing:
        raise GraphError(f"{v!r} is not in the block")
    for i in containing:
        kind = t.nodes[i].kind
        inner[i] = tree.add_inner(Q if kind == RIGID else P)
    for i in containing:
        node = t.nodes[i]
        if node.kind == RIGID:
            halves = list(node.rotation[v])
        else:
            halves = node.skeleton.half_edges(v)
        order = []
        for h in halves:
            e = node.skeleton.edge_of(h)
            if e in t.twin:
                order.append(inner[t.node_of[t.twin[e]]])
            else:
                order.append(tree.add_leaf(h))
                tree.adj[order[-1]].append(inner[i])
        tree.adj[inner[i]] = order
    if len(tree.leaves()) < 3:
        raise PQTreeError(f"vertex {v!r} has degree < 3 in its block")
    tree.normalize()
    return tree


def embedding_tree(g: Multigraph, v, psi: Mapping | None = None) -> PQTree:
    """Embedding tree of block-vertex ``v`` in its component of ``g``.  A cut
    vertex is accepted only when each of its blocks is a single edge.

    When ``psi`` is given, Q-vertices listed in it are wheel-replaced first.
    """
    w = wheel_replace(g, psi) if psi else g
    comp = w.component_of(v)
    bct = block_cut_tree(w, comp)
    blocks = bct.vertex_blocks.get(v, [])
    if len(blocks) > 1 and all(len(bct.blocks[b]) == 1 for b in blocks):
        # every block meets v in one edge: all rotations occur
        if len(blocks) < 3:
            raise PQTreeError(f"vertex {v!r} has degree < 3")
        return trivial_tree(w.half_edges(v))
    if len(blocks) != 1:
        raise GraphError(f"{v!r} is not a block-vertex")
    blk = bct.blocks[blocks[0]]
    if len(blk) == 1:
        raise PQTreeError(f"vertex {v!r} has degree < 3 in its block")
    return embedding_tree_from_spqr(spqr_tree(w, blk), v)


def bond_pole_bijections(g: Multigraph, t: SPQRTree, u):
    """For a vertex ``u`` with trivial embedding tree, return
    ``(partner, delta_u, delta_v)`` where ``partner`` is the other pole of the
    unique bond determining ``u``'s rotation and ``delta_u`` / ``delta_v`` map
    the half-edges of ``u`` / ``partner`` in the block to class indices, one
    class per skeleton edge of the bond.  ``delta_v`` is only injective when
    the partner's embedding tree is trivial as well."""
    tree = embedding_tree_from_spqr(t, u)
    if not tree.is_trivial():
        raise GraphError(f"embedding tree of {u!r} is not trivial")
    bonds = [i for i in t.nodes_containing(u) if t.nodes[i].kind == BOND]
    if len(bonds) != 1:
        raise GraphError("no unique bond at a vertex with trivial embedding tree")
    bond = t.nodes[bonds[0]]
    (partner,) = [x for x in bond.skeleton.vertices() if x != u]
    delta_u, delta_v = {}, {}
    for k, e in enumerate(bond.edges):
        for f in t.expansion(bonds[0], e):
            for h in g.ends(f):
                x = g.vertex_of(h)
                if x == u:
                    delta_u[h] = k
                elif x == partner:
                    delta_v[h] = k
    return partner, delta_u, delta_v


def pole_classes(g: Multigraph, block_edges: Iterable, u, v) -> list[list]:
    """Separation classes of ``{u, v}`` within a block; equals the expansions
    of the skeleton edges of the bond with poles ``u`` and ``v``."""
    return separation_classes(g, block_edges, u, v)


# ---------------------------------------------------------------------------
# assembling an embedding from SPQR skeleton embeddings
# ---------------------------------------------------------------------------


def skeleton_rotations(t: SPQRTree, flip: Mapping | None = None) -> list[dict]:
    """One planar rotation system per skeleton: rigids use their stored
    embedding (reversed where ``flip[i]`` is true); bonds list their edges in
    skeleton order at one pole and reversed at the other."""
    out = []
    for i, node in enumerate(t.nodes):
        sk = node.skeleton
        if node.kind == RIGID:
            rot = {x: list(r) for x, r in node.rotation.items()}
            if flip and flip.get(i):
                rot = {x: list(reversed(r)) for x, r in rot.items()}
        elif node.kind == BOND:
            a, b = sk.vertices()
            rot = {a: [skeleton_half(t, i, e, a) for e in node.edges],
                   b: [skeleton_half(t, i, e, b) for e in reversed(node.edges)]}
        else:
            rot = {x: sk.half_edges(x) for x in sk.vertices()}
        out.append(rot)
    return out


def assemble_block_rotation(t: SPQRTree, rots: list, v) -> list:
    """Rotation of ``v`` in the block, gluing skeleton rotations along virtual
    edges: a virtual half-edge is replaced by the rotation of ``v`` in the twin
    skeleton read after the twin half-edge."""
    start = t.nodes_containing(v)[0]
    out = []
    stack = [(start, None)]
    # explicit stack of iterators to avoid deep recursion
    frames = []

    def seq(i, entering):
        r = rots[i][v]
        if entering is None:
            return list(r)
        k = r.index(entering)
        return r[k + 1:] + r[:k]

    frames.append(iter(seq(start, None)))
    node_stack = [start]
    while frames:
        try:
            h = next(frames[-1])
        except StopIteration:
            frames.pop()
            node_stack.pop()
            continue
        i = node_stack[-1]
        e = t.nodes[i].skeleton.edge_of(h)
        if e in t.twin:
            f = t.twin[e]
            j = t.node_of[f]
            frames.append(iter(seq(j, skeleton_half(t, j, f, v))))
            node_stack.append(j)
        else:
            out.append(h)
    del stack
    return out


def planar_rotation_of_block(t: SPQRTree, flip: Mapping | None = None) -> dict:
    rots = skeleton_rotations(t, flip)
    verts = set()
    for node in t.nodes:
        verts.update(node.skeleton.vertices())
    return {v: assemble_block_rotation(t, rots, v) for v in verts}


def rotation_matches(rot: list, ref: list) -> int:
    """+1 if ``rot`` equals ``ref`` cyclically, -1 if it equals the reversal, 0 otherwise."""
    if cyclic_equal(rot, ref):
        return 1
    if cyclic_equal(rot, list(reversed(ref))):
        return -1
    return 0
