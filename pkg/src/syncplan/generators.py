"""Seeded instance generators for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

import random

from .graph import Multigraph, planar_embed, trace_faces
from .instance import P, Q, SyncPlanInstance

FAMILIES = ("random-pipes", "cluster-like", "sefe-like", "toroidal")


# ---------------------------------------------------------------------------
# small random instances (oracle sized)
# ---------------------------------------------------------------------------


def random_graph(rng: random.Random, n: int, extra: int, max_degree: int = 5,
                 g: Multigraph | None = None, multi: bool = True) -> tuple[Multigraph, list]:
    """Connected random multigraph on ``n`` new vertices: a random tree plus up
    to ``extra`` further edges, keeping every degree at most ``max_degree``."""
    g = Multigraph() if g is None else g
    vs = [g.add_vertex() for _ in range(n)]
    for i in range(1, n):
        choices = [w for w in vs[:i] if g.degree(w) < max_degree] or vs[:i]
        g.add_edge(vs[i], rng.choice(choices))
    pairs = set()
    for e in g.edges():
        pairs.add(frozenset(g.endpoints(e)))
    for _ in range(extra):
        if n < 2:
            break
        a, b = rng.sample(vs, 2)
        if g.degree(a) >= max_degree or g.degree(b) >= max_degree:
            continue
        if not multi and frozenset((a, b)) in pairs:
            continue
        pairs.add(frozenset((a, b)))
        g.add_edge(a, b)
    return g, vs


def random_bijection(rng: random.Random, xs: list, ys: list) -> dict:
    ys = list(ys)
    rng.shuffle(ys)
    return dict(zip(xs, ys))


def add_random_pipes(rng: random.Random, inst: SyncPlanInstance, candidates: list, prob: float = 0.7,
                     min_degree: int = 1) -> None:
    g = inst.graph
    by_deg: dict = {}
    for v in candidates:
        if inst.kind[v] == P and v not in inst.pipe_of and g.degree(v) >= min_degree:
            by_deg.setdefault(g.degree(v), []).append(v)
    for d in sorted(by_deg):
        vs = by_deg[d]
        rng.shuffle(vs)
        for a, b in zip(vs[::2], vs[1::2]):
            if rng.random() < prob:
                inst.add_pipe(a, b, random_bijection(rng, g.half_edges(a), g.half_edges(b)))


def add_random_q(rng: random.Random, inst: SyncPlanInstance, candidates: list, prob: float = 0.3,
                 cell_merge: float = 0.5) -> None:
    g = inst.graph
    qs = []
    for v in candidates:
        if v in inst.pipe_of or rng.random() >= prob:
            continue
        psi = g.half_edges(v)
        rng.shuffle(psi)
        inst.set_q(v, psi)
        qs.append(v)
    # merge some cells
    for a, b in zip(qs, qs[1:]):
        if rng.random() < cell_merge and inst.cell_of[a] != inst.cell_of[b]:
            inst.add_cell(list(inst.cells[inst.cell_of[a]]) + list(inst.cells[inst.cell_of[b]]))


def random_small_instance(rng: random.Random, max_group_vertices: int = 8, max_degree: int = 5,
                          groups: int = 2, q_prob: float = 0.25, pipe_prob: float = 0.8) -> SyncPlanInstance:
    """Random instance whose pipe-coupled groups have at most
    ``max_group_vertices`` vertices and whose degrees are at most ``max_degree``."""
    inst = SyncPlanInstance()
    g = inst.graph
    for _ in range(groups):
        total = rng.randint(3, max_group_vertices)
        k = 1 if total < 5 or rng.random() < 0.4 else 2
        sizes = [total] if k == 1 else [total // 2, total - total // 2]
        members = []
        for n in sizes:
            _, vs = random_graph(rng, n, rng.randint(0, 2 * n), max_degree, g)
            for v in vs:
                inst.kind[v] = P
            members.extend(vs)
        add_random_q(rng, inst, members, q_prob)
        add_random_pipes(rng, inst, members, pipe_prob)
    return inst


# ---------------------------------------------------------------------------
# targeted shapes
# ---------------------------------------------------------------------------


def add_star(inst: SyncPlanInstance, k: int) -> object:
    """Star with ``k`` rays; returns the centre."""
    g = inst.graph
    c = inst.add_vertex()
    for _ in range(k):
        g.add_edge(c, inst.add_vertex())
    return c


def add_bond(rng: random.Random, inst: SyncPlanInstance, k: int, max_len: int = 2) -> tuple:
    """Two poles joined by ``k`` internally disjoint paths of random length;
    returns ``(a, b, classes)`` with the pole half-edges of each path."""
    g = inst.graph
    a, b = inst.add_vertex(), inst.add_vertex()
    classes = []
    for _ in range(k):
        length = rng.randint(1, max_len)
        prev = a
        first = None
        for _ in range(length - 1):
            x = inst.add_vertex()
            e = g.add_edge(prev, x)
            if first is None:
                first = g.ends(e)[0]
            prev = x
        e = g.add_edge(prev, b)
        if first is None:
            first = g.ends(e)[0]
        classes.append((first, g.ends(e)[1]))
    return a, b, classes


def simplify_instance(rng: random.Random, case: int, k: int | None = None) -> SyncPlanInstance:
    """Bond of degree ``k`` whose poles make SimplifyMatching case ``case`` applicable.

    case 1: one pole piped to a star centre, the other pole unmatched.
    case 2: the poles piped to each other.
    case 3: each pole piped to its own star centre.
    """
    inst = SyncPlanInstance()
    g = inst.graph
    k = k or rng.randint(4, 5)
    a, b, _ = add_bond(rng, inst, k)
    if case == 2:
        inst.add_pipe(a, b, random_bijection(rng, g.half_edges(a), g.half_edges(b)))
    else:
        s = add_star(inst, k)
        inst.add_pipe(a, s, random_bijection(rng, g.half_edges(a), g.half_edges(s)))
        if case == 3:
            t = add_star(inst, k)
            inst.add_pipe(b, t, random_bijection(rng, g.half_edges(b), g.half_edges(t)))
    for v in g.vertices():
        inst.kind.setdefault(v, P)
    return inst


def cut_pair_instance(rng: random.Random, max_degree: int = 5) -> SyncPlanInstance:
    """Two cut-vertices of equal degree >= 4, each shared by 2-3 small blocks, piped."""
    inst = SyncPlanInstance()
    g = inst.graph
    d = rng.randint(4, max_degree)
    centres = []
    for _ in range(2):
        c = inst.add_vertex()
        # split d into at least two parts of size 1..3
        parts = []
        left = d
        while left > 0:
            take = min(left, rng.choice([1, 2, 2, 3]))
            if not parts and take == d:
                take -= 1
            parts.append(take)
            left -= take
        for take in parts:
            _attach_block(rng, inst, c, take)
        centres.append(c)
    u, v = centres
    inst.add_pipe(u, v, random_bijection(rng, g.half_edges(u), g.half_edges(v)))
    add_random_q(rng, inst, [x for x in g.vertices() if x not in centres], 0.2)
    return inst


def _attach_block(rng: random.Random, inst: SyncPlanInstance, c, take: int) -> None:
    """Attach a small component to ``c`` through ``take`` of its edges."""
    g = inst.graph
    if take == 1:
        x = inst.add_vertex()
        g.add_edge(c, x)
        if rng.random() < 0.5:
            g.add_edge(x, inst.add_vertex())
        return
    xs = [inst.add_vertex() for _ in range(take)]
    for x in xs:
        g.add_edge(c, x)
    for x, y in zip(xs, xs[1:]):
        g.add_edge(x, y)
    if take == 2 and rng.random() < 0.5:
        g.add_edge(xs[0], xs[1])


def propagate_instance(rng: random.Random) -> SyncPlanInstance:
    """Block-vertex with a non-trivial embedding tree piped to a star centre
    or to another block-vertex."""
    inst = SyncPlanInstance()
    g = inst.graph
    while True:
        n = rng.randint(5, 7)
        sub = SyncPlanInstance()
        _, vs = random_graph(rng, n, rng.randint(n, 2 * n), 5, sub.graph, multi=rng.random() < 0.3)
        cand = [v for v in vs if sub.graph.degree(v) >= 4]
        if cand:
            break
    offset = {}
    for v in vs:
        offset[v] = inst.add_vertex()
    for e in sub.graph.edges():
        x, y = sub.graph.endpoints(e)
        g.add_edge(offset[x], offset[y])
    u = offset[rng.choice(cand)]
    d = g.degree(u)
    other = add_star(inst, d) if rng.random() < 0.6 else _ring_with_hub(inst, d)
    inst.add_pipe(u, other, random_bijection(rng, g.half_edges(u), g.half_edges(other)))
    return inst


def _ring_with_hub(inst: SyncPlanInstance, d: int):
    """Wheel without Q-constraint: hub joined to every vertex of a ``d``-cycle."""
    g = inst.graph
    hub = inst.add_vertex()
    ring = [inst.add_vertex() for _ in range(d)]
    for i, x in enumerate(ring):
        g.add_edge(hub, x)
        g.add_edge(x, ring[(i + 1) % d])
    return hub


def random_q_instance(rng: random.Random, n: int | None = None, max_degree: int = 5) -> SyncPlanInstance:
    """Pipe-free instance on a planar graph; Q-vertices take their rotation
    from one planar embedding, each reversed at random (occasionally a random
    order), and neighbouring Q-vertices share cells, so orientations conflict
    exactly when rigid parts tie them together."""
    n = n or rng.randint(5, 9)
    while True:
        inst = SyncPlanInstance()
        _, vs = random_graph(rng, n, rng.randint(n, 2 * n), max_degree, inst.graph)
        rs = planar_embed(inst.graph)
        if rs is not None:
            break
    for v in vs:
        inst.kind[v] = P
    qs = []
    for v in vs:
        if inst.graph.degree(v) >= 3 and rng.random() < 0.5:
            psi = list(rs[v]) if rng.random() < 0.5 else list(reversed(rs[v]))
            if rng.random() < 0.1:
                rng.shuffle(psi)
            inst.set_q(v, psi)
            qs.append(v)
    for a, b in zip(qs, qs[1:]):
        if rng.random() < 0.6 and inst.cell_of[a] != inst.cell_of[b]:
            inst.add_cell(list(inst.cells[inst.cell_of[a]]) + list(inst.cells[inst.cell_of[b]]))
    return inst


# ---------------------------------------------------------------------------
# benchmark and CLI families
# ---------------------------------------------------------------------------


def planar_piece(rng: random.Random, inst: SyncPlanInstance, n: int, keep: float = 0.8) -> list:
    """Random planar connected piece: a stacked triangulation on ``n`` vertices
    with some non-tree edges removed."""
    g = inst.graph
    vs = [inst.add_vertex() for _ in range(n)]
    edges = [(vs[0], vs[1]), (vs[1], vs[2]), (vs[0], vs[2])]
    faces = [(vs[0], vs[1], vs[2]), (vs[0], vs[2], vs[1])]
    for x in vs[3:]:
        i = rng.randrange(len(faces))
        a, b, c = faces.pop(i)
        edges.extend([(x, a), (x, b), (x, c)])
        faces.extend([(a, b, x), (b, c, x), (c, a, x)])
    # spanning tree first so the piece stays connected
    parent = {vs[0]: None}
    tree, rest = [], []
    for a, b in edges:
        if (a in parent) != (b in parent):
            parent[b if a in parent else a] = a if a in parent else b
            tree.append((a, b))
        else:
            rest.append((a, b))
    for a, b in tree:
        g.add_edge(a, b)
    for a, b in rest:
        if rng.random() < keep:
            g.add_edge(a, b)
    return vs


def random_pipes(m: int, seed: int = 0, piece: int = 12) -> SyncPlanInstance:
    """About ``m`` edges in planar pieces of ``piece`` vertices.  A planar
    embedding is fixed first; a few vertices become Q-vertices with their
    rotation in it and equal-degree vertices are piped so that the embedding
    satisfies every pipe.  The result is satisfiable by construction."""
    rng = random.Random(seed)
    inst = SyncPlanInstance()
    g = inst.graph
    pieces = []
    while g.num_edges() < m:
        pieces.append(planar_piece(rng, inst, piece))
    members = [v for p in pieces for v in p]
    # Q-vertices take their rotation from a planar embedding so that pieces stay planar
    rs = planar_embed(g)
    for v in members:
        if rng.random() < 0.05 and g.degree(v) >= 3:
            inst.set_q(v, rs[v])
    _add_consistent_pipes(rng, inst, members, rs)
    return inst


def _add_consistent_pipes(rng: random.Random, inst: SyncPlanInstance, members: list, rs: dict) -> None:
    """Pipe equal-degree P-vertices of different pieces so that ``rs`` stays a
    valid embedding: each bijection maps the rotation of one end onto the
    reversed rotation of the other, at a random offset."""
    g = inst.graph
    by_deg: dict = {}
    for v in members:
        if inst.kind[v] == P and g.degree(v) >= 4:
            by_deg.setdefault(g.degree(v), []).append(v)
    for d in sorted(by_deg):
        vs = by_deg[d]
        rng.shuffle(vs)
        for a, b in zip(vs[::2], vs[1::2]):
            ra, rb = rs[a], list(reversed(rs[b]))
            k = rng.randrange(d)
            inst.add_pipe(a, b, {ra[i]: rb[(i + k) % d] for i in range(d)})


def toroidal(k: int, seed: int = 0) -> SyncPlanInstance:
    """Bond of ``k`` parallel edges with its poles piped; even seeds give a
    permutation with uniform cycle lengths (satisfiable), odd seeds one with
    cycle type ``(1, k-1)`` (unsatisfiable)."""
    inst = SyncPlanInstance()
    g = inst.graph
    a, b = inst.add_vertex(), inst.add_vertex()
    pairs = [g.ends(g.add_edge(a, b)) for _ in range(k)]
    # pi maps v-side half of edge i to v-side half of edge perm[i]
    if seed % 2 == 0:
        perm = [(i + 1) % k for i in range(k)]
    else:
        perm = [0] + [(i % (k - 1)) + 1 for i in range(1, k)]
    rng = random.Random(seed)
    relabel = list(range(k))
    rng.shuffle(relabel)
    phi = {}
    for i in range(k):
        # phi(u-half of edge i) = v-half of edge perm[i], conjugated by relabel
        phi[pairs[relabel[i]][0]] = pairs[relabel[perm[i]]][1]
    inst.add_pipe(a, b, phi)
    return inst


def random_clustered(rng: random.Random, n: int | None = None, clusters: int | None = None):
    """Small connected graph with up to three (possibly nested) clusters."""
    from .reductions import make_clustered

    n = n or rng.randint(5, 7)
    mode = rng.random()
    if mode < 0.35:
        g, vs = random_graph(rng, n, rng.randint(n // 2, 2 * n), 4, multi=False)
    elif mode < 0.7:
        # dense planar graphs: few faces, so two-vertex clusters often cannot meet
        while True:
            g, vs = random_graph(rng, min(n, 6), 2 * n, 5, multi=False)
            if planar_embed(g) is not None:
                break
    else:
        # a cycle with a few chords; clusters of far-apart vertices tend to interleave
        g = Multigraph()
        vs = [g.add_vertex() for _ in range(n)]
        for i in range(n):
            g.add_edge(vs[i], vs[(i + 1) % n])
        for _ in range(rng.randint(0, 2)):
            i = rng.randrange(n)
            j = (i + rng.randint(2, n - 2)) % n
            if vs[j] not in g.neighbors(vs[i]):
                g.add_edge(vs[i], vs[j])
    k = clusters if clusters is not None else rng.randint(1, 3)
    layout = {}
    free = list(vs)
    rng.shuffle(free)
    names = []
    if 0.35 <= mode < 0.7:
        # flat clusters on non-adjacent pairs
        for i in range(k):
            pairs = [(a, b) for a in free for b in free
                     if a < b and b not in g.neighbors(a)]
            if not pairs:
                break
            a, b = rng.choice(pairs)
            free = [x for x in free if x not in (a, b)]
            layout[f"c{i}"] = (None, [a, b])
        return make_clustered(g, layout)
    for i in range(k):
        par = rng.choice(names) if names and rng.random() < 0.3 else None
        take = rng.randint(min(2, len(free)), max(1, min(3, len(free))))
        mem, free = free[:take], free[take:]
        name = f"c{i}"
        layout[name] = (par, mem)
        names.append(name)
    return make_clustered(g, layout)


def cluster_cycle_classic():
    """Six-cycle whose three clusters each hold two opposite vertices: any two
    cluster regions would have to cross inside or outside the cycle."""
    from .reductions import make_clustered

    g = Multigraph()
    vs = [g.add_vertex(i) for i in range(6)]
    for i in range(6):
        g.add_edge(vs[i], vs[(i + 1) % 6])
    return make_clustered(g, {"a": (None, [0, 3]), "b": (None, [1, 4]), "c": (None, [2, 5])})


def _private_copy(shared: Multigraph, tag: str) -> Multigraph:
    g = Multigraph()
    for v in shared.vertices():
        g.add_vertex(v)
    for e in shared.edges():
        hu, hv = shared.ends(e)
        g.add_edge(shared.vertex_of(hu), shared.vertex_of(hv), e, hu, hv)
    return g


def _add_private(rng: random.Random, g: Multigraph, tag: str, anchors: list, k: int) -> None:
    """Private vertex ``(tag, k)`` joined to the given shared vertices."""
    x = g.add_vertex((tag, "v", k))
    for i, a in enumerate(anchors):
        g.add_edge(x, a, (tag, "e", k, i), (tag, "h", k, i, 0), (tag, "h", k, i, 1))


def random_sefe(rng: random.Random, n: int | None = None, max_degree: int = 4):
    """Small connected shared graph plus private vertices and chords for
    each side; chords on different sides tend to disagree on rotations."""
    from .reductions import SefeInstance

    n = n or rng.randint(4, 6)
    shared, vs = random_graph(rng, n, rng.randint(0, n), max_degree - 1, multi=False)
    out = []
    for tag in ("a", "b"):
        g = _private_copy(shared, tag)
        k = 0
        for _ in range(rng.randint(1, 3)):
            # keep degrees small so that the brute-force oracle stays cheap
            low = [v for v in vs if g.degree(v) < max_degree]
            if len(low) < 2:
                break
            _add_private(rng, g, tag, rng.sample(low, rng.randint(2, min(3, len(low)))), k)
            k += 1
        for _ in range(rng.randint(0, 2)):
            low = [v for v in vs if g.degree(v) < max_degree]
            if len(low) < 2:
                break
            a, b = rng.sample(low, 2)
            g.add_edge(a, b, (tag, "c", k), (tag, "ch", k, 0), (tag, "ch", k, 1))
            k += 1
        out.append(g)
    return SefeInstance(out[0], out[1])


def sefe_star_conflict():
    """Shared star with four leaves; each side closes the leaves into a
    four-cycle in an incompatible order, fixing different rotations at the centre."""
    from .reductions import SefeInstance

    shared = Multigraph()
    c = shared.add_vertex("x")
    leaves = [shared.add_vertex(i) for i in range(4)]
    for v in leaves:
        shared.add_edge(c, v, ("s", v), ("s", v, 0), ("s", v, 1))
    out = []
    for tag, order in (("a", [0, 1, 2, 3]), ("b", [0, 2, 1, 3])):
        g = _private_copy(shared, tag)
        for i in range(4):
            a, b = order[i], order[(i + 1) % 4]
            g.add_edge(a, b, (tag, i), (tag, i, 0), (tag, i, 1))
        out.append(g)
    return SefeInstance(out[0], out[1])


def _piece_graph(rng: random.Random, n: int, keep: float) -> tuple[Multigraph, list]:
    inst = SyncPlanInstance()
    vs = planar_piece(rng, inst, n, keep)
    return inst.graph, vs


def sefe_like(size: int, seed: int = 0) -> SyncPlanInstance:
    """SEFE instance on a planar shared graph of ``size`` vertices whose
    private vertices sit inside faces of one fixed embedding (so a
    simultaneous embedding exists), reduced to synchronized planarity."""
    from .reductions import SefeInstance, sefe_to_syncplan

    rng = random.Random(seed)
    shared, _ = _piece_graph(rng, max(size, 3), 0.7)
    faces, _ = trace_faces(shared, planar_embed(shared))
    out = []
    for tag in ("a", "b"):
        g = _private_copy(shared, tag)
        for k, f in enumerate(faces):
            if rng.random() < 0.3:
                ring = list(dict.fromkeys(shared.vertex_of(h) for h in f))
                _add_private(rng, g, tag, rng.sample(ring, min(len(ring), rng.randint(1, 3))), k)
        out.append(g)
    return sefe_to_syncplan(SefeInstance(out[0], out[1]))[0]


def cluster_like(size: int, seed: int = 0) -> SyncPlanInstance:
    """Clustered graph of about ``size`` vertices, reduced to synchronized
    planarity.  Planar pieces sit on a ring, consecutive pieces joined by an
    edge between vertices of a shared face; leaf clusters are single pieces
    and parent clusters runs of consecutive pieces, so the clustered graph is
    c-planar by construction."""
    from .reductions import clustered_to_syncplan, make_clustered

    rng = random.Random(seed)
    inst = SyncPlanInstance()
    g = inst.graph
    pieces = [planar_piece(rng, inst, rng.randint(4, 8), 0.8)
              for _ in range(max(2, size // 6))]
    k = len(pieces)
    for i in range(k if k > 2 else 1):
        g.add_edge(pieces[i][0], pieces[(i + 1) % k][1])
    layout = {}
    i = 0
    while i < k:
        run = rng.randint(1, 3)
        group = list(range(i, min(k, i + run)))
        par = None
        if len(group) > 1 and len(group) < k:
            par = f"g{i}"
            layout[par] = (None, [])
        for j in group:
            if rng.random() < 0.7:
                layout[f"p{j}"] = (par, list(pieces[j]))
            elif par is not None:
                layout[par][1].extend(pieces[j])
        i += run
    return clustered_to_syncplan(make_clustered(g, layout))[0]


def generate(family: str, size: int, seed: int = 0) -> SyncPlanInstance:
    if family == "random-pipes":
        return random_pipes(size, seed)
    if family == "cluster-like":
        return cluster_like(size, seed)
    if family == "sefe-like":
        return sefe_like(size, seed)
    if family == "toroidal":
        return toroidal(size, seed)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# PQ-constrained instances
# ---------------------------------------------------------------------------


def random_pq_tree(rng: random.Random, labels: list):
    """Random PQ-tree over at least three labels: the root gets at least
    three children, every other inner node at least two."""
    from .pqtree import PQTree, P as PN, Q as QN

    t = PQTree()

    def build(parent, labs):
        if len(labs) == 1:
            leaf = t.add_leaf(labs[0])
            t.link(parent, leaf)
            return
        x = t.add_inner(PN if rng.random() < 0.3 else QN)
        if parent is not None:
            t.link(parent, x)
        need = 3 if parent is None else 2
        k = rng.randint(need, len(labs))
        cuts = sorted(rng.sample(range(1, len(labs)), k - 1))
        for a, b in zip([0] + cuts, cuts + [len(labs)]):
            build(x, labs[a:b])

    labs = list(labels)
    rng.shuffle(labs)
    build(None, labs)
    return t.normalize()


def random_pqc(rng: random.Random, n: int | None = None, max_degree: int = 5):
    """Small planar graph with one or two constrained vertices, each with a
    random tree over a random subset of at least three of its half-edges."""
    from .reductions import PQConstrainedInstance

    n = n or rng.randint(4, 6)
    while True:
        g, vs = random_graph(rng, n, rng.randint(n, 2 * n), max_degree, multi=rng.random() < 0.3)
        if planar_embed(g) is not None:
            break
    cons = {}
    cands = [v for v in vs if g.degree(v) >= 3]
    rng.shuffle(cands)
    for v in cands[:rng.randint(1, 3)]:
        hs = list(g.half_edges(v))
        sub = rng.sample(hs, rng.randint(3, len(hs)))
        cons[v] = random_pq_tree(rng, sub)
    return PQConstrainedInstance(g, cons)


def pqc_cut_gadget(satisfiable: bool = False):
    """Degree-six cut vertex joining three triangles, with a Q-node on its
    rotation.  The two edges of a triangle must be consecutive in any planar
    rotation, so interleaving them makes the instance unsatisfiable."""
    from .pqtree import fixed_order_tree
    from .reductions import PQConstrainedInstance

    g = Multigraph()
    c = g.add_vertex("c")
    halves = []
    for i in range(3):
        a, b = g.add_vertex(("a", i)), g.add_vertex(("b", i))
        g.add_edge(a, b)
        ha = g.ends(g.add_edge(c, a))[0]
        hb = g.ends(g.add_edge(c, b))[0]
        halves.append((ha, hb))
    if satisfiable:
        order = [h for pair in halves for h in pair]
    else:
        order = [halves[0][0], halves[1][0], halves[2][0], halves[0][1], halves[1][1], halves[2][1]]
    return PQConstrainedInstance(g, {c: fixed_order_tree(order)})
