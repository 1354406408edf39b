"""Main loop: pick and apply operations until no pipe is left, solve the
pipe-free instance by 2-SAT over rigid reflections and cell orientations,
then undo the operations on the embedding."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Mapping

from .decomposition import (
    RIGID,
    BlockCutTree,
    NonPlanarError,
    SPQRTree,
    block_cut_tree,
    bond_pole_bijections,
    embedding_tree_from_spqr,
    planar_rotation_of_block,
    rotation_matches,
    spqr_tree,
    wheel_replace,
)
from .graph import GraphError, Multigraph, contract_tree_rotation, split_bipartite_embedding
from .instance import (
    Q,
    InstanceError,
    SyncPlanInstance,
    Verdict,
    check_wellformed,
    is_valid_embedding,
    potential,
)
from .operations import (
    CONVERT_SMALL,
    ENCAPSULATE_AND_JOIN,
    PROPAGATE_PQ,
    SIMPLIFY_I,
    SIMPLIFY_II,
    SIMPLIFY_III,
    NoInstance,
    OpRecord,
    convert_small,
    encapsulate_and_join,
    fixed_cyclic_order,
    propagate_pq,
    simplify_matching,
)
from .pqtree import PQTree


class SolverError(RuntimeError):
    """Internal consistency failure; indicates a bug rather than bad input."""


# ---------------------------------------------------------------------------
# 2-SAT
# ---------------------------------------------------------------------------


class TwoSat:
    """2-SAT over named variables; literals are ``(name, value)`` pairs."""

    def __init__(self) -> None:
        self.index: dict = {}
        self.names: list = []
        self.adj: list[list[int]] = []
        self.clauses: list = []

    def var(self, name) -> int:
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
            self.adj.append([])
            self.adj.append([])
        return self.index[name]

    def _lit(self, lit) -> int:
        name, value = lit
        return 2 * self.var(name) + (0 if value else 1)

    def add_clause(self, a, b) -> None:
        x, y = self._lit(a), self._lit(b)
        self.clauses.append((a, b))
        self.adj[x ^ 1].append(y)
        self.adj[y ^ 1].append(x)

    def add_equal(self, a, b, same: bool = True) -> None:
        """Constrain variables ``a`` and ``b`` to be equal (or different)."""
        self.add_clause((a, True), (b, not same))
        self.add_clause((a, False), (b, same))

    def solve(self) -> dict | None:
        comp = _tarjan(self.adj)
        out = {}
        for name, i in self.index.items():
            if comp[2 * i] == comp[2 * i + 1]:
                return None
            # Tarjan numbers sink components first
            out[name] = comp[2 * i] < comp[2 * i + 1]
        return out


def two_sat_solve(clauses, variables=()) -> dict | None:
    f = TwoSat()
    for v in variables:
        f.var(v)
    for a, b in clauses:
        f.add_clause(a, b)
    return f.solve()


def _tarjan(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


# ---------------------------------------------------------------------------
# per-component structure cache
# ---------------------------------------------------------------------------


@dataclass
class _Component:
    vertices: set
    wheel: Multigraph
    bct: BlockCutTree
    num_edges: int
    spqr: dict = field(default_factory=dict)


class Structure:
    """Block-cut trees, SPQR trees and embedding trees of the components of
    an instance, with Q-vertices wheel-replaced.  Components are rebuilt only
    when an operation changes them."""

    def __init__(self, inst: SyncPlanInstance) -> None:
        self.inst = inst
        self.comp_of: dict = {}
        self.trees: dict = {}
        self._cut_heap: list = []
        self._pq_ready: dict = {}
        self._tick = 0
        for v in inst.graph.vertices():
            if v not in self.comp_of:
                self._build(v)

    # -- building ----------------------------------------------------------

    def _build(self, v) -> _Component:
        inst = self.inst
        g = inst.graph
        verts = g.component_of(v)
        sub = g.subgraph(verts)
        psi = {q: inst.psi[q] for q in verts if inst.kind[q] == Q and g.degree(q) >= 3}
        w = wheel_replace(sub, psi)
        comp = _Component(set(verts), w, block_cut_tree(w), sub.num_edges())
        for x in verts:
            self.comp_of[x] = comp
        for x in verts:
            if x in inst.pipe_of:
                self.note_matched(x)
        return comp

    def note_matched(self, x) -> None:
        """Register a (newly) matched vertex with the selection queues."""
        if self.is_cut(x):
            self._tick += 1
            heapq.heappush(self._cut_heap, (-self.inst.graph.degree(x), self._tick, x))
        else:
            self._tick += 1
            self._pq_ready[x] = self._tick

    def rebuild(self, old_vertices, touched) -> tuple[list, list]:
        """Drop the components of ``old_vertices`` and rebuild around
        ``touched``; returns the old and new components."""
        g = self.inst.graph
        old = []
        for x in old_vertices:
            c = self.comp_of.get(x)
            if c is not None and all(c is not o for o in old):
                old.append(c)
        for c in old:
            for x in c.vertices:
                if self.comp_of.get(x) is c:
                    del self.comp_of[x]
                self.trees.pop(x, None)
                self._pq_ready.pop(x, None)
        new = []
        for x in touched:
            if g.has_vertex(x) and x not in self.comp_of:
                new.append(self._build(x))
            elif g.has_vertex(x):
                c = self.comp_of[x]
                if all(c is not n for n in new):
                    # component rebuilt earlier in this call
                    new.append(c)
        return old, new

    # -- queries -----------------------------------------------------------

    def is_cut(self, x) -> bool:
        return x in self.comp_of[x].bct.cut_vertices

    def cut_vertices(self) -> set:
        out = set()
        seen = set()
        for c in self.comp_of.values():
            if id(c) not in seen:
                seen.add(id(c))
                out |= c.bct.cut_vertices
        return out

    def block_spqr(self, x) -> SPQRTree:
        comp = self.comp_of[x]
        blocks = comp.bct.vertex_blocks.get(x, [])
        if len(blocks) != 1:
            raise SolverError(f"{x!r} is not a block-vertex")
        b = blocks[0]
        if b not in comp.spqr:
            comp.spqr[b] = spqr_tree(comp.wheel, comp.bct.blocks[b])
        return comp.spqr[b]

    def tree(self, x) -> PQTree:
        if x not in self.trees:
            self.trees[x] = embedding_tree_from_spqr(self.block_spqr(x), x)
        return self.trees[x]

    def bond(self, x):
        return bond_pole_bijections(self.comp_of[x].wheel, self.block_spqr(x), x)

    # -- selection queues --------------------------------------------------

    def pop_matched_cut(self):
        """Matched cut-vertex of maximum degree, or None."""
        inst = self.inst
        while self._cut_heap:
            _, _, x = self._cut_heap[0]
            if x in inst.pipe_of and x in self.comp_of and self.is_cut(x):
                return x
            heapq.heappop(self._cut_heap)
        return None

    def matched_nontrivial(self):
        inst = self.inst
        for x in list(self._pq_ready):
            if x not in inst.pipe_of or x not in self.comp_of or self.is_cut(x):
                del self._pq_ready[x]
                continue
            if not self.tree(x).is_trivial():
                return x
            del self._pq_ready[x]
        return None


# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------


def select_operation(inst: SyncPlanInstance, struct: Structure | None = None):
    """Next operation as ``(tag, argument)``, or None iff there is no pipe.

    ``("EncapsulateAndJoin", pid)``, ``("PropagatePQ", u)`` or
    ``("SimplifyMatching", u)``.  Without ``struct`` the instance may still
    contain matched vertices of degree < 4, and ``("ConvertSmall", u)`` is
    returned for them first; a passed ``struct`` implies a normalized instance.
    """
    if not inst.pipes:
        return None
    if struct is None:
        g = inst.graph
        for p in inst.pipes.values():
            if g.degree(p.u) < 4:
                return (CONVERT_SMALL, p.u)
        struct = Structure(inst)
    u = struct.pop_matched_cut()
    if u is not None:
        v = inst.partner(u)
        if struct.is_cut(v):
            return (ENCAPSULATE_AND_JOIN, inst.pipe_of[u])
        if not struct.tree(v).is_trivial():
            return (PROPAGATE_PQ, v)
        return _simplify_or_propagate(inst, struct, v)
    x = struct.matched_nontrivial()
    if x is not None:
        return (PROPAGATE_PQ, x)
    pid = next(iter(inst.pipes))
    return _simplify_or_propagate(inst, struct, inst.pipes[pid].u)


def _simplify_or_propagate(inst, struct, v):
    p, _, _ = struct.bond(v)
    if p not in inst.pipe_of:
        return ("SimplifyMatching", v)
    if struct.is_cut(p):
        raise SolverError(f"bond partner {p!r} of {v!r} is a matched cut-vertex of larger degree")
    if struct.tree(p).is_trivial():
        return ("SimplifyMatching", v)
    return (PROPAGATE_PQ, p)


# ---------------------------------------------------------------------------
# reduction loop
# ---------------------------------------------------------------------------


@dataclass
class OpLog:
    records: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def operations(self) -> list:
        """Records of the counted operations (auxiliary conversions excluded)."""
        return [r for r in self.records if r.tag != CONVERT_SMALL]

    def to_jsonl(self) -> str:
        return "".join(r.to_json_line() + "\n" for r in self.records)


@dataclass
class Reduction:
    instance: SyncPlanInstance
    log: OpLog
    ledger: list = field(default_factory=list)
    no_instance: str | None = None
    potential_initial: int = 0

    @property
    def ops_applied(self) -> int:
        return len(self.log.operations())


def apply_operation(inst: SyncPlanInstance, struct: Structure, op):
    tag, arg = op
    if tag == CONVERT_SMALL:
        return convert_small(inst, arg)
    if tag == ENCAPSULATE_AND_JOIN:
        return encapsulate_and_join(inst, arg)
    if tag == PROPAGATE_PQ:
        return propagate_pq(inst, arg, struct.tree(arg))
    p, delta_u, delta_v = struct.bond(arg)
    return simplify_matching(inst, arg, p, delta_u, delta_v)


def reduce_instance(inst: SyncPlanInstance, *, ledger: bool = False, max_ops: int | None = None,
                    on_step=None) -> Reduction:
    """Apply operations to a copy of ``inst`` until it is pipe-free.

    With ``ledger`` the potential, vertex count and per-component edge counts
    are recorded around every operation.  ``on_step(record, instance)`` is
    called after each operation with the live working instance.
    """
    work = inst.copy()
    log = OpLog()
    g = work.graph
    for v in g.vertices():
        if work.kind[v] != Q and g.degree(v) < 4:
            log.records.append(convert_small(work, v))
    red = Reduction(work, log)
    try:
        struct = Structure(work)
    except NonPlanarError as exc:
        red.no_instance = f"non-planar component: {exc}"
        return red
    red.potential_initial = potential(work, struct.cut_vertices())
    phi = red.potential_initial
    count = 0
    while work.pipes:
        if max_ops is not None and count >= max_ops:
            raise SolverError("operation limit exceeded")
        try:
            op = select_operation(work, struct)
            old_vertices = _old_vertices(work, op)
            nv = g.num_vertices()
            old_sizes = {id(c): c.num_edges for c in (struct.comp_of[x] for x in old_vertices)}
            old_comps = [struct.comp_of[x] for x in old_vertices]
            rec = apply_operation(work, struct, op)
        except NonPlanarError as exc:
            red.no_instance = f"non-planar component: {exc}"
            return red
        if isinstance(rec, NoInstance):
            red.no_instance = rec.reason
            return red
        count += 1
        log.records.append(rec)
        if rec.touched:
            try:
                _, new_comps = struct.rebuild(old_vertices, rec.touched)
            except NonPlanarError as exc:
                red.no_instance = f"non-planar component: {exc}"
                return red
        else:
            new_comps = []
        for x in _newly_matched(rec):
            if x in work.pipe_of and g.has_vertex(x):
                struct.note_matched(x)
        if ledger:
            after = potential(work, struct.cut_vertices())
            red.ledger.append(_ledger_entry(rec, phi, after, nv, g.num_vertices(), old_comps, old_sizes, new_comps))
            phi = after
        if on_step is not None:
            on_step(rec, work)
    return red


def _old_vertices(inst: SyncPlanInstance, op) -> list:
    tag, arg = op
    if tag == ENCAPSULATE_AND_JOIN:
        p = inst.pipes[arg]
        return [p.u, p.v]
    if tag == PROPAGATE_PQ:
        return [arg, inst.partner(arg)]
    return []


def _newly_matched(rec: OpRecord) -> list:
    if rec.tag == SIMPLIFY_III:
        return [rec.data["u2"], rec.data["v2"]]
    return []


def _ledger_entry(rec, phi_before, phi_after, nv_before, nv_after, old_comps, old_sizes, new_comps) -> dict:
    d_e = 0
    if new_comps:
        d_e = None
        biggest = max(old_sizes.values()) if old_sizes else 0
        for c in new_comps:
            shared = [old_sizes[id(o)] for o in old_comps if o.vertices & c.vertices]
            base = max(shared) if shared else biggest
            diff = c.num_edges - base
            d_e = diff if d_e is None else max(d_e, diff)
    return {
        "tag": rec.tag,
        "phi_before": phi_before,
        "phi_after": phi_after,
        "d_phi": phi_before - phi_after,
        "d_v": nv_after - nv_before,
        "d_e": d_e,
    }


# ---------------------------------------------------------------------------
# pipe-free instances
# ---------------------------------------------------------------------------


def solve_reduced(inst: SyncPlanInstance) -> dict | None:
    """Valid embedding of a pipe-free instance, or None if there is none."""
    if inst.pipes:
        raise InstanceError("solve_reduced needs a pipe-free instance")
    g = inst.graph
    sat = TwoSat()
    blocks = []  # (component key, block index, spqr tree or single edge)
    for ci, verts in enumerate(g.components()):
        sub = g.subgraph(verts)
        psi = {q: inst.psi[q] for q in verts if inst.kind[q] == Q and g.degree(q) >= 3}
        w = wheel_replace(sub, psi)
        bct = block_cut_tree(w)
        block_of_edge = {}
        trees = {}
        for bi, blk in enumerate(bct.blocks):
            if len(blk) == 1:
                blocks.append((w, None, blk[0]))
                continue
            try:
                t = spqr_tree(w, blk)
            except NonPlanarError:
                return None
            trees[bi] = t
            for e in blk:
                block_of_edge[e] = bi
            blocks.append((w, (ci, bi), t))
        for q, ref in psi.items():
            e = w.edge_of(ref[0])
            bi = block_of_edge[e]
            t = trees[bi]
            ni = t.node_of[e]
            node = t.nodes[ni]
            if node.kind != RIGID:
                raise SolverError(f"wheel centre {q!r} is not inside a rigid")
            m = rotation_matches(node.rotation[q], ref)
            if m == 0:
                raise SolverError(f"rigid rotation of wheel centre {q!r} is not its wheel order")
            # x_q true: q at psi; x_rigid true: rigid at its stored embedding
            sat.add_equal(("v", q), ("r", ci, bi, ni), same=(m == 1))
    for cell, members in inst.cells.items():
        for q in members:
            if g.degree(q) >= 3:
                sat.add_equal(("v", q), ("c", cell))
    assign = sat.solve()
    if assign is None:
        return None
    rs: dict = {v: [] for v in g.vertices()}
    for w, key, t in blocks:
        if key is None:
            for h in w.ends(t):
                x = w.vertex_of(h)
                if x in rs:
                    rs[x].append(h)
            continue
        ci, bi = key
        flip = {ni: not assign.get(("r", ci, bi, ni), True)
                for ni, node in enumerate(t.nodes) if node.kind == RIGID}
        for x, rot in planar_rotation_of_block(t, flip).items():
            if x in rs:
                rs[x].extend(rot)
    if not is_valid_embedding(inst, rs):
        raise SolverError("assembled embedding of the pipe-free instance is invalid")
    return rs


# ---------------------------------------------------------------------------
# undoing operations on embeddings
# ---------------------------------------------------------------------------


def reorder_bond(rs: dict, u, v, delta_u: Mapping, delta_v: Mapping, order_u: list) -> None:
    """Rearrange the parallel classes of the bond with poles ``u`` and ``v``
    so that ``u`` gets rotation ``order_u``.  Classes keep their internal
    embedding; the halves of ``v`` outside the block travel with the block
    half-edge preceding them."""
    rs[u] = list(order_u)
    class_order = []
    for h in order_u:
        c = delta_u[h]
        if not class_order or class_order[-1] != c:
            class_order.append(c)
    if len(class_order) > 1 and class_order[0] == class_order[-1]:
        class_order.pop()
    if len(class_order) != len(set(class_order)):
        raise SolverError("classes of the bond are not contiguous at the pole")
    rot = rs[v]
    n = len(rot)
    block_pos = [i for i, h in enumerate(rot) if h in delta_v]
    if not block_pos:
        raise SolverError("partner has no half-edge in the block")
    start = None
    for j, i in enumerate(block_pos):
        prev = block_pos[j - 1]
        if delta_v[rot[prev]] != delta_v[rot[i]]:
            start = i
            break
    if start is None:
        start = block_pos[0]
    runs: dict = {}
    seen_order = []
    cur = None
    for k in range(n):
        h = rot[(start + k) % n]
        if h in delta_v:
            cur = delta_v[h]
            if cur not in runs:
                runs[cur] = []
                seen_order.append(cur)
            elif seen_order[-1] != cur:
                raise SolverError("classes of the bond are not contiguous at the partner")
        runs[cur].append(h)
    if set(runs) != set(class_order):
        raise SolverError("pole class sets differ")
    rs[v] = [h for c in reversed(class_order) for h in runs[c]]


def _undo(rec: OpRecord, rs: dict) -> None:
    d = rec.data
    if rec.tag == CONVERT_SMALL:
        return
    if rec.tag == PROPAGATE_PQ:
        tw = d["tree_twin"]
        rs[d["u"]] = contract_tree_rotation(rs, d["tree_u"], tw)
        rs[d["v"]] = contract_tree_rotation(rs, d["tree_v"], tw)
        for x in d["tree_u"] + d["tree_v"]:
            del rs[x]
        return
    if rec.tag == ENCAPSULATE_AND_JOIN:
        joined = d["joined"]
        fused = d["fused"]
        u_rays = set(d["u_rays"])
        # the join of two multi-stars may fall apart; each part is split on
        # its own and the parts are concatenated in mirrored order at v
        u_rot, v_parts = [], []
        for part in joined.components():
            sub = joined.subgraph(part)
            rs1, _, _, _ = split_bipartite_embedding(
                sub, {x: rs[x] for x in part}, side_a=[x for x in part if x in u_rays])
            pairs = [fused[sub.edge_of(s)] for s in rs1["x"]]
            u_rot.extend(h for h, _ in pairs)
            v_parts.append([k for _, k in reversed(pairs)])
        rs[d["u"]] = u_rot
        rs[d["v"]] = [k for part in reversed(v_parts) for k in part]
        for x in d["created"]:
            del rs[x]
        return
    u, v = d["u"], d["partner"]
    if rec.tag == SIMPLIFY_I:
        phi = d["phi_u2u"]
        order = list(reversed([phi[x] for x in rs[d["u2"]]]))
    elif rec.tag == SIMPLIFY_II:
        sigma = fixed_cyclic_order(d["pi"])
        inv_u = {c: h for h, c in d["delta_u"].items()}
        order = list(reversed([inv_u[d["delta_v"][k]] for k in sigma]))
    elif rec.tag == SIMPLIFY_III:
        phi = d["phi_u2u"]
        order = list(reversed([phi[x] for x in rs[d["u2"]]]))
    else:
        raise SolverError(f"unknown record tag {rec.tag!r}")
    reorder_bond(rs, u, v, d["delta_u"], d["delta_v"], order)


def extract_embedding(log: OpLog, rs_reduced: Mapping) -> dict:
    """Map a valid embedding of the reduced instance back through ``log``."""
    rs = {v: list(r) for v, r in rs_reduced.items()}
    for rec in reversed(log.records):
        try:
            _undo(rec, rs)
        except (KeyError, GraphError) as exc:
            raise SolverError(f"cannot undo {rec.tag}: {exc!r}") from exc
    return rs


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def solve(inst: SyncPlanInstance, *, ledger: bool = False, verify: bool = True) -> Verdict:
    problems = check_wellformed(inst)
    if problems:
        raise InstanceError("; ".join(problems))
    red = reduce_instance(inst, ledger=ledger)
    verdict = Verdict(False, None, red.ops_applied, red.potential_initial, red.log)
    verdict.ledger = red.ledger
    if red.no_instance is not None:
        verdict.reason = red.no_instance
        return verdict
    rs = solve_reduced(red.instance)
    if rs is None:
        verdict.reason = "pipe-free instance has no valid embedding"
        return verdict
    witness = extract_embedding(red.log, rs)
    witness = {v: witness[v] for v in inst.graph.vertices()}
    if verify and not is_valid_embedding(inst, witness):
        raise SolverError("extracted witness is not a valid embedding")
    verdict.satisfiable = True
    verdict.witness = witness
    return verdict


def verdict_json(v: Verdict) -> str:
    return json.dumps({"satisfiable": v.satisfiable, "ops_applied": v.ops_applied,
                       "potential_initial": v.potential_initial})
