"""Instance rewriting operations.  Each one mutates the instance it is given
and returns an :class:`OpRecord` holding what is needed to map a valid
embedding of the result back to one of the input."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping

from .graph import Multigraph
from .instance import P, Q, InstanceError, SyncPlanInstance, convert_small_vertex
from .pqtree import PQTree, tree_to_graph_fragment

CONVERT_SMALL = "ConvertSmall"
ENCAPSULATE_AND_JOIN = "EncapsulateAndJoin"
PROPAGATE_PQ = "PropagatePQ"
SIMPLIFY_I = "SimplifyMatching-i"
SIMPLIFY_II = "SimplifyMatching-ii"
SIMPLIFY_III = "SimplifyMatching-iii"


class OperationError(InstanceError):
    """An operation was applied although its precondition does not hold."""


@dataclass
class OpRecord:
    tag: str
    data: dict = field(default_factory=dict)
    # vertices whose connected components changed (for cache invalidation)
    touched: list = field(default_factory=list)
    # auxiliary conversions triggered by the operation
    conversions: list = field(default_factory=list)

    def summary(self) -> dict:
        out: dict = {"tag": self.tag}
        for key in ("u", "v", "vertices", "pipe", "new_pipe", "partner"):
            if key in self.data:
                out[key] = _jsonable(self.data[key])
        out["conversions"] = len(self.conversions)
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.summary())


def _jsonable(x):
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return repr(x)


@dataclass
class NoInstance:
    """Result of an operation that proved the instance unsatisfiable."""

    reason: str


# ---------------------------------------------------------------------------
# ConvertSmall
# ---------------------------------------------------------------------------


def convert_small(inst: SyncPlanInstance, u) -> OpRecord:
    converted, pipe = convert_small_vertex(inst, u)
    return OpRecord(CONVERT_SMALL, {"vertices": converted, "pipe": pipe}, touched=[])


def _convert_new_small(inst: SyncPlanInstance, vertices) -> list:
    out = []
    for x in vertices:
        if inst.graph.has_vertex(x) and inst.kind[x] == P and inst.graph.degree(x) < 4:
            out.append(convert_small(inst, x))
    return out


# ---------------------------------------------------------------------------
# EncapsulateAndJoin
# ---------------------------------------------------------------------------


def _components_around(g: Multigraph, u) -> list[set]:
    """Vertex sets of the components of ``C_u - u`` (``C_u`` = component of ``u``)."""
    seen = {u}
    out = []
    for h in g.half_edges(u):
        w = g.opposite(h)
        if w in seen:
            continue
        comp = {w}
        seen.add(w)
        queue = deque([w])
        while queue:
            x = queue.popleft()
            for k in g.half_edges(x):
                y = g.opposite(k)
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        out.append(comp)
    return out


def encapsulate_and_join(inst: SyncPlanInstance, pid) -> OpRecord:
    """Apply EncapsulateAndJoin to the pipe ``pid`` between two cut-vertices."""
    g = inst.graph
    pipe = inst.pipes[pid]
    u, v = pipe.u, pipe.v
    if u == v:
        raise OperationError("pipe endpoints coincide")
    phi_uv = dict(pipe.phi)
    inst.remove_pipe(pid)
    u_halves = g.half_edges(u)
    v_halves = g.half_edges(v)
    sides = {}
    created = []
    for x in (u, v):
        comps = _components_around(g, x)
        if len(comps) < 2:
            raise OperationError(f"{x!r} is not a cut-vertex")
        rays = []
        for comp in comps:
            xi = inst.add_vertex(kind=P)
            xr = inst.add_vertex(kind=P)
            phi = {}
            for h in g.half_edges(x):
                t = g.twin(h)
                w = g.vertex_of(t)
                if w not in comp:
                    continue
                e = g.edge_of(h)
                g.remove_edge(e)
                a, r = g.fresh(), g.fresh()
                # the component keeps the edge id and its far half-edge
                g.add_edge(xi, w, e, a, t)
                # star edge: x keeps h, the ray gets r
                g.add_edge(x, xr, None, h, r)
                phi[a] = r
            inst.add_pipe(xi, xr, phi)
            created.extend([xi, xr])
            rays.append(xr)
        sides[x] = rays
    # join the two multi-stars at u and v along phi_uv
    fused = {}
    for h, k in phi_uv.items():
        eu, ev = g.edge_of(h), g.edge_of(k)
        r, s = g.twin(h), g.twin(k)
        ru, rv = g.vertex_of(r), g.vertex_of(s)
        g.remove_edge(eu)
        g.remove_edge(ev)
        g.add_edge(ru, rv, eu, r, s)
        fused[eu] = (h, k)
    g.remove_vertex(u)
    g.remove_vertex(v)
    del inst.kind[u], inst.kind[v]
    rec = OpRecord(
        ENCAPSULATE_AND_JOIN,
        {
            "u": u,
            "v": v,
            "pipe": pid,
            "u_halves": u_halves,
            "v_halves": v_halves,
            "u_rays": sides[u],
            "v_rays": sides[v],
            "fused": fused,
            "created": created,
            "joined": g.subgraph(sides[u] + sides[v]),
        },
        touched=list(created),
    )
    rec.conversions = _convert_new_small(inst, created)
    return rec


# ---------------------------------------------------------------------------
# PropagatePQ
# ---------------------------------------------------------------------------


def propagate_pq(inst: SyncPlanInstance, u, tree: PQTree) -> OpRecord:
    """Replace matched block-vertex ``u`` and its partner by copies of the
    non-trivial embedding tree ``tree`` of ``u`` (the copy at the partner is
    mirrored), synchronising the inner nodes by pipes and Q-cells."""
    g = inst.graph
    if tree.is_trivial():
        raise OperationError("PropagatePQ needs a non-trivial embedding tree")
    if u not in inst.pipe_of:
        raise OperationError(f"{u!r} is not matched")
    pid = inst.pipe_of[u]
    pipe = inst.pipes[pid]
    v = pipe.other(u)
    phi = pipe.phi_from(u)
    if set(tree.leaves()) != set(g.half_edges(u)):
        raise OperationError("tree leaves are not the half-edges of u")
    inst.remove_pipe(pid)
    frag = tree_to_graph_fragment(tree)
    alpha, alpha2 = {}, {}
    for x in frag.kinds:
        alpha[x] = inst.add_vertex(kind=P)
        alpha2[x] = inst.add_vertex(kind=P)
    phi_t = {}
    half_to = {}  # (inner node, neighbour token) -> half-edge at alpha[x]
    for x, y in frag.tree_edges:
        a, b, a2, b2 = g.fresh(), g.fresh(), g.fresh(), g.fresh()
        g.add_edge(alpha[x], alpha[y], None, a, b)
        g.add_edge(alpha2[x], alpha2[y], None, a2, b2)
        phi_t[a], phi_t[b] = a2, b2
        half_to[(x, y)] = a
        half_to[(y, x)] = b
    for h, x in frag.leaf_parent.items():
        k = phi[h]
        g.move_half_edge(h, alpha[x])
        g.move_half_edge(k, alpha2[x])
        phi_t[h] = k
        half_to[(x, ("L", h))] = h
    g.remove_vertex(u)
    g.remove_vertex(v)
    del inst.kind[u], inst.kind[v]
    new_pipes, new_cells = [], []
    for x, kind in frag.kinds.items():
        a, a2 = alpha[x], alpha2[x]
        if kind == Q:
            ref = [half_to[(x, y)] for y in frag.order[x]]
            inst.set_q(a, ref)
            cell = inst.cell_of[a]
            inst.kind[a2] = Q
            inst.psi[a2] = list(reversed([phi_t[h] for h in ref]))
            inst.cells[cell].append(a2)
            inst.cell_of[a2] = cell
            new_cells.append(cell)
        else:
            new_pipes.append(inst.add_pipe(a, a2, {h: phi_t[h] for h in g.half_edges(a)}))
    tree_u = list(alpha.values())
    tree_v = list(alpha2.values())
    tree_twin = {}
    for x, y in frag.tree_edges:
        a = half_to[(x, y)]
        b = half_to[(y, x)]
        tree_twin[a], tree_twin[b] = b, a
        tree_twin[phi_t[a]], tree_twin[phi_t[b]] = phi_t[b], phi_t[a]
    rec = OpRecord(
        PROPAGATE_PQ,
        {"u": u, "v": v, "pipe": pid, "tree_u": tree_u, "tree_v": tree_v,
         "tree_twin": tree_twin, "new_pipes": new_pipes, "new_cells": new_cells,
         "inner_nodes": len(frag.kinds)},
        touched=tree_u + tree_v,
    )
    rec.conversions = _convert_new_small(inst, tree_u)
    return rec


# ---------------------------------------------------------------------------
# SimplifyMatching
# ---------------------------------------------------------------------------


def uniform_cycles(perm: Mapping) -> bool:
    """True iff all cycles of the permutation ``perm`` have the same length."""
    return len(set(cycle_lengths(perm))) <= 1


def cycles(perm: Mapping) -> list[list]:
    seen = set()
    out = []
    for x in perm:
        if x in seen:
            continue
        cyc = []
        y = x
        while y not in seen:
            seen.add(y)
            cyc.append(y)
            y = perm[y]
        out.append(cyc)
    return out


def cycle_lengths(perm: Mapping) -> list[int]:
    return [len(c) for c in cycles(perm)]


def fixed_cyclic_order(perm: Mapping) -> list:
    """A cyclic order ``s`` of the domain with ``[perm[x] for x in s]`` equal to
    ``s`` up to rotation; built by interleaving the (equal length) cycles."""
    cyc = cycles(perm)
    if len(set(map(len, cyc))) > 1:
        raise ValueError("cycles of different lengths")
    if not cyc:
        return []
    length = len(cyc[0])
    return [c[i] for i in range(length) for c in cyc]


def simplify_matching(inst: SyncPlanInstance, u, partner, delta_u: Mapping, delta_v: Mapping,
                      block_halves_v=None):
    """Resolve the pipe at ``u``, whose embedding tree is trivial.

    ``partner`` is the other pole of the bond determining ``u``'s rotation;
    ``delta_u`` / ``delta_v`` map the half-edges of ``u`` / ``partner`` inside
    the block to the bond's skeleton edges (class indices).
    """
    g = inst.graph
    if u not in inst.pipe_of:
        raise OperationError(f"{u!r} is not matched")
    pid = inst.pipe_of[u]
    pipe = inst.pipes[pid]
    u2 = pipe.other(u)
    v = partner
    if set(delta_u) != set(g.half_edges(u)) or len(set(delta_u.values())) != len(delta_u):
        raise OperationError("delta_u is not a bijection onto the bond's skeleton edges")
    data = {"u": u, "partner": v, "pipe": pid, "delta_u": dict(delta_u), "delta_v": dict(delta_v)}
    if v not in inst.pipe_of:
        phi_u2u = pipe.phi_from(u2)
        inst.remove_pipe(pid)
        data.update(case=1, u2=u2, phi_u2u=phi_u2u)
        return OpRecord(SIMPLIFY_I, data)
    if len(delta_v) != len(delta_u) or len(set(delta_v.values())) != len(delta_v):
        raise OperationError("partner does not have a trivial embedding tree")
    inv_u = {c: h for h, c in delta_u.items()}
    inv_v = {c: h for h, c in delta_v.items()}
    if u2 == v:
        phi_uv = pipe.phi_from(u)
        delta_vu = {k: inv_u[c] for k, c in delta_v.items()}
        pi = {k: phi_uv[delta_vu[k]] for k in delta_v}
        if not uniform_cycles(pi):
            return NoInstance(f"pipe between the poles {u!r}, {v!r} of a bond induces cycles of lengths "
                              f"{sorted(cycle_lengths(pi))}")
        inst.remove_pipe(pid)
        data.update(case=2, pi=pi, phi_uv=phi_uv)
        return OpRecord(SIMPLIFY_II, data)
    pid2 = inst.pipe_of[v]
    pipe2 = inst.pipes[pid2]
    v2 = pipe2.other(v)
    phi_u2u = pipe.phi_from(u2)
    phi_u_u2 = pipe.phi_from(u)
    phi_vv2 = pipe2.phi_from(v)
    phi_v2v = pipe2.phi_from(v2)
    delta_uv = {h: inv_v[c] for h, c in delta_u.items()}
    phi_new = {x: phi_vv2[delta_uv[phi_u2u[x]]] for x in phi_u2u}
    inst.remove_pipe(pid)
    inst.remove_pipe(pid2)
    new_pid = inst.add_pipe(u2, v2, phi_new)
    data.update(case=3, u2=u2, v2=v2, pipe2=pid2, new_pipe=new_pid, phi_u2u=phi_u2u,
                phi_v2v=phi_v2v, phi_u_u2=phi_u_u2)
    return OpRecord(SIMPLIFY_III, data)
