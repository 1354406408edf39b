"""Synchronized Planarity instances: graph, P/Q kinds, Q-cells with reference
rotations, and pipes between P-vertices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .decomposition import cut_vertices
from .graph import GraphError, Multigraph, check_rotation_system, cyclic_equal, genus

P, Q = "P", "Q"


class InstanceError(ValueError):
    pass


@dataclass
class Pipe:
    u: Any
    v: Any
    phi: dict  # half-edge of u -> half-edge of v

    def other(self, x):
        return self.v if x == self.u else self.u

    def phi_from(self, x) -> dict:
        """Bijection from the half-edges of ``x`` to those of its partner."""
        if x == self.u:
            return self.phi
        return {b: a for a, b in self.phi.items()}

    def degree(self) -> int:
        return len(self.phi)


@dataclass
class Verdict:
    satisfiable: bool
    witness: dict | None = None
    ops_applied: int = 0
    potential_initial: int = 0
    log: list = field(default_factory=list)
    ledger: list = field(default_factory=list)
    reason: str | None = None

    def to_json(self) -> dict:
        return {"satisfiable": self.satisfiable, "ops_applied": self.ops_applied,
                "potential_initial": self.potential_initial}


class SyncPlanInstance:
    def __init__(self, graph: Multigraph | None = None) -> None:
        self.graph = graph if graph is not None else Multigraph()
        self.kind: dict = {v: P for v in self.graph.vertices()}
        self.cells: dict = {}
        self.cell_of: dict = {}
        self.psi: dict = {}
        self.pipes: dict = {}
        self.pipe_of: dict = {}
        self._next_cell = 0
        self._next_pipe = 0

    # -- construction ------------------------------------------------------

    def add_vertex(self, v=None, kind: str = P):
        v = self.graph.add_vertex(v)
        self.kind[v] = kind
        return v

    def set_q(self, v, psi: list, cell=None):
        """Make ``v`` a Q-vertex with reference rotation ``psi``, in cell ``cell``
        (a new singleton cell when omitted)."""
        if self.kind.get(v) == Q:
            self._leave_cell(v)
        self.kind[v] = Q
        self.psi[v] = list(psi)
        if cell is None:
            cell = self.add_cell([])
        self.cells[cell].append(v)
        self.cell_of[v] = cell
        return cell

    def add_cell(self, members) -> int:
        cid = self._next_cell
        self._next_cell += 1
        self.cells[cid] = []
        for v in members:
            if self.kind.get(v) != Q:
                raise InstanceError(f"cell member {v!r} is not a Q-vertex")
            self._leave_cell(v)
            self.cells[cid].append(v)
            self.cell_of[v] = cid
        return cid

    def _leave_cell(self, v):
        c = self.cell_of.pop(v, None)
        if c is not None:
            self.cells[c].remove(v)
            if not self.cells[c]:
                del self.cells[c]

    def add_pipe(self, u, v, phi: Mapping) -> int:
        pid = self._next_pipe
        self._next_pipe += 1
        self.pipes[pid] = Pipe(u, v, dict(phi))
        self.pipe_of[u] = pid
        self.pipe_of[v] = pid
        return pid

    def remove_pipe(self, pid) -> Pipe:
        p = self.pipes.pop(pid)
        if self.pipe_of.get(p.u) == pid:
            del self.pipe_of[p.u]
        if self.pipe_of.get(p.v) == pid:
            del self.pipe_of[p.v]
        return p

    def remove_vertex(self, v) -> None:
        if v in self.pipe_of:
            raise InstanceError(f"cannot remove matched vertex {v!r}")
        if self.kind.get(v) == Q:
            self._leave_cell(v)
            self.psi.pop(v, None)
        self.kind.pop(v, None)
        self.graph.remove_vertex(v)

    # -- queries -----------------------------------------------------------

    def is_matched(self, v) -> bool:
        return v in self.pipe_of

    def partner(self, v):
        return self.pipes[self.pipe_of[v]].other(v)

    def p_vertices(self) -> list:
        return [v for v in self.graph.vertices() if self.kind[v] == P]

    def q_vertices(self) -> list:
        return [v for v in self.graph.vertices() if self.kind[v] == Q]

    def copy(self) -> "SyncPlanInstance":
        i = SyncPlanInstance.__new__(SyncPlanInstance)
        i.graph = self.graph.copy()
        i.kind = dict(self.kind)
        i.cells = {c: list(m) for c, m in self.cells.items()}
        i.cell_of = dict(self.cell_of)
        i.psi = {v: list(r) for v, r in self.psi.items()}
        i.pipes = {p: Pipe(x.u, x.v, dict(x.phi)) for p, x in self.pipes.items()}
        i.pipe_of = dict(self.pipe_of)
        i._next_cell = self._next_cell
        i._next_pipe = self._next_pipe
        return i

    def __repr__(self) -> str:
        return (f"SyncPlanInstance(|V|={self.graph.num_vertices()}, |E|={self.graph.num_edges()}, "
                f"pipes={len(self.pipes)}, Q={len(self.psi)}, cells={len(self.cells)})")

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        data = self.graph.to_json()
        data["kinds"] = {_key(v): k for v, k in self.kind.items()}
        data["cells"] = [list(m) for m in self.cells.values()]
        data["psi"] = {_key(v): list(r) for v, r in self.psi.items()}
        data["pipes"] = [{"u": p.u, "v": p.v, "phi": {_key(a): b for a, b in p.phi.items()}}
                         for p in self.pipes.values()]
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    @classmethod
    def from_json(cls, data: Mapping) -> "SyncPlanInstance":
        try:
            g = Multigraph.from_json(data)
            inst = cls(g)
            vkey = {_key(v): v for v in g.vertices()}
            hkey = {}
            for v in g.vertices():
                for h in g.half_edges(v):
                    hkey[_key(h)] = h
            for k, kind in data.get("kinds", {}).items():
                if kind not in (P, Q):
                    raise InstanceError(f"unknown kind {kind!r}")
                inst.kind[vkey[k]] = kind
            psi = {vkey[k]: [hkey[_key(h)] for h in r] for k, r in data.get("psi", {}).items()}
            for members in data.get("cells", []):
                cid = inst._next_cell
                inst._next_cell += 1
                inst.cells[cid] = []
                for m in members:
                    v = vkey[_key(m)]
                    if v in inst.cell_of:
                        raise InstanceError(f"vertex {m!r} in two cells")
                    inst.cells[cid].append(v)
                    inst.cell_of[v] = cid
            inst.psi = psi
            for rec in data.get("pipes", []):
                u, v = vkey[_key(rec["u"])], vkey[_key(rec["v"])]
                phi = {hkey[k]: hkey[_key(b)] for k, b in rec["phi"].items()}
                if u in inst.pipe_of or v in inst.pipe_of:
                    # kept so that check_wellformed can report it
                    pid = inst._next_pipe
                    inst._next_pipe += 1
                    inst.pipes[pid] = Pipe(u, v, phi)
                    continue
                inst.add_pipe(u, v, phi)
        except KeyError as exc:
            raise InstanceError(f"unknown identifier {exc}") from exc
        except (TypeError, AttributeError) as exc:
            raise InstanceError(f"malformed instance JSON: {exc}") from exc
        except GraphError as exc:
            raise InstanceError(str(exc)) from exc
        return inst

    @classmethod
    def loads(cls, text: str) -> "SyncPlanInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InstanceError("instance JSON must be an object")
        return cls.from_json(data)


def _key(x) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_wellformed(inst: SyncPlanInstance) -> list[str]:
    """List of violated invariants; empty when the instance is well formed."""
    out = []
    g = inst.graph
    seen: dict = {}
    for pid, p in inst.pipes.items():
        for x in (p.u, p.v):
            if not g.has_vertex(x):
                out.append(f"pipe {pid}: unknown vertex {x!r}")
                continue
            if inst.kind.get(x) != P:
                out.append(f"pipe {pid}: endpoint {x!r} is not a P-vertex")
            if x in seen:
                out.append(f"matching: vertex {x!r} occurs in pipes {seen[x]} and {pid}")
            seen[x] = pid
        if p.u == p.v:
            out.append(f"pipe {pid}: endpoints coincide")
            continue
        if not (g.has_vertex(p.u) and g.has_vertex(p.v)):
            continue
        if g.degree(p.u) != g.degree(p.v):
            out.append(f"pipe {pid}: degree mismatch {g.degree(p.u)} != {g.degree(p.v)}")
            continue
        hu, hv = set(g.half_edges(p.u)), set(g.half_edges(p.v))
        if set(p.phi) != hu or set(p.phi.values()) != hv or len(set(p.phi.values())) != len(p.phi):
            out.append(f"pipe {pid}: phi is not a bijection between the half-edges of its endpoints")
    for v in g.vertices():
        k = inst.kind.get(v)
        if k not in (P, Q):
            out.append(f"vertex {v!r}: missing kind")
        if k == Q:
            if v not in inst.cell_of:
                out.append(f"Q-vertex {v!r} is in no cell")
            r = inst.psi.get(v)
            if r is None or len(r) != g.degree(v) or set(r) != set(g.half_edges(v)):
                out.append(f"Q-vertex {v!r}: psi is not a rotation of its half-edges")
    for c, members in inst.cells.items():
        for v in members:
            if not g.has_vertex(v) or inst.kind.get(v) != Q:
                out.append(f"cell {c}: member {v!r} is not a Q-vertex")
    return out


def pipe_satisfied(inst: SyncPlanInstance, p: Pipe, rs: Mapping) -> bool:
    mapped = [p.phi[h] for h in rs[p.u]]
    return cyclic_equal(list(reversed(mapped)), rs[p.v])


def cell_orientation(inst: SyncPlanInstance, v, rs: Mapping) -> int | None:
    """+1 / -1 if ``v`` is at ``psi`` / reversed ``psi``; 0 if both (degree <= 2);
    None if neither."""
    ref = inst.psi[v]
    fwd = cyclic_equal(rs[v], ref)
    bwd = cyclic_equal(rs[v], list(reversed(ref)))
    if fwd and bwd:
        return 0
    if fwd:
        return 1
    if bwd:
        return -1
    return None


def is_valid_embedding(inst: SyncPlanInstance, rs: Mapping) -> bool:
    g = inst.graph
    try:
        check_rotation_system(g, rs)
    except GraphError:
        return False
    if genus(g, rs) != 0:
        return False
    for p in inst.pipes.values():
        if not pipe_satisfied(inst, p, rs):
            return False
    for members in inst.cells.values():
        signs = set()
        for v in members:
            o = cell_orientation(inst, v, rs)
            if o is None:
                return False
            if o:
                signs.add(o)
        if len(signs) > 1:
            return False
    return True


def reduced_degree(d: int) -> int:
    return max(d - 3, 0)


def pipe_potential(d: int, both_cut: bool) -> int:
    dd = reduced_degree(d)
    if both_cut:
        return max(2 * dd - 1, 0)
    return dd


def potential(inst: SyncPlanInstance, cuts: set | None = None) -> int:
    """Progress measure: ``max(d-3,0)`` per pipe with a block-vertex endpoint and
    ``2*max(d-3,0)-1`` per pipe between two cut-vertices."""
    if cuts is None:
        cuts = cut_vertices(inst.graph)
    total = 0
    for p in inst.pipes.values():
        total += pipe_potential(p.degree(), p.u in cuts and p.v in cuts)
    return total


# ---------------------------------------------------------------------------
# small P-vertices
# ---------------------------------------------------------------------------


def convert_small_vertex(inst: SyncPlanInstance, u) -> tuple:
    """Turn P-vertex ``u`` of degree < 4 (and its pipe partner) into Q-vertices in place.

    Returns ``(converted vertices, removed pipe or None)``.
    """
    g = inst.graph
    if inst.kind[u] != P or g.degree(u) >= 4:
        raise InstanceError(f"{u!r} is not a small P-vertex")
    psi_u = g.half_edges(u)
    if u not in inst.pipe_of:
        inst.set_q(u, psi_u)
        return (u,), None
    pid = inst.pipe_of[u]
    pipe = inst.remove_pipe(pid)
    v = pipe.other(u)
    phi = pipe.phi_from(u)
    inst.kind[u] = Q
    inst.psi[u] = psi_u
    cell = inst.add_cell([u])
    inst.kind[v] = Q
    inst.psi[v] = list(reversed([phi[h] for h in psi_u]))
    inst.cells[cell].append(v)
    inst.cell_of[v] = cell
    return (u, v), pipe


def small_p_vertices(inst: SyncPlanInstance) -> list:
    g = inst.graph
    return [v for v in g.vertices() if inst.kind[v] == P and g.degree(v) < 4]


def normalize_small(inst: SyncPlanInstance) -> SyncPlanInstance:
    """Copy of ``inst`` with every P-vertex of degree < 4 converted to a Q-vertex."""
    out = inst.copy()
    for v in small_p_vertices(out):
        if out.kind[v] == P:
            convert_small_vertex(out, v)
    return out
