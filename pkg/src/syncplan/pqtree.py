"""Unrooted PQ-trees (PC-trees) over half-edge labels.

A tree represents the set of cyclic leaf orders obtained from its planar
drawings where P-nodes permute their incident edges freely and Q-nodes keep a
reference cyclic order of their incident edges up to reversal.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .graph import canonical_cyclic, cyclic_equal

P, Q, LEAF = "P", "Q", "L"


class PQTreeError(ValueError):
    pass


class PQTree:
    """Nodes are ``("L", label)`` for leaves and ``("I", k)`` for inner nodes.
    ``adj`` lists neighbours; for Q-nodes the list is the reference cyclic order."""

    def __init__(self) -> None:
        self.kind: dict = {}
        self.adj: dict = {}
        self._next = 0

    # -- building ----------------------------------------------------------

    def add_inner(self, kind: str) -> tuple:
        if kind not in (P, Q):
            raise PQTreeError(f"bad node kind {kind!r}")
        node = ("I", self._next)
        self._next += 1
        self.kind[node] = kind
        self.adj[node] = []
        return node

    def add_leaf(self, label: Hashable) -> tuple:
        node = ("L", label)
        if node in self.kind:
            raise PQTreeError(f"duplicate leaf label {label!r}")
        self.kind[node] = LEAF
        self.adj[node] = []
        return node

    def link(self, a, b) -> None:
        self.adj[a].append(b)
        self.adj[b].append(a)

    # -- queries -----------------------------------------------------------

    def leaves(self) -> list:
        return [n[1] for n in self.kind if self.kind[n] == LEAF]

    def inner_nodes(self) -> list:
        return [n for n in self.kind if self.kind[n] != LEAF]

    def is_trivial(self) -> bool:
        inner = self.inner_nodes()
        return len(inner) == 1 and self.kind[inner[0]] == P

    def __repr__(self) -> str:
        return f"PQTree({format_tree(self)})"

    def copy(self) -> "PQTree":
        t = PQTree()
        t.kind = dict(self.kind)
        t.adj = {n: list(a) for n, a in self.adj.items()}
        t._next = self._next
        return t

    def normalize(self) -> "PQTree":
        """Suppress inner nodes of degree 2 (in place) and return self."""
        changed = True
        while changed:
            changed = False
            for x in self.inner_nodes():
                if len(self.adj[x]) == 2:
                    a, b = self.adj[x]
                    self.adj[a][self.adj[a].index(x)] = b
                    self.adj[b][self.adj[b].index(x)] = a
                    del self.adj[x], self.kind[x]
                    changed = True
                elif len(self.adj[x]) == 3 and self.kind[x] == Q:
                    # a Q-node of degree 3 admits every order of its three edges
                    self.kind[x] = P
        return self

    def subtree_leaves(self, node, parent) -> list:
        out = []
        stack = [(node, parent)]
        while stack:
            x, par = stack.pop()
            if self.kind[x] == LEAF:
                out.append(x[1])
            for y in self.adj[x]:
                if y != par:
                    stack.append((y, x))
        return out

    def check(self) -> None:
        labels = self.leaves()
        if len(labels) < 3:
            raise PQTreeError("a PQ-tree needs at least three leaves")
        for x in self.kind:
            deg = len(self.adj[x])
            if self.kind[x] == LEAF and deg != 1:
                raise PQTreeError(f"leaf {x[1]!r} has degree {deg}")
            if self.kind[x] != LEAF and deg < 3:
                raise PQTreeError(f"inner node {x} has degree {deg}")
        # connected and acyclic
        if sum(len(a) for a in self.adj.values()) // 2 != len(self.kind) - 1:
            raise PQTreeError("not a tree")
        root = next(iter(self.kind))
        if len(self.subtree_leaves(root, None)) != len(labels):
            raise PQTreeError("not connected")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _star(labels: Sequence, kind: str) -> PQTree:
    labels = list(labels)
    if len(labels) < 3:
        raise PQTreeError("a PQ-tree needs at least three leaves")
    t = PQTree()
    c = t.add_inner(kind)
    for lab in labels:
        t.link(c, t.add_leaf(lab))
    return t


def trivial_tree(labels: Iterable) -> PQTree:
    """Single P-node: every cyclic order is admitted."""
    return _star(list(labels), P)


def fixed_order_tree(order: Sequence) -> PQTree:
    """Single Q-node: only ``order`` and its reversal are admitted."""
    return _star(order, Q)


# ---------------------------------------------------------------------------
# semantics
# ---------------------------------------------------------------------------


def admits(t: PQTree, order: Sequence) -> bool:
    """True iff the cyclic ``order`` of leaf labels is represented by ``t``."""
    order = list(order)
    n = len(order)
    pos = {lab: i for i, lab in enumerate(order)}
    if len(pos) != n or set(pos) != set(t.leaves()):
        raise PQTreeError("order is not a permutation of the tree's leaves")
    for x in t.inner_nodes():
        starts = []
        for y in t.adj[x]:
            arc = set(t.subtree_leaves(y, x))
            ps = [pos[lab] for lab in arc]
            # contiguous on the circle: exactly one element whose predecessor is outside
            heads = [p for p in ps if order[(p - 1) % n] not in arc]
            if len(heads) != 1:
                return False
            starts.append((heads[0], y))
        if t.kind[x] == Q:
            seen = [y for _, y in sorted(starts, key=lambda s: s[0])]
            ref = t.adj[x]
            if not (cyclic_equal(seen, ref) or cyclic_equal(seen, list(reversed(ref)))):
                return False
    return True


def _linear_orders(t: PQTree, x, parent):
    """All linear leaf orders of the subtree at ``x`` entered from ``parent``."""
    if t.kind[x] == LEAF:
        yield (x[1],)
        return
    nbrs = t.adj[x]
    if t.kind[x] == Q:
        i = nbrs.index(parent)
        fwd = nbrs[i + 1:] + nbrs[:i]
        seqs = [fwd, list(reversed(fwd))]
    else:
        kids = [y for y in nbrs if y != parent]
        seqs = [list(p) for p in itertools.permutations(kids)]
    for seq in seqs:
        parts = [list(_linear_orders(t, y, x)) for y in seq]
        for combo in itertools.product(*parts):
            yield tuple(itertools.chain.from_iterable(combo))


def enumerate_orders(t: PQTree) -> set:
    """All admitted cyclic orders as canonical tuples (smallest label first)."""
    inner = t.inner_nodes()
    if not inner:
        raise PQTreeError("tree has no inner node")
    root = inner[0]
    nbrs = t.adj[root]
    if t.kind[root] == Q:
        seqs = [nbrs, list(reversed(nbrs))]
    else:
        seqs = [[nbrs[0]] + list(p) for p in itertools.permutations(nbrs[1:])]
    out = set()
    for seq in seqs:
        parts = [list(_linear_orders(t, y, root)) for y in seq]
        for combo in itertools.product(*parts):
            out.add(canonical_cyclic(list(itertools.chain.from_iterable(combo))))
    return out


# ---------------------------------------------------------------------------
# graph realisation
# ---------------------------------------------------------------------------


@dataclass
class TreeFragment:
    """A PQ-tree read as a graph: inner nodes become vertices (P or Q kind),
    tree edges between inner nodes become edges, leaves name the attachment
    of outside edges.  ``order[x]`` lists the neighbours of Q-node ``x`` in
    reference order; entries are inner nodes or ``("L", label)``."""

    kinds: dict = field(default_factory=dict)
    tree_edges: list = field(default_factory=list)
    leaf_parent: dict = field(default_factory=dict)
    order: dict = field(default_factory=dict)


def tree_to_graph_fragment(t: PQTree) -> TreeFragment:
    frag = TreeFragment()
    for x in t.inner_nodes():
        frag.kinds[x] = t.kind[x]
        if t.kind[x] == Q:
            frag.order[x] = list(t.adj[x])
        for y in t.adj[x]:
            if t.kind[y] == LEAF:
                frag.leaf_parent[y[1]] = x
            elif x < y:
                frag.tree_edges.append((x, y))
    return frag


# ---------------------------------------------------------------------------
# text form:  P(a,Q(b,c,d),e)
# ---------------------------------------------------------------------------


def format_tree(t: PQTree) -> str:
    inner = t.inner_nodes()
    if not inner:
        return ""

    def fmt(x, parent):
        if t.kind[x] == LEAF:
            return str(x[1])
        nbrs = t.adj[x]
        if parent is None:
            seq = nbrs
        else:
            i = nbrs.index(parent)
            seq = nbrs[i + 1:] + nbrs[:i]
        return t.kind[x] + "(" + ",".join(fmt(y, x) for y in seq) + ")"

    return fmt(inner[0], None)


_TOKEN = re.compile(r"\s*([PQ]\(|\(|\)|,|[^,()\s]+)")


def _label(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_tree(text: str) -> PQTree:
    """Parse the text form; integer-looking labels become ints.  In a nested
    node the parent comes first in its cyclic order."""
    toks = [m.group(1) for m in _TOKEN.finditer(text) if m.group(1).strip()]
    t = PQTree()
    pos = 0

    def node(parent):
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok in ("P(", "Q("):
            x = t.add_inner(tok[0])
            if parent is not None:
                t.link(parent, x)
            while True:
                node(x)
                if pos >= len(toks):
                    raise PQTreeError("unterminated node")
                sep = toks[pos]
                pos += 1
                if sep == ")":
                    break
                if sep != ",":
                    raise PQTreeError(f"unexpected token {sep!r}")
            return x
        if tok in ("(", ")", ","):
            raise PQTreeError(f"unexpected token {tok!r}")
        leaf = t.add_leaf(_label(tok))
        if parent is not None:
            t.link(parent, leaf)
        return leaf

    try:
        node(None)
    except IndexError as exc:
        raise PQTreeError("truncated tree text") from exc
    if pos != len(toks):
        raise PQTreeError("trailing tokens")
    t.normalize()
    t.check()
    return t
