"""Laminar vertex-set family with moat duals.

The family always covers every vertex: it starts as the n singletons and
is append-only, each later set being the disjoint union of two sets that
were maximal when the union was formed.  Containment is therefore a
forest over set ids, stored with parent links; ids are assigned in
creation order (singleton {v} has id v) and never reused, so the family
can hold at most 2n - 1 sets.

A disjoint-set index maps each vertex to the maximal set currently
covering it, which keeps "are these endpoints in the same maximal set"
queries cheap for the solver.  Chains (the supersets of a singleton) are
read straight off the parent links; the sets crossing an edge are the
symmetric difference of its endpoints' chains.

Duals live in a separate DualAssignment: one non-negative Fraction per
set plus the ids frozen as saturated.  This module only stores and
queries; growth scheduling lives in the solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .instance import Instance, format_rational, parse_rational

SetId = int


class LaminarFamily:
    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need at least one vertex, got {n}")
        self.n = n
        self._parent: list[Optional[SetId]] = [None] * n
        self._children: list[tuple[SetId, ...]] = [()] * n
        self._size: list[int] = [1] * n
        self._maximal: set[SetId] = set(range(n))
        self._vertices: dict[SetId, frozenset[int]] = {}
        # union-find over vertices; each root remembers its covering set id
        self._dsu: list[int] = list(range(n))
        self._top: list[SetId] = list(range(n))

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def ids(self) -> range:
        return range(len(self._parent))

    def parent_of(self, sid: SetId) -> Optional[SetId]:
        return self._parent[sid]

    def children_of(self, sid: SetId) -> tuple[SetId, ...]:
        return self._children[sid]

    def size(self, sid: SetId) -> int:
        return self._size[sid]

    def is_maximal(self, sid: SetId) -> bool:
        return self._parent[sid] is None

    def maximal_ids(self) -> list[SetId]:
        """Ids of the maximal sets, ascending.  They partition V."""
        return sorted(self._maximal)

    def _find(self, v: int) -> int:
        dsu = self._dsu
        root = v
        while dsu[root] != root:
            root = dsu[root]
        while dsu[v] != root:
            dsu[v], v = root, dsu[v]
        return root

    def maximal_of(self, v: int) -> SetId:
        """Id of the maximal set containing vertex v."""
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return self._top[self._find(v)]

    def vertices(self, sid: SetId) -> frozenset[int]:
        """Member vertices, collected by descending to leaf singletons."""
        if not 0 <= sid < len(self._parent):
            raise ValueError(f"unknown set id {sid}")
        cached = self._vertices.get(sid)
        if cached is not None:
            return cached
        if sid < self.n:
            vs = frozenset((sid,))
        else:
            acc: list[int] = []
            stack = [sid]
            while stack:
                cur = stack.pop()
                kids = self._children[cur]
                if kids:
                    stack.extend(kids)
                else:
                    acc.append(cur)
            vs = frozenset(acc)
        self._vertices[sid] = vs
        return vs

    def merge(self, a: SetId, b: SetId) -> SetId:
        """Append the union of two distinct maximal sets; returns its id."""
        if a == b:
            raise ValueError(f"cannot merge set {a} with itself")
        for sid in (a, b):
            if not 0 <= sid < len(self._parent):
                raise ValueError(f"unknown set id {sid}")
            if self._parent[sid] is not None:
                raise ValueError(f"set {sid} is not maximal")
        nid = len(self._parent)
        self._parent.append(None)
        self._children.append((a, b))
        self._size.append(self._size[a] + self._size[b])
        self._parent[a] = nid
        self._parent[b] = nid
        self._maximal.discard(a)
        self._maximal.discard(b)
        self._maximal.add(nid)
        ra = self._find(next(iter(self.vertices(a))))
        rb = self._find(next(iter(self.vertices(b))))
        self._dsu[rb] = ra
        self._top[ra] = nid
        return nid

    def chain_of_vertex(self, v: int) -> list[SetId]:
        """Leaf-to-root id chain of the singleton {v}; ids ascend."""
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        chain = [v]
        cur = self._parent[v]
        while cur is not None:
            chain.append(cur)
            cur = self._parent[cur]
        return chain

    def supersets_of(self, xs: Iterable[int]) -> list[SetId]:
        """Ids of sets containing every vertex of xs, ascending.

        Empty xs is contained in everything, so all ids come back.  For a
        singleton this is exactly the leaf-to-root chain.
        """
        xset = frozenset(xs)
        if not xset:
            return list(self.ids)
        for v in xset:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range")
        anchor = next(iter(xset))
        return [sid for sid in self.chain_of_vertex(anchor)
                if xset <= self.vertices(sid)]

    def subsets_below(self, xs: Iterable[int]) -> list[SetId]:
        """Ids of sets contained in the vertex set xs, ascending."""
        xset = frozenset(xs)
        for v in xset:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range")
        return [sid for sid in self.ids if self.vertices(sid) <= xset]

    def subtree_ids(self, sid: SetId) -> list[SetId]:
        """Ids of sid and all its descendants (the sets contained in it)."""
        if not 0 <= sid < len(self._parent):
            raise ValueError(f"unknown set id {sid}")
        acc = []
        stack = [sid]
        while stack:
            cur = stack.pop()
            acc.append(cur)
            stack.extend(self._children[cur])
        acc.sort()
        return acc

    def crossing_sets(self, u: int, v: int) -> list[SetId]:
        """Ids of sets containing exactly one of vertices u and v.

        These are the sets an edge (u, v) leaves, i.e. the symmetric
        difference of the two endpoint chains.
        """
        if u == v:
            raise ValueError("an edge needs two distinct endpoints")
        cu = set(self.chain_of_vertex(u))
        cv = set(self.chain_of_vertex(v))
        return sorted(cu ^ cv)


@dataclass
class DualAssignment:
    """Per-set dual values plus the ids frozen as saturated."""

    y: dict[SetId, Fraction]
    saturated: set[SetId]

    def register(self, sid: SetId):
        self.y[sid] = Fraction(0)

    def total(self, ids: Iterable[SetId]) -> Fraction:
        return sum((self.y[sid] for sid in ids), Fraction(0))


def init_singletons(inst: Instance) -> tuple[LaminarFamily, DualAssignment]:
    """Fresh family of singletons with all duals zero, nothing saturated."""
    fam = LaminarFamily(inst.n)
    duals = DualAssignment({v: Fraction(0) for v in range(inst.n)}, set())
    return fam, duals


def merge(fam: LaminarFamily, duals: DualAssignment,
          a: SetId, b: SetId) -> SetId:
    """Structural merge plus a zero dual for the new set (not saturated)."""
    nid = fam.merge(a, b)
    duals.register(nid)
    return nid


def dual_sum(duals: DualAssignment, ids: Iterable[SetId]) -> Fraction:
    return duals.total(ids)


def edge_slack(fam: LaminarFamily, duals: DualAssignment, inst: Instance,
               edge_index: int) -> Fraction:
    """Cost of the edge minus the dual mass on sets it crosses.

    Negative means the duals overload the edge; the verifier reports it
    rather than clamping.
    """
    u, v, c = inst.edges[edge_index]
    return c - duals.total(fam.crossing_sets(u, v))


def prize_slack(fam: LaminarFamily, duals: DualAssignment, inst: Instance,
                sid: SetId) -> Fraction:
    """Prize mass of the set minus the dual mass inside it."""
    prize = sum((inst.prizes[v] for v in fam.vertices(sid)), Fraction(0))
    return prize - duals.total(fam.subtree_ids(sid))


# ---------------------------------------------------------------------------
# snapshots (the serialized form audited by the verifier and the CLI)


@dataclass(frozen=True)
class SetRecord:
    sid: SetId
    vertices: tuple[int, ...]
    y: Fraction
    saturated: bool
    parent: Optional[SetId]

    def to_json_obj(self) -> dict:
        return {
            "id": self.sid,
            "vertices": list(self.vertices),
            "y": format_rational(self.y),
            "saturated": self.saturated,
            "parent": self.parent,
        }


def to_records(fam: LaminarFamily,
               duals: DualAssignment) -> tuple[SetRecord, ...]:
    return tuple(
        SetRecord(sid, tuple(sorted(fam.vertices(sid))), duals.y[sid],
                  sid in duals.saturated, fam.parent_of(sid))
        for sid in fam.ids)


def records_from_json(items: list) -> tuple[SetRecord, ...]:
    records = []
    for item in items:
        if not isinstance(item, dict):
            raise ValueError("laminar snapshot entries must be objects")
        missing = {"id", "vertices", "y", "saturated", "parent"} - set(item)
        if missing:
            raise ValueError(f"snapshot entry missing keys {sorted(missing)}")
        records.append(SetRecord(
            item["id"], tuple(item["vertices"]), parse_rational(item["y"]),
            bool(item["saturated"]), item["parent"]))
    return tuple(records)


def from_records(records: Iterable[SetRecord],
                 n: int) -> tuple[LaminarFamily, DualAssignment]:
    """Rebuild a family + duals from snapshot records, validating shape.

    Accepts exactly the families this package produces: singleton ids
    0..n-1, every later id the union of exactly two children, parents
    created after their children.
    """
    recs = sorted(records, key=lambda r: r.sid)
    if [r.sid for r in recs] != list(range(len(recs))):
        raise ValueError("snapshot set ids must be dense from 0")
    if len(recs) < n or len(recs) > 2 * n - 1:
        raise ValueError(f"snapshot has {len(recs)} sets for {n} vertices")
    fam = LaminarFamily(n)
    for v in range(n):
        if recs[v].vertices != (v,):
            raise ValueError(f"set {v} must be the singleton ({v},)")
    children: dict[int, list[int]] = {}
    for r in recs:
        if r.parent is not None:
            if not (r.sid < r.parent < len(recs)):
                raise ValueError(f"set {r.sid} has bad parent {r.parent}")
            children.setdefault(r.parent, []).append(r.sid)
    for r in recs[n:]:
        kids = children.get(r.sid, [])
        if len(kids) != 2:
            raise ValueError(f"set {r.sid} must have exactly two children")
        got = frozenset(r.vertices)
        want = fam.vertices(kids[0]) | fam.vertices(kids[1])
        if fam.vertices(kids[0]) & fam.vertices(kids[1]) or got != want:
            raise ValueError(f"set {r.sid} is not the disjoint union "
                             "of its children")
        for kid in kids:
            if not fam.is_maximal(kid):
                raise ValueError(f"set {kid} merged twice in snapshot")
        nid = fam.merge(kids[0], kids[1])
        assert nid == r.sid
    for r in recs:
        if r.parent != fam.parent_of(r.sid):
            raise ValueError(f"set {r.sid} parent link inconsistent")
        if r.y < 0:
            raise ValueError(f"set {r.sid} has negative dual {r.y}")
    duals = DualAssignment({r.sid: r.y for r in recs},
                           {r.sid for r in recs if r.saturated})
    return fam, duals
