"""Immutable directed acyclic graphs with a designated treatment and outcome.

Vertices are string labels; identity is by label.  All operations are pure
functions over the immutable :class:`Dag`, so values can be shared freely
across threads.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "Dag",
    "GraphError",
    "GraphParseError",
    "CycleError",
    "UnknownVertexError",
    "parse_graph",
    "format_graph",
    "topo_sort",
    "ancestors",
    "descendants",
    "parents",
    "children",
    "d_separated",
    "has_causal_path",
    "inducing_path_exists",
]

_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_EDGE_RE = re.compile(r"^(\S+)\s*->\s*(\S+)$")


class GraphError(ValueError):
    """Invalid graph structure, file or query."""


class GraphParseError(GraphError):
    """Malformed graph file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CycleError(GraphError):
    """The directed graph is not acyclic."""


class UnknownVertexError(GraphError):
    """A query referenced a label that is not a declared vertex."""


@dataclass(frozen=True, eq=False)
class Dag:
    """Vertex-labeled DAG with treatment and outcome vertices.

    ``vertices`` keeps declaration order, which is used for deterministic
    tie-breaking everywhere.  Two graphs compare equal iff their vertex sets,
    edge sets, treatment and outcome agree (order-insensitive).
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    treatment: str
    outcome: str

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str]],
        treatment: str,
        outcome: str,
    ):
        vs = tuple(vertices)
        es = tuple((str(u), str(v)) for u, v in edges)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "treatment", treatment)
        object.__setattr__(self, "outcome", outcome)
        self._validate()

    def _validate(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex labels")
        vset = set(self.vertices)
        if len(set(self.edges)) != len(self.edges):
            raise GraphError("duplicate edges")
        pa: dict[str, list[str]] = {v: [] for v in self.vertices}
        ch: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            if u not in vset or v not in vset:
                raise GraphError(f"edge ({u}, {v}) references undeclared vertex")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            pa[v].append(u)
            ch[u].append(v)
        for t, role in ((self.treatment, "treatment"), (self.outcome, "outcome")):
            if t not in vset:
                raise GraphError(f"{role} {t!r} is not a declared vertex")
        if self.treatment == self.outcome:
            raise GraphError("treatment and outcome must differ")
        object.__setattr__(self, "_pa", {v: frozenset(ps) for v, ps in pa.items()})
        object.__setattr__(self, "_ch", {v: frozenset(cs) for v, cs in ch.items()})
        object.__setattr__(self, "_edge_set", frozenset(self.edges))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        order = _kahn(self.vertices, pa, ch)
        object.__setattr__(self, "_topo", order)
        object.__setattr__(self, "_topo_index", {v: i for i, v in enumerate(order)})

    # -- basic accessors ---------------------------------------------------
    def parents(self, v: str) -> frozenset[str]:
        self._check(v)
        return self._pa[v]

    def children(self, v: str) -> frozenset[str]:
        self._check(v)
        return self._ch[v]

    def parent_list(self, v: str) -> tuple[str, ...]:
        """Parents of ``v`` in canonical (topological) order."""
        return self.sort_topologically(self.parents(v))

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self._edge_set

    @property
    def edge_set(self) -> frozenset[tuple[str, str]]:
        return self._edge_set

    def declaration_index(self, v: str) -> int:
        self._check(v)
        return self._index[v]

    def topo_index(self, v: str) -> int:
        self._check(v)
        return self._topo_index[v]

    def sort_topologically(self, labels: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(labels, key=self.topo_index))

    def _check(self, v: str) -> None:
        if v not in self._index:
            raise UnknownVertexError(f"unknown vertex {v!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            set(self.vertices) == set(other.vertices)
            and self._edge_set == other._edge_set
            and self.treatment == other.treatment
            and self.outcome == other.outcome
        )

    def __hash__(self) -> int:
        return hash(
            (frozenset(self.vertices), self._edge_set, self.treatment, self.outcome)
        )

    def __repr__(self) -> str:
        es = ", ".join(f"{u}->{v}" for u, v in self.edges)
        return f"Dag([{', '.join(self.vertices)}], [{es}], A={self.treatment}, Y={self.outcome})"


def _kahn(
    vertices: tuple[str, ...],
    pa: dict[str, list[str]],
    ch: dict[str, list[str]],
) -> tuple[str, ...]:
    """Deterministic topological order: ties broken by declaration order."""
    index = {v: i for i, v in enumerate(vertices)}
    indeg = {v: len(pa[v]) for v in vertices}
    heap = [index[v] for v in vertices if indeg[v] == 0]
    heapq.heapify(heap)
    out: list[str] = []
    while heap:
        v = vertices[heapq.heappop(heap)]
        out.append(v)
        for c in ch[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, index[c])
    if len(out) != len(vertices):
        raise CycleError("graph contains a cycle")
    return tuple(out)


# -- file format -----------------------------------------------------------

def parse_graph(text: str) -> Dag:
    """Parse the line-oriented graph format into a :class:`Dag`.

    Lines: ``# comment``, ``!treatment L``, ``!outcome L``, ``A -> B`` and
    bare labels declaring isolated vertices.  Vertices keep first-appearance
    order.
    """
    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []
    edge_seen: set[tuple[str, str]] = set()
    treatment: str | None = None
    outcome: str | None = None

    def declare(label: str, line_no: int) -> None:
        if not _LABEL_RE.match(label):
            raise GraphParseError(f"invalid label {label!r}", line_no)
        if label not in seen:
            seen.add(label)
            vertices.append(label)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("!"):
            parts = line[1:].split()
            if len(parts) != 2 or parts[0] not in ("treatment", "outcome"):
                raise GraphParseError(f"malformed directive {line!r}", line_no)
            key, label = parts
            if key == "treatment":
                if treatment is not None:
                    raise GraphParseError("duplicate !treatment directive", line_no)
                treatment = label
            else:
                if outcome is not None:
                    raise GraphParseError("duplicate !outcome directive", line_no)
                outcome = label
            continue
        m = _EDGE_RE.match(line)
        if m:
            u, v = m.group(1), m.group(2)
            declare(u, line_no)
            declare(v, line_no)
            if u == v:
                raise GraphParseError(f"self-loop at {u!r}", line_no)
            if (u, v) in edge_seen:
                raise GraphParseError(f"duplicate edge {u} -> {v}", line_no)
            edge_seen.add((u, v))
            edges.append((u, v))
            continue
        if "->" in line:
            raise GraphParseError(f"malformed edge line {line!r}", line_no)
        declare(line, line_no)

    if treatment is None or treatment not in seen:
        raise GraphError("treatment is missing or undeclared")
    if outcome is None or outcome not in seen:
        raise GraphError("outcome is missing or undeclared")
    return Dag(vertices, edges, treatment, outcome)


def format_graph(g: Dag) -> str:
    """Render a Dag in the graph file format; re-parsing restores it exactly."""
    lines = [f"!treatment {g.treatment}", f"!outcome {g.outcome}"]
    lines.extend(g.vertices)
    lines.extend(f"{u} -> {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


# -- reachability ----------------------------------------------------------

def topo_sort(g: Dag) -> tuple[str, ...]:
    """Topological order with declaration-order tie-breaking (deterministic)."""
    return g._topo


def _as_set(g: Dag, s: Iterable[str]) -> set[str]:
    out = set()
    for v in s:
        g._check(v)
        out.add(v)
    return out


def ancestors(g: Dag, s: Iterable[str]) -> frozenset[str]:
    """Reflexive ancestor set of ``s``: includes ``s`` itself."""
    frontier = _as_set(g, s)
    out = set(frontier)
    while frontier:
        v = frontier.pop()
        for p in g.parents(v):
            if p not in out:
                out.add(p)
                frontier.add(p)
    return frozenset(out)


def descendants(g: Dag, s: Iterable[str]) -> frozenset[str]:
    """Reflexive descendant set of ``s``."""
    frontier = _as_set(g, s)
    out = set(frontier)
    while frontier:
        v = frontier.pop()
        for c in g.children(v):
            if c not in out:
                out.add(c)
                frontier.add(c)
    return frozenset(out)


def parents(g: Dag, s: Iterable[str]) -> frozenset[str]:
    """Union of parent sets of ``s`` (not reflexive)."""
    out: set[str] = set()
    for v in _as_set(g, s):
        out |= g.parents(v)
    return frozenset(out)


def children(g: Dag, s: Iterable[str]) -> frozenset[str]:
    """Union of child sets of ``s`` (not reflexive)."""
    out: set[str] = set()
    for v in _as_set(g, s):
        out |= g.children(v)
    return frozenset(out)


def d_separated(
    g: Dag, x: Iterable[str], y: Iterable[str], z: Iterable[str]
) -> bool:
    """Decide d-separation of ``x`` and ``y`` given ``z``.

    Overlaps are permitted: the query is first rewritten to
    ``x \\ z`` vs ``y \\ z`` given ``z``; an empty side is separated by
    convention.  Overlapping x/y (after the rewrite) are d-connected.
    """
    zs = _as_set(g, z)
    xs = _as_set(g, x) - zs
    ys = _as_set(g, y) - zs
    if not xs or not ys:
        return True
    if xs & ys:
        return False
    an_z = ancestors(g, zs) if zs else frozenset()
    # Reachability over (vertex, how-entered) states; "child" means the trail
    # entered along an edge leaving the vertex, "parent" along an edge into it.
    stack: list[tuple[str, str]] = [(v, "child") for v in xs]
    visited: set[tuple[str, str]] = set()
    while stack:
        state = stack.pop()
        if state in visited:
            continue
        visited.add(state)
        v, entered = state
        if entered == "child":
            if v in zs:
                continue
            if v in ys:
                return False
            for p in g.parents(v):
                stack.append((p, "child"))
            for c in g.children(v):
                stack.append((c, "parent"))
        else:
            if v not in zs:
                if v in ys:
                    return False
                for c in g.children(v):
                    stack.append((c, "parent"))
            if v in an_z:
                for p in g.parents(v):
                    stack.append((p, "child"))
    return True


def has_causal_path(
    g: Dag, frm: str, to: str, avoiding: Iterable[str] = ()
) -> bool:
    """True iff a directed path ``frm -> ... -> to`` has no interior vertex
    in ``avoiding`` (endpoints are exempt)."""
    g._check(frm)
    g._check(to)
    avoid = _as_set(g, avoiding)
    if frm == to:
        return True
    stack = [frm]
    seen = {frm}
    while stack:
        v = stack.pop()
        for c in g.children(v):
            if c == to:
                return True
            if c in avoid or c in seen:
                continue
            seen.add(c)
            stack.append(c)
    return False


def inducing_path_exists(
    g: Dag, a: str, b: str, c: Iterable[str] = ()
) -> bool:
    """True iff some path from ``a`` to ``b`` has no non-collider in ``c``
    and every collider ancestral to ``{a, b}``.

    A single edge counts as a trivial inducing path.  Exhaustive simple-path
    search; intended for desk-scale graphs.
    """
    g._check(a)
    g._check(b)
    cs = _as_set(g, c)
    if a == b:
        raise GraphError("inducing path endpoints must differ")
    if a in cs or b in cs:
        raise GraphError("endpoints may not belong to the conditioning set")
    an_ab = ancestors(g, {a, b})

    def step(v: str, into_v: bool, path: set[str]) -> bool:
        # v is an interior vertex entered via an edge pointing into it iff
        # into_v; try all continuations.
        for u in g.children(v) | g.parents(v):
            if u in path:
                continue
            out_into_v = g.has_edge(u, v)  # next edge points into v
            collider = into_v and out_into_v
            if collider and v not in an_ab:
                continue
            if not collider and v in cs:
                continue
            into_u = g.has_edge(v, u)
            if u == b:
                return True
            if step(u, into_u, path | {u}):
                return True
        return False

    for u in g.children(a) | g.parents(a):
        if u == b:
            return True
        if step(u, g.has_edge(a, u), {a, u}):
            return True
    return False
