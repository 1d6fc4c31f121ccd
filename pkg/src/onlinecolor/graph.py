"""Graph and online-presentation data model.

Vertex ids are dense 0-based integers.  An :class:`OnlineInstance` stores
the arrival order explicitly, so a graph may be built in one order and
presented in another.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence


@dataclass(frozen=True)
class GraphData:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    adj: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adj):
            if v in nbrs:
                raise ValueError(f"self-loop at vertex {v}")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise ValueError(f"neighbor id {u} out of range")
                if v not in self.adj[u]:
                    raise ValueError(f"asymmetric edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> GraphData:
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(s) for s in adj))

    @classmethod
    def empty(cls, n: int) -> GraphData:
        return cls(n, tuple(frozenset() for _ in range(n)))

    def edges(self) -> list[tuple[int, int]]:
        """Sorted edge list with ``u < v``."""
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    @property
    def m(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def induced(self, vertices: Sequence[int]) -> GraphData:
        """Induced subgraph, relabelled to ``0..len(vertices)-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        adj = tuple(
            frozenset(index[u] for u in self.adj[v] if u in index) for v in vertices
        )
        return GraphData(len(vertices), adj)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [], [s]
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.adj[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            out.append(sorted(comp))
        return out


@dataclass(frozen=True, slots=True)
class Arrival:
    vertex: int
    back_edges: tuple[int, ...] = ()


@dataclass(frozen=True)
class OnlineInstance:
    """Ordered vertex arrivals; ``phase_bounds`` optionally cuts them into phases.

    ``phase_bounds`` holds arrival indices ``[b_0, b_1, ..., b_p]`` with phase
    ``j`` covering ``arrivals[b_{j-1}:b_j]``.
    """

    arrivals: tuple[Arrival, ...]
    phase_bounds: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.arrivals)

    @property
    def order(self) -> list[int]:
        return [a.vertex for a in self.arrivals]

    def to_graph(self) -> GraphData:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for a in self.arrivals:
            for u in a.back_edges:
                adj[a.vertex].add(u)
                adj[u].add(a.vertex)
        return GraphData(self.n, tuple(frozenset(s) for s in adj))

    @classmethod
    def from_graph(
        cls,
        g: GraphData,
        order: Sequence[int] | None = None,
        phase_bounds: Sequence[int] | None = None,
    ) -> OnlineInstance:
        """Present ``g`` in ``order`` (default: ascending ids)."""
        if order is None:
            order = range(g.n)
        position = {v: t for t, v in enumerate(order)}
        arrivals = tuple(
            Arrival(v, tuple(sorted(u for u in g.adj[v] if position[u] < position[v])))
            for v in order
        )
        return cls(arrivals, None if phase_bounds is None else tuple(phase_bounds))

    def phase_of_step(self) -> list[int]:
        """Phase number (1-based) of every arrival index; 0 when unphased."""
        out = [0] * self.n
        if self.phase_bounds is None:
            return out
        for j in range(1, len(self.phase_bounds)):
            for t in range(self.phase_bounds[j - 1], self.phase_bounds[j]):
                out[t] = j
        return out


@dataclass
class CliqueForest:
    """Tree-of-cliques metadata.

    ``nodes[i]`` is the vertex set of tree node ``i``; ``tree_edges`` are
    ``(parent, child)`` node pairs; ``roots`` lists the root node of every tree.
    """

    nodes: list[tuple[int, ...]] = field(default_factory=list)
    tree_edges: list[tuple[int, int]] = field(default_factory=list)
    roots: list[int] = field(default_factory=list)
    _kids: dict[int, list[int]] = field(default_factory=dict, repr=False, compare=False)

    def add_node(self, vertices: Iterable[int]) -> int:
        self.nodes.append(tuple(vertices))
        return len(self.nodes) - 1

    def link(self, parent: int, child: int) -> None:
        self.tree_edges.append((parent, child))
        self._kids.setdefault(parent, []).append(child)

    @property
    def root_vertices(self) -> list[int]:
        return [v for r in self.roots for v in self.nodes[r]]

    def children(self, node: int) -> list[int]:
        if not self._kids and self.tree_edges:
            for p, c in self.tree_edges:
                self._kids.setdefault(p, []).append(c)
        return self._kids.get(node, [])

    def subtree_nodes(self, root_nodes: Iterable[int]) -> list[int]:
        out, stack = [], list(root_nodes)
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children(x))
        return out

    def audit(
        self,
        g: GraphData,
        root_nodes: Iterable[int] | None = None,
        node_size: int | None = None,
        union_size: int | None = None,
        closed: bool = False,
    ) -> list[str]:
        """Check the clique-tree invariants below ``root_nodes`` (default: all roots).

        Nodes are disjoint cliques, every tree edge joins two nodes into a
        clique, every node has one parent, and no graph edge runs between
        nodes that are not tree neighbours.  ``node_size`` / ``union_size``
        additionally pin root-node sizes and tree-edge union sizes; with
        ``closed`` no edge may leave the checked part at all.
        """
        roots = list(self.roots if root_nodes is None else root_nodes)
        problems = []
        parent: dict[int, int] = {r: -1 for r in roots}
        order = []
        stack = list(roots)
        while stack:
            x = stack.pop()
            order.append(x)
            for c in self.children(x):
                if c in parent:
                    problems.append(f"node {c} reached twice (not a tree)")
                    continue
                parent[c] = x
                stack.append(c)
        node_of: dict[int, int] = {}
        for i in order:
            vs = self.nodes[i]
            for v in vs:
                if v in node_of:
                    problems.append(f"vertex {v} in nodes {node_of[v]} and {i}")
                node_of[v] = i
            if not _is_clique(g, vs):
                problems.append(f"node {i} is not a clique")
            if node_size is not None and i in roots and len(vs) != node_size:
                problems.append(f"root node {i} has {len(vs)} vertices, expected {node_size}")
            p = parent[i]
            if p >= 0:
                union = self.nodes[p] + vs
                if not _is_clique(g, union):
                    problems.append(f"tree edge {p}-{i} does not form a clique")
                if union_size is not None and len(union) != union_size:
                    problems.append(f"tree edge {p}-{i} spans {len(union)} vertices, expected {union_size}")
        for v, i in node_of.items():
            for u in g.adj[v]:
                j = node_of.get(u)
                if j is None:
                    if closed:
                        problems.append(f"edge {v}-{u} leaves the checked forest")
                elif j != i and parent[i] != j and parent[j] != i:
                    problems.append(f"stray edge {v}-{u} between nodes {i} and {j}")
        return problems


def _is_clique(g: GraphData, vertices: Sequence[int]) -> bool:
    return all(
        vertices[j] in g.adj[vertices[i]]
        for i in range(len(vertices))
        for j in range(i + 1, len(vertices))
    )


class UncoloredVertexError(KeyError):
    pass


@dataclass
class Transcript:
    """Colors in the order they were committed; never revised."""

    steps: list[tuple[int, int]] = field(default_factory=list)
    committed_count_per_step: list[int] | None = None

    @cached_property
    def colors(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v, c in self.steps:
            if v in out:
                raise ValueError(f"vertex {v} colored twice")
            out[v] = c
        return out

    def color(self, v: int) -> int:
        try:
            return self.colors[v]
        except KeyError:
            raise UncoloredVertexError(f"vertex not yet colored: {v}") from None

    @property
    def num_colors(self) -> int:
        return len(set(self.colors.values()))

    def colored_subset(self, subset: Iterable[int]) -> list[int]:
        return [v for v in subset if v in self.colors]

    def is_proper(self, g: GraphData) -> bool:
        return self.first_conflict(g) is None

    def first_conflict(self, g: GraphData) -> tuple[int, int] | None:
        colors = self.colors
        for v, c in colors.items():
            if not (isinstance(c, int) and c >= 1):
                return (v, v)
            for u in g.adj[v]:
                if u > v and colors.get(u) == c:
                    return (v, u)
        return None


def colors_used(t: Transcript, subset: Iterable[int]) -> set[int]:
    """Set of colors the transcript assigns to ``subset``."""
    colors = t.colors
    out = set()
    for v in subset:
        try:
            out.add(colors[v])
        except KeyError:
            raise UncoloredVertexError(f"vertex not yet colored: {v}") from None
    return out


def validate_instance(inst: OnlineInstance, g: GraphData) -> str | None:
    """First violated instance constraint, or ``None`` when consistent."""
    order = inst.order
    if len(order) != g.n or sorted(order) != list(range(g.n)):
        return "not a permutation"
    position = {v: t for t, v in enumerate(order)}
    for a in inst.arrivals:
        for u in a.back_edges:
            if u == a.vertex:
                return f"self-loop at vertex {u}"
            if position[u] >= position[a.vertex]:
                return f"forward edge {a.vertex}->{u}"
    if inst.to_graph() != g:
        return "edge set differs from graph"
    if inst.phase_bounds is not None:
        b = inst.phase_bounds
        if list(b) != sorted(b) or (b and (b[0] != 0 or b[-1] != inst.n)):
            return "phase bounds do not partition the arrivals"
    return None


# --- file formats -----------------------------------------------------------


def write_dimacs(g: GraphData, path: str | Path, comment: str | None = None) -> None:
    lines = []
    if comment:
        lines.extend(f"c {line}" for line in comment.splitlines())
    lines.append(f"p edge {g.n} {g.m}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n")


def read_dimacs(path: str | Path) -> GraphData:
    n = None
    edges = []
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
        elif parts[0] == "e":
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            if u != v:
                edges.append((u, v))
    if n is None:
        raise ValueError(f"{path}: missing problem line")
    return GraphData.from_edges(n, edges)


def to_json(inst: OnlineInstance, transcript: Transcript | None = None) -> dict:
    return {
        "arrivals": [{"v": a.vertex, "back": list(a.back_edges)} for a in inst.arrivals],
        "phases": list(inst.phase_bounds or []),
        "steps": [[v, c] for v, c in transcript.steps] if transcript else [],
    }


def from_json(data: dict) -> tuple[OnlineInstance, Transcript | None]:
    arrivals = tuple(Arrival(a["v"], tuple(a["back"])) for a in data["arrivals"])
    phases = data.get("phases") or None
    inst = OnlineInstance(arrivals, tuple(phases) if phases else None)
    steps = data.get("steps") or []
    transcript = Transcript([(v, c) for v, c in steps]) if steps else None
    return inst, transcript


def dump_json(
    path: str | Path, inst: OnlineInstance, transcript: Transcript | None = None
) -> None:
    Path(path).write_text(json.dumps(to_json(inst, transcript)))


def load_json(path: str | Path) -> tuple[OnlineInstance, Transcript | None]:
    return from_json(json.loads(Path(path).read_text()))
