"""Adaptive adversary against deterministic online algorithms.

The adversary grows a forest of clique trees.  Each tree node is a clique
of ``d/2`` vertices and tree-adjacent nodes form a ``d``-clique.  Two
recursively built forests are either kept side by side (when their root
vertices already show enough colors) or the left one is hung below a fresh
``d/2``-clique that then becomes a root.  Either way the root vertices of
the level-``k`` forest carry at least ``d*k/4`` colors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from types import SimpleNamespace

from ..algorithms import OnlineAlgorithm, Session
from ..graph import CliqueForest, GraphData, OnlineInstance, Transcript, colors_used


class InvariantViolation(AssertionError):
    pass


@dataclass
class DetAdversaryResult:
    graph: GraphData
    instance: OnlineInstance
    forest: CliqueForest
    transcript: Transcript
    d: int
    k: int
    root_color_count: int
    session: Session
    size_gk: int
    base_graphs: int
    connector: int | None = None
    padding: int = 0
    case2_count: int = 0

    @property
    def even_d(self) -> int:
        return self.d - self.d % 2

    @property
    def meets_root_bound(self) -> bool:
        """``|C(r(G_k))| >= d'k/4`` compared exactly (``d' = d`` rounded down to even)."""
        return 4 * self.root_color_count >= self.even_d * self.k

    @property
    def total_colors(self) -> int:
        return self.transcript.num_colors


class DetConstruction:
    """Builds ``G_k`` against one live session (even ``d`` only).

    With ``audit=True`` the clique-tree invariants of every freshly built
    subforest are re-checked after each case decision.
    """

    def __init__(self, session: Session, d: int, audit: bool = False):
        if d < 2 or d % 2:
            raise ValueError("construction needs an even d >= 2")
        self.session = session
        self.d = d
        self.half = d // 2
        self.audit = audit
        self.forest = CliqueForest()
        self.base: list[tuple[int, int]] = []  # (root node, second node) per G_1
        self.case2_count = 0
        self._adj: list[set[int]] = []

    def _present(self, back: list[int]) -> int:
        v = self.session.present(back)
        self._adj.append(set(back))
        for u in back:
            self._adj[u].add(v)
        return v

    def root_vertices(self, roots: list[int]) -> list[int]:
        nodes = self.forest.nodes
        return [v for r in roots for v in nodes[r]]

    def build_base_g1(self) -> list[int]:
        """Present a ``d``-clique; its first ``d/2`` vertices form the root node."""
        vs: list[int] = []
        for _ in range(self.d):
            vs.append(self._present(list(vs)))
        root = self.forest.add_node(vs[: self.half])
        other = self.forest.add_node(vs[self.half:])
        self.forest.link(root, other)
        self.base.append((root, other))
        self._check(1, [root])
        return [root]

    def build(self, k: int) -> list[int]:
        """Build ``G_k``; returns the root nodes of its trees."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if k == 1:
            return self.build_base_g1()
        left = self.build(k - 1)
        right = self.build(k - 1)
        left_roots = self.root_vertices(left)
        right_roots = self.root_vertices(right)
        session = self.session
        union = session.colors_of(left_roots) | session.colors_of(right_roots)
        if 4 * len(union) >= self.d * k:
            roots = left + right
        else:
            clique: list[int] = []
            for _ in range(self.half):
                clique.append(self._present(left_roots + clique))
            node = self.forest.add_node(clique)
            for r in left:
                self.forest.link(node, r)
            roots = [node] + right
            self.case2_count += 1
            before = session.colors_of(right_roots)
            gained = len(session.colors_of(clique) - before)
            if 4 * gained < self.d:
                raise InvariantViolation(
                    f"k={k}: new clique added {gained} colors, fewer than d/4"
                )
        self._check(k, roots)
        return roots

    def _check(self, k: int, roots: list[int]) -> None:
        count = len(self.session.colors_of(self.root_vertices(roots)))
        if 4 * count < self.d * k:
            raise InvariantViolation(f"k={k}: root vertices use {count} colors < d*k/4")
        if not self.audit:
            return
        g = SimpleNamespace(adj=self._adj)
        nodes = self.forest.subtree_nodes(roots)
        problems = self.forest.audit(
            g, roots, node_size=self.half, union_size=self.d, closed=True
        )
        size = sum(len(self.forest.nodes[i]) for i in nodes)
        if 2 * size > self.d * (2 ** (k + 1) - 1):
            problems.append(f"subforest has {size} vertices > d/2(2^(k+1)-1)")
        if problems:
            raise InvariantViolation(f"k={k}: " + "; ".join(problems))

    def extend_odd(self) -> None:
        """Add one vertex per ``G_1`` adjacent to its whole clique (odd ``d``)."""
        for root, other in self.base:
            clique = list(self.forest.nodes[root] + self.forest.nodes[other])
            v = self._present(clique)
            self.forest.nodes[other] = self.forest.nodes[other] + (v,)


def _result(con: DetConstruction, d: int, k: int, roots: list[int]) -> DetAdversaryResult:
    session = con.session
    con.forest.roots = list(roots)
    transcript = session.transcript()
    inst = session.instance()
    return DetAdversaryResult(
        graph=inst.to_graph(),
        instance=inst,
        forest=con.forest,
        transcript=transcript,
        d=d,
        k=k,
        root_color_count=len(colors_used(transcript, con.forest.root_vertices)),
        session=session,
        size_gk=session.n,
        base_graphs=len(con.base),
        case2_count=con.case2_count,
    )


def _session(alg: OnlineAlgorithm | Session) -> Session:
    return alg if isinstance(alg, Session) else Session(alg)


def build_base_g1(alg: OnlineAlgorithm | Session, d: int) -> DetAdversaryResult:
    return build_gk_det(alg, d, 1)


def build_gk_det(
    alg: OnlineAlgorithm | Session, d: int, k: int, audit: bool = False
) -> DetAdversaryResult:
    """Adaptive ``G_k`` for even ``d``."""
    if d % 2:
        raise ValueError("odd d: use odd_d_extension")
    con = DetConstruction(_session(alg), d, audit)
    roots = con.build(k)
    return _result(con, d, k, roots)


def odd_d_extension(
    alg: OnlineAlgorithm | Session, d: int, k: int, audit: bool = False
) -> DetAdversaryResult:
    """Run the construction for ``d-1`` and raise every ``G_1`` to a ``d``-clique."""
    if d < 3 or d % 2 == 0:
        raise ValueError("odd_d_extension needs an odd d >= 3")
    con = DetConstruction(_session(alg), d - 1, audit)
    roots = con.build(k)
    con.extend_odd()
    return _result(con, d, k, roots)


def det_adversary(
    alg: OnlineAlgorithm | Session, d: int, k: int, connector: bool = False, audit: bool = False
) -> DetAdversaryResult:
    """Either parity of ``d``, optionally linked into one component."""
    build = odd_d_extension if d % 2 else build_gk_det
    result = build(alg, d, k, audit=audit)
    return add_connector(result) if connector else result


def _refresh(result: DetAdversaryResult, **changes) -> DetAdversaryResult:
    inst = result.session.instance()
    return replace(
        result,
        graph=inst.to_graph(),
        instance=inst,
        transcript=result.session.transcript(),
        **changes,
    )


def add_connector(result: DetAdversaryResult) -> DetAdversaryResult:
    """Present ``v_f`` adjacent to the lowest-id root vertex of every tree."""
    if result.connector is not None:
        raise ValueError("connector already present")
    forest = result.forest
    targets = sorted(min(forest.nodes[r]) for r in forest.roots)
    v = result.session.present(targets)
    return _refresh(result, connector=v)


def floor_log(x: int, base: int) -> int:
    """Largest ``k`` with ``base**k <= x`` (exact integer arithmetic; x >= 1)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    k, p = 0, base
    while p <= x:
        k += 1
        p *= base
    return k


def pad_to(result: DetAdversaryResult, n: int, anchor: int = 0) -> DetAdversaryResult:
    """Present degree-1 vertices hanging off ``anchor`` until there are ``n``."""
    session = result.session
    if session.n > n:
        raise ValueError(f"instance already has {session.n} > {n} vertices")
    extra = n - session.n
    for _ in range(extra):
        session.present([anchor])
    return _refresh(result, padding=result.padding + extra)


def build_theorem_det(alg: OnlineAlgorithm | Session, d: int, n: int, audit: bool = False) -> DetAdversaryResult:
    """``n``-vertex chordal graph with ``chi = d`` built with ``k = floor(log2(n/d))``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if n < 2 * d * d:
        raise ValueError("n too small for stated bound: need n >= 2*d^2")
    k = floor_log(n // d, 2)
    result = pad_to(det_adversary(alg, d, k, audit=audit), n)
    bound = math.ceil(d * math.log2(n) / 32)
    if result.root_color_count < bound:
        raise InvariantViolation(
            f"{result.root_color_count} root colors < ceil(d log2(n) / 32) = {bound}"
        )
    return result
