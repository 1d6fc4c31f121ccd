"""Adaptive adversary against algorithms with a reordering buffer.

The adversary works in phases and only looks at the coloring at phase
ends.  A subgraph *qualifies* after phase ``j`` when at least half of its
root vertices are colored and those colored roots already show
``>= d'j/8`` colors.  Phase ``j+1`` pairs the first ``2^(k-2j)``
qualifying subgraphs and, for pairs that are still short of the next
threshold, hangs the left one below a fresh ``d'/2``-clique.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..algorithms import BufferedAlgorithm, BufferedSession
from ..graph import CliqueForest, GraphData, OnlineInstance, Transcript, colors_used
from .det import InvariantViolation, floor_log


@dataclass
class Sub:
    id: int
    roots: list[int]  # forest node ids


@dataclass
class PhaseRecord:
    phase: int
    live: int
    qualifying: int
    required: int
    presented: int
    uncolored: int
    case2: int = 0


@dataclass
class BufferAdversaryResult:
    graph: GraphData
    instance: OnlineInstance
    transcript: Transcript
    forest: CliqueForest
    d: int
    eps: float
    n: int
    b: int
    k: int
    k_prime: int
    phases: list[PhaseRecord]
    root_color_count: int
    best_sub_colors: int
    padding: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def even_d(self) -> int:
        return self.d - self.d % 2

    @property
    def required_colors(self) -> int:
        return math.ceil(self.even_d * self.k_prime / 8)

    @property
    def meets_bound(self) -> bool:
        return self.best_sub_colors >= self.required_colors and all(
            p.qualifying >= p.required for p in self.phases
        )


def buffer_parameters(d: int, eps: float, n: int) -> tuple[int, int]:
    """``(k, k')`` with ``k = floor(log2(n/d))`` and
    ``k' = floor((k - log2(4 n^(1-eps) / d)) / 2)``."""
    k = floor_log(n // d, 2)
    inner = k - (2 + (1 - eps) * math.log2(n) - math.log2(d))
    return k, math.floor(inner / 2 + 1e-9)


def max_buffer(n: int, eps: float) -> int:
    return math.floor(n ** (1 - eps) + 1e-9)


class _Adversary:
    def __init__(self, session: BufferedSession, d: int):
        self.session = session
        self.d = d
        self.even = d - d % 2
        self.half = self.even // 2
        self.forest = CliqueForest()
        self.next_id = 0

    def sub(self, roots: list[int]) -> Sub:
        s = Sub(self.next_id, roots)
        self.next_id += 1
        return s

    def root_vertices(self, s: Sub) -> list[int]:
        return [v for r in s.roots for v in self.forest.nodes[r]]

    def colored_root_colors(self, s: Sub) -> set[int]:
        colors = self.session.colors
        return {colors[v] for v in self.root_vertices(s) if v in colors}

    def qualifies(self, s: Sub, j: int) -> bool:
        roots = self.root_vertices(s)
        colored = sum(1 for v in roots if self.session.is_colored(v))
        if 2 * colored < len(roots):
            return False
        return 8 * len(self.colored_root_colors(s)) >= self.even * j

    def base(self) -> Sub:
        vs: list[int] = []
        for _ in range(self.d):
            vs.append(self.session.present(list(vs)))
        root = self.forest.add_node(vs[: self.half])
        other = self.forest.add_node(vs[self.half:])
        self.forest.link(root, other)
        return self.sub([root])

    def merge(self, left: Sub, right: Sub, j: int) -> tuple[Sub, bool]:
        """Combine for phase ``j``; returns the new subgraph and whether a clique was added."""
        union = self.colored_root_colors(left) | self.colored_root_colors(right)
        if 8 * len(union) >= self.even * j:
            return self.sub(left.roots + right.roots), False
        left_roots = self.root_vertices(left)
        clique: list[int] = []
        for _ in range(self.half):
            clique.append(self.session.present(left_roots + clique))
        node = self.forest.add_node(clique)
        for r in left.roots:
            self.forest.link(node, r)
        return self.sub([node] + right.roots), True


def build_buffer_adversary(
    alg: BufferedAlgorithm, d: int, eps: float, n: int, b: int
) -> BufferAdversaryResult:
    """Run the phase construction against ``alg`` with buffer size ``b``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if n < 2 * d * d:
        raise ValueError("n too small: need n >= 2*d^2")
    if eps * math.log2(n) < 7 - 1e-9:
        raise ValueError("n too small: need n >= 2^(7/eps)")
    if b < 0 or b > max_buffer(n, eps):
        raise ValueError("buffer too large: need b <= n^(1-eps)")
    k, kp = buffer_parameters(d, eps, n)
    if kp < 1:
        raise ValueError(f"k' = {kp} < 1 for these parameters")
    session = BufferedSession(alg, b)
    adv = _Adversary(session, d)
    even = adv.even
    cap = n ** (1 - eps)
    phases: list[PhaseRecord] = []
    parked: list[Sub] = []

    live = [adv.base() for _ in range(2 ** (k - 1))]
    for j in range(1, kp + 1):
        if j > 1:
            take = 2 ** (k - 2 * (j - 1))
            chosen, rest = qualifying[:take], qualifying[take:]
            parked.extend(rest)
            picked = {s.id for s in qualifying}
            parked.extend(s for s in live if s.id not in picked)
            start = session.n
            live, case2 = [], 0
            for a, c in zip(chosen[0::2], chosen[1::2]):
                merged, added = adv.merge(a, c, j)
                live.append(merged)
                case2 += added
            presented = session.n - start
        else:
            presented, case2 = session.n, 0
        qualifying = [s for s in live if adv.qualifies(s, j)]
        required = 2 ** (k - 2 * j)
        # with fewer qualifying subgraphs the buffer would hold > b vertices
        if 4 * cap > even * required:
            raise InvariantViolation(f"phase {j}: d'/4 * 2^(k-2j) < n^(1-eps)")
        phases.append(
            PhaseRecord(j, len(live), len(qualifying), required, presented, session.uncolored, case2)
        )
        if len(qualifying) < required:
            raise InvariantViolation(
                f"phase {j}: {len(qualifying)} qualifying subgraphs < 2^(k-2j) = {required}"
            )

    best = max(len(adv.colored_root_colors(s)) for s in qualifying)
    roots = [r for s in live + parked for r in s.roots]
    adv.forest.roots = roots
    if session.n > n:
        raise InvariantViolation(f"construction used {session.n} > n = {n} vertices")
    padding = n - session.n
    for _ in range(padding):
        session.present([0])
    session.finish()
    transcript = session.transcript()
    inst = session.instance()
    result = BufferAdversaryResult(
        graph=inst.to_graph(),
        instance=inst,
        transcript=transcript,
        forest=adv.forest,
        d=d,
        eps=eps,
        n=n,
        b=b,
        k=k,
        k_prime=kp,
        phases=phases,
        root_color_count=len(colors_used(transcript, adv.forest.root_vertices)),
        best_sub_colors=best,
        padding=padding,
    )
    if best < result.required_colors:
        raise InvariantViolation(f"{best} colors on roots < ceil(d'k'/8) = {result.required_colors}")
    if kp < math.ceil(eps * math.log2(n) / 8 - 1e-9):
        raise InvariantViolation(f"k' = {kp} < ceil(eps log2(n) / 8)")
    return result
