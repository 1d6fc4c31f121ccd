"""Oblivious hard distribution for randomized online algorithms.

A level-``k`` graph consists of twelve independent level-``k-1`` graphs,
grouped into six (left, right) pairs.  For each pair one fair bit decides
whether a ``d/2``-clique ``R_i`` is attached to all root vertices of the
left member.  The whole instance is fixed by the seed before any algorithm
sees it, which is what makes the distribution usable against randomized
algorithms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from statistics import NormalDist
from typing import Callable, Sequence

from ..algorithms import OnlineAlgorithm, run_online, run_online_lookahead
from ..graph import Arrival, CliqueForest, GraphData, OnlineInstance, Transcript, colors_used
from ..rng import SeedStream
from .det import floor_log

PAIRS = 6
CHILDREN = 2 * PAIRS


@dataclass
class RandNode:
    """One node of a sampled recursive structure.

    Level-1 nodes stand for a base clique; higher levels hold twelve
    children and six bits.  ``vertices`` / ``added`` are filled in when the
    structure is realized as a graph.
    """

    level: int
    bits: tuple[int, ...] = ()
    children: tuple[RandNode, ...] = ()
    vertices: tuple[int, ...] = ()
    added: tuple[tuple[int, ...] | None, ...] = ()
    root_nodes: list[int] = field(default_factory=list)

    def count_base(self) -> int:
        if self.level == 1:
            return 1
        return sum(c.count_base() for c in self.children)


def sample_descriptor(stream: SeedStream, k: int) -> RandNode:
    """Uniform draw of the recursive structure; child ``m`` uses ``stream.child(m)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return RandNode(1)
    return RandNode(
        k,
        bits=stream.bits(PAIRS),
        children=tuple(sample_descriptor(stream.child(m), k - 1) for m in range(CHILDREN)),
    )


def fixed_descriptor(k: int, bits: Sequence[int]) -> RandNode:
    """Level-``k`` structure whose every internal node uses the same ``bits``."""
    if k == 1:
        return RandNode(1)
    return RandNode(
        k, bits=tuple(bits), children=tuple(fixed_descriptor(k - 1, bits) for _ in range(CHILDREN))
    )


@dataclass
class RandSample:
    """A realized graph from the distribution plus its presentation.

    ``instance`` may carry vertices beyond the structure (padding, dummies,
    a connector); ``size_gk`` counts only the structure's own vertices.
    """

    descriptor: RandNode
    d: int
    k: int
    instance: OnlineInstance
    forest: CliqueForest
    phase: list[int]
    size_gk: int
    extra: int = 0

    @cached_property
    def graph(self) -> GraphData:
        return self.instance.to_graph()

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def even_d(self) -> int:
        return self.d - self.d % 2

    @property
    def root_vertices(self) -> list[int]:
        return self.forest.root_vertices

    def bound_met(self, root_colors: int) -> bool:
        """``root_colors >= d'k/4`` as an exact rational comparison."""
        return 4 * root_colors >= self.even_d * self.k

    def run(self, alg: OnlineAlgorithm, lookahead: int = 0) -> Transcript:
        return run_online_lookahead(alg, self.instance, lookahead) if lookahead else run_online(alg, self.instance)

    def root_colors(self, transcript: Transcript) -> int:
        return len(colors_used(transcript, self.root_vertices))

    def padded(self, n: int, anchor: int = 0) -> RandSample:
        """Append degree-1 vertices hanging off ``anchor`` up to ``n`` vertices."""
        if n < self.n:
            raise ValueError(f"sample already has {self.n} > {n} vertices")
        arrivals = list(self.instance.arrivals)
        for v in range(self.n, n):
            arrivals.append(Arrival(v, (anchor,)))
        return self._extended(arrivals, n - self.n)

    def with_connector(self) -> RandSample:
        """Append one vertex adjacent to the lowest-id root vertex of every tree."""
        targets = tuple(sorted(min(self.forest.nodes[r]) for r in self.forest.roots))
        arrivals = list(self.instance.arrivals) + [Arrival(self.n, targets)]
        return self._extended(arrivals, 1)

    def _extended(self, arrivals: list[Arrival], added: int) -> RandSample:
        bounds = self.instance.phase_bounds
        if bounds is not None:
            bounds = bounds + (len(arrivals),)
        return replace(
            self,
            instance=OnlineInstance(tuple(arrivals), bounds),
            phase=self.phase + [0] * added,
            extra=self.extra + added,
        )


class _Realizer:
    def __init__(self, d: int):
        self.d = d
        self.even = d - d % 2
        self.half = self.even // 2
        self.back: list[tuple[int, ...]] = []
        self.phase: list[int] = []
        self.forest = CliqueForest()

    def vertex(self, back: list[int], phase: int) -> int:
        self.back.append(tuple(back))
        self.phase.append(phase)
        return len(self.back) - 1

    def visit(self, node: RandNode) -> list[int]:
        forest = self.forest
        if node.level == 1:
            vs: list[int] = []
            for _ in range(self.d):
                vs.append(self.vertex(vs, 1))
            root = forest.add_node(vs[: self.half])
            other = forest.add_node(vs[self.half:])
            forest.link(root, other)
            node.vertices = tuple(vs)
            node.root_nodes = [root]
            return node.root_nodes
        roots: list[int] = []
        added = []
        for i in range(PAIRS):
            left = self.visit(node.children[2 * i])
            right = self.visit(node.children[2 * i + 1])
            if node.bits[i]:
                left_roots = [v for r in left for v in forest.nodes[r]]
                clique: list[int] = []
                for _ in range(self.half):
                    clique.append(self.vertex(left_roots + clique, node.level))
                top = forest.add_node(clique)
                for r in left:
                    forest.link(top, r)
                roots.append(top)
                roots.extend(right)
                added.append(tuple(clique))
            else:
                roots.extend(left)
                roots.extend(right)
                added.append(None)
        node.added = tuple(added)
        node.root_nodes = roots
        return roots


def realize(descriptor: RandNode, d: int) -> RandSample:
    """Turn a structure into vertices, presented in the recursive order
    (left subgraph, right subgraph, then the pair's clique)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    r = _Realizer(d)
    roots = r.visit(descriptor)
    r.forest.roots = list(roots)
    arrivals = tuple(Arrival(v, back) for v, back in enumerate(r.back))
    return RandSample(
        descriptor=descriptor,
        d=d,
        k=descriptor.level,
        instance=OnlineInstance(arrivals),
        forest=r.forest,
        phase=r.phase,
        size_gk=len(arrivals),
    )


def sample_gk(stream: SeedStream | int, d: int, k: int) -> RandSample:
    if not isinstance(stream, SeedStream):
        stream = SeedStream(stream)
    return realize(sample_descriptor(stream, k), d)


def enumerate_gk_tiny(d: int, k: int) -> list[RandSample]:
    """Whole support of the distribution for ``k <= 2``, each outcome equally likely."""
    if k > 2:
        raise ValueError("support too large: enumeration is limited to k <= 2")
    if k == 1:
        return [realize(RandNode(1), d)]
    return [realize(fixed_descriptor(2, bits), d) for bits in itertools.product((0, 1), repeat=PAIRS)]


def exact_success_fraction(alg_factory: Callable[[], OnlineAlgorithm], d: int, k: int = 2) -> Fraction:
    """Exact probability that the root vertices get ``>= d'k/4`` colors."""
    outcomes = enumerate_gk_tiny(d, k)
    wins = 0
    for sample in outcomes:
        t = sample.run(alg_factory())
        wins += sample.bound_met(sample.root_colors(t))
    return Fraction(wins, len(outcomes))


def wilson_bounds(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    """One-sided Wilson score bounds: each side holds with probability ``confidence``."""
    if trials <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(confidence)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class ProbabilityEstimate:
    trials: int
    successes: int
    p_hat: float
    lower: float
    upper: float
    root_colors: list[int]
    total_colors: list[int]
    sizes: list[int]

    @property
    def mean_root_colors(self) -> float:
        return sum(self.root_colors) / len(self.root_colors)


def estimate_root_color_probability(
    alg_factory: Callable[[], OnlineAlgorithm],
    d: int,
    k: int,
    trials: int,
    seed: int | SeedStream = 0,
    confidence: float = 0.99,
    sampler: Callable[[SeedStream], RandSample] | None = None,
    lookahead: int = 0,
) -> ProbabilityEstimate:
    """Fraction of trials whose root vertices get ``>= d'k/4`` colors.

    Trial ``i`` samples its instance from ``seed.child(i)``; the instance is
    fixed before the (fresh) algorithm runs.  ``sampler`` swaps in another
    presentation of the same distribution, e.g. the phased one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    root = seed if isinstance(seed, SeedStream) else SeedStream(seed)
    if sampler is None:
        sampler = lambda s: sample_gk(s, d, k)  # noqa: E731
    roots, totals, sizes = [], [], []
    wins = 0
    for i in range(trials):
        sample = sampler(root.child(i))
        t = sample.run(alg_factory(), lookahead)
        rc = sample.root_colors(t)
        roots.append(rc)
        totals.append(t.num_colors)
        sizes.append(sample.n)
        wins += sample.bound_met(rc)
    lo, hi = wilson_bounds(wins, trials, confidence)
    return ProbabilityEstimate(trials, wins, wins / trials, lo, hi, roots, totals, sizes)


def theorem_k_rand(d: int, n: int) -> int:
    """``floor(log_12(n/d))`` in exact integer arithmetic."""
    return floor_log(n // d, 12)


def build_theorem_rand(d: int, n: int, seed: int | SeedStream = 0) -> RandSample:
    """Sampled ``n``-vertex instance with ``k = floor(log_12(n/d))``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if n < 12 * d * d:
        raise ValueError("n too small for stated bound: need n >= 12*d^2")
    k = theorem_k_rand(d, n)
    sample = sample_gk(seed, d, k)
    return sample.padded(n)
