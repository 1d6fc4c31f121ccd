"""Phased presentation of the random family for algorithms with lookahead.

Phase 1 holds every base-clique vertex, phase ``j`` the cliques added at
level ``j``.  After each phase ``l`` isolated dummy vertices are shown, so a
window of ``l`` upcoming arrivals never reaches into the next phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

from ..algorithms import OnlineAlgorithm
from ..graph import Arrival, OnlineInstance
from ..rng import SeedStream
from .rand import ProbabilityEstimate, RandSample, estimate_root_color_probability, sample_gk


def phased(sample: RandSample, l: int) -> RandSample:
    """Re-present ``sample`` phase by phase with ``l`` dummies after every phase.

    Back edges only point to earlier phases or to lower ids inside the same
    phase, so the structure's vertices keep their ids; dummies are numbered
    after them.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    if sample.extra:
        raise ValueError("phase an unpadded sample")
    by_phase: list[list[int]] = [[] for _ in range(sample.k + 1)]
    for v, p in enumerate(sample.phase):
        by_phase[p].append(v)
    arrivals = sample.instance.arrivals
    out: list[Arrival] = []
    bounds = [0]
    phase = list(sample.phase)
    nxt = sample.size_gk
    for j in range(1, sample.k + 1):
        out.extend(arrivals[v] for v in by_phase[j])
        for _ in range(l):
            out.append(Arrival(nxt, ()))
            phase.append(0)
            nxt += 1
        bounds.append(len(out))
    return replace(
        sample,
        instance=OnlineInstance(tuple(out), tuple(bounds)),
        phase=phase,
        extra=nxt - sample.size_gk,
    )


def lookahead_violation(sample: RandSample, l: int) -> tuple[int, int] | None:
    """First ``(step, vertex)`` where the window at a structural step shows a
    vertex of a later phase, or ``None``."""
    arrivals = sample.instance.arrivals
    phase = sample.phase
    for t, a in enumerate(arrivals):
        p = phase[a.vertex]
        if p == 0:
            continue
        for w in arrivals[t + 1:t + 1 + l]:
            if phase[w.vertex] > p:
                return (t, w.vertex)
    return None


def sample_phased(stream: SeedStream | int, d: int, k: int, l: int) -> RandSample:
    return phased(sample_gk(stream, d, k), l)


def theorem_k_lookahead(d: int, n: int, c: Fraction | int) -> int:
    """``floor(2/(3c) * log_12(n/d))`` via ``12^(3ck) <= (n/d)^2``, exactly."""
    c = Fraction(c)
    ratio = Fraction(n, d)
    k = 0
    # 12^(3(k+1)p/q) <= ratio^2  <=>  12^(3(k+1)p) <= ratio^(2q)
    while Fraction(12) ** (3 * (k + 1) * c.numerator) <= ratio ** (2 * c.denominator):
        k += 1
    return k


def max_lookahead(d: int, n: int, c: Fraction | int) -> int:
    """Largest ``l`` with ``l <= c*n / log_12(n/d)``."""
    return math.floor(float(c) * n / math.log(n / d, 12))


@dataclass
class LookaheadResult:
    sample: RandSample
    k: int
    l: int
    n: int
    c: Fraction


def build_lookahead_instance(
    d: int, c: Fraction | int, n: int, l: int, seed: int | SeedStream = 0
) -> LookaheadResult:
    """Sampled, phased and padded instance for the given lookahead."""
    c = Fraction(c)
    if d < 2:
        raise ValueError("d must be >= 2")
    if c < 1:
        raise ValueError("c must be >= 1")
    if n < 12 * d * d:
        raise ValueError("n too small: need n >= 12*d^2")
    if Fraction(n, d) ** c.denominator < Fraction(12) ** (2 * c.numerator):
        raise ValueError("n too small: need n >= d*12^(2c)")
    if l < 0 or l > max_lookahead(d, n, c):
        raise ValueError("lookahead too large: need l <= c*n/log_12(n/d)")
    k = theorem_k_lookahead(d, n, c)
    sample = sample_phased(seed, d, k, l)
    if sample.n > n:
        raise ValueError(f"phased instance has {sample.n} > n = {n} vertices")
    return LookaheadResult(sample.padded(n), k, l, n, c)


def estimate_with_lookahead(
    alg_factory: Callable[[], OnlineAlgorithm],
    d: int,
    k: int,
    l: int,
    trials: int,
    seed: int | SeedStream = 0,
    confidence: float = 0.99,
) -> ProbabilityEstimate:
    """Root-color success rate on phased instances, run with lookahead ``l``."""
    return estimate_root_color_probability(
        alg_factory,
        d,
        k,
        trials,
        seed,
        confidence,
        sampler=lambda s: sample_phased(s, d, k, l),
        lookahead=l,
    )
