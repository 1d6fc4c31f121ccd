"""Online coloring algorithms and the runners that drive them.

An :class:`OnlineAlgorithm` receives one :class:`~onlinecolor.graph.Arrival`
at a time (plus an optional lookahead window) and returns a color.  A
:class:`BufferedAlgorithm` may instead return any number of commitments
``(vertex, color)`` per step, subject to the buffer constraint.

Runners never trust the algorithm: every color is checked for feasibility
and a :class:`ProtocolViolation` names the offending step.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Sequence

from .graph import Arrival, GraphData, OnlineInstance, Transcript
from .rng import SeedStream


class ProtocolViolation(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"protocol violation at step {step}: {message}")
        self.step = step


class BufferOverflow(ProtocolViolation):
    def __init__(self, step: int, committed: int, b: int):
        RuntimeError.__init__(
            self, f"buffer overflow at step {step}: {committed} colored, need >= {step - b}"
        )
        self.step = step


def smallest_missing(used: set[int], start: int = 1) -> int:
    c = start
    while c in used:
        c += 1
    return c


class OnlineAlgorithm:
    """Base class; subclasses implement :meth:`choose`."""

    name = "abstract"

    def __init__(self) -> None:
        self.colors: dict[int, int] = {}
        self.max_used = 0

    def step(self, arrival: Arrival, window: Sequence[Arrival] = ()) -> int:
        c = self.choose(arrival, window)
        self.colors[arrival.vertex] = c
        if c > self.max_used:
            self.max_used = c
        return c

    def choose(self, arrival: Arrival, window: Sequence[Arrival]) -> int:
        raise NotImplementedError

    def neighbor_colors(self, arrival: Arrival) -> set[int]:
        colors = self.colors
        return {colors[u] for u in arrival.back_edges}


class FirstFit(OnlineAlgorithm):
    """Lowest-numbered feasible color."""

    name = "first-fit"

    def choose(self, arrival, window):
        return smallest_missing(self.neighbor_colors(arrival))


class AlwaysNewColor(OnlineAlgorithm):
    name = "always-new"

    def choose(self, arrival, window):
        return self.max_used + 1


class HighestFeasible(OnlineAlgorithm):
    """Largest color already in use that is feasible, else a new one."""

    name = "highest-feasible"

    def choose(self, arrival, window):
        used = self.neighbor_colors(arrival)
        for c in range(self.max_used, 0, -1):
            if c not in used:
                return c
        return self.max_used + 1


class RandomFeasible(OnlineAlgorithm):
    """Uniform over ``{1..max_used+1}`` minus the neighbours' colors.

    A pure function of the observed history and its seed stream, so it is a
    deterministic algorithm once the seed is fixed.
    """

    name = "random-feasible"

    def __init__(self, seed: int | SeedStream = 0) -> None:
        super().__init__()
        stream = seed if isinstance(seed, SeedStream) else SeedStream(seed)
        self.rng = stream.generator()

    def choose(self, arrival, window):
        used = self.neighbor_colors(arrival)
        options = [c for c in range(1, self.max_used + 2) if c not in used]
        return options[int(self.rng.integers(len(options)))]


class LookaheadOptimal(OnlineAlgorithm):
    """Colors optimally once the lookahead window shows the whole input.

    Until then (and for inputs above the brute-force cutoff) it behaves like
    First Fit.
    """

    name = "lookahead-optimal"

    def __init__(self, max_n: int = 24) -> None:
        super().__init__()
        self.max_n = max_n
        self.plan: dict[int, int] | None = None

    def choose(self, arrival, window):
        if self.plan is None and not self.colors:
            known = [arrival, *window]
            if len(known) <= self.max_n and _is_whole_input(known):
                self.plan = _optimal_plan(known, self.max_n)
        if self.plan is not None:
            return self.plan[arrival.vertex]
        return smallest_missing(self.neighbor_colors(arrival))


def _is_whole_input(known: Sequence[Arrival]) -> bool:
    ids = sorted(a.vertex for a in known)
    return ids == list(range(len(ids)))


def _optimal_plan(known: Sequence[Arrival], max_n: int) -> dict[int, int]:
    from .oracles import optimal_coloring

    inst = OnlineInstance(tuple(known))
    colors = optimal_coloring(inst.to_graph(), max_n)
    return {v: c for v, c in enumerate(colors)}


ALGORITHMS: dict[str, type[OnlineAlgorithm]] = {
    cls.name: cls
    for cls in (FirstFit, AlwaysNewColor, HighestFeasible, RandomFeasible, LookaheadOptimal)
}


# --- runners -------------------------------------------------------------------


class Session:
    """Live interaction between an adaptive adversary and one algorithm.

    Vertex ids are handed out in presentation order.  The adversary reads
    colors back through :meth:`color` as soon as a vertex is presented.
    """

    def __init__(self, algorithm: OnlineAlgorithm):
        self.algorithm = algorithm
        self.arrivals: list[Arrival] = []
        self.colors: dict[int, int] = {}
        self.steps: list[tuple[int, int]] = []

    @property
    def n(self) -> int:
        return len(self.arrivals)

    def present(self, back_edges: Iterable[int] = ()) -> int:
        v = len(self.arrivals)
        arrival = Arrival(v, tuple(back_edges))
        if any(not 0 <= u < v for u in arrival.back_edges):
            raise ValueError(f"back edges of vertex {v} must point to earlier vertices")
        self.arrivals.append(arrival)
        c = self.algorithm.step(arrival)
        _check_color(c, arrival.back_edges, self.colors, v)
        self.colors[v] = c
        self.steps.append((v, c))
        return v

    def color(self, v: int) -> int:
        return self.colors[v]

    def colors_of(self, vertices: Iterable[int]) -> set[int]:
        colors = self.colors
        return {colors[v] for v in vertices}

    def instance(self, phase_bounds: Sequence[int] | None = None) -> OnlineInstance:
        return OnlineInstance(tuple(self.arrivals), None if phase_bounds is None else tuple(phase_bounds))

    def transcript(self) -> Transcript:
        return Transcript(list(self.steps))


def _check_color(c, neighbors: Iterable[int], colors: dict[int, int], step: int) -> None:
    if not isinstance(c, int) or isinstance(c, bool) or c < 1:
        raise ProtocolViolation(step, f"color {c!r} is not a positive integer")
    for u in neighbors:
        if colors.get(u) == c:
            raise ProtocolViolation(step, f"color {c} clashes with neighbour {u}")


def run_online(alg: OnlineAlgorithm, inst: OnlineInstance) -> Transcript:
    return run_online_lookahead(alg, inst, 0)


def run_online_lookahead(alg: OnlineAlgorithm, inst: OnlineInstance, l: int) -> Transcript:
    """At step ``t`` the algorithm sees arrivals ``t..t+l`` and colors ``v_t``."""
    if l < 0:
        raise ValueError("lookahead must be non-negative")
    arrivals = inst.arrivals
    colors: dict[int, int] = {}
    steps = []
    for t, arrival in enumerate(arrivals):
        window = arrivals[t + 1:t + 1 + l] if l else ()
        c = alg.step(arrival, window)
        _check_color(c, arrival.back_edges, colors, t)
        colors[arrival.vertex] = c
        steps.append((arrival.vertex, c))
    return Transcript(steps)


# --- buffered algorithms -----------------------------------------------------------


class BufferedAlgorithm:
    """Base for algorithms with a reordering buffer.

    ``step`` returns the commitments made during that step; ``finish`` is
    called once after the last arrival and must color everything left.
    Subclasses see the full adjacency of presented vertices via ``self.adj``.
    """

    name = "abstract-buffered"

    def __init__(self, b: int) -> None:
        self.b = b
        self.adj: dict[int, set[int]] = {}
        self.colors: dict[int, int] = {}
        self.pending: deque[int] = deque()

    def observe(self, arrival: Arrival) -> None:
        self.adj[arrival.vertex] = set(arrival.back_edges)
        for u in arrival.back_edges:
            self.adj[u].add(arrival.vertex)
        self.pending.append(arrival.vertex)

    def step(self, arrival: Arrival) -> list[tuple[int, int]]:
        raise NotImplementedError

    def finish(self) -> list[tuple[int, int]]:
        out = []
        while self.pending:
            out.append(self.commit(self.pending.popleft()))
        return out

    def first_fit(self, v: int) -> int:
        return smallest_missing({self.colors[u] for u in self.adj[v] if u in self.colors})

    def commit(self, v: int, color: int | None = None) -> tuple[int, int]:
        c = self.first_fit(v) if color is None else color
        self.colors[v] = c
        return (v, c)


class ImmediateCommit(BufferedAlgorithm):
    """Wraps a plain online algorithm: every vertex is colored on arrival."""

    def __init__(self, inner: OnlineAlgorithm, b: int = 0) -> None:
        super().__init__(b)
        self.inner = inner
        self.name = f"immediate:{inner.name}"

    def step(self, arrival):
        self.observe(arrival)
        self.pending.pop()
        return [self.commit(arrival.vertex, self.inner.step(arrival))]


class GreedyFlush(BufferedAlgorithm):
    """Keeps up to ``b`` vertices; when full, First-Fit colors the oldest."""

    name = "greedy-flush"

    def step(self, arrival):
        self.observe(arrival)
        out = []
        while len(self.pending) > self.b:
            out.append(self.commit(self.pending.popleft()))
        return out


class StallingBuffer(BufferedAlgorithm):
    """Defers as much as allowed and colors the newest vertex when forced,
    so the oldest ``b`` arrivals stay uncolored until the very end."""

    name = "stall"

    def step(self, arrival):
        self.observe(arrival)
        out = []
        while len(self.pending) > self.b:
            out.append(self.commit(self.pending.pop()))
        return out


class BufferOptimal(BufferedAlgorithm):
    """Defers everything it may; colors optimally at the end if nothing was
    forced out early and the input is small enough."""

    name = "buffer-optimal"

    def __init__(self, b: int, max_n: int = 24) -> None:
        super().__init__(b)
        self.max_n = max_n

    def step(self, arrival):
        self.observe(arrival)
        out = []
        while len(self.pending) > self.b:
            out.append(self.commit(self.pending.popleft()))
        return out

    def finish(self):
        from .oracles import optimal_coloring

        n = len(self.adj)
        if self.colors or n > self.max_n:
            return super().finish()
        g = GraphData(n, tuple(frozenset(self.adj[v]) for v in range(n)))
        plan = optimal_coloring(g, self.max_n)
        out = [self.commit(v, plan[v]) for v in self.pending]
        self.pending.clear()
        return out


BUFFERED: dict[str, Callable[..., BufferedAlgorithm]] = {
    GreedyFlush.name: GreedyFlush,
    StallingBuffer.name: StallingBuffer,
    BufferOptimal.name: BufferOptimal,
}


class BufferedSession:
    """Adaptive interaction with a buffered algorithm.

    Enforces ``colored >= t - b`` after every step ``t`` (1-based) and checks
    every commitment against all already-colored neighbours, including
    neighbours that arrived after the committed vertex.
    """

    def __init__(self, algorithm: BufferedAlgorithm, b: int):
        if b < 0:
            raise ValueError("buffer size must be non-negative")
        self.algorithm = algorithm
        self.b = b
        self.arrivals: list[Arrival] = []
        self.adj: list[set[int]] = []
        self.colors: dict[int, int] = {}
        self.steps: list[tuple[int, int]] = []
        self.committed_count: list[int] = []
        self.finished = False

    @property
    def n(self) -> int:
        return len(self.arrivals)

    @property
    def uncolored(self) -> int:
        return self.n - len(self.colors)

    def present(self, back_edges: Iterable[int] = ()) -> int:
        if self.finished:
            raise RuntimeError("session already finished")
        v = len(self.arrivals)
        arrival = Arrival(v, tuple(back_edges))
        if any(not 0 <= u < v for u in arrival.back_edges):
            raise ValueError(f"back edges of vertex {v} must point to earlier vertices")
        self.arrivals.append(arrival)
        self.adj.append(set(arrival.back_edges))
        for u in arrival.back_edges:
            self.adj[u].add(v)
        self._apply(self.algorithm.step(arrival), v)
        t = v + 1
        if len(self.colors) < t - self.b:
            raise BufferOverflow(t, len(self.colors), self.b)
        self.committed_count.append(len(self.colors))
        return v

    def finish(self) -> None:
        step = len(self.arrivals)
        self._apply(self.algorithm.finish(), step)
        if len(self.colors) != self.n:
            raise ProtocolViolation(step, "vertices left uncolored at the end")
        if self.committed_count:
            self.committed_count[-1] = len(self.colors)
        self.finished = True

    def _apply(self, commitments, step: int) -> None:
        for v, c in commitments:
            if not 0 <= v < len(self.arrivals):
                raise ProtocolViolation(step, f"vertex {v} has not arrived")
            if v in self.colors:
                raise ProtocolViolation(step, f"vertex {v} colored twice")
            _check_color(c, self.adj[v], self.colors, step)
            self.colors[v] = c
            self.steps.append((v, c))

    def is_colored(self, v: int) -> bool:
        return v in self.colors

    def instance(self) -> OnlineInstance:
        return OnlineInstance(tuple(self.arrivals))

    def transcript(self) -> Transcript:
        return Transcript(list(self.steps), list(self.committed_count))


def run_online_buffered(alg: BufferedAlgorithm, inst: OnlineInstance, b: int) -> Transcript:
    """Drive ``alg`` over a fixed instance with buffer size ``b``."""
    if b < 0:
        raise ValueError("buffer size must be non-negative")
    adj: dict[int, set[int]] = {}
    colors: dict[int, int] = {}
    steps = []
    counts = []

    def apply(commitments, step):
        for v, c in commitments:
            if v not in adj:
                raise ProtocolViolation(step, f"vertex {v} has not arrived")
            if v in colors:
                raise ProtocolViolation(step, f"vertex {v} colored twice")
            _check_color(c, adj[v], colors, step)
            colors[v] = c
            steps.append((v, c))

    for t, arrival in enumerate(inst.arrivals, start=1):
        adj[arrival.vertex] = set(arrival.back_edges)
        for u in arrival.back_edges:
            adj[u].add(arrival.vertex)
        apply(alg.step(arrival), t - 1)
        if len(colors) < t - b:
            raise BufferOverflow(t, len(colors), b)
        counts.append(len(colors))
    apply(alg.finish(), inst.n)
    if len(colors) != inst.n:
        raise ProtocolViolation(inst.n, "vertices left uncolored at the end")
    if counts:
        counts[-1] = len(colors)
    return Transcript(steps, counts)


# --- name parsing ----------------------------------------------------------------


def parse_algorithm(spec: str) -> tuple[str, dict[str, str]]:
    """``"random-feasible:seed=3"`` -> ``("random-feasible", {"seed": "3"})``."""
    name, _, rest = spec.partition(":")
    params = {}
    for part in filter(None, rest.split(",")):
        key, _, value = part.partition("=")
        params[key.strip()] = value.strip()
    return name.strip(), params


def algorithm_factory(spec: str, stream: SeedStream | None = None) -> Callable[[], OnlineAlgorithm]:
    """Factory of fresh algorithms for a CLI-style name.

    ``random-feasible`` without an explicit seed draws its seed from
    ``stream`` (one child per call), so every trial gets fresh coins.
    """
    name, params = parse_algorithm(spec)
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    cls = ALGORITHMS[name]
    if cls is RandomFeasible:
        if "seed" in params:
            seed = int(params["seed"])
            return lambda: RandomFeasible(seed)
        base = stream or SeedStream(0)
        counter = iter(range(1 << 62))
        return lambda: RandomFeasible(base.child(next(counter)))
    if cls is LookaheadOptimal:
        max_n = int(params.get("max_n", 24))
        return lambda: LookaheadOptimal(max_n)
    return cls


def buffered_factory(spec: str, b: int) -> Callable[[], BufferedAlgorithm]:
    """Buffered algorithm by name; plain online names are wrapped to commit immediately."""
    name, params = parse_algorithm(spec)
    if name in BUFFERED:
        cls = BUFFERED[name]
        return lambda: cls(b)
    inner = algorithm_factory(spec)
    return lambda: ImmediateCommit(inner(), b)
