"""Independent verifiers for the structure of constructed graphs.

None of these functions know how a graph was built; they only look at
adjacency.  The brute-force routines are exponential and guarded by a
size cutoff.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .graph import GraphData

CHI_MAX_N = 24
STRONG_MAX_N = 20
CYCLE_MAX_N = 14


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class PeoCertificate:
    """Perfect elimination ordering; ``omega`` is the largest clique met along it."""

    order: tuple[int, ...]
    omega: int

    @property
    def treewidth(self) -> int:
        return self.omega - 1


@dataclass(frozen=True)
class NotChordal:
    cycle: tuple[int, ...]


def mcs_order(g: GraphData) -> list[int]:
    """Maximum-cardinality search; returns the visit order.

    The reverse of the visit order is a PEO whenever ``g`` is chordal.
    """
    weight = [0] * g.n
    buckets: list[set[int]] = [set(range(g.n))]
    visited = [False] * g.n
    order = []
    top = 0
    for _ in range(g.n):
        while top > 0 and not buckets[top]:
            top -= 1
        v = min(buckets[top])
        buckets[top].discard(v)
        visited[v] = True
        order.append(v)
        for u in g.adj[v]:
            if visited[u]:
                continue
            buckets[weight[u]].discard(u)
            weight[u] += 1
            if weight[u] == len(buckets):
                buckets.append(set())
            buckets[weight[u]].add(u)
            top = max(top, weight[u])
    return order


def peo_violation(g: GraphData, order: Sequence[int]) -> tuple[int, int, int] | None:
    """Verify the PEO property; returns ``(v, a, b)`` with ``a, b`` later
    neighbours of ``v`` that are not adjacent, or ``None``."""
    if sorted(order) != list(range(g.n)):
        raise OracleError("order is not a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in g.adj[v] if pos[u] > pos[v]]
        if len(later) < 2:
            continue
        p = min(later, key=pos.__getitem__)
        for u in later:
            if u != p and u not in g.adj[p]:
                return (v, p, u)
    return None


def _omega_along(g: GraphData, order: Sequence[int]) -> int:
    if g.n == 0:
        return 0
    pos = {v: i for i, v in enumerate(order)}
    return max(1 + sum(1 for u in g.adj[v] if pos[u] > pos[v]) for v in order)


def _chordless_cycle_through(g: GraphData, v: int, a: int, b: int) -> list[int] | None:
    """Shortest ``a``-``b`` path avoiding ``N[v]`` except ``a, b``, closed through ``v``."""
    blocked = set(g.adj[v]) | {v}
    blocked.discard(a)
    blocked.discard(b)
    parent = {a: a}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in g.adj[x]:
            if y in blocked or y in parent:
                continue
            if x == a and y == b:
                continue
            parent[y] = x
            queue.append(y)
    if b not in parent:
        return None
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return [v] + path[::-1]


def find_chordless_cycle(g: GraphData, hint: tuple[int, int, int] | None = None) -> list[int] | None:
    """Some induced cycle of length >= 4, or ``None`` if ``g`` is chordal."""
    candidates = []
    if hint is not None:
        candidates.append(hint)
    for v in range(g.n):
        nbrs = sorted(g.adj[v])
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                if b not in g.adj[a]:
                    candidates.append((v, a, b))
    for v, a, b in candidates:
        cycle = _chordless_cycle_through(g, v, a, b)
        if cycle is not None:
            return cycle
    return None


def check_chordal(g: GraphData) -> PeoCertificate | NotChordal:
    """PEO certificate (verified) or a chordless cycle of length >= 4."""
    peo = mcs_order(g)[::-1]
    bad = peo_violation(g, peo)
    if bad is None:
        return PeoCertificate(tuple(peo), _omega_along(g, peo))
    cycle = find_chordless_cycle(g, hint=bad)
    if cycle is None:
        # MCS failing on a chordal graph would be a bug in this module
        raise OracleError("PEO check failed but no chordless cycle exists")
    return NotChordal(tuple(cycle))


def is_chordal(g: GraphData) -> bool:
    return isinstance(check_chordal(g), PeoCertificate)


def clique_number_chordal(g: GraphData, cert: PeoCertificate) -> int:
    if peo_violation(g, cert.order) is not None:
        raise OracleError("certificate is not a perfect elimination ordering")
    return _omega_along(g, cert.order)


def treewidth_chordal(g: GraphData, cert: PeoCertificate) -> int:
    return clique_number_chordal(g, cert) - 1


# --- exact coloring ----------------------------------------------------------


def _k_colorable(g: GraphData, k: int) -> list[int] | None:
    """Backtracking k-coloring in DSATUR order; returns 1-based colors or None."""
    n = g.n
    color = [0] * n
    nbr_colors: list[dict[int, int]] = [dict() for _ in range(n)]

    def pick() -> int:
        best, key = -1, (-1, -1)
        for v in range(n):
            if color[v] == 0:
                kv = (len(nbr_colors[v]), len(g.adj[v]))
                if kv > key:
                    best, key = v, kv
        return best

    def assign(v: int, c: int, delta: int) -> None:
        for u in g.adj[v]:
            cnt = nbr_colors[u].get(c, 0) + delta
            if cnt:
                nbr_colors[u][c] = cnt
            else:
                nbr_colors[u].pop(c, None)

    def solve(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        # symmetry breaking: at most one brand-new color is tried
        for c in range(1, min(used + 1, k) + 1):
            if c in nbr_colors[v]:
                continue
            color[v] = c
            assign(v, c, 1)
            if solve(done + 1, max(used, c)):
                return True
            assign(v, c, -1)
            color[v] = 0
        return False

    return list(color) if solve(0, 0) else None


def optimal_coloring(g: GraphData, max_n: int = CHI_MAX_N) -> list[int]:
    """A proper coloring with ``chi(g)`` colors (1-based)."""
    if g.n > max_n:
        raise OracleError("instance too large for brute force")
    if g.n == 0:
        return []
    k = 1
    while True:
        colors = _k_colorable(g, k)
        if colors is not None:
            return colors
        k += 1


def chromatic_number_bruteforce(g: GraphData, max_n: int = CHI_MAX_N) -> int:
    colors = optimal_coloring(g, max_n)
    return max(colors, default=0)


# --- degeneracy ----------------------------------------------------------------


def degeneracy(g: GraphData) -> tuple[int, list[int]]:
    """Degeneracy and the min-degree removal order.

    In the returned order every vertex has at most ``d`` neighbours that
    appear after it.
    """
    deg = [len(s) for s in g.adj]
    maxdeg = max(deg, default=0)
    buckets: list[set[int]] = [set() for _ in range(maxdeg + 1)]
    for v, dv in enumerate(deg):
        buckets[dv].add(v)
    removed = [False] * g.n
    order = []
    d = 0
    low = 0
    for _ in range(g.n):
        low = max(0, low - 1)
        while not buckets[low]:
            low += 1
        v = buckets[low].pop()
        removed[v] = True
        order.append(v)
        d = max(d, low)
        for u in g.adj[v]:
            if not removed[u]:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
    return d, order


# --- simple class tests ----------------------------------------------------------


def is_forest(g: GraphData) -> bool:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def is_tree(g: GraphData) -> bool:
    return g.n > 0 and is_forest(g) and len(g.components()) == 1


def is_bipartite(g: GraphData) -> bool:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in g.adj[v]:
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    queue.append(u)
                elif side[u] == side[v]:
                    return False
    return True


# --- brute-force cycle searches ------------------------------------------------


def chordless_cycle_bruteforce(g: GraphData, max_n: int = CYCLE_MAX_N) -> list[int] | None:
    """Exhaustive search for an induced cycle of length >= 4.

    Grows induced paths from their smallest vertex; independent of the
    MCS/PEO route used by :func:`check_chordal`.
    """
    if g.n > max_n:
        raise OracleError("instance too large for brute force")
    adj = g.adj

    def extend(path: list[int], on_path: set[int]) -> list[int] | None:
        s, last = path[0], path[-1]
        for x in adj[last]:
            if x <= s or x in on_path:
                continue
            # x may touch only `last` among the inner path, and possibly s
            touches = adj[x] & on_path
            if touches - {last, s}:
                continue
            if s in touches:
                if len(path) >= 3:
                    return path + [x]
                continue
            path.append(x)
            on_path.add(x)
            found = extend(path, on_path)
            if found:
                return found
            path.pop()
            on_path.discard(x)
        return None

    for s in range(g.n):
        for a in adj[s]:
            if a <= s:
                continue
            found = extend([s, a], {s, a})
            if found:
                return found
    return None


def _even_cycles_without_odd_chord(g: GraphData):
    adj = g.adj
    n = g.n
    for s in range(n):
        path = [s]
        on_path = {s}

        def walk():
            last = path[-1]
            for x in adj[last]:
                if x == s and len(path) >= 6 and len(path) % 2 == 0 and path[1] < path[-1]:
                    if not _has_odd_chord(g, path):
                        yield tuple(path)
                if x <= s or x in on_path:
                    continue
                path.append(x)
                on_path.add(x)
                yield from walk()
                path.pop()
                on_path.discard(x)

        yield from walk()


def _has_odd_chord(g: GraphData, cycle: Sequence[int]) -> bool:
    m = len(cycle)
    for i in range(m):
        for j in range(i + 3, m, 2):
            if (j - i) % 2 == 1 and m - (j - i) > 1 and cycle[j] in g.adj[cycle[i]]:
                return True
    return False


def check_strongly_chordal_bruteforce(
    g: GraphData, max_n: int = STRONG_MAX_N
) -> tuple[int, ...] | None:
    """``None`` if every even cycle of length >= 6 has an odd chord,
    else one such cycle without an odd chord."""
    if g.n > max_n:
        raise OracleError("instance too large for brute force")
    if not is_chordal(g):
        raise OracleError("strong chordality is only checked on chordal graphs")
    return next(_even_cycles_without_odd_chord(g), None)


# --- combined report -------------------------------------------------------------


SUITE_CHECKS = ("chordal", "strongly_chordal", "degeneracy", "chi", "classes")


def oracle_suite(g: GraphData, checks: Sequence[str] = SUITE_CHECKS) -> dict:
    """Structural facts about ``g``; brute-force entries only on small graphs."""
    report: dict = {"n": g.n, "m": g.m}
    cert = check_chordal(g) if {"chordal", "strongly_chordal"} & set(checks) else None
    if "chordal" in checks:
        report["chordal"] = isinstance(cert, PeoCertificate)
        if isinstance(cert, PeoCertificate):
            report["omega"] = cert.omega
            report["treewidth"] = cert.treewidth
        else:
            report["chordless_cycle"] = list(cert.cycle)
    if "degeneracy" in checks:
        report["degeneracy"] = degeneracy(g)[0]
    if "classes" in checks:
        report["forest"] = is_forest(g)
        report["tree"] = is_tree(g)
        report["bipartite"] = is_bipartite(g)
    if "chi" in checks and g.n <= CHI_MAX_N:
        report["chi"] = chromatic_number_bruteforce(g)
    if "strongly_chordal" in checks and isinstance(cert, PeoCertificate) and g.n <= STRONG_MAX_N:
        report["strongly_chordal"] = check_strongly_chordal_bruteforce(g) is None
    return report
