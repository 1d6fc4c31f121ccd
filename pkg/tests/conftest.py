from __future__ import annotations

import contextlib
from dataclasses import dataclass

import pytest
from hypothesis import strategies as st

from onlinecolor.graph import GraphData

_RESULTS: dict[int, "CriterionRecord"] = {}


@dataclass
class CriterionRecord:
    number: int
    title: str
    passed: bool = False
    detail: str = ""


@pytest.fixture
def criterion():
    """``with criterion(3, "title") as rec: ...``; any exception marks the criterion failed."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        rec = CriterionRecord(number, title)
        _RESULTS[number] = rec
        try:
            yield rec
        except BaseException as exc:
            rec.passed = False
            rec.detail = rec.detail or f"{type(exc).__name__}: {exc}".splitlines()[0][:160]
            raise
        else:
            rec.passed = True

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        rec = _RESULTS[number]
        status = "PASS" if rec.passed else "FAIL"
        line = f"[{status}] {number:>2}. {rec.title}"
        if rec.detail:
            line += f" | {rec.detail}"
        terminalreporter.write_line(line)


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 10, p: float | None = None) -> GraphData:
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if p is None:
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    else:
        mask = [draw(st.floats(0, 1)) < p for _ in pairs]
    return GraphData.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


def chordal_graphs(max_n: int = 12):
    """Random chordal graphs: each new vertex joins a clique of earlier ones."""

    @st.composite
    def build(draw) -> GraphData:
        n = draw(st.integers(1, max_n))
        edges: list[tuple[int, int]] = []
        adj: list[set[int]] = []
        for v in range(n):
            if v == 0:
                adj.append(set())
                continue
            anchor = draw(st.integers(0, v - 1))
            candidates = sorted(adj[anchor] | {anchor})
            picked = {anchor} | {
                u for u in candidates if u != anchor and draw(st.booleans())
            }
            # keep the picked set a clique
            clique = [u for u in sorted(picked) if all(w in adj[u] or w == u for w in picked)]
            if anchor not in clique:
                clique = [anchor]
            adj.append(set(clique))
            for u in clique:
                adj[u].add(v)
                edges.append((u, v))
        return GraphData.from_edges(n, edges)

    return build()
