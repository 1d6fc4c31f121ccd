"""Disk-intersection realization of the random family at ``d = 2``.

An apex disk of radius ``rho`` sits at the origin.  Below it a vertical
strip is cut into twelve substrips, one per child structure, each holding
an inner strip inset by ``eps`` on both sides.  Disks are first placed so
that intended edges are exact tangencies; afterwards every radius is grown
a little so tangencies become overlaps while the radius ratio stays
``rho``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adversary.det import floor_log
from .adversary.rand import PAIRS, RandNode, RandSample, sample_gk
from .graph import GraphData
from .oracles import CHI_MAX_N, chromatic_number_bruteforce, is_bipartite
from .rng import SeedStream


class AmbiguousTangency(ValueError):
    pass


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ValueError("disk radius must be positive")


@dataclass
class DiskArrangement:
    disks: list[Disk]
    vertex: list[int]  # vertex id of each disk
    rho: float
    k: int
    apex: int | None = None  # index of the apex disk
    eps: float = 0.0
    delta: float = 0.0
    strip_width: float = 0.0

    @property
    def ratio(self) -> float:
        radii = [d.r for d in self.disks]
        return max(radii) / min(radii)

    def index_of(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertex)}

    def to_json(self) -> list[dict]:
        return [{"cx": d.cx, "cy": d.cy, "r": d.r, "v": v} for d, v in zip(self.disks, self.vertex)]

    def dump_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def from_json(cls, data: list[dict], rho: float, k: int = 0) -> DiskArrangement:
        disks = [Disk(float(e["cx"]), float(e["cy"]), float(e["r"])) for e in data]
        return cls(disks, [int(e["v"]) for e in data], rho, k)

    def to_svg(self, stroke: float | None = None) -> str:
        xs = [d.cx for d in self.disks]
        ys = [d.cy for d in self.disks]
        rs = [d.r for d in self.disks]
        lo_x = min(x - r for x, r in zip(xs, rs))
        hi_x = max(x + r for x, r in zip(xs, rs))
        lo_y = min(y - r for y, r in zip(ys, rs))
        hi_y = max(y + r for y, r in zip(ys, rs))
        stroke = stroke or min(rs) / 10
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{lo_x:.6f} {-hi_y:.6f} {hi_x - lo_x:.6f} {hi_y - lo_y:.6f}">'
        ]
        for d in self.disks:
            # svg y grows downwards
            parts.append(
                f'<circle cx="{d.cx:.9f}" cy="{-d.cy:.9f}" r="{d.r:.9f}" '
                f'fill="none" stroke="black" stroke-width="{stroke:.6f}"/>'
            )
        parts.append("</svg>")
        return "\n".join(parts)


def strip_width(j: int, eps: float) -> float:
    """``w_j = 2(12^(j-1) + eps (12^(j-1) - 1) 12/11)``."""
    p = 12 ** (j - 1)
    return 2 * (p + eps * (p - 1) * 12 / 11)


def choose_eps(k: int, rho: float) -> float:
    """Half the supremum of admissible insets; any ``eps`` works at ``k = 1``."""
    if k == 1:
        return 1.0
    p = 12 ** (k - 1)
    return 11 * (rho - p) / (24 * (p - 1))


def _below(parent: Disk, x: float, r: float) -> Disk:
    """Disk of radius ``r`` centred on ``x`` touching ``parent`` from below."""
    dx = x - parent.cx
    return Disk(x, parent.cy - math.sqrt((parent.r + r) ** 2 - dx * dx), r)


class _Placer:
    def __init__(self, n: int, eps: float):
        self.eps = eps
        self.disks: list[Disk | None] = [None] * n

    def place(self, node: RandNode, parent: Disk, x: float) -> None:
        if node.level == 1:
            top, bottom = node.vertices
            upper = _below(parent, x, 1.0)
            self.disks[top] = upper
            self.disks[bottom] = Disk(x, upper.cy - 2.0, 1.0)
            return
        w = strip_width(node.level, self.eps)
        sub = w / 12
        left_edge = x - w / 2
        child_r = strip_width(node.level - 1, self.eps) / 2
        for i in range(PAIRS):
            xl = left_edge + (2 * i + 0.5) * sub
            xr = left_edge + (2 * i + 1.5) * sub
            added = node.added[i]
            if added is not None:
                (v,) = added
                di = _below(parent, xl, child_r)
                self.disks[v] = di
                self.place(node.children[2 * i], di, xl)
            else:
                self.place(node.children[2 * i], parent, xl)
            self.place(node.children[2 * i + 1], parent, xr)


def _gaps_from(centers: np.ndarray, radii: np.ndarray, i: int) -> np.ndarray:
    """``dist - r_i - r_j`` for all ``j > i``."""
    diff = centers[i + 1:] - centers[i]
    return np.hypot(diff[:, 0], diff[:, 1]) - radii[i] - radii[i + 1:]


def _arrays(disks: list[Disk]) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([[d.cx, d.cy] for d in disks], dtype=float).reshape(-1, 2)
    radii = np.array([d.r for d in disks], dtype=float)
    return centers, radii


def default_tolerance(disks: list[Disk]) -> float:
    scale = max((abs(d.cx) + abs(d.cy) + d.r for d in disks), default=1.0)
    return 1e-11 * max(scale, 1.0)


def embed_disks(sample: RandSample, rho: float, tangency_rtol: float = 1e-9) -> DiskArrangement:
    """Disk arrangement whose intersection graph is the sample plus an apex
    vertex (id ``sample.size_gk``) adjacent to every root vertex."""
    if sample.d != 2:
        raise ValueError("disk embedding exists for d = 2 only")
    if sample.extra:
        raise ValueError("embed an unpadded sample")
    k = sample.k
    if not rho > 12 ** (k - 1):
        raise ValueError("rho too small for k: need rho > 12^(k-1)")
    eps = choose_eps(k, rho)
    w = strip_width(k, eps)
    if not 2 * rho > w:
        raise ValueError(f"apex does not cover its strip: 2 rho = {2 * rho} <= w_k = {w}")
    n = sample.size_gk
    apex = Disk(0.0, 0.0, rho)
    placer = _Placer(n, eps)
    placer.place(sample.descriptor, apex, 0.0)
    if any(d is None for d in placer.disks):
        raise RuntimeError("some vertex received no disk")
    disks: list[Disk] = list(placer.disks) + [apex]  # type: ignore[arg-type]

    intended = _intended_edges(sample)
    centers, radii = _arrays(disks)
    delta = math.inf
    for i in range(len(disks) - 1):
        gaps = _gaps_from(centers, radii, i)
        partners = intended.get(i, set())
        mask = np.ones(len(gaps), dtype=bool)
        for j in partners:
            if j > i:
                g = gaps[j - i - 1]
                if abs(g) > tangency_rtol * (radii[i] + radii[j]):
                    raise RuntimeError(f"disks {i},{j} should touch but gap is {g}")
                mask[j - i - 1] = False
        if mask.any():
            delta = min(delta, float(gaps[mask].min()))
    if not delta > 0:
        raise RuntimeError(f"non-adjacent disks overlap (min gap {delta})")
    if math.isinf(delta):
        delta = 1.0
    grown = [Disk(d.cx, d.cy, d.r + delta / (2 * rho)) for d in disks[:-1]]
    grown.append(Disk(0.0, 0.0, rho + delta / 2))
    return DiskArrangement(
        disks=grown,
        vertex=list(range(n + 1)),
        rho=rho,
        k=k,
        apex=n,
        eps=eps,
        delta=delta,
        strip_width=w,
    )


def _intended_edges(sample: RandSample) -> dict[int, set[int]]:
    apex = sample.size_gk
    out: dict[int, set[int]] = {}
    for u, v in sample.graph.edges():
        out.setdefault(u, set()).add(v)
        out.setdefault(v, set()).add(u)
    for r in sample.root_vertices:
        out.setdefault(r, set()).add(apex)
        out.setdefault(apex, set()).add(r)
    return out


def expected_graph(sample: RandSample) -> GraphData:
    """The sample with an apex vertex joined to every root vertex."""
    apex = sample.size_gk
    edges = list(sample.graph.edges()) + [(r, apex) for r in sample.root_vertices]
    return GraphData.from_edges(apex + 1, edges)


def intersection_graph(arr: DiskArrangement, tol: float | None = None) -> GraphData:
    """Edge iff the disks overlap; pairs within ``tol`` of touching are rejected."""
    disks = arr.disks
    if tol is None:
        tol = default_tolerance(disks)
    centers, radii = _arrays(disks)
    n = max(arr.vertex, default=-1) + 1
    edges = []
    for i in range(len(disks) - 1):
        gaps = _gaps_from(centers, radii, i)
        close = np.flatnonzero(np.abs(gaps) <= tol)
        if close.size:
            j = i + 1 + int(close[0])
            raise AmbiguousTangency(
                f"ambiguous tangency between vertices {arr.vertex[i]} and {arr.vertex[j]}"
            )
        for off in np.flatnonzero(gaps < 0):
            edges.append((arr.vertex[i], arr.vertex[i + 1 + int(off)]))
    return GraphData.from_edges(n, edges)


@dataclass
class EmbeddingReport:
    missing: list[tuple[int, int]] = field(default_factory=list)
    extra: list[tuple[int, int]] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.problems)

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        lines = list(self.problems)
        lines += [f"missing edge {u}-{v}" for u, v in self.missing]
        lines += [f"unexpected edge {u}-{v}" for u, v in self.extra]
        return "\n".join(lines)


def verify_embedding(
    arr: DiskArrangement,
    expected: GraphData,
    roots: list[int] | None = None,
    ratio_rtol: float = 1e-9,
) -> EmbeddingReport:
    report = EmbeddingReport()
    try:
        g = intersection_graph(arr)
    except AmbiguousTangency as exc:
        report.problems.append(str(exc))
        return report
    want = set(expected.edges())
    have = set(g.edges())
    report.missing = sorted(want - have)
    report.extra = sorted(have - want)
    if roots is not None and arr.apex is not None:
        apex_v = arr.vertex[arr.apex]
        if set(g.adj[apex_v]) != set(roots):
            report.problems.append("apex is not adjacent to exactly the root vertices")
    if abs(arr.ratio - arr.rho) > ratio_rtol * arr.rho:
        report.problems.append(f"radius ratio {arr.ratio!r} differs from rho = {arr.rho!r}")
    if arr.k and len(arr.disks) > 2 * 12 ** arr.k:
        report.problems.append(f"{len(arr.disks)} disks > 2*12^k")
    if g.m:
        if g.n <= CHI_MAX_N:
            chi = chromatic_number_bruteforce(g)
        else:
            chi = 2 if is_bipartite(g) else 3
        if chi != 2:
            report.problems.append(f"chromatic number {chi} != 2")
    return report


def theorem_k_disk(n: int, rho: float) -> int:
    """``floor(log_12(min(n, rho) / 2))``."""
    m = min(n, rho)
    if m < 25:
        raise ValueError("need min(n, rho) >= 25")
    return floor_log(math.floor(m / 2), 12)


@dataclass
class DiskInstance:
    sample: RandSample
    arrangement: DiskArrangement
    padding: int


def build_theorem_disk(n: int, rho: float, seed: int | SeedStream = 0) -> DiskInstance:
    """Exactly ``n`` disks: an embedded sample plus far-away padding disks."""
    k = theorem_k_disk(n, rho)
    sample = sample_gk(seed, 2, k)
    arr = embed_disks(sample, rho)
    count = len(arr.disks)
    if count > n:
        raise ValueError(f"embedding needs {count} > n = {n} disks")
    r_min = min(d.r for d in arr.disks)
    top = arr.disks[arr.apex].r + 4 * r_min
    pads = [Disk(3 * r_min * i, top, r_min) for i in range(n - count)]
    arr.disks.extend(pads)
    arr.vertex.extend(range(count, n))
    return DiskInstance(sample, arr, n - count)
