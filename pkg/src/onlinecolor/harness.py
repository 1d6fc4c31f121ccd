"""Experiment grids: one CSV row per trial, plus a short summary."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .adversary.buffer import build_buffer_adversary, max_buffer
from .adversary.det import det_adversary, build_theorem_det
from .adversary.lookahead import build_lookahead_instance, sample_phased
from .adversary.rand import build_theorem_rand, sample_gk
from .algorithms import algorithm_factory, buffered_factory, run_online
from .disk import embed_disks, intersection_graph, theorem_k_disk
from .graph import OnlineInstance, colors_used
from .rng import SeedStream

COLUMNS = (
    "trial", "d", "k", "n", "l", "b",
    "total_colors", "root_colors", "bound_value", "meets_bound", "wall_time",
)
KINDS = ("det", "rand", "lookahead", "buffer", "disk")
# kinds whose guarantee is on the expectation rather than on every trial
EXPECTATION_KINDS = ("rand", "lookahead", "disk")
THREADS_ENV = "ONLINECOLOR_THREADS"


class TrialError(RuntimeError):
    def __init__(self, trial: int, cause: BaseException):
        super().__init__(f"trial {trial} failed: {cause}")
        self.trial = trial


@dataclass
class ExperimentSpec:
    adversary: str
    params: dict[str, Any]
    algorithm: str = "first-fit"
    trials: int = 1
    seed: int = 0
    output: str | None = None
    timing: bool = False

    def __post_init__(self) -> None:
        if self.adversary not in KINDS:
            raise ValueError(f"unknown adversary {self.adversary!r}; choose from {KINDS}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentSpec:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def points(self) -> list[dict[str, Any]]:
        """Cartesian product over the list-valued parameters."""
        keys = list(self.params)
        values = [v if isinstance(v, list) else [v] for v in self.params.values()]
        return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


@dataclass
class ExperimentRow:
    trial: int
    d: int
    k: int
    n: int
    l: int
    b: int
    total_colors: int
    root_colors: int
    bound_value: Fraction
    meets_bound: bool
    wall_time: float | None = None
    kind: str = field(default="det", repr=False)

    def __post_init__(self) -> None:
        if self.meets_bound != (self.root_colors >= self.bound_value):
            raise ValueError("meets_bound disagrees with root_colors and bound_value")

    def csv_fields(self) -> list[str]:
        return [
            str(self.trial), str(self.d), str(self.k), str(self.n), str(self.l), str(self.b),
            str(self.total_colors), str(self.root_colors), str(self.bound_value),
            "true" if self.meets_bound else "false",
            "" if self.wall_time is None else f"{self.wall_time:.6f}",
        ]


def _row(kind, trial, d, k, n, l, b, total, roots, bound) -> ExperimentRow:
    bound = Fraction(bound)
    return ExperimentRow(trial, d, k, n, l, b, total, roots, bound, roots >= bound, kind=kind)


def run_trial(kind: str, point: dict[str, Any], algorithm: str, seed: int, trial: int) -> ExperimentRow:
    """One trial; all randomness derives from ``(seed, trial)``."""
    stream = SeedStream(seed).child(trial)
    make = algorithm_factory(algorithm, stream.child(1)) if kind != "buffer" else None
    d = int(point["d"]) if "d" in point else 2
    if kind == "det":
        if "n" in point:
            res = build_theorem_det(make(), d, int(point["n"]))
        else:
            res = det_adversary(make(), d, int(point["k"]), connector=bool(point.get("connector", False)))
        return _row(kind, trial, d, res.k, res.instance.n, 0, 0, res.total_colors,
                    res.root_color_count, Fraction(res.even_d * res.k, 4))
    if kind == "rand":
        if "n" in point:
            sample = build_theorem_rand(d, int(point["n"]), stream.child(0))
        else:
            sample = sample_gk(stream.child(0), d, int(point["k"]))
        t = run_online(make(), sample.instance)
        return _row(kind, trial, d, sample.k, sample.n, 0, 0, t.num_colors,
                    sample.root_colors(t), Fraction(sample.even_d * sample.k, 4))
    if kind == "lookahead":
        l = int(point.get("l", 0))
        if "n" in point:
            sample = build_lookahead_instance(d, Fraction(point.get("c", 1)), int(point["n"]), l,
                                              stream.child(0)).sample
        else:
            sample = sample_phased(stream.child(0), d, int(point["k"]), l)
        t = sample.run(make(), l)
        return _row(kind, trial, d, sample.k, sample.n, l, 0, t.num_colors,
                    sample.root_colors(t), Fraction(sample.even_d * sample.k, 4))
    if kind == "buffer":
        n = int(point["n"])
        eps = float(point["eps"])
        b = int(point["b"]) if "b" in point else max_buffer(n, eps)
        res = build_buffer_adversary(buffered_factory(algorithm, b)(), d, eps, n, b)
        return _row(kind, trial, d, res.k_prime, n, 0, b, res.transcript.num_colors,
                    res.best_sub_colors, res.required_colors)
    if kind == "disk":
        rho = float(point["rho"])
        k = int(point["k"]) if "k" in point else theorem_k_disk(int(point["n"]), rho)
        sample = sample_gk(stream.child(0), 2, k)
        arr = embed_disks(sample, rho)
        inst = OnlineInstance.from_graph(intersection_graph(arr))
        t = run_online(make(), inst)
        roots = len(colors_used(t, sample.root_vertices))
        return _row(kind, trial, 2, k, len(arr.disks), 0, 0, t.num_colors, roots, Fraction(2 * k, 4))
    raise ValueError(f"unknown adversary {kind!r}")


def _timed_trial(args: tuple) -> ExperimentRow:
    kind, point, algorithm, seed, trial, timing = args
    start = time.perf_counter()
    try:
        row = run_trial(kind, point, algorithm, seed, trial)
    except Exception as exc:
        raise TrialError(trial, exc) from exc
    if timing:
        row.wall_time = time.perf_counter() - start
    return row


def default_threads() -> int:
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def run_grid(spec: ExperimentSpec, threads: int | None = None) -> list[ExperimentRow]:
    """Rows ordered by trial id; trial ids run over grid points, then trials."""
    jobs = []
    trial = 0
    for point in spec.points():
        for _ in range(spec.trials):
            jobs.append((spec.adversary, point, spec.algorithm, spec.seed, trial, spec.timing))
            trial += 1
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(jobs) <= 1:
        return [_timed_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_timed_trial, jobs))


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(r.csv_fields())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


@dataclass
class Summary:
    rows: int
    mean_root_colors: float | None
    min_root_colors: int | None
    p_hat: float | None
    bounds_held: bool

    def line(self) -> str:
        if not self.rows:
            return "rows=0"
        return (
            f"rows={self.rows} mean_root_colors={self.mean_root_colors:.4f} "
            f"min_root_colors={self.min_root_colors} p_hat={self.p_hat:.4f} "
            f"bounds_held={'true' if self.bounds_held else 'false'}"
        )


def expectation_bound(kind: str, d: int, k: int) -> Fraction:
    """Lower bound on the mean root colors for the randomized constructions."""
    if kind == "disk":
        return Fraction(k, 8)
    return Fraction((d - 1) * k, 8)


def summarize(rows: list[ExperimentRow]) -> Summary:
    """Per-trial bounds must hold for adaptive kinds; for sampled kinds the
    mean root colors of each ``(d, k, n, l)`` group must reach its expectation bound."""
    if not rows:
        return Summary(0, None, None, None, True)
    roots = [r.root_colors for r in rows]
    held = True
    groups: dict[tuple, list[ExperimentRow]] = {}
    for r in rows:
        if r.kind in EXPECTATION_KINDS:
            groups.setdefault((r.kind, r.d, r.k, r.n, r.l), []).append(r)
        elif not r.meets_bound:
            held = False
    for (kind, d, k, _, _), group in groups.items():
        mean = Fraction(sum(r.root_colors for r in group), len(group))
        if mean < expectation_bound(kind, d, k):
            held = False
    return Summary(
        rows=len(rows),
        mean_root_colors=sum(roots) / len(roots),
        min_root_colors=min(roots),
        p_hat=sum(r.meets_bound for r in rows) / len(rows),
        bounds_held=held,
    )


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    residuals: list[float]
    points: list[tuple[float, float]]


def fit_log_slope(rows: list[ExperimentRow] | list[dict]) -> SlopeFit:
    """Least-squares slope of mean ``total_colors`` against ``log2 n``."""
    by_n: dict[int, list[float]] = {}
    for r in rows:
        n, total = (int(r["n"]), float(r["total_colors"])) if isinstance(r, dict) else (r.n, r.total_colors)
        by_n.setdefault(n, []).append(total)
    if len(by_n) < 3:
        raise ValueError("need at least 3 distinct n values to fit a slope")
    ns = sorted(by_n)
    x = np.array([math.log2(n) for n in ns])
    y = np.array([sum(by_n[n]) / len(by_n[n]) for n in ns])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    return SlopeFit(float(slope), float(intercept), [float(e) for e in residuals], list(zip(x.tolist(), y.tolist())))


def write_outputs(spec: ExperimentSpec, rows: list[ExperimentRow]) -> str:
    text = rows_to_csv(rows)
    if spec.output:
        Path(spec.output).write_text(text)
    return text
