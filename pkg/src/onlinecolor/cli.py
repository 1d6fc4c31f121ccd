"""Command line entry point: ``onlinecolor <verb> ...``.

Every verb exits with status 0 only when all bound checks it performed held.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from .adversary.buffer import build_buffer_adversary, max_buffer
from .adversary.det import InvariantViolation, det_adversary, build_theorem_det, pad_to
from .adversary.lookahead import build_lookahead_instance
from .adversary.rand import estimate_root_color_probability, sample_gk
from .algorithms import ProtocolViolation, algorithm_factory, buffered_factory
from .disk import embed_disks, expected_graph, verify_embedding
from .graph import dump_json, load_json, read_dimacs, write_dimacs
from .harness import ExperimentSpec, TrialError, rows_to_csv, run_grid, summarize
from .oracles import SUITE_CHECKS, oracle_suite
from .rng import SeedStream


def _print(*parts: object) -> None:
    print(*parts, flush=True)


def cmd_det(args: argparse.Namespace) -> int:
    alg = algorithm_factory(args.alg, SeedStream(args.seed))()
    if args.n is not None:
        res = build_theorem_det(alg, args.d, args.n, audit=args.audit)
    else:
        res = det_adversary(alg, args.d, args.k, connector=args.connector, audit=args.audit)
        if args.pad_to is not None:
            res = pad_to(res, args.pad_to)
    bound = Fraction(res.even_d * res.k, 4)
    _print(
        f"d={res.d} k={res.k} n={res.instance.n} total_colors={res.total_colors} "
        f"root_colors={res.root_color_count} bound={bound} meets_bound={res.meets_root_bound}"
    )
    _export(args, res.graph, res.instance, res.transcript)
    return 0 if res.meets_root_bound else 1


def _export(args, graph, instance, transcript) -> None:
    if getattr(args, "emit_json", None):
        dump_json(args.emit_json, instance, transcript)
    if getattr(args, "emit_dimacs", None):
        write_dimacs(graph, args.emit_dimacs)


def cmd_rand(args: argparse.Namespace) -> int:
    make = algorithm_factory(args.alg, SeedStream(args.seed).child(1))
    est = estimate_root_color_probability(make, args.d, args.k, args.trials, SeedStream(args.seed).child(0))
    even = args.d - args.d % 2
    target = Fraction((args.d - 1) * args.k, 8)
    held = Fraction(sum(est.root_colors), est.trials) >= target
    _print(
        f"trials={est.trials} p_hat={est.p_hat:.4f} wilson99=[{est.lower:.4f}, {est.upper:.4f}] "
        f"mean_root_colors={est.mean_root_colors:.4f} expected_bound={target} held={held}"
    )
    if args.emit_summary:
        with open(args.emit_summary, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "n", "root_colors", "total_colors", "meets_bound"])
            for i, (n, rc, tc) in enumerate(zip(est.sizes, est.root_colors, est.total_colors)):
                w.writerow([i, n, rc, tc, "true" if 4 * rc >= even * args.k else "false"])
    return 0 if held else 1


def cmd_lookahead(args: argparse.Namespace) -> int:
    make = algorithm_factory(args.alg, SeedStream(args.seed).child(1))
    c = Fraction(args.c)
    roots, wins = [], 0
    for t in range(args.trials):
        res = build_lookahead_instance(args.d, c, args.n, args.l, SeedStream(args.seed).child(0, t))
        tr = res.sample.run(make(), args.l)
        rc = res.sample.root_colors(tr)
        roots.append(rc)
        wins += res.sample.bound_met(rc)
    k = res.k
    target = Fraction((args.d - 1) * k, 8)
    held = Fraction(sum(roots), len(roots)) >= target
    _print(
        f"k={k} l={args.l} n={args.n} trials={args.trials} p_hat={wins / args.trials:.4f} "
        f"mean_root_colors={sum(roots) / len(roots):.4f} expected_bound={target} held={held}"
    )
    return 0 if held else 1


def cmd_buffer(args: argparse.Namespace) -> int:
    b = max_buffer(args.n, args.eps) if args.b is None else args.b
    alg = buffered_factory(args.alg, b)()
    res = build_buffer_adversary(alg, args.d, args.eps, args.n, b)
    for p in res.phases:
        _print(f"phase={p.phase} live={p.live} qualifying={p.qualifying} required={p.required} "
               f"presented={p.presented} uncolored={p.uncolored} case2={p.case2}")
    _print(f"k={res.k} k_prime={res.k_prime} b={b} root_colors={res.best_sub_colors} "
           f"required={res.required_colors} meets_bound={res.meets_bound}")
    return 0 if res.meets_bound else 1


def cmd_disk_embed(args: argparse.Namespace) -> int:
    sample = sample_gk(args.seed, 2, args.k)
    arr = embed_disks(sample, args.rho)
    report = verify_embedding(arr, expected_graph(sample), sample.root_vertices)
    _print(f"k={args.k} rho={args.rho} disks={len(arr.disks)} eps={arr.eps:.6g} "
           f"delta={arr.delta:.6g} ratio={arr.ratio:.12g} verify={report}")
    if args.emit_json:
        arr.dump_json(args.emit_json)
    if args.emit_svg:
        Path(args.emit_svg).write_text(arr.to_svg())
    return 0 if report.ok else 1


def _load_graph(path: str):
    if path.endswith(".json"):
        inst, transcript = load_json(path)
        return inst.to_graph(), transcript
    return read_dimacs(path), None


def cmd_verify(args: argparse.Namespace) -> int:
    g, transcript = _load_graph(args.path)
    picked = [c for c in SUITE_CHECKS if getattr(args, c)]
    report = oracle_suite(g, picked or SUITE_CHECKS)
    ok = True
    if transcript is not None:
        report["proper_coloring"] = transcript.is_proper(g)
        report["colors"] = transcript.num_colors
        ok = report["proper_coloring"]
    if args.chordal:
        ok = ok and report["chordal"]
    print(json.dumps(report, indent=1, sort_keys=True))
    return 0 if ok else 1


def cmd_grid(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.load(args.spec)
    if args.out:
        spec.output = args.out
    if args.timing:
        spec.timing = True
    rows = run_grid(spec, args.threads)
    text = rows_to_csv(rows)
    if spec.output:
        Path(spec.output).write_text(text)
    else:
        sys.stdout.write(text)
    summary = summarize(rows)
    print(summary.line(), file=sys.stderr)
    return 0 if summary.bounds_held else 1


def cmd_export(args: argparse.Namespace) -> int:
    if args.adversary == "det":
        res = det_adversary(algorithm_factory(args.alg)(), args.d, args.k, connector=args.connector)
        graph, inst, transcript = res.graph, res.instance, res.transcript
    else:
        sample = sample_gk(args.seed, args.d, args.k)
        if args.connector:
            sample = sample.with_connector()
        graph, inst, transcript = sample.graph, sample.instance, None
    if args.format == "dimacs":
        write_dimacs(graph, args.out, comment=f"{args.adversary} d={args.d} k={args.k}")
    else:
        dump_json(args.out, inst, transcript)
    _print(f"wrote {args.out} n={graph.n} m={graph.m}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onlinecolor", description="Online coloring lower-bound constructions.")
    sub = p.add_subparsers(dest="verb", required=True)

    adv = sub.add_parser("adversary", help="run one adversary").add_subparsers(dest="kind", required=True)
    det = adv.add_parser("det", help="adaptive adversary")
    det.add_argument("--d", type=int, required=True)
    det.add_argument("--k", type=int, default=None)
    det.add_argument("--n", type=int, default=None, help="build the n-vertex instance instead of a level")
    det.add_argument("--alg", default="first-fit")
    det.add_argument("--seed", type=int, default=0)
    det.add_argument("--connector", action="store_true")
    det.add_argument("--audit", action="store_true")
    det.add_argument("--pad-to", type=int, default=None)
    det.add_argument("--emit-json", "--emit")
    det.add_argument("--emit-dimacs")
    det.set_defaults(func=cmd_det)

    rnd = adv.add_parser("rand", help="oblivious random family")
    rnd.add_argument("--d", type=int, required=True)
    rnd.add_argument("--k", type=int, required=True)
    rnd.add_argument("--alg", default="first-fit")
    rnd.add_argument("--trials", type=int, default=100)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--emit-summary")
    rnd.set_defaults(func=cmd_rand)

    look = adv.add_parser("lookahead", help="phased instances with dummy vertices")
    look.add_argument("--d", type=int, required=True)
    look.add_argument("--c", default="1")
    look.add_argument("--n", type=int, required=True)
    look.add_argument("--l", type=int, required=True)
    look.add_argument("--alg", default="first-fit")
    look.add_argument("--trials", type=int, default=100)
    look.add_argument("--seed", type=int, default=0)
    look.set_defaults(func=cmd_lookahead)

    buf = adv.add_parser("buffer", help="adaptive adversary for a reordering buffer")
    buf.add_argument("--d", type=int, required=True)
    buf.add_argument("--eps", type=float, required=True)
    buf.add_argument("--n", type=int, required=True)
    buf.add_argument("--b", type=int, default=None, help="default: floor(n^(1-eps))")
    buf.add_argument("--alg", default="first-fit")
    buf.set_defaults(func=cmd_buffer)

    disk = sub.add_parser("disk", help="disk embeddings").add_subparsers(dest="action", required=True)
    emb = disk.add_parser("embed")
    emb.add_argument("--k", type=int, required=True)
    emb.add_argument("--rho", type=float, required=True)
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--emit-svg")
    emb.add_argument("--emit-json")
    emb.set_defaults(func=cmd_disk_embed)

    ver = sub.add_parser("verify", help="run the oracle suite on a DIMACS or JSON file")
    ver.add_argument("path")
    ver.add_argument("--chordal", action="store_true", help="fail unless the graph is chordal")
    ver.add_argument("--strongly-chordal", dest="strongly_chordal", action="store_true")
    ver.add_argument("--degeneracy", action="store_true")
    ver.add_argument("--chi-brute", dest="chi", action="store_true")
    ver.add_argument("--classes", action="store_true", help="forest / tree / bipartite")
    ver.set_defaults(func=cmd_verify)

    grid = sub.add_parser("grid", help="run an experiment grid from a JSON spec")
    grid.add_argument("--spec", required=True)
    grid.add_argument("--out")
    grid.add_argument("--threads", type=int, default=None)
    grid.add_argument("--timing", action="store_true", help="fill the wall_time column")
    grid.set_defaults(func=cmd_grid)

    exp = sub.add_parser("export", help="write an instance to disk")
    exp.add_argument("--adversary", choices=("det", "rand"), default="det")
    exp.add_argument("--d", type=int, required=True)
    exp.add_argument("--k", type=int, required=True)
    exp.add_argument("--alg", default="first-fit")
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--connector", action="store_true")
    exp.add_argument("--format", choices=("dimacs", "json"), default="json")
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) == "det" and args.k is None and args.n is None:
        parser.error("adversary det needs --k or --n")
    try:
        return args.func(args)
    except (ValueError, InvariantViolation, ProtocolViolation, TrialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
