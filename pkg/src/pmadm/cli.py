"""Command-line front end: ``pmadm rank|analyze-tree|bench|verify``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from . import io as pio
from .core import DecisionMatrix, Scheme, madm_rank
from .errors import InputError, InvariantViolation, PmadmError
from .pairwise import pmadm_rank
from .sensitivity import random_matrix, stability_experiment
from .tree_analysis import (
    DISTRIBUTION_CAP,
    enumerate_decompositions,
    fault_tolerance_discrepancies,
    optimal_tree,
    tree_metrics,
)
from .tree_ranker import PivotStrategy, lpmadm_rank

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 70

ALGORITHMS = ("madm", "pmadm", "lpmadm")
BENCH_COLUMNS = ("m", "algorithm", "comparisons", "utility_evaluations", "wall_time_ns")
BENCH_HEADER = (
    "# utility_evaluations counts one weighted-sum evaluation per node: "
    "madm = m, pmadm = m(m-1) (two per pair), lpmadm = 2 * comparisons"
)
VERIFY_STRATEGIES = ("random:0", "madm", "avg-order", "oracle-median")
MAX_FIXTURES = 10


def run_algorithm(matrix: DecisionMatrix, algorithm: str, scheme: Scheme | str, pivot: str = "madm"):
    """Run one ranker; returns ``(ranking, tree_or_None)``."""
    if algorithm == "madm":
        return madm_rank(matrix, scheme), None
    if algorithm == "pmadm":
        return pmadm_rank(matrix, scheme), None
    if algorithm == "lpmadm":
        return lpmadm_rank(matrix, scheme, PivotStrategy.parse(pivot))
    raise InputError(f"unknown algorithm {algorithm!r}")


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def cmd_rank(args: argparse.Namespace) -> int:
    matrix = pio.read_matrix(args.input)
    scheme = Scheme.parse(args.scheme)
    ranking, tree = run_algorithm(matrix, args.algorithm, scheme, args.pivot)
    extra: dict[str, Any] = {"scheme": scheme.value}
    if args.algorithm == "lpmadm":
        extra["pivot"] = str(PivotStrategy.parse(args.pivot))
    cycle = getattr(ranking, "cycle", None)
    if cycle:
        extra["cycle"] = list(cycle)
    _emit(pio.dumps(pio.ranking_document(ranking, tree, **extra)), args.output)
    return EXIT_OK


def tree_document(m: int) -> dict[str, Any]:
    tm = tree_metrics(m)
    doc: dict[str, Any] = {
        "m": m,
        "layers": tm.layers,
        "divisions": tm.divisions,
        "comparisons": tm.comparisons,
        "bounds": [tm.lower_bound, tm.upper_bound],
        "lower_bound_printed": tm.lower_bound_printed,
        "final_layer_sum": tm.final_layer_sum,
        "final_layer_nodes": tm.final_layer_nodes,
        "optimal_split": list(tm.optimal_split),
        "fault_tolerance": tm.fault_tolerance,
        "tau": tm.tau,
        "probability_optimal": tm.probability_optimal,
        "tree": optimal_tree(m).layers(),
    }
    if m <= DISTRIBUTION_CAP:
        rep = enumerate_decompositions(m)
        doc["enumeration"] = {
            "min_comparisons": rep.min_comparisons,
            "max_comparisons": rep.max_comparisons,
            "optimal_first_splits": [list(s) for s in rep.optimal_first_splits],
            "unordered_optimal_splits": rep.unordered_optimal_splits,
            "optimal_trees": rep.optimal_trees,
        }
        hits = [r for r in fault_tolerance_discrepancies(m) if r["m"] == m]
        doc["fault_tolerance_discrepancy"] = hits[0] if hits else None
    return doc


def cmd_analyze_tree(args: argparse.Namespace) -> int:
    if args.m < 2:
        raise InputError(f"--m must be at least 2, got {args.m}")
    _emit(pio.dumps(tree_document(args.m)), args.output)
    return EXIT_OK


def _bench_algorithms(text: str) -> list[tuple[str, str]]:
    out = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        name, _, pivot = item.partition(":")
        name = name.lower()
        if name not in ALGORITHMS:
            raise InputError(f"unknown algorithm {name!r} in --algorithms")
        if name == "lpmadm":
            pivot = pivot or "madm"
            PivotStrategy.parse(pivot)
        elif pivot:
            raise InputError(f"{name} takes no pivot")
        out.append((name, pivot))
    if not out:
        raise InputError("--algorithms is empty")
    return out


def bench_rows(
    m_min: int, m_max: int, step: int, n: int, seed: int, algorithms: Sequence[tuple[str, str]], timing: bool = True
) -> list[dict[str, Any]]:
    if m_min < 1 or m_max < m_min or step < 1:
        raise InputError(f"invalid sweep {m_min}..{m_max} step {step}")
    if n < 1:
        raise InputError("--n must be at least 1")
    rows = []
    for m in range(m_min, m_max + 1, step):
        matrix = random_matrix(np.random.default_rng([seed, m]), m, n)
        for name, pivot in algorithms:
            t0 = time.perf_counter_ns()
            ranking, _ = run_algorithm(matrix, name, Scheme.MAX, pivot or "madm")
            elapsed = time.perf_counter_ns() - t0
            rows.append(
                {
                    "m": m,
                    "algorithm": f"{name}:{pivot}" if pivot else name,
                    "comparisons": ranking.comparison_count,
                    "utility_evaluations": ranking.utility_evaluation_count,
                    "wall_time_ns": elapsed if timing else 0,
                }
            )
    return rows


def format_bench(rows: Sequence[dict[str, Any]], seed: int, n: int) -> str:
    out = io.StringIO()
    out.write(BENCH_HEADER + "\n")
    out.write(f"# matrices: entries uniform in [0, 1), rng seeded with [{seed}, m], n = {n}\n")
    w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return out.getvalue()


def cmd_bench(args: argparse.Namespace) -> int:
    rows = bench_rows(
        args.m_min, args.m_max, args.step, args.n, args.seed, _bench_algorithms(args.algorithms), not args.no_timing
    )
    _emit(format_bench(rows, args.seed, args.n), args.output)
    return EXIT_OK


def verify_document(
    trials: int,
    m: int,
    n: int,
    seed: int,
    fixtures_dir: str | Path | None = None,
    strategies: Sequence[str] = VERIFY_STRATEGIES,
) -> dict[str, Any]:
    if trials < 1:
        raise InputError("--trials must be at least 1")
    if m < 1 or n < 1:
        raise InputError("--m and --n must be at least 1")
    parsed = [PivotStrategy.parse(s) for s in strategies]
    rng = np.random.default_rng(seed)
    cycles = acyclic = equal = stable = madm_unstable = 0
    mismatches: list[dict[str, Any]] = []
    fixtures: list[str] = []
    for trial in range(trials):
        matrix = random_matrix(rng, m, n)
        ref = pmadm_rank(matrix, force_cycle_scan=True)
        if ref.cycle_detected:
            cycles += 1
            if fixtures_dir is not None and len(fixtures) < MAX_FIXTURES:
                path = Path(fixtures_dir) / f"cycle_seed{seed}_m{m}_n{n}_trial{trial}.csv"
                fixtures.append(str(pio.write_matrix(matrix, path)))
        else:
            acyclic += 1
            bad = [str(s) for s in parsed if lpmadm_rank(matrix, strategy=s)[0].order != ref.order]
            if bad:
                mismatches.append({"trial": trial, "strategies": bad})
            else:
                equal += 1
        node = matrix.node_ids[int(rng.integers(m))]
        new_row = rng.random(n)
        rep = stability_experiment(matrix, node=node, new_row=new_row)
        stable += bool(rep.pmadm_stable)
        madm_unstable += rep.madm_stable is False
    return {
        "trials": trials,
        "m": m,
        "n": n,
        "seed": seed,
        "pivot_strategies": [str(s) for s in parsed],
        "cycles": cycles,
        "cycle_rate": cycles / trials,
        "acyclic": acyclic,
        "lpmadm_equal": equal,
        "lpmadm_equality_rate": equal / acyclic if acyclic else 1.0,
        "lpmadm_mismatches": mismatches,
        "stability_pass": stable,
        "stability_pass_rate": stable / trials,
        "madm_reordered": madm_unstable,
        "counterexample_fixtures": fixtures,
    }


def cmd_verify(args: argparse.Namespace) -> int:
    doc = verify_document(args.trials, args.m, args.n, args.seed, args.fixtures_dir)
    _emit(pio.dumps(doc), args.output)
    if doc["lpmadm_mismatches"] or doc["stability_pass"] != doc["trials"]:
        raise InvariantViolation(
            f"verify found {len(doc['lpmadm_mismatches'])} lpmadm mismatches and "
            f"{doc['trials'] - doc['stability_pass']} stability failures"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmadm", description="Pairwise multi-attribute ranking tools.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", help="rank the nodes of a matrix file")
    r.add_argument("input", help="matrix CSV: id,attr... with optional #direction row")
    r.add_argument("--algorithm", choices=ALGORITHMS, default="pmadm")
    r.add_argument("--scheme", choices=("max", "minmax"), default="max")
    r.add_argument(
        "--pivot", default="madm", help="lpmadm pivot: random:SEED, madm, avg-order or oracle-median"
    )
    r.add_argument("--output", help="report path (default: stdout)")
    r.set_defaults(func=cmd_rank)

    t = sub.add_parser("analyze-tree", help="comparison-count analysis for m nodes")
    t.add_argument("--m", type=int, required=True)
    t.add_argument("--output")
    t.set_defaults(func=cmd_analyze_tree)

    b = sub.add_parser("bench", help="counter sweep over m as a CSV table")
    b.add_argument("--m-min", type=int, default=100)
    b.add_argument("--m-max", type=int, default=300)
    b.add_argument("--step", type=int, default=50)
    b.add_argument("--n", type=int, default=4, help="number of attributes")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument(
        "--algorithms",
        default="madm,pmadm,lpmadm:madm",
        help="comma list; lpmadm takes an optional pivot, e.g. lpmadm:oracle-median",
    )
    b.add_argument("--no-timing", action="store_true", help="write 0 for wall_time_ns")
    b.add_argument("--output")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="Monte-Carlo property checks")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--m", type=int, default=5)
    v.add_argument("--n", type=int, default=4)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--fixtures-dir", help=f"write up to {MAX_FIXTURES} cyclic instances here")
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"pmadm: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (PmadmError, ValueError) as exc:
        print(f"pmadm: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
