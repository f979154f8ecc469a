"""Low-complexity PMADM: quicksort-style partitioning around a chosen pivot node."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import rankdata

from .core import (
    DecisionMatrix,
    FloatArray,
    NormalizedMatrix,
    Ranking,
    Scheme,
    madm_rank_normalized,
    normalize,
)
from .errors import InputError, InvariantViolation
from .pairwise import Comparator, Verdict, pmadm_rank_normalized
from .tree_analysis import DecomposingTree, TreeNode, comparison_cost

__all__ = [
    "AvgOrderReport",
    "PivotKind",
    "PivotStrategy",
    "comparison_cost",
    "lpmadm_rank",
    "presequence_avg_order",
    "presequence_madm",
]


class PivotKind(str, Enum):
    RANDOM = "random"
    MADM = "madm"
    AVG_ORDER = "avg-order"
    ORACLE_MEDIAN = "oracle-median"


@dataclass(frozen=True)
class PivotStrategy:
    kind: PivotKind
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PivotKind(self.kind))
        if self.kind is PivotKind.RANDOM and self.seed is None:
            raise InputError("random pivots need an explicit seed")

    @classmethod
    def random(cls, seed: int) -> PivotStrategy:
        return cls(PivotKind.RANDOM, seed)

    @classmethod
    def parse(cls, text: str) -> PivotStrategy:
        """Parse ``random:SEED``, ``madm``, ``avg-order`` or ``oracle-median``."""
        key, _, arg = text.strip().lower().replace("_", "-").partition(":")
        try:
            kind = PivotKind(key)
        except ValueError:
            raise InputError(
                f"unknown pivot strategy {text!r} (expected random:SEED, madm, avg-order, oracle-median)"
            ) from None
        if kind is PivotKind.RANDOM:
            try:
                return cls(kind, int(arg))
            except ValueError:
                raise InputError(f"random pivot needs an integer seed, got {arg!r}") from None
        if arg:
            raise InputError(f"pivot strategy {key!r} takes no argument")
        return cls(kind)

    def __str__(self) -> str:
        return f"random:{self.seed}" if self.kind is PivotKind.RANDOM else self.kind.value


@dataclass(frozen=True)
class AvgOrderReport:
    """Per-attribute ranks (1 = best, ties share the mean rank) and their per-node average."""

    node_ids: tuple[str, ...]
    ranks: FloatArray
    average: FloatArray
    ordering: tuple[str, ...]


def _norm(matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str) -> NormalizedMatrix:
    return matrix if isinstance(matrix, NormalizedMatrix) else normalize(matrix, scheme)


def presequence_madm(
    matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str = Scheme.MAX
) -> tuple[str, ...]:
    return madm_rank_normalized(_norm(matrix, scheme)).order


def presequence_avg_order(
    matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str = Scheme.MAX
) -> AvgOrderReport:
    norm = _norm(matrix, scheme)
    ranks = np.column_stack([rankdata(-norm.values[:, i], method="average") for i in range(norm.n)])
    average = ranks.mean(axis=1)
    idx = sorted(range(norm.m), key=lambda j: (average[j], j))
    ranks.setflags(write=False)
    average.setflags(write=False)
    return AvgOrderReport(norm.node_ids, ranks, average, tuple(norm.node_ids[j] for j in idx))


def _presequence(norm: NormalizedMatrix, strategy: PivotStrategy) -> list[int] | None:
    """Best-first node indices the pivot is read from, or None for random pivots."""
    pos = {nid: j for j, nid in enumerate(norm.node_ids)}
    if strategy.kind is PivotKind.MADM:
        order = presequence_madm(norm)
    elif strategy.kind is PivotKind.AVG_ORDER:
        order = presequence_avg_order(norm).ordering
    elif strategy.kind is PivotKind.ORACLE_MEDIAN:
        # reference order from a separate, uncounted round robin
        order = pmadm_rank_normalized(norm, cycle_cap=0).order
    else:
        return None
    return [pos[nid] for nid in order]


def lpmadm_rank(
    matrix: DecisionMatrix | NormalizedMatrix,
    scheme: Scheme | str = Scheme.MAX,
    strategy: PivotStrategy | str = PivotStrategy(PivotKind.MADM),
    *,
    comparator: Comparator | None = None,
) -> tuple[Ranking, DecomposingTree]:
    """Rank by recursive partitioning around pivots.

    Each subset of two or more nodes picks a pivot, compares it with every
    other member, and splits into the nodes it beats and the nodes that beat
    it; both sides recurse. Pre-sequenced strategies take the member sitting
    at the lower middle of the pre-sequence (best-first index ``(v-1)//2``).
    A node that ties the pivot is placed below it when its input index is
    larger, above it otherwise, matching the round-robin tie-break.

    Returns the best-first ranking and the tree of subset sizes, whose
    children are ordered (losers, winners).
    """
    if isinstance(strategy, str):
        strategy = PivotStrategy.parse(strategy)
    norm = _norm(matrix, scheme)
    cmp = comparator or Comparator(norm)
    start = cmp.calls
    preseq = _presequence(norm, strategy)
    rank_of = {j: r for r, j in enumerate(preseq)} if preseq is not None else {}
    rng = random.Random(strategy.seed)

    def pick(members: list[int]) -> int:
        if preseq is None:
            return members[rng.randrange(len(members))]
        ordered = sorted(members, key=rank_of.__getitem__)
        return ordered[(len(ordered) - 1) // 2]

    def solve(members: list[int]) -> tuple[list[int], TreeNode]:
        # returns members worst-first
        if len(members) < 2:
            return list(members), TreeNode(len(members))
        pivot = pick(members)
        losers, winners = [], []
        for j in members:
            if j == pivot:
                continue
            verdict = cmp(pivot, j).verdict
            if verdict is Verdict.A_WINS or (verdict is Verdict.TIE and j > pivot):
                losers.append(j)
            else:
                winners.append(j)
        low, low_tree = solve(losers)
        high, high_tree = solve(winners)
        return low + [pivot] + high, TreeNode(len(members), (low_tree, high_tree))

    worst_first, root = solve(list(range(norm.m)))
    comparisons = cmp.calls - start
    tree = DecomposingTree(root)
    if comparison_cost(tree) != comparisons:
        raise InvariantViolation("tree cost disagrees with comparator count")
    best_first = worst_first[::-1]
    ranking = Ranking(
        algorithm="lpmadm",
        order=tuple(norm.node_ids[j] for j in best_first),
        scores={norm.node_ids[j]: float(norm.m - 1 - k) for k, j in enumerate(best_first)},
        comparison_count=comparisons,
        utility_evaluation_count=2 * comparisons,
        clamped=norm.clamped,
        extras={"pivot": str(strategy)},
    )
    return ranking, tree
