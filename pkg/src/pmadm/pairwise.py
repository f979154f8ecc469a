"""Pairwise MADM: two-node variance weights, round-robin ranking, cycle checks."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from .core import (
    DecisionMatrix,
    FloatArray,
    NormalizedMatrix,
    Normalizer,
    Ranking,
    Scheme,
    WeightVector,
    normalize,
    normalize_with,
    order_by_score,
    tie_groups,
)
from .errors import InputError

DEFAULT_CYCLE_CAP = 64


class Verdict(str, Enum):
    A_WINS = "a_wins"
    B_WINS = "b_wins"
    TIE = "tie"

    def mirror(self) -> Verdict:
        if self is Verdict.A_WINS:
            return Verdict.B_WINS
        if self is Verdict.B_WINS:
            return Verdict.A_WINS
        return self


@dataclass(frozen=True)
class PairwiseOutcome:
    """Result of comparing two normalized rows with weights fitted to that pair only."""

    a: str
    b: str
    weights: tuple[float, ...]
    utility_a: float
    utility_b: float
    delta: float
    verdict: Verdict


@dataclass(frozen=True)
class VarianceMatrix:
    attribute: int
    grid: FloatArray


def _as_row(row: npt.ArrayLike) -> tuple[float, ...]:
    if isinstance(row, tuple):
        return row
    return tuple(float(x) for x in np.asarray(row, dtype=np.float64).ravel())


def pair_weights(row_a: npt.ArrayLike, row_b: npt.ArrayLike) -> WeightVector:
    """Weights proportional to the two-node variance ``(a_i - b_i)**2 / 4`` of each attribute."""
    ra, rb = _as_row(row_a), _as_row(row_b)
    if len(ra) != len(rb):
        raise InputError(f"rows have different lengths ({len(ra)} and {len(rb)})")
    return WeightVector(np.array(_weights(ra, rb)))


def _weights(ra: tuple[float, ...], rb: tuple[float, ...]) -> list[float]:
    sq = [(x - y) * (x - y) for x, y in zip(ra, rb)]
    total = sum(sq)
    if total == 0.0:
        return [1.0 / len(ra)] * len(ra)
    return [q / total for q in sq]


def pair_utilities(
    row_a: npt.ArrayLike, row_b: npt.ArrayLike, a: str = "a", b: str = "b"
) -> PairwiseOutcome:
    """Utilities of two nodes under their shared pair weights.

    ``delta`` equals ``sum(d**3) / sum(d**2)`` with ``d = row_a - row_b``.
    Identical rows tie. Distinct rows whose delta is exactly zero (for
    example ``d = (x, -x)``) are settled by the first differing attribute so
    that only identical rows ever tie.
    """
    ra, rb = _as_row(row_a), _as_row(row_b)
    if len(ra) != len(rb):
        raise InputError(f"rows have different lengths ({len(ra)} and {len(rb)})")
    w = _weights(ra, rb)
    ua = math.fsum(wi * x for wi, x in zip(w, ra))
    ub = math.fsum(wi * y for wi, y in zip(w, rb))
    delta = ua - ub
    if delta > 0:
        verdict = Verdict.A_WINS
    elif delta < 0:
        verdict = Verdict.B_WINS
    else:
        verdict = Verdict.TIE
        for x, y in zip(ra, rb):
            if x != y:
                verdict = Verdict.A_WINS if x > y else Verdict.B_WINS
                break
    return PairwiseOutcome(a, b, tuple(w), ua, ub, delta, verdict)


class Comparator:
    """PMADM comparator over one normalized matrix, counting every evaluation."""

    def __init__(self, norm: NormalizedMatrix):
        self.node_ids = norm.node_ids
        self.rows = [tuple(float(x) for x in r) for r in norm.values]
        self.calls = 0

    def __call__(self, a: int, b: int) -> PairwiseOutcome:
        self.calls += 1
        return pair_utilities(self.rows[a], self.rows[b], self.node_ids[a], self.node_ids[b])

    def beats(self, a: int, b: int) -> bool:
        return self(a, b).verdict is Verdict.A_WINS


@dataclass(frozen=True)
class OutcomeGrid:
    """All C(m, 2) outcomes keyed by ``(a, b)`` with ``a < b`` (row indices)."""

    node_ids: tuple[str, ...]
    outcomes: Mapping[tuple[int, int], PairwiseOutcome]

    @property
    def m(self) -> int:
        return len(self.node_ids)

    def get(self, a: int, b: int) -> PairwiseOutcome:
        if a < b:
            return self.outcomes[(a, b)]
        o = self.outcomes[(b, a)]
        return PairwiseOutcome(o.b, o.a, o.weights, o.utility_b, o.utility_a, -o.delta, o.verdict.mirror())

    def beats(self) -> npt.NDArray[np.bool_]:
        m = self.m
        out = np.zeros((m, m), dtype=bool)
        for (a, b), o in self.outcomes.items():
            if o.verdict is Verdict.A_WINS:
                out[a, b] = True
            elif o.verdict is Verdict.B_WINS:
                out[b, a] = True
        return out

    def wins(self) -> list[int]:
        counts = [0] * self.m
        for (a, b), o in self.outcomes.items():
            if o.verdict is Verdict.A_WINS:
                counts[a] += 1
            elif o.verdict is Verdict.B_WINS:
                counts[b] += 1
        return counts

    def without(self, j: int) -> dict[tuple[int, int], PairwiseOutcome]:
        return {k: o for k, o in self.outcomes.items() if j not in k}


@dataclass(frozen=True)
class PairwiseRanking(Ranking):
    grid: OutcomeGrid | None = None
    norm: NormalizedMatrix | None = None
    cycle: tuple[str, str, str] | None = None

    @property
    def normalizer(self) -> Normalizer:
        assert self.norm is not None
        return self.norm.normalizer


def variance_matrix(norm: NormalizedMatrix, i: int) -> VarianceMatrix:
    """Two-node variances of attribute ``i`` (0-based) for every node pair."""
    if not 0 <= i < norm.n:
        raise InputError(f"attribute index {i} out of range 0..{norm.n - 1}")
    col = norm.values[:, i]
    diff = col[:, None] - col[None, :]
    return VarianceMatrix(i, diff * diff / 4.0)


def first_cycle(beats: npt.NDArray[np.bool_]) -> tuple[int, int, int] | None:
    """First intransitive triple ``(a, b, c)``, a beats b beats c beats a.

    Triples are visited as ``i < j < k`` in lexicographic order; the result
    starts at the smallest index of the triple.
    """
    m = beats.shape[0]
    for i in range(m - 2):
        for j in range(i + 1, m - 1):
            ks = np.arange(j + 1, m)
            if beats[i, j]:
                hit = beats[j, ks] & beats[ks, i]
                if hit.any():
                    return i, j, int(ks[hit.argmax()])
            if beats[j, i]:
                hit = beats[i, ks] & beats[ks, j]
                if hit.any():
                    return i, int(ks[hit.argmax()]), j
    return None


def has_cycle(beats: npt.NDArray[np.bool_], wins: Sequence[int] | None = None) -> bool:
    """Cycle test without a triple scan.

    A complete tournament is transitive exactly when its win counts are
    ``0..m-1``; with ties, fall back to counting directed 3-cycles.
    """
    m = beats.shape[0]
    decided = beats | beats.T
    np.fill_diagonal(decided, True)
    if decided.all():
        counts = sorted(wins) if wins is not None else sorted(beats.sum(axis=1).tolist())
        return counts != list(range(m))
    b = beats.astype(np.int64)
    return int(np.trace(b @ b @ b)) > 0


def _ranking_from_grid(
    grid: OutcomeGrid,
    norm: NormalizedMatrix,
    comparisons: int,
    cycle_cap: int,
    force_cycle_scan: bool,
) -> PairwiseRanking:
    wins = grid.wins()
    idx = order_by_score(grid.node_ids, wins)
    beats = grid.beats()
    cycle = None
    if grid.m >= 3:
        if grid.m <= cycle_cap or force_cycle_scan:
            found = first_cycle(beats)
            cycle = tuple(grid.node_ids[k] for k in found) if found else None
            detected = found is not None
        else:
            detected = has_cycle(beats, wins)
    else:
        detected = False
    return PairwiseRanking(
        algorithm="pmadm",
        order=tuple(grid.node_ids[j] for j in idx),
        scores={nid: float(w) for nid, w in zip(grid.node_ids, wins)},
        comparison_count=comparisons,
        utility_evaluation_count=2 * comparisons,
        cycle_detected=detected,
        tie_groups=tie_groups(grid.node_ids, wins, idx),
        clamped=norm.clamped,
        grid=grid,
        norm=norm,
        cycle=cycle,  # type: ignore[arg-type]
    )


def pmadm_rank_normalized(
    norm: NormalizedMatrix,
    *,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
    force_cycle_scan: bool = False,
    comparator: Comparator | None = None,
) -> PairwiseRanking:
    cmp = comparator or Comparator(norm)
    start = cmp.calls
    outcomes = {(a, b): cmp(a, b) for a in range(norm.m) for b in range(a + 1, norm.m)}
    grid = OutcomeGrid(norm.node_ids, outcomes)
    return _ranking_from_grid(grid, norm, cmp.calls - start, cycle_cap, force_cycle_scan)


def pmadm_rank(
    matrix: DecisionMatrix,
    scheme: Scheme | str = Scheme.MAX,
    *,
    normalizer: Normalizer | None = None,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
    force_cycle_scan: bool = False,
    comparator: Comparator | None = None,
) -> PairwiseRanking:
    """Round-robin PMADM ranking by pairwise win count (ties by input order).

    Every one of the m(m-1)/2 pairs is compared once. Intransitive triples
    are searched exhaustively when ``m <= cycle_cap`` (or when forced);
    larger inputs use the win-count consistency test instead, which detects
    a cycle but does not name one.
    """
    norm = normalize_with(matrix, normalizer) if normalizer is not None else normalize(matrix, scheme)
    return pmadm_rank_normalized(
        norm, cycle_cap=cycle_cap, force_cycle_scan=force_cycle_scan, comparator=comparator
    )


def find_cycle(
    matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str = Scheme.MAX
) -> tuple[str, str, str] | None:
    """First triple ``(a, b, c)`` with a beating b, b beating c and c beating a."""
    norm = matrix if isinstance(matrix, NormalizedMatrix) else normalize(matrix, scheme)
    if norm.m < 3:
        return None
    cmp = Comparator(norm)
    m = norm.m
    beats = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(a + 1, m):
            v = cmp(a, b).verdict
            if v is Verdict.A_WINS:
                beats[a, b] = True
            elif v is Verdict.B_WINS:
                beats[b, a] = True
    found = first_cycle(beats)
    return tuple(norm.node_ids[k] for k in found) if found else None  # type: ignore[return-value]


def update_node(
    matrix: DecisionMatrix,
    ranking: PairwiseRanking,
    node_id: str,
    new_row: Sequence[float],
    *,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
    force_cycle_scan: bool = False,
) -> PairwiseRanking:
    """Re-rank after one node's raw values change, recomputing only its m-1 pairs.

    Column constants stay as captured by ``ranking``; values past them are
    clipped into ``[0, 1]`` and the result's ``clamped`` flag is set. Call
    :func:`pmadm_rank` again for a full renormalization.
    """
    if ranking.grid is None or ranking.norm is None:
        raise InputError("update_node needs a ranking produced by pmadm_rank")
    j = matrix.index_of(node_id)
    if ranking.norm.node_ids != matrix.node_ids:
        raise InputError("ranking was produced for a different set of nodes")
    new_norm_row, clamped = ranking.normalizer.transform([new_row])
    values = np.array(ranking.norm.values)
    values[j] = new_norm_row[0]
    norm = NormalizedMatrix(
        matrix.node_ids, matrix.attributes, values, ranking.normalizer, clamped or ranking.norm.clamped
    )
    cmp = Comparator(norm)
    outcomes = dict(ranking.grid.outcomes)
    for k in range(norm.m):
        if k != j:
            key = (min(j, k), max(j, k))
            outcomes[key] = cmp(*key)
    grid = OutcomeGrid(norm.node_ids, outcomes)
    return _ranking_from_grid(grid, norm, cmp.calls, cycle_cap, force_cycle_scan)
