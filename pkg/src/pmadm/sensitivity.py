"""Sensitivity and stability experiments comparing MADM with PMADM.

All perturbations here are expressed in normalized units: a node's
normalized attribute value is moved directly, with column constants frozen.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DecisionMatrix,
    FloatArray,
    NormalizedMatrix,
    Scheme,
    madm_rank_normalized,
    madm_utilities,
    normalize,
    variances,
    weights,
)
from .errors import InputError
from .pairwise import PairwiseOutcome, Verdict, pair_utilities, pmadm_rank

ROOT_TOL = 1e-12
SCAN_POINTS = 256


@dataclass(frozen=True)
class PerturbationReport:
    """What it takes to flip, or whether a change disturbed, a pairwise order.

    Thresholds are changes to the first node's normalized attribute value;
    ``None`` means no flip is reachable inside ``[0, 1]`` and ``inf`` means
    the frozen-weight formula is undefined because the attribute's weight is 0.
    """

    pair: tuple[str, str] | None = None
    target: str | None = None
    attribute: int | None = None
    utilities_madm: tuple[float, float] | None = None
    utilities_pair: tuple[float, float] | None = None
    delta_u_i: float | None = None
    delta_u_j: float | None = None
    delta_u_ij: float | None = None
    threshold_satisfied: bool | None = None
    weight_global: float | None = None
    weight_pair: float | None = None
    flip_threshold_madm: float | None = None
    flip_threshold_pmadm: float | None = None
    flip_threshold_madm_frozen: float | None = None
    flip_threshold_pmadm_frozen: float | None = None
    madm_stable: bool | None = None
    pmadm_stable: bool | None = None
    clamped: bool = False
    details: dict[str, object] = field(default_factory=dict, compare=False)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _verdict_sign(o: PairwiseOutcome) -> int:
    return {Verdict.A_WINS: 1, Verdict.B_WINS: -1, Verdict.TIE: 0}[o.verdict]


def _norm(matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str) -> NormalizedMatrix:
    return matrix if isinstance(matrix, NormalizedMatrix) else normalize(matrix, scheme)


def _pair_index(norm: NormalizedMatrix, pair: tuple[str, str]) -> tuple[int, int]:
    try:
        i, j = norm.node_ids.index(pair[0]), norm.node_ids.index(pair[1])
    except ValueError:
        raise InputError(f"unknown node in pair {pair!r}") from None
    if i == j:
        raise InputError("a pair needs two different nodes")
    return i, j


def divergence_witness(
    matrix: DecisionMatrix | NormalizedMatrix, scheme: Scheme | str = Scheme.MAX
) -> tuple[str, str] | None:
    """First pair (in input order) that MADM and PMADM order differently."""
    norm = _norm(matrix, scheme)
    utils = madm_utilities(norm, weights(variances(norm)))
    rows = [tuple(float(x) for x in r) for r in norm.values]
    for i in range(norm.m):
        for j in range(i + 1, norm.m):
            madm = _sign(float(utils[i] - utils[j]))
            pm = _verdict_sign(pair_utilities(rows[i], rows[j]))
            if madm != pm:
                return norm.node_ids[i], norm.node_ids[j]
    return None


def changing_threshold(
    matrix: DecisionMatrix | NormalizedMatrix,
    scheme: Scheme | str = Scheme.MAX,
    pair: tuple[str, str] = ("N1", "N2"),
) -> PerturbationReport:
    """Utility shifts between the global-weight and pair-weight evaluations of one pair.

    The order flips exactly when the pairwise shift outweighs the MADM gap
    with the opposite sign, i.e. ``(U_i - U_j) * (U_ij^i - U_ij^j) < 0``.
    """
    norm = _norm(matrix, scheme)
    i, j = _pair_index(norm, pair)
    utils = madm_utilities(norm, weights(variances(norm)))
    u_i, u_j = float(utils[i]), float(utils[j])
    o = pair_utilities(norm.values[i], norm.values[j], *pair)
    d_i, d_j = o.utility_a - u_i, o.utility_b - u_j
    gap = u_i - u_j
    return PerturbationReport(
        pair=pair,
        target=pair[0],
        utilities_madm=(u_i, u_j),
        utilities_pair=(o.utility_a, o.utility_b),
        delta_u_i=d_i,
        delta_u_j=d_j,
        delta_u_ij=d_i - d_j,
        threshold_satisfied=gap * o.delta < 0,
        clamped=norm.clamped,
    )


def _first_flip(f: Callable[[float], float], limit: float, tol: float = ROOT_TOL) -> float | None:
    """Smallest ``|t|`` along ``[0, limit]`` where ``f`` takes the opposite sign of ``f(0)``.

    The returned point is on the flipped side, within ``tol`` of the boundary.
    """
    s0 = _sign(f(0.0))
    if s0 == 0:
        return 0.0
    if limit == 0:
        return None
    grid = np.linspace(0.0, limit, SCAN_POINTS + 1)
    prev = 0.0
    for t in grid[1:]:
        t = float(t)
        if _sign(f(t)) == -s0:
            lo, hi = prev, t
            while abs(hi - lo) > tol:
                mid = (lo + hi) / 2
                if _sign(f(mid)) == -s0:
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = t
    return None


def _perturbed(values: FloatArray, i: int, a: int, t: float) -> FloatArray:
    out = np.array(values)
    out[i, a] += t
    return out


def flip_thresholds(
    matrix: DecisionMatrix | NormalizedMatrix,
    scheme: Scheme | str = Scheme.MAX,
    pair: tuple[str, str] = ("N1", "N2"),
    attribute: int = 0,
) -> PerturbationReport:
    """Smallest change to the first node's attribute that reverses the pair's order.

    Reported four ways: under MADM and PMADM, each with weights held at their
    unperturbed values (closed form) and with weights recomputed from the
    perturbed values (root search). The root-search values are the
    self-consistent ones.
    """
    norm = _norm(matrix, scheme)
    i, j = _pair_index(norm, pair)
    if not 0 <= attribute < norm.n:
        raise InputError(f"attribute index {attribute} out of range 0..{norm.n - 1}")
    a = attribute
    X = np.array(norm.values)
    w = weights(variances(X)).weights
    o = pair_utilities(X[i], X[j], *pair)
    gap = float((X[i] - X[j]) @ w)
    w_a, wp_a = float(w[a]), o.weights[a]

    def madm_gap(t: float) -> float:
        Y = _perturbed(X, i, a, t)
        return float((Y[i] - Y[j]) @ weights(variances(Y)).weights)

    def pmadm_gap(t: float) -> float:
        Y = _perturbed(X, i, a, t)
        return pair_utilities(Y[i], Y[j]).delta

    x = float(X[i, a])

    def search(f: Callable[[float], float], start: float) -> float | None:
        direction = -_sign(start)
        limit = (1.0 - x) if direction > 0 else -x
        return _first_flip(f, limit)

    return PerturbationReport(
        pair=pair,
        target=pair[0],
        attribute=a,
        weight_global=w_a,
        weight_pair=wp_a,
        flip_threshold_madm=search(madm_gap, gap),
        flip_threshold_pmadm=search(pmadm_gap, o.delta),
        flip_threshold_madm_frozen=-gap / w_a if w_a > 0 else math.inf,
        flip_threshold_pmadm_frozen=-o.delta / wp_a if wp_a > 0 else math.inf,
        clamped=norm.clamped,
    )


def flips_madm(norm: NormalizedMatrix, pair: tuple[str, str], attribute: int, t: float) -> bool:
    """Does moving the first node's attribute by ``t`` reverse the MADM order of the pair?"""
    i, j = _pair_index(norm, pair)
    X = np.array(norm.values)
    before = _sign(float((X[i] - X[j]) @ weights(variances(X)).weights))
    Y = _perturbed(X, i, attribute, t)
    after = _sign(float((Y[i] - Y[j]) @ weights(variances(Y)).weights))
    return after == -before != 0


def flips_pmadm(norm: NormalizedMatrix, pair: tuple[str, str], attribute: int, t: float) -> bool:
    i, j = _pair_index(norm, pair)
    X = np.array(norm.values)
    before = _sign(pair_utilities(X[i], X[j]).delta)
    Y = _perturbed(X, i, attribute, t)
    after = _sign(pair_utilities(Y[i], Y[j]).delta)
    return after == -before != 0


def _restricted_order(order: Sequence[str], skip: str) -> list[str]:
    return [nid for nid in order if nid != skip]


def stability_experiment(
    matrix: DecisionMatrix,
    scheme: Scheme | str = Scheme.MAX,
    node: str = "N1",
    new_row: Sequence[float] | None = None,
) -> PerturbationReport:
    """Change one node's raw values and check whether the other nodes are disturbed.

    Normalization constants are frozen at the original matrix. PMADM is
    stable when every pairwise outcome not involving ``node`` is
    bit-identical before and after; MADM is stable when the relative order of
    the other nodes is unchanged.
    """
    j = matrix.index_of(node)
    if new_row is None:
        new_row = matrix.values[j]
    before = pmadm_rank(matrix, scheme, cycle_cap=0)
    changed = matrix.with_row(node, new_row)
    after = pmadm_rank(changed, normalizer=before.normalizer, cycle_cap=0)
    assert before.grid is not None and after.grid is not None
    assert before.norm is not None and after.norm is not None
    untouched_before = before.grid.without(j)
    untouched_after = after.grid.without(j)
    pmadm_stable = untouched_before == untouched_after
    madm_before = madm_rank_normalized(before.norm)
    madm_after = madm_rank_normalized(after.norm)
    rest_before = _restricted_order(madm_before.order, node)
    rest_after = _restricted_order(madm_after.order, node)
    return PerturbationReport(
        target=node,
        madm_stable=rest_before == rest_after,
        pmadm_stable=pmadm_stable,
        clamped=after.clamped,
        details={
            "madm_order_before": madm_before.order,
            "madm_order_after": madm_after.order,
            "pmadm_order_before": before.order,
            "pmadm_order_after": after.order,
        },
    )


def random_matrix(rng: np.random.Generator, m: int, n: int) -> DecisionMatrix:
    return DecisionMatrix.from_rows(rng.random((m, n)))


def search_divergence(seed: int, m: int = 5, n: int = 4, max_trials: int = 100_000) -> DecisionMatrix:
    """Random instance whose first MADM/PMADM disagreement is (N1, N2) with ``w_A^12 < w_A``."""
    rng = np.random.default_rng(seed)
    for _ in range(max_trials):
        matrix = random_matrix(rng, m, n)
        norm = normalize(matrix)
        if divergence_witness(norm) != ("N1", "N2"):
            continue
        w = weights(variances(norm)).weights
        if pair_utilities(norm.values[0], norm.values[1]).weights[0] < w[0]:
            return matrix
    raise LookupError(f"no divergence instance in {max_trials} trials")


def search_sensitivity(
    seed: int, pair_weight_larger: bool, m: int = 5, n: int = 4, max_trials: int = 100_000
) -> DecisionMatrix:
    """Instance where attribute 0 of (N1, N2) shows the expected threshold ordering.

    With ``pair_weight_larger`` the pair weight of attribute 0 exceeds its
    global weight and PMADM needs the smaller change to flip; otherwise the
    reverse. Both thresholds must be reachable.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_trials):
        matrix = random_matrix(rng, m, n)
        rep = flip_thresholds(matrix)
        if rep.flip_threshold_madm is None or rep.flip_threshold_pmadm is None:
            continue
        assert rep.weight_pair is not None and rep.weight_global is not None
        if (rep.weight_pair > rep.weight_global) != pair_weight_larger:
            continue
        pm, md = abs(rep.flip_threshold_pmadm), abs(rep.flip_threshold_madm)
        if (pm < md) == pair_weight_larger and pm != md:
            return matrix
    raise LookupError(f"no sensitivity instance in {max_trials} trials")


def search_madm_instability(
    seed: int, m: int = 5, n: int = 4, max_trials: int = 100_000
) -> tuple[DecisionMatrix, tuple[float, ...]]:
    """Instance and new raw row for the last node that reorders the others under MADM."""
    rng = np.random.default_rng(seed)
    for _ in range(max_trials):
        matrix = random_matrix(rng, m, n)
        node = matrix.node_ids[-1]
        new_row = tuple(float(x) for x in rng.random(n))
        rep = stability_experiment(matrix, node=node, new_row=new_row)
        if rep.madm_stable is False and not rep.clamped:
            return matrix, new_row
    raise LookupError(f"no unstable MADM instance in {max_trials} trials")


def sensitivity_survey(seed: int, trials: int, m: int = 5, n: int = 4) -> dict[str, int]:
    """How often random instances follow the weight-ordering rule for flip thresholds."""
    rng = np.random.default_rng(seed)
    counts = {"trials": 0, "comparable": 0, "follows_rule": 0}
    for _ in range(trials):
        counts["trials"] += 1
        rep = flip_thresholds(random_matrix(rng, m, n))
        if rep.flip_threshold_madm is None or rep.flip_threshold_pmadm is None:
            continue
        assert rep.weight_pair is not None and rep.weight_global is not None
        if rep.weight_pair == rep.weight_global:
            continue
        counts["comparable"] += 1
        pm, md = abs(rep.flip_threshold_pmadm), abs(rep.flip_threshold_madm)
        if (pm < md) == (rep.weight_pair > rep.weight_global):
            counts["follows_rule"] += 1
    return counts
