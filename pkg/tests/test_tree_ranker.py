import numpy as np
import pytest

from pmadm.core import AttributeSpec, DecisionMatrix, normalize
from pmadm.errors import InputError
from pmadm.pairwise import Comparator, pmadm_rank
from pmadm.tree_analysis import comparison_bounds, comparison_cost, optimal_tree
from pmadm.tree_ranker import (
    PivotKind,
    PivotStrategy,
    lpmadm_rank,
    presequence_avg_order,
    presequence_madm,
)

STRATEGIES = ["random:0", "random:7", "madm", "avg-order", "oracle-median"]
SINGLE_COLUMN = DecisionMatrix.from_rows([[0.1], [0.2], [0.3], [0.4], [0.9]])
THREE = DecisionMatrix.from_rows([[101, 0.1], [102, 0.5], [103, 0.9]])


def test_parse():
    assert PivotStrategy.parse("random:42") == PivotStrategy.random(42)
    assert PivotStrategy.parse("oracle_median").kind is PivotKind.ORACLE_MEDIAN
    assert str(PivotStrategy.parse("Avg-Order")) == "avg-order"
    for bad in ("random", "random:x", "median", "madm:3"):
        with pytest.raises(InputError):
            PivotStrategy.parse(bad)


def test_presequences():
    assert presequence_madm(THREE) == ("N3", "N2", "N1")
    assert presequence_madm(SINGLE_COLUMN) == ("N5", "N4", "N3", "N2", "N1")
    assert presequence_avg_order(SINGLE_COLUMN).ordering == ("N5", "N4", "N3", "N2", "N1")


def test_avg_order_ties_and_constant_column():
    rep = presequence_avg_order(DecisionMatrix.from_rows([[0.5, 0.5]] * 4))
    np.testing.assert_array_equal(rep.average, [2.5] * 4)
    two = DecisionMatrix.from_rows([[v, 1.0] for v in (0.1, 0.2, 0.3, 0.4, 0.9)])
    rep = presequence_avg_order(two)
    np.testing.assert_array_equal(rep.ranks[:, 1], [3.0] * 5)
    np.testing.assert_array_equal(rep.average, [4.0, 3.5, 3.0, 2.5, 2.0])
    assert rep.ordering == ("N5", "N4", "N3", "N2", "N1")


def test_single_node():
    r, tree = lpmadm_rank(DecisionMatrix.from_rows([[0.4]]))
    assert r.order == ("N1",) and r.comparison_count == 0
    assert tree.layers() == [[1]]


def test_oracle_median_m8_is_optimal():
    rng = np.random.default_rng(1)
    for _ in range(20):
        matrix = DecisionMatrix.from_rows(rng.random((8, 1)))
        r, tree = lpmadm_rank(matrix, strategy="oracle-median")
        assert r.comparison_count == 13 == comparison_cost(tree)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_matches_round_robin_on_transitive_instances(strategy):
    rng = np.random.default_rng(21)
    checked = 0
    while checked < 100:
        m = int(rng.integers(2, 11))
        n = int(rng.integers(1, 5))
        matrix = DecisionMatrix.from_rows(rng.random((m, n)))
        ref = pmadm_rank(matrix, force_cycle_scan=True)
        if ref.cycle_detected:
            continue
        r, tree = lpmadm_rank(matrix, strategy=strategy)
        assert r.order == ref.order
        lo, hi = comparison_bounds(m)
        assert lo <= r.comparison_count <= hi
        assert r.utility_evaluation_count == 2 * r.comparison_count
        checked += 1


def test_identical_rows_keep_input_order():
    matrix = DecisionMatrix.from_rows([[0.3, 0.3]] * 5)
    for s in STRATEGIES:
        assert lpmadm_rank(matrix, strategy=s)[0].order == pmadm_rank(matrix).order


def test_partial_ties_match_round_robin():
    matrix = DecisionMatrix.from_rows([[0.3, 0.3], [0.5, 0.1], [0.3, 0.3], [0.9, 0.8], [0.3, 0.3]])
    ref = pmadm_rank(matrix)
    for s in STRATEGIES:
        assert lpmadm_rank(matrix, strategy=s)[0].order == ref.order


def test_shared_comparator_counts():
    matrix = DecisionMatrix.from_rows(np.random.default_rng(0).random((12, 3)))
    cmp = Comparator(normalize(matrix))
    r, tree = lpmadm_rank(matrix, strategy="madm", comparator=cmp)
    assert cmp.calls == r.comparison_count == comparison_cost(tree)


def test_random_pivot_deterministic():
    matrix = DecisionMatrix.from_rows(np.random.default_rng(9).random((30, 4)))
    a = lpmadm_rank(matrix, strategy="random:5")
    b = lpmadm_rank(matrix, strategy="random:5")
    assert a[0] == b[0] and a[1] == b[1]


def test_cost_attribute_flows_through():
    matrix = DecisionMatrix(
        ("a", "b", "c"),
        (AttributeSpec("delay", "cost"),),
        [[10.0], [5.0], [20.0]],
    )
    assert lpmadm_rank(matrix)[0].order == ("b", "a", "c")


def test_oracle_median_hits_lower_bound_when_transitive():
    rng = np.random.default_rng(31)
    for m in range(2, 21):
        matrix = DecisionMatrix.from_rows(rng.random((m, 1)))
        r, tree = lpmadm_rank(matrix, strategy="oracle-median")
        assert r.comparison_count == comparison_bounds(m)[0]
        assert tree.layers() == optimal_tree(m).layers()


def test_cost_never_exceeds_round_robin():
    rng = np.random.default_rng(32)
    for m in (2, 17, 64, 128):
        matrix = DecisionMatrix.from_rows(rng.random((m, 3)))
        for s in STRATEGIES:
            assert lpmadm_rank(matrix, strategy=s)[0].comparison_count <= m * (m - 1) // 2


def test_partition_soundness():
    rng = np.random.default_rng(33)
    checked = 0
    while checked < 50:
        m = int(rng.integers(3, 11))
        matrix = DecisionMatrix.from_rows(rng.random((m, 3)))
        ref = pmadm_rank(matrix, force_cycle_scan=True)
        if ref.cycle_detected:
            continue
        # the output order is a chain of direct wins, so every split was sound
        order = lpmadm_rank(matrix, strategy="random:3")[0].order
        beats = ref.grid.beats()
        idx = [matrix.index_of(x) for x in order]
        assert all(beats[a, b] for i, a in enumerate(idx) for b in idx[i + 1 :])
        checked += 1
