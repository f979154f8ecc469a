import pytest

from pmadm.errors import InputError
from pmadm.tree_analysis import (
    DecomposingTree,
    TreeNode,
    chain_tree,
    comparison_bounds,
    comparison_cost,
    enumerate_decompositions,
    fault_tolerance,
    fault_tolerance_discrepancies,
    final_layer_sum,
    layers_and_divisions,
    lower_bound_printed,
    max_fault_tolerance_node,
    optimal_split,
    optimal_tree,
    probability_optimal,
    same_range,
    tree_fault_tolerance,
    tree_metrics,
)


def all_trees(v):
    """Every decomposing tree for v nodes, built explicitly (no memo)."""
    if v < 2:
        return [TreeNode(v)]
    out = []
    for left in range(v):
        for lt in all_trees(left):
            for rt in all_trees(v - 1 - left):
                out.append(TreeNode(v, (lt, rt)))
    return out


def brute_costs(m):
    return [comparison_cost(DecomposingTree(t)) for t in all_trees(m)]


@pytest.mark.parametrize("m", range(2, 10))
def test_enumeration_matches_explicit_trees(m):
    costs = brute_costs(m)
    rep = enumerate_decompositions(m)
    assert rep.min_comparisons == min(costs)
    assert rep.max_comparisons == max(costs)
    assert rep.optimal_trees == costs.count(min(costs))
    assert sum(rep.distribution.values()) == len(costs)
    assert rep.distribution == {c: costs.count(c) for c in set(costs)}


@pytest.mark.parametrize("m,lo,hi", [(2, 1, 1), (3, 2, 3), (5, 6, 10), (8, 13, 28)])
def test_bounds_examples(m, lo, hi):
    assert comparison_bounds(m) == (lo, hi)
    rep = enumerate_decompositions(m)
    assert (rep.min_comparisons, rep.max_comparisons) == (lo, hi)


def test_printed_lower_bound_range_of_agreement():
    agree = [m for m in range(2, 64) if lower_bound_printed(m) == comparison_bounds(m)[0]]
    assert agree == list(range(4, 16))
    assert lower_bound_printed(16) == 40 and comparison_bounds(16)[0] == 38


def test_optimal_tree_examples():
    t = optimal_tree(9)
    assert t.layers()[1] == [4, 4]
    assert comparison_cost(t) == 16 == 8 + 6 + 2
    assert optimal_tree(2).layers() == [[2], [1, 0]]
    assert layers_and_divisions(optimal_tree(2)) == (1, 1)
    assert layers_and_divisions(optimal_tree(8))[0] == 3
    assert layers_and_divisions(optimal_tree(17))[0] == 4
    assert comparison_cost(optimal_tree(8)) == 13


def test_chain_tree():
    assert comparison_cost(chain_tree(5)) == 10
    assert layers_and_divisions(chain_tree(5)) == (4, 4)


def test_layer_totals():
    # each full layer i of the balanced tree holds m - 2^i + 1 in total
    for m in range(2, 300):
        layers = optimal_tree(m).layers()
        for i, layer in enumerate(layers[1:], start=1):
            assert sum(layer) == m - 2**i + 1
        assert comparison_cost(optimal_tree(m)) == comparison_bounds(m)[0]


def test_final_layer_sum():
    assert final_layer_sum(2) == 1
    assert final_layer_sum(17) == 2
    assert final_layer_sum(15) == 8
    assert sum(optimal_tree(15).layers()[-1]) == 8
    with pytest.raises(InputError):
        final_layer_sum(1)


def test_tree_validation():
    with pytest.raises(InputError):
        DecomposingTree(TreeNode(4, (TreeNode(1), TreeNode(1))))
    with pytest.raises(InputError):
        DecomposingTree(TreeNode(3))
    t = optimal_tree(23)
    assert DecomposingTree.from_layers(t.layers()) == t
    with pytest.raises(InputError):
        DecomposingTree.from_layers([[3], [1]])


def test_degrees():
    assert optimal_tree(3).degrees() == [[2], [1, 1]]
    assert optimal_tree(4).degrees() == [[2], [3, 1], [1, 1]]


def test_fault_tolerance_examples():
    assert fault_tolerance(14, 13) == 3
    assert fault_tolerance(7, 2) == 1
    assert not same_range(7, 2)
    assert fault_tolerance(0, 5) == 1


@pytest.mark.parametrize("k,tau", [(1, 3), (2, 5), (3, 11), (4, 23)])
def test_tau(k, tau):
    assert max_fault_tolerance_node(k) == tau
    if k >= 3:
        window = range(2**k, 2 ** (k + 1))
        counts = {m: enumerate_decompositions(m, cap=40).unordered_optimal_splits for m in window}
        assert max(counts, key=counts.get) == tau


def test_fault_tolerance_discrepancies_known():
    recs = fault_tolerance_discrepancies(16)
    assert [r["m"] for r in recs] == [6, 10, 12, 14]
    for r in recs:
        assert r["formula"] == r["unordered"] + 1


def test_formula_exact_for_odd_m():
    for m in range(3, 40, 2):
        n1, n2 = optimal_split(m)
        if same_range(n1, n2):
            assert fault_tolerance(n1, n2) == enumerate_decompositions(m, cap=40).unordered_optimal_splits


def test_tree_fault_tolerance():
    assert tree_fault_tolerance(optimal_tree(2)) == 1
    assert tree_fault_tolerance(optimal_tree(3)) == 1
    # m=7: the root split (3,3) scores 1, then two (1,1) splits score 1 each and are summed
    assert tree_fault_tolerance(optimal_tree(7)) == 1 * (1 + 1)
    # the whole-tree count is not the number of optimal trees
    assert enumerate_decompositions(7).optimal_trees == 1
    # every split of a chain crosses windows
    assert tree_fault_tolerance(chain_tree(6)) == 1


def test_probability_optimal():
    assert probability_optimal(12, (8, 3)) == pytest.approx(1 / 6)
    assert probability_optimal(3) == 1.0
    with pytest.raises(InputError):
        probability_optimal(12, (5, 5))
    for m in range(2, 200):
        assert 0 < probability_optimal(m) <= 1


def test_tree_metrics_fields():
    tm = tree_metrics(8)
    assert (tm.lower_bound, tm.upper_bound, tm.layers) == (13, 28, 3)
    assert tm.comparisons == 13
    with pytest.raises(InputError):
        tree_metrics(1)


def test_enumeration_cap():
    with pytest.raises(InputError):
        enumerate_decompositions(21)
    assert enumerate_decompositions(20).distribution is None
