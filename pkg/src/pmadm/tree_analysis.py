"""Integer analysis of decomposing trees.

A decomposing tree records the subset sizes produced by quicksort-style
partitioning: a node of value ``v >= 2`` is split around a pivot into two
children whose values sum to ``v - 1``. Values 0 and 1 are terminal. The
number of comparisons is the sum of every non-root value.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError

DEFAULT_ENUMERATION_CAP = 20
DISTRIBUTION_CAP = 16


@dataclass(frozen=True)
class TreeNode:
    value: int
    children: tuple[TreeNode, TreeNode] | None = None

    @property
    def is_split(self) -> bool:
        return self.children is not None


@dataclass(frozen=True)
class DecomposingTree:
    root: TreeNode

    def __post_init__(self) -> None:
        for node in self._distinct_nodes():
            if node.value < 0:
                raise InputError(f"negative node value {node.value}")
            if node.children is None:
                if node.value >= 2:
                    raise InputError(f"node of value {node.value} is never split")
                continue
            left, right = node.children
            if left.value + right.value != node.value - 1:
                raise InputError(
                    f"children {left.value}+{right.value} of {node.value} must sum to {node.value - 1}"
                )

    @property
    def m(self) -> int:
        return self.root.value

    def _distinct_nodes(self) -> Iterator[TreeNode]:
        # balanced trees share equal subtrees, so visit each object once
        seen: set[int] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            if node.children:
                stack.extend(node.children)

    def _fold(self) -> tuple[int, int, int]:
        """(height, split count, value total) with every node counted by multiplicity."""
        memo: dict[int, tuple[int, int, int]] = {}

        def go(node: TreeNode) -> tuple[int, int, int]:
            key = id(node)
            if key not in memo:
                if node.children is None:
                    memo[key] = (0, 0, node.value)
                else:
                    (h1, s1, t1), (h2, s2, t2) = go(node.children[0]), go(node.children[1])
                    memo[key] = (1 + max(h1, h2), 1 + s1 + s2, node.value + t1 + t2)
            return memo[key]

        return go(self.root)

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.children:
                stack.extend(reversed(node.children))

    def layer_nodes(self) -> list[list[TreeNode]]:
        layers = [[self.root]]
        while True:
            nxt = [c for node in layers[-1] if node.children for c in node.children]
            if not nxt:
                return layers
            layers.append(nxt)

    def layers(self) -> list[list[int]]:
        """Node values layer by layer, layer 0 holding the root."""
        return [[node.value for node in layer] for layer in self.layer_nodes()]

    def degrees(self) -> list[list[int]]:
        """Neighbour counts: 2 for a split root, 1 for terminals, 3 for internal splits."""
        out = []
        for depth, layer in enumerate(self.layer_nodes()):
            row = []
            for node in layer:
                deg = (2 if node.children else 0) + (1 if depth > 0 else 0)
                row.append(deg)
            out.append(row)
        return out

    @classmethod
    def from_layers(cls, layers: Sequence[Sequence[int]]) -> DecomposingTree:
        """Rebuild a tree from its layer lists.

        Every value ``>= 2`` in layer ``i`` consumes the next two entries of
        layer ``i + 1``, left to right.
        """
        if not layers or len(layers[0]) != 1:
            raise InputError("layer 0 must hold exactly the root value")
        built: list[TreeNode] = [TreeNode(int(v)) for v in layers[-1]]
        for depth in range(len(layers) - 2, -1, -1):
            below = iter(built)
            row: list[TreeNode] = []
            for v in layers[depth]:
                v = int(v)
                if v >= 2:
                    try:
                        kids = (next(below), next(below))
                    except StopIteration:
                        raise InputError(f"layer {depth + 1} is too short") from None
                    row.append(TreeNode(v, kids))
                else:
                    row.append(TreeNode(v))
            if next(below, None) is not None:
                raise InputError(f"layer {depth + 1} has unclaimed nodes")
            built = row
        return cls(built[0])


@dataclass(frozen=True)
class TreeMetrics:
    m: int
    layers: int
    divisions: int
    comparisons: int
    final_layer_sum: int
    final_layer_nodes: int
    lower_bound: int
    upper_bound: int
    lower_bound_printed: int
    optimal_split: tuple[int, int]
    fault_tolerance: int
    tau: int
    probability_optimal: float


@dataclass(frozen=True)
class EnumerationReport:
    m: int
    min_comparisons: int
    max_comparisons: int
    optimal_first_splits: tuple[tuple[int, int], ...]
    optimal_trees: int
    distribution: dict[int, int] | None = field(default=None, repr=False)

    @property
    def ordered_optimal_splits(self) -> int:
        return len(self.optimal_first_splits)

    @property
    def unordered_optimal_splits(self) -> int:
        return len({tuple(sorted(s)) for s in self.optimal_first_splits})


def floor_log2(m: int) -> int:
    if m < 1:
        raise InputError(f"log2 of {m} is undefined")
    return m.bit_length() - 1


def _build(value: int, choose) -> TreeNode:
    if value < 2:
        return TreeNode(value)
    left, right = choose(value)
    return TreeNode(value, (_build(left, choose), _build(right, choose)))


@lru_cache(maxsize=None)
def _balanced(value: int) -> TreeNode:
    if value < 2:
        return TreeNode(value)
    half = (value - 1) // 2
    return TreeNode(value, (_balanced(value - 1 - half), _balanced(half)))


def optimal_tree(m: int) -> DecomposingTree:
    """Tree from always pivoting on the middle: ``v -> (ceil((v-1)/2), floor((v-1)/2))``."""
    if m < 1:
        raise InputError("m must be at least 1")
    return DecomposingTree(_balanced(m))


def chain_tree(m: int) -> DecomposingTree:
    """Worst case: the pivot is always an extreme node, ``v -> (v - 1, 0)``."""
    if m < 1:
        raise InputError("m must be at least 1")
    return DecomposingTree(_build(m, lambda v: (v - 1, 0)))


def layers_and_divisions(tree: DecomposingTree) -> tuple[int, int]:
    height, divisions, _ = tree._fold()
    return height, divisions


def comparison_cost(tree: DecomposingTree) -> int:
    """Sum of node values over layers 1..l, i.e. comparisons spent by all pivots."""
    return tree._fold()[2] - tree.root.value


def _layer_sum_lower(m: int) -> int:
    f = floor_log2(m)
    return sum(m - 2**i + 1 for i in range(1, f + 1))


def lower_bound_printed(m: int) -> int:
    """The closed form ``(f-1)(m-1) + (m - 2^f + 1) - (2^(f-1) - 2)``, ``f = floor(log2 m)``.

    It agrees with the layer sum only for ``4 <= m <= 15``; kept for reports.
    """
    if m < 2:
        raise InputError("m must be at least 2")
    f = floor_log2(m)
    return (f - 1) * (m - 1) + (m - 2**f + 1) - (2 ** (f - 1) - 2)


def comparison_bounds(m: int) -> tuple[int, int]:
    """Fewest and most comparisons any pivot sequence can spend on ``m`` nodes.

    The lower bound sums the per-layer totals ``m - 2^i + 1`` over the
    ``floor(log2 m)`` layers of the balanced tree; the upper is m(m-1)/2.
    """
    if m < 2:
        raise InputError("m must be at least 2")
    return _layer_sum_lower(m), m * (m - 1) // 2


def final_layer_sum(m: int) -> int:
    if m < 2:
        raise InputError("m must be at least 2")
    return m - 2 ** floor_log2(m) + 1


def _epsilon(n: int) -> int:
    # final-layer sum of a side holding n nodes; sides of 0 or 1 are their own final layer
    if n < 2:
        return n
    return final_layer_sum(n)


def deepest_layer(tree: DecomposingTree) -> list[int]:
    return tree.layers()[-1]


def final_layer_nodes(tree: DecomposingTree) -> int:
    return len(deepest_layer(tree))


def same_range(n1: int, n2: int) -> bool:
    """Both sides fall in one ``[2^k, 2^(k+1))`` window, so their optimal subtrees are equally deep."""
    if n1 < 1 or n2 < 1:
        return False
    return floor_log2(n1) == floor_log2(n2)


def fault_tolerance(n1: int, n2: int) -> int:
    """How many first-level splits cost as little as the balanced one.

    ``min(eps_max, 2^floor(log2 n_max) - eps_min) + 1`` when both sides sit
    in the same power-of-two window, otherwise 1.
    """
    if n1 < 0 or n2 < 0:
        raise InputError("split sizes must be nonnegative")
    if not same_range(n1, n2):
        return 1
    e1, e2 = _epsilon(n1), _epsilon(n2)
    capacity = 2 ** floor_log2(max(n1, n2))
    return min(max(e1, e2), capacity - min(e1, e2)) + 1


def max_fault_tolerance_node(k: int) -> int:
    """Node count with the largest fault tolerance in ``[2^k, 2^(k+1))``."""
    if k < 1:
        raise InputError("range exponent must be at least 1")
    tau = 2**k + (2 ** (k + 1) - 2**k) // 2
    return tau if tau % 2 else tau - 1


def optimal_split(m: int) -> tuple[int, int]:
    if m < 2:
        raise InputError("m must be at least 2")
    return (m - 1) - (m - 1) // 2, (m - 1) // 2


def tree_fault_tolerance(tree: DecomposingTree) -> int:
    """Product over layers of the summed per-split tolerances."""
    total = 1
    for layer in tree.layer_nodes():
        splits = [node for node in layer if node.children]
        if splits:
            total *= sum(fault_tolerance(n.children[0].value, n.children[1].value) for n in splits)  # type: ignore[index]
    return total


def probability_optimal(m: int, split: tuple[int, int] | None = None) -> float:
    """Share of the ``floor(m/2)`` split pairs that keep the comparison count optimal.

    Same-window splits count their fault tolerance, cross-window splits count 1.
    """
    if m < 2:
        raise InputError("m must be at least 2")
    n1, n2 = split if split is not None else optimal_split(m)
    if n1 < 0 or n2 < 0 or n1 + n2 != m - 1:
        raise InputError(f"split ({n1}, {n2}) is inconsistent with m={m}")
    return fault_tolerance(n1, n2) / (m // 2)


@lru_cache(maxsize=None)
def _min_cost(v: int) -> int:
    if v < 2:
        return 0
    return v - 1 + min(_min_cost(a) + _min_cost(v - 1 - a) for a in range(v))


@lru_cache(maxsize=None)
def _max_cost(v: int) -> int:
    if v < 2:
        return 0
    return v - 1 + max(_max_cost(a) + _max_cost(v - 1 - a) for a in range(v))


@lru_cache(maxsize=None)
def _optimal_trees(v: int) -> int:
    if v < 2:
        return 1
    best = _min_cost(v)
    return sum(
        _optimal_trees(a) * _optimal_trees(v - 1 - a)
        for a in range(v)
        if v - 1 + _min_cost(a) + _min_cost(v - 1 - a) == best
    )


@lru_cache(maxsize=None)
def _distribution(v: int) -> tuple[tuple[int, int], ...]:
    if v < 2:
        return ((0, 1),)
    acc: Counter[int] = Counter()
    for a in range(v):
        for ca, na in _distribution(a):
            for cb, nb in _distribution(v - 1 - a):
                acc[v - 1 + ca + cb] += na * nb
    return tuple(sorted(acc.items()))


def enumerate_decompositions(m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> EnumerationReport:
    """Exhaustive search over every pivot choice at every level.

    Subtree costs depend only on subtree size, so extremes and optimal-tree
    counts are memoized per size. The full cost distribution (one entry per
    distinct tree) is included for ``m <= 16``.
    """
    if m < 2:
        raise InputError("m must be at least 2")
    if m > cap:
        raise InputError(f"m={m} exceeds the enumeration cap {cap}")
    best = _min_cost(m)
    splits = tuple(
        (a, m - 1 - a) for a in range(m) if m - 1 + _min_cost(a) + _min_cost(m - 1 - a) == best
    )
    dist = dict(_distribution(m)) if m <= DISTRIBUTION_CAP else None
    return EnumerationReport(m, best, _max_cost(m), splits, _optimal_trees(m), dist)


def fault_tolerance_discrepancies(m_max: int = DISTRIBUTION_CAP) -> list[dict[str, int]]:
    """Compare the closed-form tolerance with enumeration where its precondition holds.

    One record per ``m`` whose balanced split has both sides in one window
    and whose formula value differs from the unordered count of optimal
    first-level splits.
    """
    records = []
    for m in range(3, m_max + 1):
        n1, n2 = optimal_split(m)
        if not same_range(n1, n2):
            continue
        rep = enumerate_decompositions(m, cap=max(m_max, DEFAULT_ENUMERATION_CAP))
        formula = fault_tolerance(n1, n2)
        if formula != rep.unordered_optimal_splits:
            records.append(
                {
                    "m": m,
                    "n1": n1,
                    "n2": n2,
                    "formula": formula,
                    "unordered": rep.unordered_optimal_splits,
                    "ordered": rep.ordered_optimal_splits,
                }
            )
    return records


def tree_metrics(m: int) -> TreeMetrics:
    if m < 2:
        raise InputError("m must be at least 2")
    tree = optimal_tree(m)
    layers, divisions = layers_and_divisions(tree)
    lower, upper = comparison_bounds(m)
    split = optimal_split(m)
    return TreeMetrics(
        m=m,
        layers=layers,
        divisions=divisions,
        comparisons=comparison_cost(tree),
        final_layer_sum=final_layer_sum(m),
        final_layer_nodes=final_layer_nodes(tree),
        lower_bound=lower,
        upper_bound=upper,
        lower_bound_printed=lower_bound_printed(m),
        optimal_split=split,
        fault_tolerance=fault_tolerance(*split),
        tau=max_fault_tolerance_node(max(1, floor_log2(m))),
        probability_optimal=probability_optimal(m, split),
    )
