"""Variance-weighted MADM, pairwise PMADM and its quicksort-style low-complexity variant."""

from .core import (
    AttributeSpec,
    DecisionMatrix,
    Direction,
    NormalizedMatrix,
    Normalizer,
    Ranking,
    Scheme,
    VarianceReport,
    WeightVector,
    madm_rank,
    madm_utilities,
    normalize,
    normalize_with,
    variances,
    weights,
)
from .errors import DegenerateInputError, InputError, InvariantViolation, PmadmError
from .io import parse_matrix, parse_report, read_matrix, read_report, write_matrix
from .pairwise import (
    Comparator,
    OutcomeGrid,
    PairwiseOutcome,
    PairwiseRanking,
    Verdict,
    find_cycle,
    pair_utilities,
    pair_weights,
    pmadm_rank,
    update_node,
    variance_matrix,
)
from .sensitivity import (
    PerturbationReport,
    changing_threshold,
    divergence_witness,
    flip_thresholds,
    stability_experiment,
)
from .tree_analysis import (
    DecomposingTree,
    EnumerationReport,
    TreeMetrics,
    TreeNode,
    comparison_bounds,
    comparison_cost,
    enumerate_decompositions,
    fault_tolerance,
    layers_and_divisions,
    max_fault_tolerance_node,
    optimal_tree,
    probability_optimal,
    tree_metrics,
)
from .tree_ranker import PivotKind, PivotStrategy, lpmadm_rank, presequence_avg_order, presequence_madm

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
