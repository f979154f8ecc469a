"""Decision matrices, normalization, variance weights and the MADM baseline."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt

from .errors import DegenerateInputError, InputError

FloatArray = npt.NDArray[np.float64]

WEIGHT_SUM_TOL = 1e-12


class Direction(str, Enum):
    BENEFIT = "benefit"
    COST = "cost"


class Scheme(str, Enum):
    MAX = "max"
    MIN_MAX = "min-max"

    @classmethod
    def parse(cls, value: str | Scheme) -> Scheme:
        if isinstance(value, Scheme):
            return value
        key = value.strip().lower().replace("_", "-")
        if key == "minmax":
            key = "min-max"
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown normalization scheme {value!r} (expected max or minmax)") from None


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    direction: Direction = Direction.BENEFIT

    def __post_init__(self) -> None:
        object.__setattr__(self, "direction", Direction(self.direction))


def _frozen(values: npt.ArrayLike) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DecisionMatrix:
    """Raw attribute values, one row per candidate node.

    ``values[j, i]`` is attribute ``i`` of node ``j``, in whatever units the
    caller measured it.
    """

    node_ids: tuple[str, ...]
    attributes: tuple[AttributeSpec, ...]
    values: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_ids", tuple(str(n) for n in self.node_ids))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "values", _frozen(self.values))
        m, n = len(self.node_ids), len(self.attributes)
        if m < 1 or n < 1:
            raise InputError(f"need at least one node and one attribute, got {m}x{n}")
        if self.values.shape != (m, n):
            raise InputError(f"value grid has shape {self.values.shape}, expected {(m, n)}")
        if len(set(self.node_ids)) != m:
            raise InputError("node ids must be unique")
        if len({a.name for a in self.attributes}) != n:
            raise InputError("attribute names must be unique")
        if not np.isfinite(self.values).all():
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise InputError(
                f"non-finite value at node {self.node_ids[bad[0]]!r}, "
                f"attribute {self.attributes[bad[1]].name!r}"
            )

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[float]],
        node_ids: Sequence[str] | None = None,
        attributes: Sequence[str | AttributeSpec] | None = None,
    ) -> DecisionMatrix:
        values = np.array(rows, dtype=np.float64)
        if values.ndim != 2:
            raise InputError("rows must form a 2-D grid")
        m, n = values.shape
        if node_ids is None:
            node_ids = [f"N{j + 1}" for j in range(m)]
        if attributes is None:
            attributes = [f"P{i + 1}" for i in range(n)]
        specs = tuple(a if isinstance(a, AttributeSpec) else AttributeSpec(a) for a in attributes)
        return cls(tuple(node_ids), specs, values)

    @property
    def m(self) -> int:
        return len(self.node_ids)

    @property
    def n(self) -> int:
        return len(self.attributes)

    def index_of(self, node_id: str) -> int:
        try:
            return self.node_ids.index(node_id)
        except ValueError:
            raise InputError(f"unknown node id {node_id!r}") from None

    def with_row(self, node_id: str, row: Sequence[float]) -> DecisionMatrix:
        """Copy of the matrix with one node's raw values replaced."""
        j = self.index_of(node_id)
        values = np.array(self.values)
        new = np.asarray(row, dtype=np.float64)
        if new.shape != (self.n,):
            raise InputError(f"replacement row has {new.size} values, expected {self.n}")
        values[j] = new
        return DecisionMatrix(self.node_ids, self.attributes, values)


@dataclass(frozen=True)
class Normalizer:
    """Column constants captured from one matrix, reusable on changed rows.

    Keeping these frozen is what lets a single node be updated without
    touching anyone else's normalized values.
    """

    scheme: Scheme
    directions: tuple[Direction, ...]
    col_min: FloatArray
    col_max: FloatArray

    @classmethod
    def fit(cls, matrix: DecisionMatrix, scheme: Scheme | str = Scheme.MAX) -> Normalizer:
        scheme = Scheme.parse(scheme)
        vals = matrix.values
        col_min = vals.min(axis=0)
        col_max = vals.max(axis=0)
        directions = tuple(a.direction for a in matrix.attributes)
        if scheme is Scheme.MAX:
            for i, (attr, lo, hi) in enumerate(zip(matrix.attributes, col_min, col_max)):
                if lo == hi:
                    continue
                if attr.direction is Direction.COST and lo <= 0:
                    what = "contains 0" if (vals[:, i] == 0).any() else "has negative values"
                    raise DegenerateInputError(
                        f"cost attribute {attr.name!r} {what}; max normalization needs "
                        "strictly positive cost values (use the min-max scheme instead)"
                    )
                if attr.direction is Direction.BENEFIT and lo < 0:
                    raise DegenerateInputError(
                        f"benefit attribute {attr.name!r} has negative values; max "
                        "normalization needs nonnegative values (use the min-max scheme instead)"
                    )
        return cls(scheme, directions, _frozen(col_min), _frozen(col_max))

    def transform(self, values: npt.ArrayLike) -> tuple[FloatArray, bool]:
        """Normalize rows with the frozen constants.

        Returns the clipped values and whether any value fell outside
        ``[0, 1]`` before clipping.
        """
        v = np.atleast_2d(np.asarray(values, dtype=np.float64))
        if v.shape[1] != len(self.directions):
            raise InputError(f"rows have {v.shape[1]} values, expected {len(self.directions)}")
        out = np.empty_like(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            for i, direction in enumerate(self.directions):
                out[:, i] = self._column(v[:, i], self.col_min[i], self.col_max[i], direction)
        clamped = bool(((out < 0.0) | (out > 1.0)).any())
        return np.clip(out, 0.0, 1.0), clamped

    def _column(self, col: FloatArray, lo: float, hi: float, direction: Direction) -> FloatArray:
        benefit = direction is Direction.BENEFIT
        if lo == hi:
            # constant reference column: its own value maps to the scheme's fixed point,
            # anything else is pushed out of range so it gets clipped and flagged
            base = 1.0 if self.scheme is Scheme.MAX else 0.0
            if self.scheme is Scheme.MAX and lo > 0:
                return col / lo if benefit else np.where(col > 0, lo / col, np.inf)
            better = col > lo if benefit else col < lo
            worse = col < lo if benefit else col > lo
            return np.where(better, np.inf, np.where(worse, -np.inf, base))
        if self.scheme is Scheme.MAX:
            if benefit:
                return col / hi
            return np.where(col > 0, lo / col, np.inf)
        span = hi - lo
        return (col - lo) / span if benefit else (hi - col) / span


@dataclass(frozen=True)
class NormalizedMatrix:
    """Normalized values in ``[0, 1]`` where larger is always better."""

    node_ids: tuple[str, ...]
    attributes: tuple[AttributeSpec, ...]
    values: FloatArray
    normalizer: Normalizer
    clamped: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != (len(self.node_ids), len(self.attributes)):
            raise InputError("normalized grid does not match node ids x attributes")
        if ((self.values < 0) | (self.values > 1)).any():
            raise InputError("normalized values must lie in [0, 1]")

    @property
    def scheme(self) -> Scheme:
        return self.normalizer.scheme

    @property
    def m(self) -> int:
        return len(self.node_ids)

    @property
    def n(self) -> int:
        return len(self.attributes)

    def row(self, j: int) -> FloatArray:
        return self.values[j]


@dataclass(frozen=True)
class VarianceReport:
    variances: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "variances", _frozen(self.variances))


@dataclass(frozen=True)
class WeightVector:
    weights: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> float:
        return float(self.weights[i])


@dataclass(frozen=True)
class Ranking:
    """A best-first order over node ids plus the work it took to get there.

    ``scores`` holds MADM utilities or pairwise win counts depending on
    ``algorithm``. lPMADM never evaluates all pairs, so it reports the implied
    number of nodes ranked below each node and leaves ``cycle_detected`` False;
    use :func:`pmadm.pairwise.find_cycle` for an actual check.
    """

    algorithm: str
    order: tuple[str, ...]
    scores: Mapping[str, float]
    comparison_count: int
    utility_evaluation_count: int
    cycle_detected: bool = False
    tie_groups: tuple[tuple[str, ...], ...] = ()
    clamped: bool = False
    extras: Mapping[str, object] = field(default_factory=dict, compare=False, repr=False)

    def position(self, node_id: str) -> int:
        return self.order.index(node_id)


def order_by_score(node_ids: Sequence[str], scores: Sequence[float]) -> list[int]:
    """Indices sorted by descending score; equal scores keep ascending index."""
    return sorted(range(len(node_ids)), key=lambda j: (-scores[j], j))


def tie_groups(node_ids: Sequence[str], scores: Sequence[float], order: Sequence[int]) -> tuple[tuple[str, ...], ...]:
    groups: list[tuple[str, ...]] = []
    run = [order[0]] if order else []
    for j in order[1:]:
        if scores[j] == scores[run[-1]]:
            run.append(j)
        else:
            if len(run) > 1:
                groups.append(tuple(node_ids[k] for k in run))
            run = [j]
    if len(run) > 1:
        groups.append(tuple(node_ids[k] for k in run))
    return tuple(groups)


def normalize(matrix: DecisionMatrix, scheme: Scheme | str = Scheme.MAX) -> NormalizedMatrix:
    """Map every attribute onto ``[0, 1]`` with larger meaning better.

    ``max``: benefit ``v / max``, cost ``min / v``.
    ``min-max``: benefit ``(v - min) / (max - min)``, cost ``(max - v) / (max - min)``.
    Constant columns become all ones under ``max`` and all zeros under ``min-max``.
    """
    normalizer = Normalizer.fit(matrix, scheme)
    values, _ = normalizer.transform(matrix.values)
    return NormalizedMatrix(matrix.node_ids, matrix.attributes, values, normalizer)


def normalize_with(matrix: DecisionMatrix, normalizer: Normalizer) -> NormalizedMatrix:
    """Normalize against previously captured column constants, clipping to ``[0, 1]``."""
    values, clamped = normalizer.transform(matrix.values)
    return NormalizedMatrix(matrix.node_ids, matrix.attributes, values, normalizer, clamped)


def variances(norm: NormalizedMatrix | npt.ArrayLike) -> VarianceReport:
    """Population variance (divisor m) of each normalized column."""
    values = norm.values if isinstance(norm, NormalizedMatrix) else np.asarray(norm, dtype=np.float64)
    return VarianceReport(np.var(values, axis=0))


def weights(report: VarianceReport | npt.ArrayLike) -> WeightVector:
    """Variance-proportional weights; uniform when every column is constant."""
    v = report.variances if isinstance(report, VarianceReport) else np.asarray(report, dtype=np.float64)
    total = v.sum()
    if total == 0:
        return WeightVector(np.full(v.shape, 1.0 / v.size))
    return WeightVector(v / total)


def madm_utilities(norm: NormalizedMatrix | npt.ArrayLike, w: WeightVector | npt.ArrayLike) -> FloatArray:
    values = norm.values if isinstance(norm, NormalizedMatrix) else np.asarray(norm, dtype=np.float64)
    wv = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != wv.shape[0]:
        raise InputError(f"{values.shape[-1]} attributes but {wv.shape[0]} weights")
    return values @ wv


def madm_rank_normalized(norm: NormalizedMatrix) -> Ranking:
    w = weights(variances(norm))
    utils = madm_utilities(norm, w)
    idx = order_by_score(norm.node_ids, utils)
    return Ranking(
        algorithm="madm",
        order=tuple(norm.node_ids[j] for j in idx),
        scores={nid: float(u) for nid, u in zip(norm.node_ids, utils)},
        comparison_count=0,
        utility_evaluation_count=norm.m,
        tie_groups=tie_groups(norm.node_ids, utils, idx),
        clamped=norm.clamped,
        extras={"weights": tuple(float(x) for x in w.weights)},
    )


def madm_rank(matrix: DecisionMatrix, scheme: Scheme | str = Scheme.MAX) -> Ranking:
    """Traditional variance-weighted MADM: one global weight vector, one utility per node."""
    return madm_rank_normalized(normalize(matrix, scheme))
