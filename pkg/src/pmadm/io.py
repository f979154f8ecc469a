"""Matrix CSV files and JSON ranking reports."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core import AttributeSpec, DecisionMatrix, Direction, Ranking
from .errors import InputError
from .tree_analysis import DecomposingTree

DIRECTION_TAG = "#direction"
REPORT_FIELDS = (
    "algorithm",
    "order",
    "scores",
    "comparison_count",
    "utility_evaluation_count",
    "cycle_detected",
)


def parse_matrix(text: str, source: str = "<matrix>") -> DecisionMatrix:
    """Parse ``id,attr...`` CSV text, with an optional ``#direction`` second row."""
    rows = [r for r in csv.reader(io.StringIO(text))]
    numbered = [(k + 1, [c.strip() for c in r]) for k, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not numbered:
        raise InputError(f"{source}: empty matrix file")
    line, header = numbered[0]
    if len(header) < 2 or header[0].lower() != "id":
        raise InputError(f"{source}: row {line}: header must start with 'id' followed by attribute names")
    names = header[1:]
    if any(not n for n in names):
        raise InputError(f"{source}: row {line}: empty attribute name")
    if len(set(names)) != len(names):
        raise InputError(f"{source}: row {line}: duplicate attribute names")
    body = numbered[1:]
    directions = [Direction.BENEFIT] * len(names)
    if body and body[0][1][0].lower() == DIRECTION_TAG:
        line, cells = body[0]
        _check_width(source, line, cells, len(header))
        directions = []
        for col, cell in enumerate(cells[1:], start=2):
            try:
                directions.append(Direction(cell.lower()))
            except ValueError:
                raise InputError(
                    f"{source}: row {line}, column {col}: direction must be benefit or cost, got {cell!r}"
                ) from None
        body = body[1:]
    if not body:
        raise InputError(f"{source}: no data rows")
    ids: list[str] = []
    values: list[list[float]] = []
    seen: dict[str, int] = {}
    for line, cells in body:
        _check_width(source, line, cells, len(header))
        nid = cells[0]
        if not nid:
            raise InputError(f"{source}: row {line}, column 1: empty node id")
        if nid in seen:
            raise InputError(f"{source}: row {line}, column 1: duplicate id {nid!r} (first on row {seen[nid]})")
        seen[nid] = line
        row = []
        for col, cell in enumerate(cells[1:], start=2):
            try:
                x = float(cell)
            except ValueError:
                x = math.nan
            if not math.isfinite(x):
                raise InputError(f"{source}: row {line}, column {col}: {cell!r} is not a finite number")
            row.append(x)
        ids.append(nid)
        values.append(row)
    attrs = tuple(AttributeSpec(n, d) for n, d in zip(names, directions))
    return DecisionMatrix(tuple(ids), attrs, values)


def _check_width(source: str, line: int, cells: list[str], width: int) -> None:
    if len(cells) != width:
        raise InputError(f"{source}: row {line}: expected {width} columns, got {len(cells)}")


def read_matrix(path: str | Path) -> DecisionMatrix:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_matrix(text, str(path))


def format_matrix(matrix: DecisionMatrix) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", *(a.name for a in matrix.attributes)])
    if any(a.direction is Direction.COST for a in matrix.attributes):
        w.writerow([DIRECTION_TAG, *(a.direction.value for a in matrix.attributes)])
    for nid, row in zip(matrix.node_ids, matrix.values):
        w.writerow([nid, *(repr(float(x)) for x in row)])
    return out.getvalue()


def write_matrix(matrix: DecisionMatrix, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_matrix(matrix), encoding="utf-8")
    return path


@dataclass(frozen=True)
class Report:
    """The parsed form of a ranking report."""

    algorithm: str
    order: tuple[str, ...]
    scores: dict[str, float]
    comparison_count: int
    utility_evaluation_count: int
    cycle_detected: bool
    tree: tuple[tuple[int, ...], ...] | None = None
    extra: Mapping[str, Any] | None = None


def ranking_document(ranking: Ranking, tree: DecomposingTree | None = None, **extra: Any) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "algorithm": ranking.algorithm,
        "order": list(ranking.order),
        "scores": {k: float(v) for k, v in ranking.scores.items()},
        "comparison_count": int(ranking.comparison_count),
        "utility_evaluation_count": int(ranking.utility_evaluation_count),
        "cycle_detected": bool(ranking.cycle_detected),
        "tie_groups": [list(g) for g in ranking.tie_groups],
        "clamped": bool(ranking.clamped),
    }
    if tree is not None:
        doc["tree"] = tree.layers()
    doc.update(extra)
    return doc


def dumps(doc: Mapping[str, Any]) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_document(doc: Mapping[str, Any], path: str | Path | None) -> str:
    text = dumps(doc)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def parse_report(text: str) -> Report:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"report is not valid JSON: {exc}") from None
    missing = [f for f in REPORT_FIELDS if f not in doc]
    if missing:
        raise InputError(f"report lacks fields {missing}")
    tree = doc.get("tree")
    if tree is not None:
        tree = tuple(tuple(int(v) for v in layer) for layer in tree)
        DecomposingTree.from_layers(tree)
    rest = {k: v for k, v in doc.items() if k not in REPORT_FIELDS and k != "tree"}
    return Report(
        algorithm=str(doc["algorithm"]),
        order=tuple(doc["order"]),
        scores={str(k): float(v) for k, v in doc["scores"].items()},
        comparison_count=int(doc["comparison_count"]),
        utility_evaluation_count=int(doc["utility_evaluation_count"]),
        cycle_detected=bool(doc["cycle_detected"]),
        tree=tree,
        extra=rest,
    )


def read_report(path: str | Path) -> Report:
    return parse_report(Path(path).read_text(encoding="utf-8"))
