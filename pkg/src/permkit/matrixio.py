"""Reading matrix files and writing reports.

Plain text: whitespace-separated rows, one matrix per block, blocks split
by blank lines. ``#`` starts a comment; a comment of the form
``# label: name`` names the next block.

Structured: a JSON list of objects ``{"label": str, "rows": [[...], ...]}``.
"""
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class LabeledMatrix:
    label: str
    rows: np.ndarray


def _default_label(i: int) -> str:
    return f"matrix-{i + 1}"


def _finish_block(rows, lineno, label, out):
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"ragged rows in block ending at line {lineno}")
    out.append(LabeledMatrix(label or _default_label(len(out)), np.array(rows, dtype=float)))


def parse_plain(text: str) -> List[LabeledMatrix]:
    out, rows, label = [], [], None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment.lower().startswith("label:"):
            if rows:
                _finish_block(rows, lineno - 1, label, out)
                rows = []
            label = comment[len("label:"):].strip() or None
        if not line.strip():
            if rows:
                _finish_block(rows, lineno - 1, label, out)
                rows, label = [], None
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if rows:
        _finish_block(rows, lineno, label, out)
    return out


def parse_structured(text: str) -> List[LabeledMatrix]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ParseError("structured input must be a list of {label, rows} objects")
    out = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict) or "rows" not in item:
            raise ParseError(f"entry {i}: expected an object with 'rows'")
        rows = item["rows"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError(f"entry {i}: 'rows' must be a list of lists")
        if rows and len({len(r) for r in rows}) != 1:
            raise ParseError(f"entry {i}: ragged rows")
        try:
            arr = np.array(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"entry {i}: {exc}") from None
        label = item.get("label")
        if label is not None and not isinstance(label, str):
            raise ParseError(f"entry {i}: label must be a string")
        out.append(LabeledMatrix(label or _default_label(i), arr))
    return out


def parse_text(text: str) -> List[LabeledMatrix]:
    """Dispatch on content: a leading ``[`` means structured input."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        return parse_structured(text)
    return parse_plain(text)


def read_matrix_file(path) -> List[LabeledMatrix]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if str(path).endswith(".json"):
        return parse_structured(text)
    return parse_text(text)


def to_plain(value):
    """Convert numpy values and containers into JSON-ready Python objects.

    Non-finite floats become None so that the output stays standard JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, complex) or isinstance(value, np.complexfloating):
        return {"re": to_plain(value.real), "im": to_plain(value.imag)}
    return value


def dump_report(report) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(to_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_report(text: str):
    return json.loads(text)
