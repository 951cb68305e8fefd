"""Canonical JSON/CSV serialization for instances, assignments and results.

Instance files carry decimal literals; an optional ``scale`` declares the
grid unit and makes the loaded values exact (off-grid values are rejected).
Without a scale, integer literals load as exact integers and decimal
literals load as doubles.  Writers render numbers as exact decimal tokens
with a fixed key order, so identical data always produces identical bytes.
"""
from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

from .core import AssignmentMatrix, DistanceMultiset, PointSet
from .numbers import (
    Number,
    decimal_str,
    is_exact,
    parse_grid_unit,
    snap_to_grid,
)

__all__ = [
    "num_token",
    "dumps_instance",
    "loads_instance",
    "dumps_assignment",
    "loads_assignment",
    "jsonable",
    "dumps_result",
    "write_csv",
]


def num_token(v: Number) -> str:
    """Exact JSON number literal for a value."""
    if is_exact(v):
        return decimal_str(v)
    return repr(float(v))


def _num_list(vals: Sequence[Number]) -> str:
    return "[" + ", ".join(num_token(v) for v in vals) + "]"


def dumps_instance(Y: DistanceMultiset, *, scale: Optional[Number] = None,
                   ground_truth: Optional[PointSet] = None) -> str:
    """Canonical instance document (fixed key order, exact decimals)."""
    n = Y.point_count()
    lines = [
        f'  "n": {n},',
        f'  "values": {_num_list(Y.values)},',
        f'  "multiplicities": {json.dumps(list(Y.multiplicities))}',
    ]
    if scale is not None:
        lines[-1] += ","
        lines.append(f'  "scale": {num_token(scale)}')
    if ground_truth is not None:
        lines[-1] += ","
        lines.append(f'  "ground_truth": {_num_list(ground_truth.coords)}')
    return "{\n" + "\n".join(lines) + "\n}\n"


def _exact_or_float(x: Union[int, Decimal]) -> Number:
    if isinstance(x, Decimal):
        f = Fraction(x)
        return int(f) if f.denominator == 1 else float(x)
    return int(x)


def loads_instance(text: str) -> Tuple[DistanceMultiset, Optional[PointSet], Optional[Number]]:
    """Parse and validate an instance document.

    Returns (multiset, ground truth or None, scale or None).  With a scale,
    every value (and coordinate) must sit on the declared grid and comes
    back exact.
    """
    doc = json.loads(text, parse_float=Decimal)
    if not isinstance(doc, dict):
        raise ValueError("instance document must be a JSON object")
    unknown = set(doc) - {"n", "values", "multiplicities", "scale", "ground_truth"}
    if unknown:
        raise ValueError(f"unknown instance fields: {sorted(unknown)}")
    for key in ("n", "values", "multiplicities"):
        if key not in doc:
            raise ValueError(f"instance document lacks {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")
    raw_vals = doc["values"]
    mults = doc["multiplicities"]
    scale = doc.get("scale")
    unit: Optional[Fraction] = None
    if scale is not None:
        unit = parse_grid_unit(str(scale) if isinstance(scale, Decimal) else scale)

    def load_num(x: Any) -> Number:
        if isinstance(x, bool) or not isinstance(x, (int, Decimal)):
            raise ValueError(f"bad numeric entry {x!r}")
        if unit is not None:
            k = snap_to_grid(Fraction(x) if isinstance(x, Decimal) else x, unit)
            v = k * unit
            return int(v) if v.denominator == 1 else v
        return _exact_or_float(x)

    values = tuple(load_num(v) for v in raw_vals)
    Y = DistanceMultiset(values, tuple(mults))
    if Y.point_count() != n:
        raise ValueError(f"total multiplicity {Y.total} does not match n={n}")
    gt = None
    if doc.get("ground_truth") is not None:
        gt = PointSet(tuple(load_num(v) for v in doc["ground_truth"]))
        if gt.n != n:
            raise ValueError("ground_truth length does not match n")
    scale_out: Optional[Number] = None
    if unit is not None:
        scale_out = int(unit) if unit.denominator == 1 else unit
    return Y, gt, scale_out


def dumps_assignment(P: AssignmentMatrix) -> str:
    """Canonical assignment document with lexicographically sorted entries."""
    integral = P.is_integral(0)
    rows = [
        f"    [{i}, {j}, {r}, {num_token(w)}]"
        for (i, j, r), w in sorted(P.entries.items())
    ]
    body = ",\n".join(rows)
    entries = "[\n" + body + "\n  ]" if rows else "[]"
    return (
        "{\n"
        f'  "n": {P.n},\n'
        f'  "m_prime": {P.m_prime},\n'
        f'  "integral": {"true" if integral else "false"},\n'
        f'  "entries": {entries}\n'
        "}\n"
    )


def loads_assignment(text: str) -> AssignmentMatrix:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("assignment document must be a JSON object")
    for key in ("n", "m_prime", "entries"):
        if key not in doc:
            raise ValueError(f"assignment document lacks {key!r}")
    entries: Dict[Tuple[int, int, int], Number] = {}
    for item in doc["entries"]:
        if not (isinstance(item, list) and len(item) == 4):
            raise ValueError(f"bad assignment entry {item!r}")
        i, j, r, w = item
        entries[(int(i), int(j), int(r))] = w
    return AssignmentMatrix(int(doc["n"]), int(doc["m_prime"]), entries)


def jsonable(obj: Any) -> Any:
    """Recursive conversion to JSON-safe values; exact numbers to tokens."""
    if isinstance(obj, Fraction):
        try:
            return int(obj) if obj.denominator == 1 else float(decimal_str(obj))
        except ValueError:
            return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def dumps_result(doc: Dict[str, Any]) -> str:
    """Stable rendering for result-style documents (reports, scores)."""
    return json.dumps(jsonable(doc), indent=2, sort_keys=False) + "\n"


def write_csv(out: TextIO, header: Sequence[str],
              rows: Sequence[Sequence[Any]]) -> None:
    """UTF-8 CSV with a fixed header and LF line endings."""
    import csv

    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
