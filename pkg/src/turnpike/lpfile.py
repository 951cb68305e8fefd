"""Text interchange for models and solutions.

Models are written in the standard human-readable linear-program format
(objective, Subject To, Bounds, Binaries/Generals sections) with exact
decimal coefficients, so files are byte-reproducible and usable by external
solvers.  A matching reader reconstructs the ModelMatrix, and a plain
``name value`` solution format maps external results back onto model
variables.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

from .model import EQ, GE, LE, LinearRow, ModelMatrix, VarRef
from .numbers import Number, decimal_str, parse_decimal_exact

__all__ = [
    "render_model",
    "write_model",
    "read_model",
    "read_solution_values",
    "LpFormatError",
]

_MAX_LINE = 200

_NAME_RE = re.compile(r"^([PTx])((?:_\d+)+)$")
_ARITY = {"x": 1, "P": 3, "T": 6}

_META_FIELDS = (
    "form",
    "n",
    "m_prime",
    "basis",
    "prune",
    "approximate_pset",
    "n_pruned",
    "n_refinements",
    "partition_count",
)


class LpFormatError(ValueError):
    pass


def _coef_str(value: Number) -> str:
    return decimal_str(value)


def _terms_text(coeffs: Iterable[tuple[int, Number]], names: list[str]) -> list[str]:
    """Render coefficient terms as sign-separated tokens."""
    out: list[str] = []
    first = True
    for col, coef in coeffs:
        if coef == 0:
            continue
        neg = coef < 0
        mag = -coef if neg else coef
        if first:
            sign = "-" if neg else ""
            first = False
        else:
            sign = "- " if neg else "+ "
        if mag == 1:
            out.append(f"{sign}{names[col]}")
        else:
            out.append(f"{sign}{_coef_str(mag)} {names[col]}")
    return out


def _emit_wrapped(fh: TextIO, head: str, tokens: list[str], tail: str) -> None:
    line = head
    for tok in tokens:
        if len(line) + 1 + len(tok) > _MAX_LINE and line != head:
            fh.write(line + "\n")
            line = "   " + tok
        else:
            line = line + " " + tok
    fh.write(line + (" " + tail if tail else "") + "\n")


def render_model(model: ModelMatrix) -> str:
    import io

    buf = io.StringIO()
    names = [v.name for v in model.vars]

    meta = " ".join(
        f"{k}={int(getattr(model, k)) if isinstance(getattr(model, k), bool) else getattr(model, k)}"
        for k in _META_FIELDS
    )
    buf.write(f"\\ meta {meta}\n")
    for w in model.warnings:
        buf.write(f"\\ warning {w}\n")
    buf.write("Minimize\n")
    _emit_wrapped(buf, " obj:", _terms_text(model.objective, names), "")
    buf.write("Subject To\n")
    for k, row in enumerate(model.rows):
        label = row.label or f"c{k + 1}"
        tokens = _terms_text(row.coeffs, names)
        if not tokens:
            tokens = ["0"]
        _emit_wrapped(buf, f" {label}:", tokens, f"{row.relation} {_coef_str(row.rhs)}")
    buf.write("Bounds\n")
    for v in model.vars:
        if v.lower is None and v.upper is None:
            buf.write(f" {v.name} free\n")
        elif v.lower is None:
            buf.write(f" {v.name} <= {_coef_str(v.upper)}\n")
        elif v.upper is None:
            buf.write(f" {v.name} >= {_coef_str(v.lower)}\n")
        else:
            buf.write(f" {_coef_str(v.lower)} <= {v.name} <= {_coef_str(v.upper)}\n")
    binaries = [v.name for v in model.vars if v.integral and v.lower == 0 and v.upper == 1]
    generals = [v.name for v in model.vars if v.integral and v.name not in set(binaries)]
    if binaries:
        buf.write("Binaries\n")
        for name in binaries:
            buf.write(f" {name}\n")
    if generals:
        buf.write("Generals\n")
        for name in generals:
            buf.write(f" {name}\n")
    buf.write("End\n")
    return buf.getvalue()


def write_model(model: ModelMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(render_model(model), encoding="utf-8")


def _parse_name(token: str) -> tuple[str, tuple[int, ...]]:
    m = _NAME_RE.match(token)
    if not m:
        raise LpFormatError(f"unrecognized variable name {token!r}")
    kind = m.group(1)
    index = tuple(int(p) for p in m.group(2).split("_")[1:])
    if len(index) != _ARITY[kind]:
        raise LpFormatError(f"variable {token!r} has wrong index arity for kind {kind!r}")
    return kind, index


_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


def _parse_terms(tokens: list[str]) -> list[tuple[str, Number]]:
    """Parse sign/coefficient/name token runs into (name, coefficient) pairs."""
    out: list[tuple[str, Number]] = []
    sign = 1
    pending: Optional[Number] = None
    for tok in tokens:
        if tok == "+":
            sign = 1
        elif tok == "-":
            sign = -1
        elif _NUM_RE.match(tok):
            if pending is not None:
                raise LpFormatError(f"two consecutive numbers near {tok!r}")
            pending = parse_decimal_exact(tok)
        else:
            name = tok
            _parse_name(name)
            coef = pending if pending is not None else 1
            out.append((name, sign * coef))
            sign = 1
            pending = None
    if pending is not None and pending != 0:
        raise LpFormatError("dangling coefficient without a variable")
    return out


def read_model(path: Union[str, Path]) -> ModelMatrix:
    """Reconstruct a ModelMatrix from its text export.

    Variable order follows the Bounds section; integrality comes from the
    Binaries/Generals sections.  Warning lines are restored from header
    comments.  Numeric values parse to int or Fraction; values that were
    floats on export compare equal to their rational reading.
    """
    text = Path(path).read_text(encoding="utf-8")
    meta: dict[str, int | str] = {}
    warnings: list[str] = []
    section = ""
    objective_parts: list[str] = []
    row_chunks: list[str] = []
    bound_lines: list[str] = []
    binary_names: list[str] = []
    general_names: list[str] = []

    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("\\"):
            body = line.lstrip()[1:].strip()
            if body.startswith("meta "):
                for kv in body[5:].split():
                    k, _, v = kv.partition("=")
                    meta[k] = v
            elif body.startswith("warning "):
                warnings.append(body[8:])
            continue
        low = line.strip().lower()
        if low in ("minimize", "maximize"):
            section = "obj"
            continue
        if low in ("subject to", "st", "s.t.", "such that"):
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low in ("binaries", "binary"):
            section = "bin"
            continue
        if low in ("generals", "general"):
            section = "gen"
            continue
        if low == "end":
            section = "end"
            continue
        if section == "obj":
            objective_parts.append(line.strip())
        elif section == "rows":
            if ":" in line:
                row_chunks.append(line.strip())
            else:
                if not row_chunks:
                    raise LpFormatError("constraint continuation before any constraint")
                row_chunks[-1] += " " + line.strip()
        elif section == "bounds":
            bound_lines.append(line.strip())
        elif section == "bin":
            binary_names.extend(line.split())
        elif section == "gen":
            general_names.extend(line.split())
        elif section == "end":
            raise LpFormatError(f"content after End: {line.strip()!r}")
        else:
            raise LpFormatError(f"unexpected line outside any section: {line.strip()!r}")

    integral = set(binary_names) | set(general_names)
    vars_: list[VarRef] = []
    for bl in bound_lines:
        toks = bl.split()
        lower: Optional[Number]
        upper: Optional[Number]
        if len(toks) == 2 and toks[1] == "free":
            name, lower, upper = toks[0], None, None
        elif len(toks) == 3 and toks[1] in (LE, GE, EQ):
            name = toks[0]
            val = parse_decimal_exact(toks[2])
            if toks[1] == LE:
                lower, upper = None, val
            elif toks[1] == GE:
                lower, upper = val, None
            else:
                lower = upper = val
        elif len(toks) == 5 and toks[1] == LE and toks[3] == LE:
            name = toks[2]
            lower = parse_decimal_exact(toks[0])
            upper = parse_decimal_exact(toks[4])
        else:
            raise LpFormatError(f"unparseable bound line {bl!r}")
        kind, index = _parse_name(name)
        vars_.append(VarRef(kind, index, lower, upper, name in integral))

    col_of = {v.name: c for c, v in enumerate(vars_)}
    unknown_integral = integral - set(col_of)
    if unknown_integral:
        raise LpFormatError(f"unknown variable name {sorted(unknown_integral)[0]!r}")

    def to_cols(named: list[tuple[str, Number]]) -> tuple[tuple[int, Number], ...]:
        cols = []
        for name, coef in named:
            if name not in col_of:
                raise LpFormatError(f"unknown variable name {name!r}")
            cols.append((col_of[name], coef))
        return tuple(cols)

    obj_text = " ".join(objective_parts)
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    objective = to_cols(_parse_terms(_tokenize(obj_text)))

    rel_re = re.compile(r"(<=|>=|=)")
    rows: list[LinearRow] = []
    for chunk in row_chunks:
        label, _, body = chunk.partition(":")
        pieces = rel_re.split(body)
        if len(pieces) != 3:
            raise LpFormatError(f"constraint {label.strip()!r} needs exactly one relation")
        lhs, rel, rhs_text = pieces
        rhs = parse_decimal_exact(rhs_text.strip())
        toks = _tokenize(lhs)
        if toks == ["0"]:
            coeffs: tuple[tuple[int, Number], ...] = ()
        else:
            coeffs = to_cols(_parse_terms(toks))
        rows.append(LinearRow(coeffs, rel, rhs, label.strip()))

    def meta_int(key: str) -> int:
        return int(meta.get(key, 0))

    return ModelMatrix(
        vars=tuple(vars_),
        rows=tuple(rows),
        objective=objective,
        form=str(meta.get("form", "")),
        n=meta_int("n"),
        m_prime=meta_int("m_prime"),
        basis=bool(meta_int("basis")),
        prune=bool(meta_int("prune")),
        approximate_pset=bool(meta_int("approximate_pset")),
        n_pruned=meta_int("n_pruned"),
        n_refinements=meta_int("n_refinements"),
        partition_count=meta_int("partition_count"),
        warnings=tuple(warnings),
    )


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    for tok in text.replace("+", " + ").replace("-", " - ").split():
        out.append(tok)
    return out


def read_solution_values(path: Union[str, Path], model: ModelMatrix) -> tuple[str, dict[str, float]]:
    """Read a ``name value`` per line solution file.

    Lines starting with ``#`` or ``\\`` are comments; an optional
    ``status <word>`` line sets the reported status (default "feasible").
    Unknown variable names raise LpFormatError naming the token.
    """
    status = "feasible"
    values: dict[str, float] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("\\"):
            continue
        toks = line.split()
        if toks[0] == "status":
            if len(toks) != 2:
                raise LpFormatError(f"bad status line {line!r}")
            status = toks[1]
            continue
        if len(toks) != 2:
            raise LpFormatError(f"expected 'name value', got {line!r}")
        name, val = toks
        if name not in model.name_to_col:
            raise LpFormatError(f"unknown variable name {name!r}")
        values[name] = float(Fraction(val)) if "/" in val else float(val)
    return status, values
