"""JSON system documents and sweep CSV output.

A system document looks like::

    {"kind": "ltv", "n": 2, "p": 1, "N": 30,
     "phi": [[2, "-1+sin(k*pi/18)"], ["cos(k*pi/18)", 1]],
     "c": [[1, 0]],
     "q": [[0.036, 0.012], [0.012, 0.06]],
     "r": [[0.1]]}

Each matrix is an array of rows whose entries are numbers or expression
strings in ``k``. For ``ltv`` documents a matrix may instead be an array of
per-step matrices (one per ``k``), which is what :func:`dump_system` writes.
``q`` may be ``null`` for a system without process noise.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

from .expr import ExpressionError, evaluate_entry
from .linalg import GramianError
from .system import (
    TimeInvariantLinearSystem,
    TimeVaryingLinearSystem,
    ValidationReport,
    validate,
)

PathOrStream = Union[str, os.PathLike, IO[str]]

METHODS = ("direct_thm1", "direct_mform", "recursive_dual")


class SchemaError(GramianError, ValueError):
    pass


class ValidationError(GramianError, ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(f"system failed validation:\n{report}")
        self.report = report


def read_document(source: PathOrStream) -> dict:
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict):
        raise SchemaError("system document must be a JSON object")
    return doc


def _shape_check(name: str, m: np.ndarray, shape: tuple[int, int], k: int) -> None:
    if m.shape != shape:
        raise SchemaError(f"{name} at k={k} has shape {m.shape}, expected {shape}")


def _evaluate_matrix(name: str, rows, k: int) -> np.ndarray:
    if isinstance(rows, (int, float, str)) and not isinstance(rows, bool):
        rows = [[rows]]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f"{name} must be an array of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError(f"{name} has ragged rows")
    try:
        return np.array([[evaluate_entry(e, k) for e in row] for row in rows], dtype=float)
    except ExpressionError as exc:
        exc.args = (f"{name}: {exc.args[0]}",)
        raise


def _is_sequence_of_matrices(value) -> bool:
    return (
        isinstance(value, list)
        and bool(value)
        and isinstance(value[0], list)
        and bool(value[0])
        and isinstance(value[0][0], list)
    )


def _matrix_sequence(name: str, value, count: int, shape: tuple[int, int]) -> list[np.ndarray]:
    if _is_sequence_of_matrices(value):
        if len(value) != count:
            raise SchemaError(f"{name} lists {len(value)} matrices, expected {count}")
        out = [_evaluate_matrix(name, m, k) for k, m in enumerate(value)]
    else:
        out = [_evaluate_matrix(name, value, k) for k in range(count)]
    for k, m in enumerate(out):
        _shape_check(name, m, shape, k)
    return out


def _require_int(doc: dict, key: str, minimum: int) -> int:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SchemaError(f"{key!r} must be an integer >= {minimum}")
    return value


def system_from_document(doc: dict, check: bool = True):
    """Build a system from a parsed document; validates unless ``check`` is False."""
    missing = [key for key in ("kind", "n", "p", "phi", "c", "r") if key not in doc]
    if missing:
        raise SchemaError(f"missing keys: {', '.join(missing)}")
    unknown = set(doc) - {"kind", "n", "p", "N", "phi", "c", "q", "r", "name", "note"}
    if unknown:
        raise SchemaError(f"unknown keys: {', '.join(sorted(unknown))}")
    kind = doc["kind"]
    n = _require_int(doc, "n", 1)
    p = _require_int(doc, "p", 1)
    q_value = doc.get("q")
    if kind == "lti":
        if "N" in doc:
            _require_int(doc, "N", 0)
        for key in ("phi", "c", "q", "r"):
            if _is_sequence_of_matrices(doc.get(key)):
                raise SchemaError(f"{key} of an lti document must be a single matrix")
        phi = _evaluate_matrix("phi", doc["phi"], 0)
        c = _evaluate_matrix("c", doc["c"], 0)
        r = _evaluate_matrix("r", doc["r"], 0)
        q = None if q_value is None else _evaluate_matrix("q", q_value, 0)
        for name, m, shape in (("phi", phi, (n, n)), ("c", c, (p, n)), ("r", r, (p, p))):
            _shape_check(name, m, shape, 0)
        if q is not None:
            _shape_check("q", q, (n, n), 0)
        sys = TimeInvariantLinearSystem(phi=phi, c=c, q=q, r=r)
    elif kind == "ltv":
        N = _require_int(doc, "N", 0)
        sys = TimeVaryingLinearSystem(
            phi=_matrix_sequence("phi", doc["phi"], N, (n, n)),
            c=_matrix_sequence("c", doc["c"], N + 1, (p, n)),
            q=None if q_value is None else _matrix_sequence("q", q_value, N, (n, n)),
            r=_matrix_sequence("r", doc["r"], N + 1, (p, p)),
        )
    else:
        raise SchemaError(f"kind must be 'lti' or 'ltv', got {kind!r}")
    if check:
        report = validate(sys)
        if not report.ok:
            raise ValidationError(report)
    return sys


def load_system(source: PathOrStream, check: bool = True):
    return system_from_document(read_document(source), check=check)


def document_horizon(doc: dict) -> Optional[int]:
    value = doc.get("N")
    return value if isinstance(value, int) and not isinstance(value, bool) else None


def _as_lists(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in m]


def dump_system(sys, N: Optional[int] = None) -> dict:
    """Inverse of :func:`system_from_document`; floats keep full precision."""
    if isinstance(sys, TimeInvariantLinearSystem):
        doc = {"kind": "lti", "n": sys.state_dim, "p": sys.meas_dim}
        if N is not None:
            doc["N"] = N
        doc.update(
            phi=_as_lists(sys.phi),
            c=_as_lists(sys.c),
            q=None if sys.q is None else _as_lists(sys.q),
            r=_as_lists(sys.r),
        )
        return doc
    return {
        "kind": "ltv",
        "n": sys.state_dim,
        "p": sys.meas_dim,
        "N": sys.horizon,
        "phi": [_as_lists(m) for m in sys.phi],
        "c": [_as_lists(m) for m in sys.c],
        "q": None if sys.q is None else [_as_lists(m) for m in sys.q],
        "r": [_as_lists(m) for m in sys.r],
    }


def save_system(sys, sink: PathOrStream, N: Optional[int] = None) -> None:
    doc = dump_system(sys, N)
    if hasattr(sink, "write"):
        json.dump(doc, sink, indent=1)
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)


@dataclass(frozen=True)
class GramianSweepRecord:
    """One CSV row: a Gramian computed by ``method`` for window ``w``.

    ``entries`` is the row-major FIM as produced by the method (before any
    final symmetrization), or None for a failed computation, in which case
    ``error`` says why.
    """

    method: str
    w: int
    entries: Optional[tuple[float, ...]]
    sym_err: float = math.nan
    min_eig: float = math.nan
    wall_ns: int = 0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    def matrix(self) -> np.ndarray:
        if self.entries is None:
            raise ValueError(f"record ({self.method}, w={self.w}) carries no matrix: {self.error}")
        n = math.isqrt(len(self.entries))
        return np.array(self.entries).reshape(n, n)


def entry_columns(n: int) -> list[str]:
    if n < 10:
        return [f"f{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return [f"f{i + 1}_{j + 1}" for i in range(n) for j in range(n)]


def sweep_header(n: int) -> list[str]:
    return ["method", "w", *entry_columns(n), "sym_err", "min_eig", "wall_ns", "error"]


def _cells(record: GramianSweepRecord, n: int) -> list:
    if record.entries is None:
        return [record.method, record.w, *([""] * (n * n)), "", "", record.wall_ns, record.error]
    return [
        record.method,
        record.w,
        *(repr(float(x)) for x in record.entries),
        repr(float(record.sym_err)),
        repr(float(record.min_eig)),
        record.wall_ns,
        record.error,
    ]


def write_sweep_csv(
    records: Sequence[GramianSweepRecord], sink: PathOrStream, n: Optional[int] = None
) -> None:
    """Write a header and one row per record.

    ``n`` is only needed when ``records`` is empty or every record failed.
    """
    if n is None:
        sizes = {len(r.entries) for r in records if r.entries is not None}
        if len(sizes) > 1:
            raise ValueError("records mix state dimensions")
        n = math.isqrt(sizes.pop()) if sizes else 0
    if hasattr(sink, "write"):
        _write_rows(records, sink, n)
    else:
        with open(sink, "w", newline="", encoding="utf-8") as fh:
            _write_rows(records, fh, n)


def _write_rows(records: Iterable[GramianSweepRecord], fh: IO[str], n: int) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(sweep_header(n))
    for record in records:
        writer.writerow(_cells(record, n))


def read_sweep_csv(source: PathOrStream) -> list[GramianSweepRecord]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    fcols = [c for c in (reader.fieldnames or []) if c.startswith("f")]
    out = []
    for row in reader:
        failed = bool(row.get("error"))
        out.append(
            GramianSweepRecord(
                method=row["method"],
                w=int(row["w"]),
                entries=None if failed else tuple(float(row[c]) for c in fcols),
                sym_err=math.nan if failed else float(row["sym_err"]),
                min_eig=math.nan if failed else float(row["min_eig"]),
                wall_ns=int(row["wall_ns"]),
                error=row.get("error", ""),
            )
        )
    return out
