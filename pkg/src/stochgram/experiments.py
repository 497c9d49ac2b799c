"""Window sweeps comparing the Gramian methods, and the two reference experiments."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .direct import (
    BLOCK_SUM,
    M_FORM,
    cons_fim_direct,
    cons_fim_no_process_noise,
    obs_fim_direct,
    obs_fim_no_process_noise,
)
from .info import SymmetricInfoMatrix
from .linalg import GramianError, min_eig, symmetry_error
from .model_io import METHODS, GramianSweepRecord, load_system, write_sweep_csv
from .recursive import obs_recursion_dual
from .system import TimeVaryingLinearSystem, lift_lti
from .trajectory import intermediate_components

ALL_METHODS = (*METHODS, "no_noise")
SUPPORTED = {
    "obs": {"direct_thm1", "direct_mform", "recursive_dual", "no_noise"},
    "cons": {"direct_mform", "no_noise"},
}


class UnsupportedMethodError(GramianError, ValueError):
    pass


def check_supported(kind: str, method: str, sys: TimeVaryingLinearSystem) -> None:
    if kind not in SUPPORTED:
        raise UnsupportedMethodError(f"unknown kind {kind!r}")
    if method not in SUPPORTED[kind]:
        raise UnsupportedMethodError(f"method {method!r} is not available for kind={kind}")
    if method != "no_noise" and sys.q is None:
        raise UnsupportedMethodError(f"method {method!r} needs a system with process noise")


def compute(sys: TimeVaryingLinearSystem, method: str, w: int, kind: str = "obs") -> SymmetricInfoMatrix:
    check_supported(kind, method, sys)
    if kind == "cons":
        if method == "no_noise":
            return cons_fim_no_process_noise(sys, w)
        return cons_fim_direct(sys, w, M_FORM)
    if method == "direct_thm1":
        return obs_fim_direct(sys, w, BLOCK_SUM)
    if method == "direct_mform":
        return obs_fim_direct(sys, w, M_FORM)
    if method == "no_noise":
        return obs_fim_no_process_noise(sys, w)
    t0 = time.perf_counter_ns()
    info = obs_recursion_dual(sys, w).final
    elapsed = time.perf_counter_ns() - t0
    return SymmetricInfoMatrix(info.matrix, info.window, info.anchor, info.direction, None, elapsed)


def record_for(
    sys: TimeVaryingLinearSystem, method: str, w: int, kind: str = "obs", timing: bool = True
) -> GramianSweepRecord:
    """Compute one Gramian; numerical failures become an error row."""
    try:
        info = compute(sys, method, w, kind)
    except UnsupportedMethodError:
        raise
    except (GramianError, np.linalg.LinAlgError) as exc:
        return GramianSweepRecord(method, w, None, error=f"{type(exc).__name__}: {exc}")
    raw = info.raw_matrix
    wall = info.wall_ns if timing else 0
    if not np.all(np.isfinite(raw)):
        return GramianSweepRecord(method, w, None, wall_ns=wall, error="non-finite result")
    return GramianSweepRecord(
        method=method,
        w=w,
        entries=tuple(float(x) for x in raw.ravel()),
        sym_err=symmetry_error(raw),
        min_eig=min_eig(raw),
        wall_ns=wall,
    )


def sweep(
    sys: TimeVaryingLinearSystem,
    w_max: int,
    methods: Sequence[str] = METHODS,
    kind: str = "obs",
    threads: int = 1,
    timing: bool = True,
) -> list[GramianSweepRecord]:
    """One record per (method, w) for ``w = 1..w_max``, ordered by method then w.

    Every work item is independent, so ``threads > 1`` only changes timing.
    """
    for method in methods:
        check_supported(kind, method, sys)
    items = [(m, w) for m in methods for w in range(1, w_max + 1)]

    def run(item):
        return record_for(sys, item[0], item[1], kind, timing)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run, items))
    else:
        records = [run(item) for item in items]
    order = {m: i for i, m in enumerate(methods)}
    return sorted(records, key=lambda r: (order[r.method], r.w))


@dataclass(frozen=True)
class MethodSummary:
    method: str
    max_sym_err: float
    first_monotonicity_break_w: Optional[int]
    first_error_w: Optional[int]


def summarize(records: Iterable[GramianSweepRecord]) -> list[MethodSummary]:
    """Per method: worst asymmetry and the first window whose diagonal decreased."""
    by_method: dict[str, list[GramianSweepRecord]] = {}
    for r in records:
        by_method.setdefault(r.method, []).append(r)
    out = []
    for method, rows in by_method.items():
        rows = sorted(rows, key=lambda r: r.w)
        ok = [r for r in rows if r.ok]
        errors = [r.w for r in rows if not r.ok]
        max_sym = max((r.sym_err for r in ok), default=math.nan)
        first_break = None
        for prev, cur in zip(ok, ok[1:]):
            if cur.w != prev.w + 1:
                continue
            if np.any(np.diag(cur.matrix()) < np.diag(prev.matrix())):
                first_break = cur.w
                break
        out.append(MethodSummary(method, max_sym, first_break, errors[0] if errors else None))
    return out


def write_summary_csv(summaries: Sequence[MethodSummary], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "max_sym_err", "first_monotonicity_break_w", "first_error_w"])
        for s in summaries:
            writer.writerow(
                [
                    s.method,
                    repr(s.max_sym_err),
                    "" if s.first_monotonicity_break_w is None else s.first_monotonicity_break_w,
                    "" if s.first_error_w is None else s.first_error_w,
                ]
            )


def bundled_system(name: str):
    """Load one of the systems shipped in ``stochgram/data``."""
    with resources.files("stochgram.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return load_system(fh)


def bundled_document(name: str) -> dict:
    with resources.files("stochgram.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def reproduce_fig2(out_dir, threads: int = 1, timing: bool = True, w_max: int = 31) -> tuple[Path, Path]:
    """Sweep the time-varying example for ``w = 1..w_max`` with all three methods."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sys = bundled_system("fig2_ltv.json")
    records = sweep(sys, w_max, METHODS, threads=threads, timing=timing)
    sweep_path = out_dir / "fig2_sweep.csv"
    summary_path = out_dir / "fig2_summary.csv"
    write_sweep_csv(records, sweep_path, n=sys.state_dim)
    write_summary_csv(summarize(records), summary_path)
    return sweep_path, summary_path


@dataclass(frozen=True)
class Fig1Row:
    k: int
    total: float
    obs: float
    cons: float
    in_plateau: bool


def plateau_mask(values: Sequence[float], rtol: float = 1e-3, run: int = 5) -> list[bool]:
    """Mark interior points inside a run of ``run`` consecutive small relative changes."""
    v = np.asarray(values, dtype=float)
    mask = [False] * len(v)
    small = [abs(v[j + 1] - v[j]) <= rtol * abs(v[j]) for j in range(len(v) - 1)]
    for start in range(1, len(v) - run):
        if all(small[start : start + run]):
            for j in range(start, start + run + 1):
                if 0 < j < len(v) - 1:
                    mask[j] = True
    return mask


def fig1_rows(sys: TimeVaryingLinearSystem) -> list[Fig1Row]:
    """Total, observability-only and constructability-only information about x_k[0]."""
    w = sys.horizon + 1
    parts = [intermediate_components(sys, w, k) for k in range(w)]
    totals = [p.total.matrix[0, 0] for p in parts]
    mask = plateau_mask(totals)
    return [
        Fig1Row(k, float(p.total.matrix[0, 0]), float(p.obs[0, 0]), float(p.cons[0, 0]), mask[k])
        for k, p in enumerate(parts)
    ]


def reproduce_fig1(out_dir, N: int = 60) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sys = lift_lti(bundled_system("fig1_lti.json"), N)
    path = out_dir / "fig1_total_information.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "total_f11", "obs_f11", "cons_f11", "in_plateau"])
        for row in fig1_rows(sys):
            writer.writerow([row.k, repr(row.total), repr(row.obs), repr(row.cons), int(row.in_plateau)])
    return path
