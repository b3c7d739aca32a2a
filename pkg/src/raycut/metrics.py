"""Segmentation evaluation: Dice overlap, per-case rows, summary statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, GeometryMismatch
from .volume import MaskVolume, voxel_volume_mm3


@dataclass(frozen=True)
class CaseRow:
    """One evaluation case: manual (truth) vs automatic (predicted) mask."""

    case_id: str
    manual_mm3: float
    auto_mm3: float
    manual_voxels: int
    auto_voxels: int
    dsc_pct: float


@dataclass(frozen=True)
class SummaryRow:
    """min / max / mean / stddev over one column of case values.

    stddev uses the sample (n-1) convention; for a single value it is
    reported as 0.0 with degenerate=True.
    """

    min: float
    max: float
    mean: float
    stddev: float
    degenerate: bool = False


def _check_geometry(a: MaskVolume, b: MaskVolume) -> None:
    if a.dims != b.dims:
        raise GeometryMismatch(f"dims differ: {a.dims} vs {b.dims}")
    if not np.allclose(a.spacing, b.spacing, rtol=0.0, atol=1e-9):
        raise GeometryMismatch(f"spacing differs: {a.spacing} vs {b.spacing}")
    if not np.allclose(a.origin, b.origin, rtol=0.0, atol=1e-9):
        raise GeometryMismatch(f"origin differs: {a.origin} vs {b.origin}")


def dice(a: MaskVolume, b: MaskVolume) -> float:
    """2|A n B| / (|A| + |B|); two empty masks count as identical (1.0)."""
    _check_geometry(a, b)
    na = int(a.data.sum(dtype=np.int64))
    nb = int(b.data.sum(dtype=np.int64))
    if na + nb == 0:
        return 1.0
    inter = int((a.data & b.data).sum(dtype=np.int64))
    return 2.0 * inter / (na + nb)


def case_report(pred: MaskVolume, truth: MaskVolume, case_id: str) -> CaseRow:
    """Build one table row; volumes are voxel counts times the voxel volume."""
    d = dice(pred, truth)
    vv = voxel_volume_mm3(truth)
    manual_voxels = truth.voxel_count()
    auto_voxels = pred.voxel_count()
    return CaseRow(
        case_id=str(case_id),
        manual_mm3=manual_voxels * vv,
        auto_mm3=auto_voxels * vv,
        manual_voxels=manual_voxels,
        auto_voxels=auto_voxels,
        dsc_pct=100.0 * d,
    )


def summarize(values: Sequence[float]) -> SummaryRow:
    """Sample statistics over one column (mean with n, stddev with n-1)."""
    vals = [float(v) for v in values]
    if not vals:
        raise EmptyInput("summarize needs at least one value")
    n = len(vals)
    mean = math.fsum(vals) / n
    if n == 1:
        return SummaryRow(min=vals[0], max=vals[0], mean=mean, stddev=0.0, degenerate=True)
    if min(vals) == max(vals):
        # zero range means zero deviation; avoids 1-ulp noise from mean rounding
        return SummaryRow(min=vals[0], max=vals[0], mean=vals[0], stddev=0.0)
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return SummaryRow(min=min(vals), max=max(vals), mean=mean, stddev=math.sqrt(var))


def format_case_table(rows: Iterable[CaseRow]) -> str:
    """Aligned plain-text table of cases plus a DSC summary line."""
    rows = list(rows)
    header = f"{'case':<10} {'manual mm3':>14} {'auto mm3':>14} {'manual vox':>12} {'auto vox':>12} {'DSC %':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.case_id:<10} {r.manual_mm3:>14.1f} {r.auto_mm3:>14.1f} "
            f"{r.manual_voxels:>12d} {r.auto_voxels:>12d} {r.dsc_pct:>8.2f}"
        )
    if rows:
        s = summarize([r.dsc_pct for r in rows])
        note = "  (single case, stddev degenerate)" if s.degenerate else ""
        lines.append("-" * len(header))
        lines.append(
            f"DSC summary: min {s.min:.2f}  max {s.max:.2f}  "
            f"mean {s.mean:.2f}  stddev {s.stddev:.2f}{note}"
        )
    return "\n".join(lines)


def report_json(rows: Iterable[CaseRow]) -> dict:
    """JSON-ready report: per-case records plus a DSC summary."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("report needs at least one case")
    s = summarize([r.dsc_pct for r in rows])
    return {
        "cases": [
            {
                "id": r.case_id,
                "manual_mm3": r.manual_mm3,
                "auto_mm3": r.auto_mm3,
                "manual_voxels": r.manual_voxels,
                "auto_voxels": r.auto_voxels,
                "dsc_pct": r.dsc_pct,
            }
            for r in rows
        ],
        "summary": {"min": s.min, "max": s.max, "mean": s.mean, "stddev": s.stddev},
    }
