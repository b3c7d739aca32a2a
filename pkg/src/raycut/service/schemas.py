"""Request/response models for the segmentation service."""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field


class VolumeInfo(BaseModel):
    dims: List[int]
    spacing_mm: List[float]
    origin_mm: List[float]
    intensity_range: List[float]
    has_truth: bool


class SegmentRequest(BaseModel):
    seed: List[int] = Field(min_length=3, max_length=3)
    delta_r: int = Field(default=1, ge=0)
    subdiv: int = Field(default=3, ge=0, le=6)
    samples: int = Field(default=60, ge=2)
    radius_mm: float = Field(default=50.0, gt=0)


class BoundaryStats(BaseModel):
    min: int
    max: int


class PhaseMs(BaseModel):
    rays: float
    graph: float
    mincut: float
    voxelize: float


class SegmentResponse(BaseModel):
    result_id: int
    runtime_ms: float
    phase_ms: PhaseMs
    volume_mm3: float
    dsc_pct: Optional[float] = None
    boundary_stats: BoundaryStats
