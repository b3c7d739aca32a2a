"""FastAPI application factory for the segmentation service."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Dict, Optional

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import RaycutError, SeedOutsideVolume
from ..maxflow import warmup_solver
from ..metrics import dice
from ..pipeline import SegParams, SegResult, run_segmentation
from ..volume import MaskVolume, Volume, read_nrrd, volume_to_mask
from .schemas import BoundaryStats, PhaseMs, SegmentRequest, SegmentResponse, VolumeInfo
from .slices import AXES, axis_size, mask_contours, slice_view, window_png


@dataclass
class SessionState:
    """One loaded volume plus the results computed against it."""

    volume: Optional[Volume] = None
    truth: Optional[MaskVolume] = None
    intensity_range: tuple = (0.0, 1.0)
    results: Dict[int, SegResult] = field(default_factory=dict)
    next_id: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)

    def store(self, result: SegResult) -> int:
        with self.lock:
            rid = self.next_id
            self.next_id += 1
            self.results[rid] = result
        return rid


def _check_axis_index(dims, axis: str, index: int) -> None:
    if axis not in AXES:
        raise HTTPException(status_code=400, detail=f"axis must be one of {AXES}")
    if not (0 <= index < axis_size(dims, axis)):
        raise HTTPException(status_code=400, detail=f"index {index} out of range for axis {axis}")


def _parse_window(window: Optional[str], default) -> tuple:
    if window is None:
        return default
    try:
        lo_s, hi_s = window.split(",")
        lo, hi = float(lo_s), float(hi_s)
    except ValueError:
        raise HTTPException(status_code=400, detail="window must be 'lo,hi'")
    if not (hi > lo):
        raise HTTPException(status_code=400, detail=f"degenerate window ({lo}, {hi})")
    return lo, hi


def create_app(
    volume_path: Optional[str] = None,
    truth_path: Optional[str] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    """Build the service; paths are loaded eagerly so startup failures are loud."""
    state = SessionState()
    if volume_path is not None:
        state.volume = read_nrrd(volume_path)
        data = state.volume.data
        state.intensity_range = (float(data.min()), float(data.max()))
    if truth_path is not None:
        state.truth = volume_to_mask(read_nrrd(truth_path))
    warmup_solver()

    app = FastAPI(title="raycut service")
    app.state.session = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def _require_volume() -> Volume:
        if state.volume is None:
            raise HTTPException(status_code=404, detail="no volume loaded")
        return state.volume

    @app.get("/api/volume", response_model=VolumeInfo)
    def get_volume() -> VolumeInfo:
        vol = _require_volume()
        return VolumeInfo(
            dims=list(vol.dims),
            spacing_mm=list(vol.spacing),
            origin_mm=list(vol.origin),
            intensity_range=list(state.intensity_range),
            has_truth=state.truth is not None,
        )

    @app.get("/api/slice/{axis}/{index}")
    def get_slice(axis: str, index: int, window: Optional[str] = None) -> Response:
        vol = _require_volume()
        _check_axis_index(vol.dims, axis, index)
        lo, hi = _parse_window(window, state.intensity_range)
        png = window_png(slice_view(vol.data, axis, index), lo, hi)
        return Response(content=png, media_type="image/png")

    @app.post("/api/segment", response_model=SegmentResponse, response_model_exclude_none=True)
    def post_segment(req: SegmentRequest) -> SegmentResponse:
        vol = _require_volume()
        params = SegParams(
            seed=tuple(req.seed),
            subdiv=req.subdiv,
            samples=req.samples,
            max_radius_mm=req.radius_mm,
            delta_r=req.delta_r,
        )
        try:
            result = run_segmentation(vol, params)
        except SeedOutsideVolume as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except RaycutError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        rid = state.store(result)
        dsc_pct = None
        if state.truth is not None:
            dsc_pct = 100.0 * dice(result.mask, state.truth)
        return SegmentResponse(
            result_id=rid,
            runtime_ms=result.total_ms,
            phase_ms=PhaseMs(**result.phase_ms),
            volume_mm3=result.volume_mm3,
            dsc_pct=dsc_pct,
            boundary_stats=BoundaryStats(
                min=int(result.boundary.min()), max=int(result.boundary.max())
            ),
        )

    @app.get("/api/result/{result_id}/contour/{axis}/{index}")
    def get_contour(result_id: int, axis: str, index: int):
        vol = _require_volume()
        result = state.results.get(result_id)
        if result is None:
            raise HTTPException(status_code=404, detail=f"unknown result id {result_id}")
        _check_axis_index(vol.dims, axis, index)
        return mask_contours(slice_view(result.mask.data, axis, index))

    @app.get("/api/truth/contour/{axis}/{index}")
    def get_truth_contour(axis: str, index: int):
        vol = _require_volume()
        if state.truth is None:
            raise HTTPException(status_code=404, detail="no truth mask loaded")
        _check_axis_index(vol.dims, axis, index)
        return mask_contours(slice_view(state.truth.data, axis, index))

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
