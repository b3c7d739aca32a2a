"""End-to-end segmentation pipeline: seed -> rays -> graph -> cut -> mask."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import SeedOutsideVolume
from .graph import build_graph, compute_costs, condition_costs, estimate_mean
from .maxflow import CutResult, max_flow_bk
from .surface import SegMesh, extract_mesh, voxelize
from .template import RayGrid, SphereTemplate, build_icosphere, sample_rays
from .volume import MaskVolume, Volume, index_to_world, voxel_volume_mm3, world_to_index

PHASES = ("rays", "graph", "mincut", "voxelize")


@dataclass(frozen=True)
class SegParams:
    """User-tunable segmentation parameters.

    seed is a voxel index triple by default; set seed_is_world for world mm.
    anchor=True applies the cost conditioning that pins the boundary to the
    outermost seed-like surface (see graph.condition_costs); anchor=False
    runs on the raw |I - mu| costs.
    """

    seed: Tuple[float, float, float]
    seed_is_world: bool = False
    subdiv: int = 3
    samples: int = 60
    max_radius_mm: float = 50.0
    delta_r: int = 1
    mean_window: int = 3
    anchor: bool = True

    def __post_init__(self):
        if len(tuple(self.seed)) != 3:
            raise ValueError("seed must be a triple")
        if not 0 <= self.subdiv <= 6:
            raise ValueError("subdiv must be in 0..6")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if self.max_radius_mm <= 0:
            raise ValueError("max_radius_mm must be positive")
        if self.delta_r < 0:
            raise ValueError("delta_r must be >= 0")
        if self.mean_window < 1 or self.mean_window % 2 == 0:
            raise ValueError("mean_window must be odd and >= 1")
        object.__setattr__(self, "seed", tuple(float(v) for v in self.seed))


@dataclass(frozen=True)
class SegResult:
    """Everything one segmentation run produces."""

    mask: MaskVolume
    mesh: SegMesh
    cut: CutResult
    rays: RayGrid
    mu: float
    params: SegParams
    phase_ms: Dict[str, float] = field(default_factory=dict)
    total_ms: float = 0.0

    @property
    def boundary(self) -> np.ndarray:
        return self.cut.boundary

    @property
    def volume_mm3(self) -> float:
        return self.mask.voxel_count() * voxel_volume_mm3(self.mask)


@lru_cache(maxsize=8)
def _template(subdiv: int) -> SphereTemplate:
    return build_icosphere(subdiv)


def resolve_seed(vol: Volume, params: SegParams):
    """Return (seed_world, seed_index) for either seed convention."""
    if params.seed_is_world:
        seed_world = np.asarray(params.seed, dtype=np.float64)
        idx = np.rint(world_to_index(vol, seed_world)).astype(np.int64)
    else:
        idx = np.asarray(params.seed, dtype=np.float64)
        if not np.allclose(idx, np.rint(idx)):
            raise ValueError("voxel-index seed must be integral; use world mm instead")
        idx = np.rint(idx).astype(np.int64)
        seed_world = index_to_world(vol, idx)
    nx, ny, nz = vol.dims
    if not (0 <= idx[0] < nx and 0 <= idx[1] < ny and 0 <= idx[2] < nz):
        raise SeedOutsideVolume(
            f"seed outside volume: voxel ({idx[0]},{idx[1]},{idx[2]}) not in dims {vol.dims}"
        )
    return seed_world, (int(idx[0]), int(idx[1]), int(idx[2]))


def run_segmentation(vol: Volume, params: SegParams) -> SegResult:
    """Run the four pipeline phases and report per-phase wall time in ms."""
    t_start = time.perf_counter()
    phase_ms: Dict[str, float] = {}

    seed_world, seed_index = resolve_seed(vol, params)

    t0 = time.perf_counter()
    tmpl = _template(params.subdiv)
    rays = sample_rays(vol, seed_world, tmpl, params.samples, params.max_radius_mm)
    phase_ms["rays"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    mu = estimate_mean(vol, seed_index, params.mean_window)
    costs = compute_costs(rays, mu)
    if params.anchor:
        costs = condition_costs(costs)
    g = build_graph(costs, tmpl, params.delta_r)
    phase_ms["graph"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    cut = max_flow_bk(g)
    phase_ms["mincut"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    mesh = extract_mesh(cut.boundary, rays, tmpl)
    mask = voxelize(mesh, vol, seed_world=seed_world)
    phase_ms["voxelize"] = (time.perf_counter() - t0) * 1e3

    total_ms = (time.perf_counter() - t_start) * 1e3
    return SegResult(
        mask=mask,
        mesh=mesh,
        cut=cut,
        rays=rays,
        mu=mu,
        params=params,
        phase_ms=phase_ms,
        total_ms=total_ms,
    )
