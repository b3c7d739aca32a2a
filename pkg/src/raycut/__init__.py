"""Interactive 3D segmentation: a seed point inside a roughly convex
structure becomes a radial node lattice over a subdivided icosahedron,
an s-t min cut picks the boundary, and the result comes back as a
triangle mesh, a binary mask, and evaluation metrics."""

__version__ = "0.1.0"

from .errors import RaycutError
from .graph import CostGrid, SegGraph, build_graph, compute_costs, condition_costs, estimate_mean
from .maxflow import CutResult, extract_boundary, max_flow_bk, reference_max_flow
from .template import RayGrid, SphereTemplate, build_icosphere, sample_rays
from .volume import MaskVolume, Volume, read_nrrd, write_nrrd, write_nrrd_mask

__all__ = [
    "RaycutError",
    "CostGrid",
    "SegGraph",
    "build_graph",
    "compute_costs",
    "condition_costs",
    "estimate_mean",
    "CutResult",
    "extract_boundary",
    "max_flow_bk",
    "reference_max_flow",
    "RayGrid",
    "SphereTemplate",
    "build_icosphere",
    "sample_rays",
    "MaskVolume",
    "Volume",
    "read_nrrd",
    "write_nrrd",
    "write_nrrd_mask",
    "__version__",
]
