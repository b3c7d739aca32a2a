"""Spherical template: subdivided icosahedron directions, neighbor topology,
and radial sampling of a volume along each direction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SeedOutsideVolume, SubdivTooLarge
from .volume import Volume, index_to_world, sample_trilinear_many

MAX_SUBDIV = 6


@dataclass(frozen=True)
class SphereTemplate:
    """Unit directions on a subdivided icosahedron plus triangle topology.

    neighbors[r] is the sorted array of rays sharing a triangle with r,
    which on a triangulated sphere is exactly edge adjacency.
    """

    directions: np.ndarray  # (R, 3) float64, unit norm
    triangles: np.ndarray  # (F, 3) int32
    neighbors: tuple  # R sorted int64 arrays

    @property
    def ray_count(self) -> int:
        return self.directions.shape[0]

    def neighbor_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(offsets, flat) form of the neighbor lists, rays ascending."""
        counts = np.fromiter((len(n) for n in self.neighbors), dtype=np.int64, count=len(self.neighbors))
        offsets = np.zeros(len(self.neighbors) + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        flat = np.concatenate(self.neighbors) if len(self.neighbors) else np.empty(0, np.int64)
        return offsets, flat


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    r = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, r, 0], [1, r, 0], [-1, -r, 0], [1, -r, 0],
            [0, -1, r], [0, 1, r], [0, -1, -r], [0, 1, -r],
            [r, 0, -1], [r, 0, 1], [-r, 0, -1], [-r, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int32,
    )
    return verts, faces


def build_icosphere(subdiv: int) -> SphereTemplate:
    """Subdivide the regular icosahedron `subdiv` times and project to the unit sphere."""
    if subdiv < 0:
        raise SubdivTooLarge(f"subdiv must be >= 0, got {subdiv}")
    if subdiv > MAX_SUBDIV:
        raise SubdivTooLarge(f"subdiv {subdiv} above the supported maximum {MAX_SUBDIV}")

    verts, faces = _icosahedron()
    verts = verts / np.linalg.norm(verts, axis=1, keepdims=True)

    for _ in range(subdiv):
        vert_list = list(verts)
        midpoint: dict[tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            got = midpoint.get(key)
            if got is not None:
                return got
            p = vert_list[a] + vert_list[b]
            p = p / np.linalg.norm(p)
            vert_list.append(p)
            idx = len(vert_list) - 1
            midpoint[key] = idx
            return idx

        new_faces = np.empty((len(faces) * 4, 3), dtype=np.int32)
        for i, (a, b, c) in enumerate(faces):
            ab = mid(int(a), int(b))
            bc = mid(int(b), int(c))
            ca = mid(int(c), int(a))
            new_faces[4 * i + 0] = (a, ab, ca)
            new_faces[4 * i + 1] = (b, bc, ab)
            new_faces[4 * i + 2] = (c, ca, bc)
            new_faces[4 * i + 3] = (ab, bc, ca)
        verts = np.asarray(vert_list)
        faces = new_faces

    nbr_sets: list[set] = [set() for _ in range(len(verts))]
    for a, b, c in faces:
        nbr_sets[a].update((int(b), int(c)))
        nbr_sets[b].update((int(a), int(c)))
        nbr_sets[c].update((int(a), int(b)))
    neighbors = tuple(np.array(sorted(s), dtype=np.int64) for s in nbr_sets)

    verts = np.ascontiguousarray(verts)
    verts.setflags(write=False)
    faces.setflags(write=False)
    return SphereTemplate(directions=verts, triangles=faces, neighbors=neighbors)


@dataclass(frozen=True)
class RayGrid:
    """Sampled node lattice: R rays x Z radial samples around a seed."""

    seed: np.ndarray  # (3,) world mm
    ray_count: int
    samples: int
    delta_mm: float
    positions: np.ndarray  # (R, Z, 3) world mm
    intensities: np.ndarray  # (R, Z) float64


def _lattice_hull(vol: Volume) -> tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(vol.origin, dtype=np.float64)
    hi = lo + (np.asarray(vol.dims, dtype=np.float64) - 1.0) * np.asarray(vol.spacing, dtype=np.float64)
    return lo, hi


def sample_rays(
    vol: Volume,
    seed,
    tmpl: SphereTemplate,
    samples: int,
    max_radius_mm: float,
) -> RayGrid:
    """Sample intensities at seed + (z+1)*delta*direction for every ray.

    Node z=0 sits one radial step off the seed, so the innermost graph
    layer is R distinct points rather than one shared point.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if max_radius_mm <= 0:
        raise ValueError(f"max_radius_mm must be positive, got {max_radius_mm}")
    seed = np.asarray(seed, dtype=np.float64).reshape(3)
    lo, hi = _lattice_hull(vol)
    if not ((seed > lo).all() and (seed < hi).all()):
        raise SeedOutsideVolume(
            f"seed outside volume: {tuple(seed)} not strictly inside bounds {tuple(lo)}..{tuple(hi)}"
        )

    delta = float(max_radius_mm) / float(samples)
    radii = (np.arange(samples, dtype=np.float64) + 1.0) * delta
    positions = seed[None, None, :] + radii[None, :, None] * tmpl.directions[:, None, :]
    intensities = sample_trilinear_many(vol, positions.reshape(-1, 3)).reshape(
        tmpl.ray_count, samples
    )
    positions.setflags(write=False)
    intensities.setflags(write=False)
    return RayGrid(
        seed=seed,
        ray_count=tmpl.ray_count,
        samples=samples,
        delta_mm=delta,
        positions=positions,
        intensities=intensities,
    )


def seed_world_from_index(vol: Volume, ijk) -> np.ndarray:
    """World position of a voxel-index seed (validates integer bounds)."""
    ijk = np.asarray(ijk)
    if ijk.shape != (3,):
        raise ValueError("seed index must be a triple")
    if (ijk < 0).any() or (ijk >= np.asarray(vol.dims)).any():
        raise SeedOutsideVolume(f"seed outside volume: index {tuple(int(v) for v in ijk)} not in dims {vol.dims}")
    return index_to_world(vol, ijk)
