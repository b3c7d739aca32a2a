"""Boundary indices -> closed triangle mesh -> binary voxel mask."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateMesh
from .template import RayGrid, SphereTemplate
from .volume import MaskVolume, Volume, world_to_index

# Ray origins are nudged off the voxel-center lattice by this fraction of a
# voxel so scanlines never hit mesh edges or vertices exactly.
_PARITY_SHIFT = 1e-6


@dataclass(frozen=True)
class SegMesh:
    """Closed triangle mesh; vertex r sits on ray r at its boundary sample."""

    vertices: np.ndarray  # (R, 3) float64, world mm
    triangles: np.ndarray  # (F, 3) int32

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int32))
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (R, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError(f"triangles must be (F, 3), got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)


def extract_mesh(boundary: np.ndarray, rays: RayGrid, tmpl: SphereTemplate) -> SegMesh:
    """Vertex r = the sample position of ray r at its boundary index."""
    b = np.asarray(boundary, dtype=np.int64)
    if b.shape != (rays.ray_count,):
        raise ValueError(f"boundary must have {rays.ray_count} entries, got {b.shape}")
    if (b < 0).any() or (b >= rays.samples).any():
        raise ValueError("boundary index out of range")
    verts = rays.positions[np.arange(rays.ray_count), b]
    return SegMesh(vertices=verts, triangles=tmpl.triangles)


def _triangle_areas(mesh: SegMesh) -> np.ndarray:
    a = mesh.vertices[mesh.triangles[:, 0]]
    b = mesh.vertices[mesh.triangles[:, 1]]
    c = mesh.vertices[mesh.triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def voxelize(mesh: SegMesh, vol: Volume, seed_world=None) -> MaskVolume:
    """Point-in-mesh parity test at every voxel center.

    Scanlines run along +x, one per (j, k) voxel row; a voxel center is
    inside when an odd number of triangle crossings lie strictly below its
    x coordinate. Ray origins are epsilon-shifted off the lattice so shared
    edges and vertices never produce double counts. The seed voxel, when
    given, is forced to 1 (the structure contains its own seed even when
    thinner than a voxel).
    """
    if len(mesh.triangles) == 0:
        raise DegenerateMesh("mesh has no triangles")
    areas = _triangle_areas(mesh)
    span = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
    diag2 = float(span @ span)
    if (areas <= 1e-12 * max(diag2, 1e-30)).any():
        raise DegenerateMesh("mesh contains zero-area triangles")

    nx, ny, nz = vol.dims
    sx, sy, sz = (float(s) for s in vol.spacing)
    ox, oy, oz = (float(o) for o in vol.origin)
    mask = np.zeros((nx, ny, nz), dtype=np.uint8)

    # Shifted scanline origins, one per (j, k) row.
    ys = oy + (np.arange(ny) + _PARITY_SHIFT) * sy
    zs = oz + (np.arange(nz) + _PARITY_SHIFT) * sz
    xc = ox + np.arange(nx) * sx

    tri = mesh.vertices[mesh.triangles]  # (F, 3, 3)
    row_hits: list[np.ndarray] = []
    x_hits: list[np.ndarray] = []
    for t in range(len(tri)):
        p0, p1, p2 = tri[t]
        den = (p1[1] - p0[1]) * (p2[2] - p0[2]) - (p2[1] - p0[1]) * (p1[2] - p0[2])
        if abs(den) < 1e-30:
            continue  # projection degenerate: ray runs parallel to this face
        ymin = min(p0[1], p1[1], p2[1])
        ymax = max(p0[1], p1[1], p2[1])
        zmin = min(p0[2], p1[2], p2[2])
        zmax = max(p0[2], p1[2], p2[2])
        j0 = int(np.searchsorted(ys, ymin, side="left"))
        j1 = int(np.searchsorted(ys, ymax, side="right"))
        k0 = int(np.searchsorted(zs, zmin, side="left"))
        k1 = int(np.searchsorted(zs, zmax, side="right"))
        if j0 >= j1 or k0 >= k1:
            continue
        py = ys[j0:j1][:, None]
        pz = zs[k0:k1][None, :]
        a = ((py - p0[1]) * (p2[2] - p0[2]) - (p2[1] - p0[1]) * (pz - p0[2])) / den
        b = ((p1[1] - p0[1]) * (pz - p0[2]) - (py - p0[1]) * (p1[2] - p0[2])) / den
        hit = (a >= 0.0) & (b >= 0.0) & (a + b <= 1.0)
        if not hit.any():
            continue
        jj, kk = np.nonzero(hit)
        x = p0[0] + a[hit] * (p1[0] - p0[0]) + b[hit] * (p2[0] - p0[0])
        row_hits.append((jj + j0) * nz + (kk + k0))
        x_hits.append(x)

    if row_hits:
        rows = np.concatenate(row_hits)
        xs = np.concatenate(x_hits)
        order = np.lexsort((xs, rows))
        rows = rows[order]
        xs = xs[order]
        starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
        ends = np.r_[starts[1:], len(rows)]
        for s0, s1 in zip(starts, ends):
            row = int(rows[s0])
            j, k = divmod(row, nz)
            seg = xs[s0:s1]
            for m in range(0, (s1 - s0) // 2 * 2, 2):
                i_from = int(np.searchsorted(xc, seg[m], side="right"))
                i_to = int(np.searchsorted(xc, seg[m + 1], side="right"))
                mask[i_from:i_to, j, k] = 1

    if seed_world is not None:
        idx = np.rint(world_to_index(vol, np.asarray(seed_world, dtype=np.float64)))
        i, j, k = (int(v) for v in idx)
        if 0 <= i < nx and 0 <= j < ny and 0 <= k < nz:
            mask[i, j, k] = 1
    return MaskVolume(dims=vol.dims, spacing=vol.spacing, origin=vol.origin, data=mask)


def export_obj(mesh: SegMesh, path) -> None:
    """Write Wavefront OBJ: one "v x y z" per vertex, 1-based "f a b c" faces."""
    lines = [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
