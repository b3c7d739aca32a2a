from collections import deque

import numpy as np
import pytest

from raycut.errors import DegenerateMesh
from raycut.graph import CostGrid, build_graph, compute_costs, condition_costs
from raycut.maxflow import max_flow_bk
from raycut.surface import SegMesh, export_obj, extract_mesh, voxelize
from raycut.template import build_icosphere, sample_rays
from raycut.volume import Volume


def ball_mesh(center, radius: float, subdiv: int = 3) -> SegMesh:
    tmpl = build_icosphere(subdiv)
    verts = np.asarray(center, float)[None, :] + radius * tmpl.directions
    return SegMesh(vertices=verts, triangles=tmpl.triangles)


def star_mesh(rng, center, lo: float, hi: float, subdiv: int = 2) -> SegMesh:
    tmpl = build_icosphere(subdiv)
    radii = rng.uniform(lo, hi, tmpl.ray_count)
    verts = np.asarray(center, float)[None, :] + radii[:, None] * tmpl.directions
    return SegMesh(vertices=verts, triangles=tmpl.triangles)


def unit_volume(dims, origin=(0.0, 0.0, 0.0)) -> Volume:
    return Volume(dims=dims, spacing=(1.0, 1.0, 1.0), origin=origin,
                  data=np.zeros(dims, dtype=np.float64))


class TestExtractMesh:
    def test_constant_boundary_scales_template(self, sphere_clean_case):
        case = sphere_clean_case
        tmpl = build_icosphere(1)
        rays = sample_rays(case.volume, np.array(case.seed_index, float), tmpl, 20, 30.0)
        k = 9
        mesh = extract_mesh(np.full(tmpl.ray_count, k), rays, tmpl)
        radii = np.linalg.norm(mesh.vertices - rays.seed, axis=1)
        assert np.abs(radii - (k + 1) * rays.delta_mm).max() < 1e-9
        assert (mesh.triangles == tmpl.triangles).all()

    def test_topology_copy_subdiv0(self, sphere_clean_case):
        case = sphere_clean_case
        tmpl = build_icosphere(0)
        rays = sample_rays(case.volume, np.array(case.seed_index, float), tmpl, 10, 30.0)
        mesh = extract_mesh(np.zeros(12, dtype=np.int64), rays, tmpl)
        assert mesh.vertices.shape == (12, 3)
        assert mesh.triangles.shape == (20, 3)

    def test_step_phantom_boundary_radius(self, sphere_clean_case):
        case = sphere_clean_case
        tmpl = build_icosphere(2)
        rays = sample_rays(case.volume, np.array(case.seed_index, float), tmpl, 15, 30.0)
        costs = condition_costs(compute_costs(rays, 200.0))
        cut = max_flow_bk(build_graph(costs, tmpl, 1))
        mesh = extract_mesh(cut.boundary, rays, tmpl)
        radii = np.linalg.norm(mesh.vertices - rays.seed, axis=1)
        assert np.abs(radii - 20.0).max() <= rays.delta_mm + 1e-9

    def test_boundary_out_of_range(self, sphere_clean_case):
        case = sphere_clean_case
        tmpl = build_icosphere(0)
        rays = sample_rays(case.volume, np.array(case.seed_index, float), tmpl, 5, 20.0)
        with pytest.raises(ValueError):
            extract_mesh(np.full(12, 5), rays, tmpl)
        with pytest.raises(ValueError):
            extract_mesh(np.zeros(11, dtype=np.int64), rays, tmpl)

    def test_bad_triangle_index(self):
        with pytest.raises(ValueError):
            SegMesh(vertices=np.zeros((3, 3)), triangles=np.array([[0, 1, 5]], np.int32))


class TestVoxelize:
    def test_ball_volume_within_5pct(self):
        vol = unit_volume((40, 40, 40))
        mesh = ball_mesh((20.0, 20.0, 20.0), 10.0)
        mask = voxelize(mesh, vol)
        count = int(mask.data.sum())
        analytic = 4.0 / 3.0 * np.pi * 10.0**3
        assert abs(count - analytic) / analytic < 0.05

    def test_tiny_mesh_seed_forced(self):
        vol = unit_volume((21, 21, 21))
        center = (10.5, 10.5, 10.5)
        mesh = ball_mesh(center, 0.3, subdiv=1)
        assert int(voxelize(mesh, vol).data.sum()) == 0
        forced = voxelize(mesh, vol, seed_world=np.array(center))
        assert int(forced.data.sum()) == 1

    def test_translation_equivariance(self):
        rng = np.random.default_rng(3)
        shift = np.array([3.0, -2.0, 5.0])
        mesh = star_mesh(rng, (10.0, 10.0, 10.0), 5.0, 8.0)
        moved = SegMesh(vertices=mesh.vertices + shift, triangles=mesh.triangles)
        a = voxelize(mesh, unit_volume((21, 21, 21)))
        b = voxelize(moved, unit_volume((21, 21, 21), origin=tuple(shift)))
        assert (a.data == b.data).all()

    def test_scan_direction_invariance(self):
        # mirroring world x and flipping the mask axis turns the +x scan
        # into a -x scan of the original mesh
        rng = np.random.default_rng(4)
        dims = (25, 21, 21)
        mesh = star_mesh(rng, (12.0, 10.0, 10.0), 4.0, 9.0)
        mirrored = SegMesh(
            vertices=mesh.vertices * np.array([-1.0, 1.0, 1.0]),
            triangles=mesh.triangles,
        )
        a = voxelize(mesh, unit_volume(dims))
        b = voxelize(mirrored, unit_volume(dims, origin=(-(dims[0] - 1.0), 0.0, 0.0)))
        assert (a.data == b.data[::-1, :, :]).all()

    def test_anisotropic_spacing(self):
        vol = Volume(dims=(60, 40, 12), spacing=(0.5, 0.75, 3.0), origin=(0, 0, 0),
                     data=np.zeros((60, 40, 12)))
        mesh = ball_mesh((15.0, 15.0, 15.0), 9.0)
        mask = voxelize(mesh, vol)
        analytic = 4.0 / 3.0 * np.pi * 9.0**3
        measured = mask.data.sum() * 0.5 * 0.75 * 3.0
        assert abs(measured - analytic) / analytic < 0.12

    def test_geometry_copied(self):
        vol = Volume(dims=(10, 10, 10), spacing=(2, 2, 2), origin=(-5, 0, 0),
                     data=np.zeros((10, 10, 10)))
        mask = voxelize(ball_mesh((5.0, 9.0, 9.0), 4.0), vol)
        assert mask.dims == vol.dims
        assert mask.spacing == vol.spacing
        assert mask.origin == vol.origin
        assert mask.data.dtype == np.uint8

    def test_degenerate_all_same_point(self):
        tmpl = build_icosphere(0)
        verts = np.tile(np.array([5.0, 5.0, 5.0]), (12, 1))
        with pytest.raises(DegenerateMesh):
            voxelize(SegMesh(vertices=verts, triangles=tmpl.triangles),
                     unit_volume((11, 11, 11)))

    def test_degenerate_no_triangles(self):
        mesh = SegMesh(vertices=np.zeros((3, 3)), triangles=np.empty((0, 3), np.int32))
        with pytest.raises(DegenerateMesh):
            voxelize(mesh, unit_volume((5, 5, 5)))

    def test_single_6connected_component(self):
        # smooth radial field: the class of meshes the smoothness constraint
        # produces; unbounded per-edge radius jumps can pinch off thin
        # diagonal wedges whose voxel centers are not face-connected
        vol = unit_volume((31, 31, 31))
        seed = (15, 15, 15)
        tmpl = build_icosphere(3)
        d = tmpl.directions
        radii = 8.0 + 2.0 * d[:, 0] * d[:, 1] + 1.0 * d[:, 2]
        verts = np.array([15.0, 15.0, 15.0]) + radii[:, None] * d
        mesh = SegMesh(vertices=verts, triangles=tmpl.triangles)
        mask = voxelize(mesh, vol, seed_world=np.array([15.0, 15.0, 15.0]))
        data = mask.data
        assert data[seed] == 1
        seen = np.zeros_like(data, dtype=bool)
        q = deque([seed])
        seen[seed] = True
        dims = data.shape
        while q:
            i, j, k = q.popleft()
            for di, dj, dk in ((1, 0, 0), (-1, 0, 0), (0, 1, 0),
                               (0, -1, 0), (0, 0, 1), (0, 0, -1)):
                ni, nj, nk = i + di, j + dj, k + dk
                if (0 <= ni < dims[0] and 0 <= nj < dims[1] and 0 <= nk < dims[2]
                        and data[ni, nj, nk] and not seen[ni, nj, nk]):
                    seen[ni, nj, nk] = True
                    q.append((ni, nj, nk))
        assert seen.sum() == data.sum()


class TestExportObj:
    def test_icosahedron_line_counts(self, tmp_path):
        mesh = ball_mesh((0.0, 0.0, 0.0), 1.0, subdiv=0)
        path = tmp_path / "ico.obj"
        export_obj(mesh, path)
        lines = path.read_text().splitlines()
        assert sum(1 for ln in lines if ln.startswith("v ")) == 12
        assert sum(1 for ln in lines if ln.startswith("f ")) == 20

    def test_round_trip_precision(self, tmp_path):
        rng = np.random.default_rng(11)
        mesh = star_mesh(rng, (np.pi, np.e, np.sqrt(2.0)), 1.0, 2.0, subdiv=0)
        path = tmp_path / "mesh.obj"
        export_obj(mesh, path)
        verts = []
        faces = []
        for ln in path.read_text().splitlines():
            parts = ln.split()
            if parts and parts[0] == "v":
                verts.append([float(x) for x in parts[1:]])
            elif parts and parts[0] == "f":
                faces.append([int(x) - 1 for x in parts[1:]])
        verts = np.array(verts)
        assert verts.shape == mesh.vertices.shape
        rel = np.abs(verts - mesh.vertices) / np.maximum(np.abs(mesh.vertices), 1e-30)
        assert rel.max() < 1e-8
        assert (np.array(faces, np.int32) == mesh.triangles).all()

    def test_empty_path_raises(self):
        mesh = ball_mesh((0.0, 0.0, 0.0), 1.0, subdiv=0)
        with pytest.raises(OSError):
            export_obj(mesh, "")

    def test_missing_dir_raises(self, tmp_path):
        mesh = ball_mesh((0.0, 0.0, 0.0), 1.0, subdiv=0)
        with pytest.raises(OSError):
            export_obj(mesh, tmp_path / "nope" / "mesh.obj")
